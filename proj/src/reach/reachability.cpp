#include "lockbom/reach/reachability.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "lockbom/error.hpp"

namespace lockbom::reach {

std::string_view to_string(Reachability r) {
    switch (r) {
    case Reachability::unchecked: return "unchecked";
    case Reachability::reachable: return "reachable";
    case Reachability::unreachable: return "unreachable";
    case Reachability::unknown: return "unknown";
    }
    return "unchecked";
}

std::string_view to_string(ReachabilityEvidence::Kind k) {
    return k == ReachabilityEvidence::Kind::symbol_reference ? "symbol_reference"
                                                             : "module_import";
}

std::vector<std::string> default_excluded_dirs() {
    return {".git",         "vendor",   "target", "node_modules", "__pycache__",
            "venv",         ".venv",    ".tox",   "site-packages", ".bundle",
            "virtualenv",   ".cargo",   "dist",   "build"};
}

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// token delimited by non-identifier characters on both sides
bool word_boundary_match(std::string_view line, std::string_view token) {
    std::size_t pos = 0;
    while ((pos = line.find(token, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || !is_ident_char(line[pos - 1]);
        const std::size_t end = pos + token.size();
        const bool right_ok = end >= line.size() || !is_ident_char(line[end]);
        if (left_ok && right_ok) {
            return true;
        }
        pos += 1;
    }
    return false;
}

constexpr std::string_view import_keywords[] = {
    "import", "from", "use", "require", "require_relative", "include", "extern",
};

bool looks_like_import_line(std::string_view line) {
    for (std::string_view kw : import_keywords) {
        if (word_boundary_match(line, kw)) {
            return true;
        }
    }
    return false;
}

bool searchable_file(const std::filesystem::path& p, Ecosystem eco) {
    const std::string basename = p.filename().string();
    if (basename == project_file_basename(eco) || basename == lockfile_basename(eco)) {
        return true;
    }
    return p.extension() == source_extension(eco);
}

struct NeedleSet {
    // distinct symbol tokens and module tokens to look for
    std::vector<std::string> symbols;
    std::vector<std::string> modules;
};

NeedleSet collect_needles(const std::vector<advisory::SymbolRef>& refs) {
    std::set<std::string> symbols;
    std::set<std::string> modules;
    for (const advisory::SymbolRef& ref : refs) {
        if (!ref.symbol.empty()) {
            symbols.insert(ref.symbol);
        }
        if (!ref.module_path.empty()) {
            modules.insert(ref.module_path);
        }
    }
    return {{symbols.begin(), symbols.end()}, {modules.begin(), modules.end()}};
}

} // namespace

SearchResult search_references(const std::filesystem::path& codebase_root,
                               const std::vector<advisory::SymbolRef>& symbols,
                               Ecosystem ecosystem, const SearchOptions& options) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(codebase_root, ec)) {
        throw Error(ErrorCode::path_not_found,
                    "codebase root missing: " + codebase_root.string());
    }

    std::set<std::string> excluded(options.excluded_dirs.begin(),
                                   options.excluded_dirs.end());
    if (!options.include_tests) {
        excluded.insert({"test", "tests", "spec", "specs"});
    }

    const NeedleSet needles = collect_needles(symbols);
    SearchResult result;
    if (needles.symbols.empty() && needles.modules.empty()) {
        return result;
    }

    std::set<ReachabilityEvidence> seen;
    fs::recursive_directory_iterator it(codebase_root, ec);
    if (ec) {
        throw Error(ErrorCode::path_not_found,
                    "cannot walk " + codebase_root.string() + ": " + ec.message());
    }
    for (auto end = fs::recursive_directory_iterator(); it != end; ++it) {
        const fs::directory_entry& entry = *it;
        if (entry.is_directory(ec)) {
            if (excluded.count(entry.path().filename().string()) > 0) {
                it.disable_recursion_pending();
            }
            continue;
        }
        if (!entry.is_regular_file(ec) || !searchable_file(entry.path(), ecosystem)) {
            continue;
        }

        std::ifstream in(entry.path(), std::ios::binary);
        if (!in) {
            result.warnings.push_back("unreadable: " + entry.path().string());
            continue;
        }
        const std::string rel =
            fs::relative(entry.path(), codebase_root, ec).generic_string();
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            for (const std::string& sym : needles.symbols) {
                if (word_boundary_match(line, sym)) {
                    seen.insert({rel, line_no, sym,
                                 ReachabilityEvidence::Kind::symbol_reference});
                }
            }
            if (!needles.modules.empty() && looks_like_import_line(line)) {
                for (const std::string& mod : needles.modules) {
                    if (word_boundary_match(line, mod)) {
                        seen.insert({rel, line_no, mod,
                                     ReachabilityEvidence::Kind::module_import});
                    }
                }
            }
        }
        if (in.bad()) {
            result.warnings.push_back("read error: " + entry.path().string());
        }
    }

    result.evidence.assign(seen.begin(), seen.end());
    std::sort(result.evidence.begin(), result.evidence.end(),
              [](const ReachabilityEvidence& a, const ReachabilityEvidence& b) {
                  if (a.file != b.file) {
                      return a.file < b.file;
                  }
                  if (a.line != b.line) {
                      return a.line < b.line;
                  }
                  return std::tie(a.token, a.kind) < std::tie(b.token, b.kind);
              });
    std::sort(result.warnings.begin(), result.warnings.end());
    return result;
}

Verdict classify(const std::vector<advisory::SymbolRef>& symbols,
                 std::vector<ReachabilityEvidence> evidence) {
    Verdict out;
    if (!evidence.empty()) {
        out.status = Reachability::reachable;
        out.evidence = std::move(evidence);
    } else if (symbols.empty()) {
        out.status = Reachability::unknown;
    } else {
        out.status = Reachability::unreachable;
    }
    return out;
}

PruneResult prune(const scan::VulnReport& report,
                  const std::filesystem::path& codebase_root,
                  const SearchOptions& options) {
    // one filesystem pass per ecosystem over the union of all symbols
    std::map<Ecosystem, std::vector<advisory::SymbolRef>> by_eco;
    for (const scan::Finding& f : report.findings) {
        const auto eco = ecosystem_from_purl_type(f.component.type);
        if (!eco.has_value()) {
            continue;
        }
        auto& bucket = by_eco[*eco];
        bucket.insert(bucket.end(), f.symbols.begin(), f.symbols.end());
    }

    std::map<Ecosystem, SearchResult> searched;
    PruneResult out;
    for (const auto& [eco, all_symbols] : by_eco) {
        searched[eco] = search_references(codebase_root, all_symbols, eco, options);
    }

    out.report.source_sbom = report.source_sbom;
    out.report.ecosystem = report.ecosystem;
    out.report.warnings = report.warnings;
    out.stats.before = report.findings.size();
    out.stats.ran = true;

    for (const scan::Finding& original : report.findings) {
        scan::Finding f = original;
        const auto eco = ecosystem_from_purl_type(f.component.type);
        std::vector<ReachabilityEvidence> mine;
        if (eco.has_value()) {
            const NeedleSet needles = collect_needles(f.symbols);
            for (const ReachabilityEvidence& e : searched[*eco].evidence) {
                const auto& pool =
                    e.kind == ReachabilityEvidence::Kind::symbol_reference
                        ? needles.symbols
                        : needles.modules;
                if (std::find(pool.begin(), pool.end(), e.token) != pool.end()) {
                    mine.push_back(e);
                }
            }
        }
        const Verdict verdict = classify(f.symbols, std::move(mine));
        f.reachability = verdict.status;
        f.evidence = verdict.evidence;
        if (verdict.status == Reachability::unreachable) {
            out.suppressed.push_back(std::move(f));
        } else {
            out.report.findings.push_back(std::move(f));
        }
    }
    for (const auto& [eco, sr] : searched) {
        out.report.warnings.insert(out.report.warnings.end(), sr.warnings.begin(),
                                   sr.warnings.end());
    }
    std::sort(out.report.warnings.begin(), out.report.warnings.end());

    out.stats.after = out.report.findings.size();
    out.stats.dropped = out.suppressed.size();
    return out;
}

} // namespace lockbom::reach
