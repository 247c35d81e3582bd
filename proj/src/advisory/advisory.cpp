#include "lockbom/advisory/advisory.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lockbom/error.hpp"
#include "lockbom/sbom/normalize.hpp"
#include "lockbom/version/compare.hpp"

namespace lockbom::advisory {

std::string_view to_string(Severity s) {
    switch (s) {
    case Severity::unknown: return "unknown";
    case Severity::low: return "low";
    case Severity::medium: return "medium";
    case Severity::high: return "high";
    case Severity::critical: return "critical";
    }
    return "unknown";
}

std::optional<Severity> severity_from_string(std::string_view name) {
    std::string lower(name);
    for (char& c : lower) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "low") {
        return Severity::low;
    }
    if (lower == "medium" || lower == "moderate") {
        return Severity::medium;
    }
    if (lower == "high") {
        return Severity::high;
    }
    if (lower == "critical") {
        return Severity::critical;
    }
    if (lower == "unknown") {
        return Severity::unknown;
    }
    return std::nullopt;
}

int severity_rank(Severity s) {
    switch (s) {
    case Severity::unknown: return 0;
    case Severity::low: return 1;
    case Severity::medium: return 2;
    case Severity::high: return 3;
    case Severity::critical: return 4;
    }
    return 0;
}

std::string VersionRange::to_string() const {
    std::string out;
    for (const VersionEvent& e : events) {
        if (!out.empty()) {
            out += ", ";
        }
        switch (e.kind) {
        case VersionEvent::Kind::introduced: out += ">=" + e.version; break;
        case VersionEvent::Kind::fixed: out += "<" + e.version; break;
        case VersionEvent::Kind::last_affected: out += "<=" + e.version; break;
        }
    }
    return out.empty() ? "*" : out;
}

SymbolRef parse_symbol_ref(std::string_view text) {
    SymbolRef out;
    std::string_view rest = text;

    bool module_only = false;
    if (rest.ends_with("*")) {
        module_only = true;
        rest.remove_suffix(1);
        // trim the separator before the wildcard
        if (rest.ends_with("::")) {
            rest.remove_suffix(2);
        } else if (rest.ends_with(".") || rest.ends_with("#")) {
            rest.remove_suffix(1);
        }
    }

    auto split_at = [&](std::size_t pos, std::size_t sep_len) {
        out.module_path = std::string(rest.substr(0, pos));
        out.symbol = std::string(rest.substr(pos + sep_len));
    };

    if (module_only) {
        out.module_path = std::string(rest);
    } else if (std::size_t hash = rest.rfind('#'); hash != std::string_view::npos) {
        // ruby Class::Path#method: the method separator wins
        split_at(hash, 1);
    } else if (std::size_t pos = rest.rfind("::"); pos != std::string_view::npos) {
        split_at(pos, 2);
    } else if (std::size_t dot = rest.rfind('.'); dot != std::string_view::npos) {
        split_at(dot, 1);
    } else {
        out.symbol = std::string(rest);
    }

    if (out.module_path.empty() && out.symbol.empty()) {
        throw Error(ErrorCode::malformed_advisory,
                    "symbol reference '" + std::string(text) + "' names nothing");
    }
    return out;
}

void AdvisoryDb::add(Advisory advisory) {
    auto& bucket = index_[{advisory.ecosystem, advisory.package_name}];
    bucket.push_back(std::move(advisory));
    std::sort(bucket.begin(), bucket.end(),
              [](const Advisory& a, const Advisory& b) { return a.id < b.id; });
}

const std::vector<Advisory>& AdvisoryDb::lookup(Ecosystem eco,
                                                std::string_view canonical_name) const {
    static const std::vector<Advisory> empty;
    auto it = index_.find({eco, std::string(canonical_name)});
    return it == index_.end() ? empty : it->second;
}

std::vector<const Advisory*> AdvisoryDb::all() const {
    std::vector<const Advisory*> out;
    for (const auto& [key, bucket] : index_) {
        for (const Advisory& a : bucket) {
            out.push_back(&a);
        }
    }
    return out;
}

std::size_t AdvisoryDb::size() const {
    std::size_t n = 0;
    for (const auto& [key, bucket] : index_) {
        n += bucket.size();
    }
    return n;
}

namespace {

[[noreturn]] void bad_advisory(const std::filesystem::path& path, const std::string& why) {
    throw Error(ErrorCode::malformed_advisory, path.string() + ": " + why);
}

VersionRange parse_range(const nlohmann::json& range_json,
                         const std::filesystem::path& path) {
    auto events = range_json.find("events");
    if (events == range_json.end() || !events->is_array() || events->empty()) {
        bad_advisory(path, "range without events");
    }
    VersionRange out;
    int introduced = 0;
    int terminators = 0;
    for (const auto& event_json : *events) {
        if (!event_json.is_object() || event_json.size() != 1) {
            bad_advisory(path, "event must carry exactly one key");
        }
        VersionEvent event;
        const auto first = event_json.begin();
        const std::string& key = first.key();
        const nlohmann::json& value = first.value();
        if (!value.is_string() || value.get<std::string>().empty()) {
            bad_advisory(path, "event version must be a non-empty string");
        }
        event.version = value.get<std::string>();
        if (key == "introduced") {
            event.kind = VersionEvent::Kind::introduced;
            ++introduced;
        } else if (key == "fixed") {
            event.kind = VersionEvent::Kind::fixed;
            ++terminators;
        } else if (key == "last_affected") {
            event.kind = VersionEvent::Kind::last_affected;
            ++terminators;
        } else {
            bad_advisory(path, "unknown event kind '" + key + "'");
        }
        out.events.push_back(std::move(event));
    }
    if (introduced > 1 || terminators > 1) {
        bad_advisory(path, "a range holds one interval: at most one introduced "
                           "and one fixed/last_affected event");
    }
    return out;
}

std::vector<Advisory> parse_advisory_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        bad_advisory(path, "cannot open");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        bad_advisory(path, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        bad_advisory(path, "root is not an object");
    }

    const std::string id = doc.value("id", std::string{});
    if (id.empty() || id.find('-') == std::string::npos) {
        bad_advisory(path, "missing or malformed advisory id");
    }

    Severity severity = Severity::unknown;
    if (auto it = doc.find("severity"); it != doc.end() && it->is_string()) {
        const auto parsed = severity_from_string(it->get<std::string>());
        if (!parsed.has_value()) {
            bad_advisory(path, "unknown severity '" + it->get<std::string>() + "'");
        }
        severity = *parsed;
    } else if (auto db_specific = doc.find("database_specific");
               db_specific != doc.end() && db_specific->is_object()) {
        if (auto sev = db_specific->find("severity");
            sev != db_specific->end() && sev->is_string()) {
            severity = severity_from_string(sev->get<std::string>())
                           .value_or(Severity::unknown);
        }
    }

    auto affected = doc.find("affected");
    if (affected == doc.end() || !affected->is_array() || affected->empty()) {
        bad_advisory(path, "advisory lists no affected packages");
    }

    std::vector<Advisory> out;
    for (const auto& entry : *affected) {
        Advisory adv;
        adv.id = id;
        adv.severity = severity;
        adv.summary = doc.value("summary", std::string{});

        auto package = entry.find("package");
        if (package == entry.end() || !package->is_object()) {
            bad_advisory(path, "affected entry without package object");
        }
        const std::string eco_name = package->value("ecosystem", std::string{});
        const auto eco = ecosystem_from_advisory_name(eco_name);
        if (!eco.has_value()) {
            bad_advisory(path, "unknown ecosystem '" + eco_name + "'");
        }
        adv.ecosystem = *eco;
        const std::string raw_name = package->value("name", std::string{});
        if (raw_name.empty()) {
            bad_advisory(path, "affected package without a name");
        }
        adv.package_name = sbom::normalize_name(raw_name, adv.ecosystem);

        if (auto ranges = entry.find("ranges"); ranges != entry.end()) {
            if (!ranges->is_array()) {
                bad_advisory(path, "ranges is not an array");
            }
            for (const auto& range_json : *ranges) {
                adv.ranges.push_back(parse_range(range_json, path));
            }
        }
        if (adv.ranges.empty()) {
            bad_advisory(path, "affected entry without version ranges");
        }

        if (auto eco_specific = entry.find("ecosystem_specific");
            eco_specific != entry.end() && eco_specific->is_object()) {
            if (auto symbols = eco_specific->find("vulnerable_symbols");
                symbols != eco_specific->end()) {
                if (!symbols->is_array()) {
                    bad_advisory(path, "vulnerable_symbols is not an array");
                }
                for (const auto& sym : *symbols) {
                    if (!sym.is_string()) {
                        bad_advisory(path, "vulnerable_symbols entries must be strings");
                    }
                    adv.vulnerable_symbols.push_back(
                        parse_symbol_ref(sym.get<std::string>()));
                }
            }
        }
        out.push_back(std::move(adv));
    }
    return out;
}

} // namespace

LoadResult load_advisories(const std::filesystem::path& directory,
                           const LoadOptions& options) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(directory, ec)) {
        throw Error(ErrorCode::not_a_directory,
                    "advisory directory missing: " + directory.string());
    }

    std::vector<fs::path> files;
    for (const fs::directory_entry& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    LoadResult result;
    std::vector<std::string> seen_ids;
    for (const fs::path& file : files) {
        try {
            std::vector<Advisory> parsed = parse_advisory_file(file);
            const std::string& id = parsed.front().id;
            if (std::find(seen_ids.begin(), seen_ids.end(), id) != seen_ids.end()) {
                bad_advisory(file, "duplicate advisory id '" + id + "'");
            }
            seen_ids.push_back(id);
            for (Advisory& adv : parsed) {
                result.db.add(std::move(adv));
            }
        } catch (const Error& e) {
            if (options.fail_fast) {
                throw;
            }
            result.warnings.push_back(e.what());
        }
    }
    return result;
}

bool range_contains(std::string_view v, const VersionRange& range, Ecosystem eco) {
    using version::Order;
    // the "0" sentinel skips comparison, so reject unparsable versions
    // explicitly instead of matching them against open ranges
    if (!version::version_parses(v, eco)) {
        throw Error(ErrorCode::unparsable_version,
                    "cannot parse '" + std::string(v) + "' as a " +
                        std::string(to_string(eco)) + " version");
    }
    bool lower_ok = true; // no introduced event means "from the beginning"
    bool upper_ok = true; // no terminator means open-ended
    for (const VersionEvent& event : range.events) {
        switch (event.kind) {
        case VersionEvent::Kind::introduced:
            lower_ok = event.version == "0" ||
                       version::compare_versions(v, event.version, eco) != Order::less;
            break;
        case VersionEvent::Kind::fixed:
            upper_ok = version::compare_versions(v, event.version, eco) == Order::less;
            break;
        case VersionEvent::Kind::last_affected:
            upper_ok = version::compare_versions(v, event.version, eco) != Order::greater;
            break;
        }
    }
    return lower_ok && upper_ok;
}

bool version_affected(std::string_view version, const std::vector<VersionRange>& ranges,
                      Ecosystem ecosystem) {
    for (const VersionRange& range : ranges) {
        if (range_contains(version, range, ecosystem)) {
            return true;
        }
    }
    return false;
}

} // namespace lockbom::advisory
