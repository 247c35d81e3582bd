#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lockbom/advisory/advisory.hpp"
#include "lockbom/error.hpp"
#include "lockbom/lockfile/parsers.hpp"
#include "lockbom/lockgen/lockgen.hpp"
#include "lockbom/metrics/metrics.hpp"
#include "lockbom/reach/reachability.hpp"
#include "lockbom/scan/scanner.hpp"
#include "lockbom/sbom/cyclonedx.hpp"

namespace fs = std::filesystem;
using namespace lockbom;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_policy = 1;
constexpr int exit_error = 2;

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::path_not_found, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::io_error, "read failed for " + path.string());
    }
    return buffer.str();
}

void write_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot write " + out_path);
    }
    out << content;
}

Ecosystem resolve_ecosystem(const std::string& flag, const fs::path& lock_path) {
    if (flag != "auto") {
        const auto eco = ecosystem_from_string(flag);
        if (!eco.has_value()) {
            throw Error(ErrorCode::invalid_argument, "unknown ecosystem: " + flag);
        }
        return *eco;
    }
    const auto eco = ecosystem_from_lockfile_name(lock_path.filename().string());
    if (!eco.has_value()) {
        throw Error(ErrorCode::invalid_argument,
                    "cannot infer ecosystem from '" + lock_path.filename().string() +
                        "'; pass --ecosystem");
    }
    return *eco;
}

fs::path advisory_dir(const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv("LOCKBOM_DB"); env != nullptr && *env != '\0') {
        return env;
    }
    throw Error(ErrorCode::invalid_argument,
                "advisory database not set; pass --db or set LOCKBOM_DB");
}

std::chrono::seconds default_timeout() {
    if (const char* env = std::getenv("LOCKBOM_TIMEOUT"); env != nullptr && *env != '\0') {
        try {
            return std::chrono::seconds(std::stol(env));
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_argument,
                        std::string("LOCKBOM_TIMEOUT is not a number: ") + env);
        }
    }
    return std::chrono::seconds(300);
}

// ------------------------------------------------------------------ sbom

struct SbomArgs {
    std::string lock_path;
    std::string ecosystem = "auto";
    std::string out;
};

int cmd_sbom(const SbomArgs& args) {
    const Ecosystem eco = resolve_ecosystem(args.ecosystem, args.lock_path);
    const auto deps = lockfile::parse_lockfile(slurp(args.lock_path), eco, args.lock_path);
    write_output(sbom::emit_cyclonedx(sbom::build_sbom(deps)), args.out);
    return exit_ok;
}

// ------------------------------------------------------------------ diff

struct DiffArgs {
    std::string sbom_a;
    std::string sbom_b;
    std::string format = "text";
};

ordered_json pairs_json(const std::vector<metrics::Pair>& pairs) {
    ordered_json out = ordered_json::array();
    for (const auto& [name, version] : pairs) {
        out.push_back(name + "@" + version);
    }
    return out;
}

int cmd_diff(const DiffArgs& args) {
    const metrics::PairSet a = sbom::ingest_sbom(slurp(args.sbom_a));
    const metrics::PairSet b = sbom::ingest_sbom(slurp(args.sbom_b));
    const metrics::MetricsReport report = metrics::compare_sets(a, b);
    const metrics::DiffResult d = metrics::diff(a, b);
    const bool consistent = d.left_only.empty() && d.right_only.empty();

    if (args.format == "json") {
        ordered_json root;
        root["metrics"] = ordered_json::parse(metrics::render_metrics_json(report));
        root["consistent"] = consistent;
        root["left_only"] = pairs_json(d.left_only);
        root["right_only"] = pairs_json(d.right_only);
        std::cout << root.dump(2) << "\n";
    } else {
        std::cout << metrics::render_metrics_text(report);
        for (const auto& [name, version] : d.left_only) {
            std::cout << "  - " << name << "@" << version << "\n";
        }
        for (const auto& [name, version] : d.right_only) {
            std::cout << "  + " << name << "@" << version << "\n";
        }
    }
    return consistent ? exit_ok : exit_policy;
}

// ------------------------------------------------------------------ scan

struct ScanArgs {
    std::string sbom_path;
    std::string db;
    std::string codebase;
    std::string fail_on = "high";
    bool no_prune = false;
    bool no_dev = false;
    std::string format = "text";
    std::string out;
};

int cmd_scan(const ScanArgs& args) {
    const auto gate = advisory::severity_from_string(args.fail_on);
    if (!gate.has_value() || *gate == advisory::Severity::unknown) {
        throw Error(ErrorCode::invalid_argument,
                    "--fail-on expects low|medium|high|critical");
    }

    const sbom::SbomDocument doc = sbom::parse_sbom(slurp(args.sbom_path));
    const advisory::LoadResult db = advisory::load_advisories(advisory_dir(args.db));
    scan::VulnReport report =
        scan::scan(doc, db.db, {.include_dev = !args.no_dev});

    std::vector<scan::Finding> suppressed;
    scan::PruneStats stats;
    if (!args.codebase.empty() && !args.no_prune) {
        reach::PruneResult pruned = reach::prune(report, args.codebase);
        report = std::move(pruned.report);
        suppressed = std::move(pruned.suppressed);
        stats = pruned.stats;
    }

    write_output(args.format == "json"
                     ? scan::render_report_json(report, suppressed, stats)
                     : scan::render_report_text(report, suppressed, stats),
                 args.out);

    const int gate_rank = advisory::severity_rank(*gate);
    for (const scan::Finding& f : report.findings) {
        if (advisory::severity_rank(f.severity) >= gate_rank) {
            return exit_policy;
        }
    }
    return exit_ok;
}

// --------------------------------------------------------------- metrics

struct MetricsArgs {
    std::vector<std::string> sboms;
    std::string ground_truth;
    std::string ecosystem = "auto";
    std::string format = "text";
};

int cmd_metrics(const MetricsArgs& args) {
    const Ecosystem eco = resolve_ecosystem(args.ecosystem, args.ground_truth);
    const metrics::PairSet truth = sbom::pair_set_of(
        lockfile::parse_lockfile(slurp(args.ground_truth), eco, args.ground_truth));

    struct Row {
        std::string label;
        std::size_t tool_only;
        std::size_t truth_only;
        std::size_t overlap;
        std::optional<metrics::Rational> accuracy;
    };
    std::vector<Row> rows;
    std::vector<metrics::PairSet> sets;
    for (const std::string& path : args.sboms) {
        const metrics::PairSet pairs = sbom::ingest_sbom(slurp(path));
        const metrics::DiffResult d = metrics::diff(pairs, truth);
        rows.push_back({fs::path(path).filename().string(), d.left_only.size(),
                        d.right_only.size(), d.overlap.size(),
                        metrics::accuracy(pairs, truth)});
        sets.push_back(pairs);
    }
    std::optional<metrics::Rational> j;
    if (sets.size() == 2) {
        j = metrics::jaccard(sets[0], sets[1]);
    }

    if (args.format == "json") {
        ordered_json root;
        ordered_json table = ordered_json::array();
        for (const Row& row : rows) {
            table.push_back(
                {{"sbom", row.label},
                 {"tool_only", row.tool_only},
                 {"truth_only", row.truth_only},
                 {"overlap", row.overlap},
                 {"accuracy", row.accuracy.has_value()
                                  ? ordered_json(metrics::percent2(*row.accuracy))
                                  : ordered_json(nullptr)}});
        }
        root["ground_truth"] = fs::path(args.ground_truth).filename().string();
        root["rows"] = std::move(table);
        if (sets.size() == 2) {
            root["jaccard"] =
                j.has_value() ? ordered_json(j->to_double()) : ordered_json(nullptr);
        }
        std::cout << root.dump(2) << "\n";
    } else {
        std::cout << "sbom                      tool-only  truth-only  overlap  accuracy\n";
        for (const Row& row : rows) {
            std::ostringstream line;
            line << row.label;
            for (std::size_t i = row.label.size(); i < 26; ++i) {
                line << ' ';
            }
            auto pad = [&line](const std::string& s, std::size_t w) {
                line << s;
                for (std::size_t i = s.size(); i < w; ++i) {
                    line << ' ';
                }
            };
            pad(std::to_string(row.tool_only), 11);
            pad(std::to_string(row.truth_only), 12);
            pad(std::to_string(row.overlap), 9);
            line << (row.accuracy.has_value() ? metrics::percent2(*row.accuracy)
                                              : "undefined");
            std::cout << line.str() << "\n";
        }
        if (sets.size() == 2) {
            std::cout << "jaccard: ";
            if (j.has_value()) {
                std::cout << j->num() << "/" << j->den();
            } else {
                std::cout << "undefined";
            }
            std::cout << "\n";
        }
    }
    return exit_ok;
}

// --------------------------------------------------------------- lockgen

struct LockgenArgs {
    std::string project_dir;
    std::string ecosystem = "auto";
    bool refresh = false;
    long timeout = -1;
    std::string format = "text";
};

int cmd_lockgen(const LockgenArgs& args) {
    std::vector<Ecosystem> targets;
    if (args.ecosystem == "auto") {
        for (const lockfile::ManifestInfo& m : lockfile::detect_manifests(args.project_dir)) {
            if (m.kind == lockfile::ManifestKind::project) {
                targets.push_back(m.ecosystem);
            }
        }
        if (targets.empty()) {
            throw Error(ErrorCode::path_not_found,
                        "no recognized project files in " + args.project_dir);
        }
    } else {
        targets.push_back(resolve_ecosystem(args.ecosystem, ""));
    }

    lockgen::LockGenOptions options;
    options.refresh = args.refresh;
    options.timeout =
        args.timeout > 0 ? std::chrono::seconds(args.timeout) : default_timeout();

    lockgen::SystemCommandRunner runner;
    bool any_failed = false;
    ordered_json out_rows = ordered_json::array();
    for (Ecosystem eco : targets) {
        const lockgen::LockGenOutcome outcome =
            lockgen::generate_lockfile(args.project_dir, eco, runner, options);
        any_failed = any_failed || outcome.status == lockgen::LockGenStatus::failed;
        if (args.format == "json") {
            ordered_json row;
            row["ecosystem"] = to_string(eco);
            row["status"] = lockgen::to_string(outcome.status);
            row["lock_path"] =
                outcome.lock_path.has_value() ? outcome.lock_path->string() : "";
            row["diagnostic"] = outcome.diagnostic;
            out_rows.push_back(std::move(row));
        } else {
            std::cout << to_string(eco) << ": " << lockgen::to_string(outcome.status);
            if (outcome.lock_path.has_value()) {
                std::cout << " (" << outcome.lock_path->string() << ")";
            }
            std::cout << "\n";
            if (!outcome.diagnostic.empty()) {
                std::cout << "  " << outcome.diagnostic << "\n";
            }
        }
    }
    if (args.format == "json") {
        std::cout << out_rows.dump(2) << "\n";
    }
    return any_failed ? exit_policy : exit_ok;
}

// ------------------------------------------------------------- translate

struct TranslateArgs {
    std::string requirements_path;
    std::string out;
};

int cmd_translate(const TranslateArgs& args) {
    const lockgen::TranslatedManifest t =
        lockgen::translate_requirements(slurp(args.requirements_path));
    write_output(t.manifest_text, args.out);
    return exit_ok;
}

// ---------------------------------------------------------------- corpus

struct CorpusArgs {
    std::string config_path;
    int jobs = 1;
    std::string format = "text";
};

struct CorpusProjectResult {
    std::string path;
    std::string ecosystem;
    std::string lockgen_status;
    std::size_t components = 0;
    std::size_t findings = 0;
    std::size_t pruned = 0;
    std::size_t post_prune = 0;
    bool had_lock = false;
    bool had_project_file = false;
    std::string error;
    scan::VulnReport report;
};

int cmd_corpus(const CorpusArgs& args) {
    const fs::path config_path = args.config_path;
    nlohmann::json config;
    try {
        config = nlohmann::json::parse(slurp(config_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_argument,
                    "config is not valid JSON: " + std::string(e.what()));
    }
    const fs::path base = config_path.parent_path();
    auto resolve = [&base](const std::string& p) {
        const fs::path path = p;
        return path.is_absolute() ? path : base / path;
    };

    std::vector<std::string> project_dirs;
    for (const auto& p : config.value("projects", nlohmann::json::array())) {
        project_dirs.push_back(resolve(p.get<std::string>()).string());
    }
    std::sort(project_dirs.begin(), project_dirs.end());

    std::optional<advisory::LoadResult> db;
    if (config.contains("db")) {
        db = advisory::load_advisories(resolve(config["db"].get<std::string>()));
    } else if (std::getenv("LOCKBOM_DB") != nullptr) {
        db = advisory::load_advisories(advisory_dir(""));
    }

    reach::SearchOptions search_options;
    for (const auto& e : config.value("exclude", nlohmann::json::array())) {
        search_options.excluded_dirs.push_back(e.get<std::string>());
    }
    lockgen::LockGenOptions lock_options;
    lock_options.refresh = config.value("refresh", false);
    lock_options.timeout = config.contains("timeout_s")
                               ? std::chrono::seconds(config["timeout_s"].get<long>())
                               : default_timeout();

    std::vector<CorpusProjectResult> results(project_dirs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        lockgen::SystemCommandRunner runner;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= project_dirs.size()) {
                return;
            }
            CorpusProjectResult& r = results[i];
            r.path = project_dirs[i];
            try {
                const auto manifests = lockfile::detect_manifests(r.path);
                std::optional<Ecosystem> eco;
                for (const lockfile::ManifestInfo& m : manifests) {
                    if (!eco.has_value()) {
                        eco = m.ecosystem;
                    }
                    if (m.ecosystem == *eco) {
                        r.had_lock |= m.kind == lockfile::ManifestKind::lock;
                        r.had_project_file |= m.kind == lockfile::ManifestKind::project;
                    }
                }
                if (!eco.has_value()) {
                    r.error = "no recognized manifests";
                    continue;
                }
                r.ecosystem = to_string(*eco);

                fs::path lock_path = fs::path(r.path) / lockfile_basename(*eco);
                if (r.had_lock && !lock_options.refresh) {
                    r.lockgen_status = "already_present";
                } else if (r.had_project_file) {
                    const auto outcome =
                        lockgen::generate_lockfile(r.path, *eco, runner, lock_options);
                    r.lockgen_status = std::string(lockgen::to_string(outcome.status));
                    if (outcome.status == lockgen::LockGenStatus::failed) {
                        r.error = outcome.diagnostic;
                        continue;
                    }
                    lock_path = outcome.lock_path.value_or(lock_path);
                } else {
                    r.lockgen_status = "already_present";
                }

                const auto deps = lockfile::parse_lockfile_at(lock_path, *eco);
                const auto doc = sbom::build_sbom(deps);
                r.components = doc.components.size();
                if (db.has_value()) {
                    scan::VulnReport report = scan::scan(doc, db->db);
                    report.ecosystem = eco;
                    r.findings = report.findings.size();
                    const reach::PruneResult pruned =
                        reach::prune(report, r.path, search_options);
                    r.pruned = pruned.stats.dropped;
                    r.post_prune = pruned.stats.after;
                    // the summary table reports raw scanner behavior
                    r.report = std::move(report);
                }
            } catch (const Error& e) {
                r.error = e.what();
            }
        }
    };

    const int jobs = std::max(1, args.jobs);
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }

    // aggregation in sorted-path order, independent of worker scheduling
    std::map<std::string, std::map<std::string, std::size_t>> lockgen_table;
    std::vector<scan::VulnReport> reports;
    std::size_t total_before = 0;
    std::size_t total_after = 0;
    for (const CorpusProjectResult& r : results) {
        if (!r.lockgen_status.empty()) {
            lockgen_table[r.ecosystem][r.lockgen_status] += 1;
        }
        reports.push_back(r.report);
        total_before += r.findings;
        total_after += r.post_prune;
    }
    const scan::Summary summary = scan::summarize(reports);

    ordered_json root;
    ordered_json project_rows = ordered_json::array();
    for (const CorpusProjectResult& r : results) {
        ordered_json row;
        row["path"] = r.path;
        row["ecosystem"] = r.ecosystem;
        row["had_lock"] = r.had_lock;
        row["lockgen"] = r.lockgen_status;
        row["components"] = r.components;
        row["findings"] = r.findings;
        row["pruned"] = r.pruned;
        row["post_prune"] = r.post_prune;
        if (!r.error.empty()) {
            row["error"] = r.error;
        }
        project_rows.push_back(std::move(row));
    }
    root["projects"] = std::move(project_rows);

    ordered_json lockgen_json;
    for (const auto& [eco, counts] : lockgen_table) {
        ordered_json row;
        row["generated"] = counts.count("generated") ? counts.at("generated") : 0;
        row["already_present"] =
            counts.count("already_present") ? counts.at("already_present") : 0;
        row["failed"] = counts.count("failed") ? counts.at("failed") : 0;
        lockgen_json[eco] = std::move(row);
    }
    root["lockfile_generation"] = std::move(lockgen_json);
    root["scan_summary"] = nlohmann::ordered_json::parse(
        scan::render_summary_json(summary));
    root["reachability"] = {{"before", total_before},
                            {"after", total_after},
                            {"pruned", total_before - total_after}};

    if (args.format == "json") {
        std::cout << root.dump(2) << "\n";
    } else {
        for (const CorpusProjectResult& r : results) {
            std::cout << r.path << " [" << r.ecosystem << "] lock=" << r.lockgen_status
                      << " components=" << r.components << " findings=" << r.findings
                      << " post_prune=" << r.post_prune;
            if (!r.error.empty()) {
                std::cout << " error=" << r.error;
            }
            std::cout << "\n";
        }
        std::cout << scan::render_summary_text(summary);
        std::cout << "reachability: " << total_before << " -> " << total_after << " ("
                  << total_before - total_after << " pruned)\n";
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lock-file-first SBOM generation and vulnerability scanning"};
    app.require_subcommand(1);

    SbomArgs sbom_args;
    CLI::App* sbom_cmd = app.add_subcommand("sbom", "emit a CycloneDX SBOM from a lock file");
    sbom_cmd->add_option("lock_path", sbom_args.lock_path)->required();
    sbom_cmd->add_option("--ecosystem", sbom_args.ecosystem);
    sbom_cmd->add_option("--out", sbom_args.out);

    DiffArgs diff_args;
    CLI::App* diff_cmd = app.add_subcommand("diff", "compare two SBOMs; exit 1 unless identical");
    diff_cmd->add_option("sbom_a", diff_args.sbom_a)->required();
    diff_cmd->add_option("sbom_b", diff_args.sbom_b)->required();
    diff_cmd->add_option("--format", diff_args.format)
        ->check(CLI::IsMember({"text", "json"}));

    ScanArgs scan_args;
    CLI::App* scan_cmd = app.add_subcommand("scan", "match an SBOM against the advisory corpus");
    scan_cmd->add_option("sbom_path", scan_args.sbom_path)->required();
    scan_cmd->add_option("--db", scan_args.db);
    scan_cmd->add_option("--codebase", scan_args.codebase);
    scan_cmd->add_option("--fail-on", scan_args.fail_on);
    scan_cmd->add_flag("--no-prune", scan_args.no_prune);
    scan_cmd->add_flag("--no-dev", scan_args.no_dev);
    scan_cmd->add_option("--format", scan_args.format)
        ->check(CLI::IsMember({"text", "json"}));
    scan_cmd->add_option("--out", scan_args.out);

    MetricsArgs metrics_args;
    CLI::App* metrics_cmd = app.add_subcommand("metrics", "accuracy against lock-file ground truth");
    metrics_cmd->add_option("--sbom", metrics_args.sboms)->required()->expected(1, 2);
    metrics_cmd->add_option("--ground-truth", metrics_args.ground_truth)->required();
    metrics_cmd->add_option("--ecosystem", metrics_args.ecosystem);
    metrics_cmd->add_option("--format", metrics_args.format)
        ->check(CLI::IsMember({"text", "json"}));

    LockgenArgs lockgen_args;
    CLI::App* lockgen_cmd = app.add_subcommand("lockgen", "generate lock files via the ecosystem's package manager");
    lockgen_cmd->add_option("project_dir", lockgen_args.project_dir)->required();
    lockgen_cmd->add_option("--ecosystem", lockgen_args.ecosystem);
    lockgen_cmd->add_flag("--refresh", lockgen_args.refresh);
    lockgen_cmd->add_option("--timeout", lockgen_args.timeout);
    lockgen_cmd->add_option("--format", lockgen_args.format)
        ->check(CLI::IsMember({"text", "json"}));

    TranslateArgs translate_args;
    CLI::App* translate_cmd = app.add_subcommand("translate", "requirements.txt to a poetry-dialect manifest");
    translate_cmd->add_option("requirements_path", translate_args.requirements_path)
        ->required();
    translate_cmd->add_option("--out", translate_args.out);

    CorpusArgs corpus_args;
    CLI::App* corpus_cmd = app.add_subcommand("corpus", "run the pipeline over a configured project list");
    corpus_cmd->add_option("config_path", corpus_args.config_path)->required();
    corpus_cmd->add_option("--jobs", corpus_args.jobs)->check(CLI::PositiveNumber);
    corpus_cmd->add_option("--format", corpus_args.format)
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
        if (sbom_cmd->parsed()) {
            return cmd_sbom(sbom_args);
        }
        if (diff_cmd->parsed()) {
            return cmd_diff(diff_args);
        }
        if (scan_cmd->parsed()) {
            return cmd_scan(scan_args);
        }
        if (metrics_cmd->parsed()) {
            return cmd_metrics(metrics_args);
        }
        if (lockgen_cmd->parsed()) {
            return cmd_lockgen(lockgen_args);
        }
        if (translate_cmd->parsed()) {
            return cmd_translate(translate_args);
        }
        if (corpus_cmd->parsed()) {
            return cmd_corpus(corpus_args);
        }
        return exit_error;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    } catch (const Error& e) {
        std::cerr << "error_code=" << e.code_name() << "\n" << e.what() << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        std::cerr << "error_code=internal\n" << e.what() << "\n";
        return exit_error;
    }
}
