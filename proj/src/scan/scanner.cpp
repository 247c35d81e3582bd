#include "lockbom/scan/scanner.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "lockbom/error.hpp"
#include "lockbom/metrics/rational.hpp"
#include "lockbom/version/compare.hpp"

namespace lockbom::scan {

using ordered_json = nlohmann::ordered_json;

SeverityCounts VulnReport::severity_counts() const {
    SeverityCounts out;
    for (const Finding& f : findings) {
        switch (f.severity) {
        case advisory::Severity::critical: ++out.critical; break;
        case advisory::Severity::high: ++out.high; break;
        case advisory::Severity::medium: ++out.medium; break;
        case advisory::Severity::low: ++out.low; break;
        case advisory::Severity::unknown: ++out.unknown; break;
        }
    }
    return out;
}

VulnReport scan(const sbom::SbomDocument& doc, const advisory::AdvisoryDb& db,
                const ScanOptions& options) {
    VulnReport report;
    report.source_sbom = doc.serial_id;
    report.ecosystem = doc.source_ecosystem;

    for (const sbom::Component& component : doc.components) {
        if (!options.include_dev && component.scope == DependencyScope::dev) {
            continue;
        }
        const auto eco = ecosystem_from_purl_type(component.purl.type);
        if (!eco.has_value()) {
            continue; // foreign purl types cannot match this corpus
        }
        if (!report.ecosystem.has_value()) {
            report.ecosystem = eco;
        }
        const std::string key = component.purl.ns.empty()
                                    ? component.purl.name
                                    : component.purl.ns + "/" + component.purl.name;
        const std::vector<advisory::Advisory>& candidates = db.lookup(*eco, key);
        if (candidates.empty()) {
            continue;
        }
        if (!version::version_parses(component.purl.version, *eco)) {
            report.warnings.push_back(component.purl.to_string() +
                                      ": version does not parse under the " +
                                      std::string(to_string(*eco)) +
                                      " scheme; advisories not evaluated");
            continue;
        }
        for (const advisory::Advisory& adv : candidates) {
            for (const advisory::VersionRange& range : adv.ranges) {
                try {
                    if (advisory::range_contains(component.purl.version, range, *eco)) {
                        Finding f;
                        f.advisory_id = adv.id;
                        f.component = component.purl;
                        f.matched_range = range;
                        f.severity = adv.severity;
                        f.symbols = adv.vulnerable_symbols;
                        report.findings.push_back(std::move(f));
                        break; // one finding per advisory
                    }
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::unparsable_version) {
                        throw;
                    }
                    // an event version we cannot parse: report, do not drop
                    report.warnings.push_back(component.purl.to_string() + " vs " +
                                              adv.id + ": " + e.what());
                }
            }
        }
    }

    std::sort(report.findings.begin(), report.findings.end(),
              [](const Finding& a, const Finding& b) {
                  const std::string pa = a.component.to_string();
                  const std::string pb = b.component.to_string();
                  return pa != pb ? pa < pb : a.advisory_id < b.advisory_id;
              });
    std::sort(report.warnings.begin(), report.warnings.end());
    return report;
}

namespace {

ordered_json finding_to_json(const Finding& f) {
    ordered_json out;
    out["advisory_id"] = f.advisory_id;
    out["purl"] = f.component.to_string();
    out["matched_range"] = f.matched_range.to_string();
    out["severity"] = advisory::to_string(f.severity);
    out["reachability"] = reach::to_string(f.reachability);
    ordered_json evidence = ordered_json::array();
    for (const reach::ReachabilityEvidence& e : f.evidence) {
        ordered_json row;
        row["file"] = e.file;
        row["line"] = e.line;
        row["token"] = e.token;
        row["kind"] = reach::to_string(e.kind);
        evidence.push_back(std::move(row));
    }
    out["evidence"] = std::move(evidence);
    return out;
}

ordered_json report_to_json(const VulnReport& report,
                            const std::vector<Finding>& suppressed,
                            const PruneStats& stats) {
    ordered_json root;
    root["source_sbom"] = report.source_sbom;
    if (report.ecosystem.has_value()) {
        root["ecosystem"] = to_string(*report.ecosystem);
    }
    const SeverityCounts counts = report.severity_counts();
    root["counts"] = {{"total", report.findings.size()},
                      {"critical", counts.critical},
                      {"high", counts.high},
                      {"medium", counts.medium},
                      {"low", counts.low},
                      {"unknown", counts.unknown}};
    ordered_json findings = ordered_json::array();
    for (const Finding& f : report.findings) {
        findings.push_back(finding_to_json(f));
    }
    root["findings"] = std::move(findings);

    if (stats.ran) {
        ordered_json rj;
        rj["before"] = stats.before;
        rj["after"] = stats.after;
        rj["pruned"] = stats.dropped;
        rj["prune_rate_pct"] =
            stats.before == 0
                ? "0.0%"
                : metrics::percent1(metrics::Rational(
                      static_cast<std::int64_t>(stats.dropped),
                      static_cast<std::int64_t>(stats.before)));
        root["reachability"] = std::move(rj);

        ordered_json sup = ordered_json::array();
        for (const Finding& f : suppressed) {
            sup.push_back(finding_to_json(f));
        }
        root["suppressed"] = std::move(sup);
    }
    root["warnings"] = report.warnings;
    return root;
}

} // namespace

std::string render_report_json(const VulnReport& report,
                               const std::vector<Finding>& suppressed,
                               const PruneStats& stats) {
    return report_to_json(report, suppressed, stats).dump(2) + "\n";
}

std::string render_report_text(const VulnReport& report,
                               const std::vector<Finding>& suppressed,
                               const PruneStats& stats) {
    std::ostringstream os;
    os << "findings: " << report.findings.size() << "\n";
    for (const Finding& f : report.findings) {
        os << "  " << f.component.to_string() << "  " << f.advisory_id << "  "
           << advisory::to_string(f.severity) << "  ("
           << reach::to_string(f.reachability) << ")\n";
        for (const reach::ReachabilityEvidence& e : f.evidence) {
            os << "      " << e.file << ":" << e.line << "  " << e.token << " ["
               << reach::to_string(e.kind) << "]\n";
        }
    }
    if (stats.ran) {
        os << "reachability: " << stats.before << " -> " << stats.after << " ("
           << stats.dropped << " pruned)\n";
        for (const Finding& f : suppressed) {
            os << "  suppressed: " << f.component.to_string() << "  " << f.advisory_id
               << "\n";
        }
    }
    for (const std::string& w : report.warnings) {
        os << "warning: " << w << "\n";
    }
    return os.str();
}

Summary summarize(const std::vector<VulnReport>& reports) {
    Summary out;
    std::map<std::string, SummaryRow> rows;
    for (const VulnReport& report : reports) {
        if (report.findings.empty()) {
            continue;
        }
        const std::string label =
            report.ecosystem.has_value() ? std::string(to_string(*report.ecosystem))
                                         : std::string("unknown");
        SummaryRow& row = rows[label];
        row.label = label;
        row.repos += 1;
        row.vulns += report.findings.size();
        out.total.repos += 1;
        out.total.vulns += report.findings.size();
    }
    out.total.label = "total";
    for (auto& [label, row] : rows) {
        out.rows.push_back(row);
    }
    return out;
}

namespace {

std::string average_of(const SummaryRow& row) {
    if (row.repos == 0) {
        return "0.00";
    }
    return metrics::decimal2(metrics::Rational(static_cast<std::int64_t>(row.vulns),
                                               static_cast<std::int64_t>(row.repos)));
}

} // namespace

std::string render_summary_json(const Summary& summary) {
    ordered_json root;
    ordered_json rows = ordered_json::array();
    for (const SummaryRow& row : summary.rows) {
        rows.push_back({{"ecosystem", row.label},
                        {"repos", row.repos},
                        {"vulns", row.vulns},
                        {"avg", average_of(row)}});
    }
    root["rows"] = std::move(rows);
    root["total"] = {{"repos", summary.total.repos},
                     {"vulns", summary.total.vulns},
                     {"avg", average_of(summary.total)}};
    return root.dump(2) + "\n";
}

std::string render_summary_text(const Summary& summary) {
    std::ostringstream os;
    os << "ecosystem        repos  vulns  avg\n";
    auto line = [&os](const SummaryRow& row, const std::string& avg) {
        os << row.label;
        for (std::size_t i = row.label.size(); i < 17; ++i) {
            os << ' ';
        }
        std::string repos = std::to_string(row.repos);
        std::string vulns = std::to_string(row.vulns);
        os << repos;
        for (std::size_t i = repos.size(); i < 7; ++i) {
            os << ' ';
        }
        os << vulns;
        for (std::size_t i = vulns.size(); i < 7; ++i) {
            os << ' ';
        }
        os << avg << "\n";
    };
    for (const SummaryRow& row : summary.rows) {
        line(row, average_of(row));
    }
    line(summary.total, average_of(summary.total));
    return os.str();
}

} // namespace lockbom::scan
