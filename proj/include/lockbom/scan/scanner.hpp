#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lockbom/advisory/advisory.hpp"
#include "lockbom/reach/evidence.hpp"
#include "lockbom/sbom/document.hpp"

namespace lockbom::scan {

// One matched (component, advisory) pair.
struct Finding {
    std::string advisory_id;
    sbom::PackageUrl component;
    advisory::VersionRange matched_range;
    advisory::Severity severity = advisory::Severity::unknown;
    // carried from the advisory so pruning needs no db access
    std::vector<advisory::SymbolRef> symbols;
    reach::Reachability reachability = reach::Reachability::unchecked;
    std::vector<reach::ReachabilityEvidence> evidence;
};

struct SeverityCounts {
    std::size_t critical = 0;
    std::size_t high = 0;
    std::size_t medium = 0;
    std::size_t low = 0;
    std::size_t unknown = 0;
};

// Findings sorted by (component purl, advisory id); v_r is the list length.
struct VulnReport {
    std::string source_sbom; // serial id of the scanned document
    std::optional<Ecosystem> ecosystem;
    std::vector<Finding> findings;
    std::vector<std::string> warnings; // unparsable versions, unreadable files

    std::size_t reported_count() const { return findings.size(); }
    SeverityCounts severity_counts() const;
};

struct ScanOptions {
    bool include_dev = true;
};

// Package-level matching: ecosystems equal, canonical names equal,
// version inside an affected range. A component yields one finding per
// matching advisory.
VulnReport scan(const sbom::SbomDocument& doc, const advisory::AdvisoryDb& db,
                const ScanOptions& options = {});

// Filled in by the reachability stage.
struct PruneStats {
    std::size_t before = 0;
    std::size_t after = 0;
    std::size_t dropped = 0;
    bool ran = false;
};

// Stable-key-order JSON; suppressed findings stay visible for audit.
std::string render_report_json(const VulnReport& report,
                               const std::vector<Finding>& suppressed = {},
                               const PruneStats& stats = {});
std::string render_report_text(const VulnReport& report,
                               const std::vector<Finding>& suppressed = {},
                               const PruneStats& stats = {});

// Table-7-shaped aggregation across many reports: only reports with at
// least one finding count as vulnerable repositories.
struct SummaryRow {
    std::string label;
    std::size_t repos = 0;
    std::size_t vulns = 0;
};

struct Summary {
    std::vector<SummaryRow> rows; // per ecosystem, sorted by label
    SummaryRow total;
};

Summary summarize(const std::vector<VulnReport>& reports);
std::string render_summary_json(const Summary& summary);
std::string render_summary_text(const Summary& summary);

} // namespace lockbom::scan
