#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lockbom/advisory/advisory.hpp"
#include "lockbom/reach/evidence.hpp"
#include "lockbom/scan/scanner.hpp"

namespace lockbom::reach {

// Directory basenames never searched: vendored dependencies, build output
// and virtual environments must not count as references.
std::vector<std::string> default_excluded_dirs();

struct SearchOptions {
    std::vector<std::string> excluded_dirs = default_excluded_dirs();
    bool include_tests = true; // false additionally skips test/tests/spec dirs
};

struct SearchResult {
    std::vector<ReachabilityEvidence> evidence; // sorted by (file, line)
    std::vector<std::string> warnings;          // unreadable files
};

// Word-boundary scan of the ecosystem's source files (plus its manifest
// files) under codebase_root. A symbol matches when it appears delimited
// by non-identifier characters; a module matches on import/use/require
// lines naming it.
SearchResult search_references(const std::filesystem::path& codebase_root,
                               const std::vector<advisory::SymbolRef>& symbols,
                               Ecosystem ecosystem,
                               const SearchOptions& options = {});

struct Verdict {
    Reachability status = Reachability::unknown;
    std::vector<ReachabilityEvidence> evidence; // non-empty iff reachable
};

// reachable on any evidence; unreachable when symbols were declared and
// nothing matched; unknown when the advisory names nothing searchable.
// Unknown findings are never pruned.
Verdict classify(const std::vector<advisory::SymbolRef>& symbols,
                 std::vector<ReachabilityEvidence> evidence);

struct PruneResult {
    scan::VulnReport report;               // unreachable findings dropped
    std::vector<scan::Finding> suppressed; // exactly the dropped findings
    scan::PruneStats stats;
};

// Annotates every finding with a verdict and drops exactly the
// unreachable ones. The input report is left untouched.
PruneResult prune(const scan::VulnReport& report,
                  const std::filesystem::path& codebase_root,
                  const SearchOptions& options = {});

} // namespace lockbom::reach
