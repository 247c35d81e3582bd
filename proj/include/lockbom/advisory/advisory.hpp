#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lockbom/ecosystem.hpp"

namespace lockbom::advisory {

enum class Severity { unknown, low, medium, high, critical };

std::string_view to_string(Severity s);
std::optional<Severity> severity_from_string(std::string_view name);
// unknown < low < medium < high < critical, for gating comparisons
int severity_rank(Severity s);

struct VersionEvent {
    enum class Kind { introduced, fixed, last_affected };
    Kind kind = Kind::introduced;
    std::string version;

    friend bool operator==(const VersionEvent&, const VersionEvent&) = default;
};

// One affected interval: introduced is inclusive ("0" means "from the
// beginning"), fixed is exclusive, last_affected is inclusive, and a range
// with no terminator is open-ended. One interval per range; advisories
// with several intervals carry several ranges.
struct VersionRange {
    std::vector<VersionEvent> events;

    std::string to_string() const;

    friend bool operator==(const VersionRange&, const VersionRange&) = default;
};

// A vulnerable function or module named by an advisory.
struct SymbolRef {
    std::string module_path; // empty = no module scope
    std::string symbol;      // empty = module-only reference

    friend bool operator==(const SymbolRef&, const SymbolRef&) = default;
};

// Wire forms: "decode", "smallvec::SmallVec::insert_many", "yaml.load",
// "ActiveSupport::MessageVerifier#verify", "active_support::*" (module
// only). Throws MalformedAdvisory when nothing remains.
SymbolRef parse_symbol_ref(std::string_view text);

struct Advisory {
    std::string id;
    Ecosystem ecosystem = Ecosystem::rust_cargo;
    std::string package_name; // canonical
    std::vector<VersionRange> ranges;
    std::vector<SymbolRef> vulnerable_symbols;
    Severity severity = Severity::unknown;
    std::string summary;
};

// Immutable after load; lookup is total (missing key yields an empty list).
class AdvisoryDb {
public:
    void add(Advisory advisory);

    const std::vector<Advisory>& lookup(Ecosystem eco, std::string_view canonical_name) const;
    // Every advisory row, ordered by (ecosystem, package, id); the
    // brute-force test oracle iterates this.
    std::vector<const Advisory*> all() const;
    std::size_t size() const;

private:
    std::map<std::pair<Ecosystem, std::string>, std::vector<Advisory>> index_;
};

struct LoadOptions {
    bool fail_fast = true; // false: skip malformed files, collect warnings
};

struct LoadResult {
    AdvisoryDb db;
    std::vector<std::string> warnings;
};

// Loads every *.json advisory in the directory (sorted, so the result is
// independent of directory iteration order). Throws MalformedAdvisory on
// the first bad file under fail_fast, otherwise records it and moves on.
LoadResult load_advisories(const std::filesystem::path& directory,
                           const LoadOptions& options = {});

// True iff some range contains the version under the ecosystem's order.
bool version_affected(std::string_view version, const std::vector<VersionRange>& ranges,
                      Ecosystem ecosystem);
bool range_contains(std::string_view version, const VersionRange& range,
                    Ecosystem ecosystem);

} // namespace lockbom::advisory
