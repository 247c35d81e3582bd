#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lockbom/ecosystem.hpp"

namespace lockbom {

// Where in the lock file a dependency was declared. Registry is the normal
// case; git/path cover Bundler's GIT and PATH sections.
enum class SourceSection {
    registry,
    git,
    path,
};

std::string_view to_string(SourceSection s);

// One exact (name, version) pair as written in a lock file.
struct Dependency {
    std::string name;
    std::string version;
    Ecosystem ecosystem = Ecosystem::rust_cargo;
    DependencyScope scope = DependencyScope::runtime;
    // Ruby platform suffix split off the version (e.g. "aarch64-linux-gnu").
    std::optional<std::string> platform_qualifier;
    SourceSection source_section = SourceSection::registry;

    friend bool operator==(const Dependency&, const Dependency&) = default;
};

// The ground-truth set G: deduplicated, ordered lexicographically by
// (name, version, platform_qualifier).
class DependencySet {
public:
    DependencySet() = default;
    DependencySet(Ecosystem eco, std::string source_path)
        : ecosystem_(eco), source_path_(std::move(source_path)) {}

    Ecosystem ecosystem() const { return ecosystem_; }
    const std::string& source_path() const { return source_path_; }
    // ref-qualified: iterating entries() of a temporary would dangle
    const std::vector<Dependency>& entries() const& { return entries_; }
    const std::vector<Dependency>& entries() const&& = delete;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    // Inserts keeping order; duplicate (name, version, platform) triples
    // are merged (dev scope never overrides runtime).
    void insert(Dependency dep);

    // One line per entry: "name\tversion[\tplatform]\tscope". Bit-equal
    // serializations mean equal sets.
    std::string canonical_string() const;

    friend bool operator==(const DependencySet&, const DependencySet&) = default;

private:
    Ecosystem ecosystem_ = Ecosystem::rust_cargo;
    std::string source_path_;
    std::vector<Dependency> entries_;
};

} // namespace lockbom
