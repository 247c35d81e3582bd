#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "lockbom/dependency.hpp"
#include "lockbom/ecosystem.hpp"

namespace lockbom::lockfile {

enum class ManifestKind { project, lock };

std::string_view to_string(ManifestKind kind);

struct ManifestInfo {
    Ecosystem ecosystem;
    ManifestKind kind;
    std::filesystem::path path;

    friend bool operator==(const ManifestInfo&, const ManifestInfo&) = default;
};

// Recognized project and lock files in the root of `directory` only;
// subdirectories are never descended into. Sorted by path.
std::vector<ManifestInfo> detect_manifests(const std::filesystem::path& directory);

// Parses the full text of a lock file into the exact dependency set it
// pins. Strict: malformed stanzas abort the parse, recognized formats at
// an unsupported schema revision raise UnsupportedLockVersion. Supported
// baselines: Cargo.lock v3/v4, poetry.lock 2.x, composer.lock 2.x,
// Gemfile.lock written by Bundler 2.x.
DependencySet parse_lockfile(std::string_view content, Ecosystem ecosystem,
                             std::string source_path = {});

// Convenience wrapper: reads the file and records its path as provenance.
DependencySet parse_lockfile_at(const std::filesystem::path& lock_path,
                                Ecosystem ecosystem);

} // namespace lockbom::lockfile
