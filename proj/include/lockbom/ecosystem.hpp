#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace lockbom {

// The four strong-package-manager ecosystems this toolchain understands.
enum class Ecosystem {
    python_poetry,
    rust_cargo,
    ruby_bundler,
    php_composer,
};

inline constexpr Ecosystem all_ecosystems[] = {
    Ecosystem::python_poetry,
    Ecosystem::rust_cargo,
    Ecosystem::ruby_bundler,
    Ecosystem::php_composer,
};

// Canonical identifier used on CLI flags and in JSON output,
// e.g. "python-poetry".
std::string_view to_string(Ecosystem eco);
std::optional<Ecosystem> ecosystem_from_string(std::string_view name);

// Exactly one lock-file basename per ecosystem.
std::string_view lockfile_basename(Ecosystem eco);
std::optional<Ecosystem> ecosystem_from_lockfile_name(std::string_view basename);

// Developer-authored manifest basename (pyproject.toml, Cargo.toml, ...).
std::string_view project_file_basename(Ecosystem eco);
std::optional<Ecosystem> ecosystem_from_project_file_name(std::string_view basename);

// Package-URL type tag: cargo, pypi, gem, composer.
std::string_view purl_type(Ecosystem eco);
std::optional<Ecosystem> ecosystem_from_purl_type(std::string_view type);

// Ecosystem string used in advisory files: crates.io, PyPI, RubyGems, Packagist.
std::string_view advisory_ecosystem_name(Ecosystem eco);
std::optional<Ecosystem> ecosystem_from_advisory_name(std::string_view name);

// Source-file extensions searched by the reachability analysis (".py", ...).
std::string_view source_extension(Ecosystem eco);

enum class DependencyScope {
    runtime,
    dev,
    unknown,
};

std::string_view to_string(DependencyScope scope);
std::optional<DependencyScope> scope_from_string(std::string_view name);

} // namespace lockbom
