#include "lockbom/ecosystem.hpp"

namespace lockbom {

std::string_view to_string(Ecosystem eco) {
    switch (eco) {
    case Ecosystem::python_poetry: return "python-poetry";
    case Ecosystem::rust_cargo: return "rust-cargo";
    case Ecosystem::ruby_bundler: return "ruby-bundler";
    case Ecosystem::php_composer: return "php-composer";
    }
    return "rust-cargo";
}

std::optional<Ecosystem> ecosystem_from_string(std::string_view name) {
    for (Ecosystem eco : all_ecosystems) {
        if (to_string(eco) == name) {
            return eco;
        }
    }
    return std::nullopt;
}

std::string_view lockfile_basename(Ecosystem eco) {
    switch (eco) {
    case Ecosystem::python_poetry: return "poetry.lock";
    case Ecosystem::rust_cargo: return "Cargo.lock";
    case Ecosystem::ruby_bundler: return "Gemfile.lock";
    case Ecosystem::php_composer: return "composer.lock";
    }
    return "Cargo.lock";
}

std::optional<Ecosystem> ecosystem_from_lockfile_name(std::string_view basename) {
    for (Ecosystem eco : all_ecosystems) {
        if (lockfile_basename(eco) == basename) {
            return eco;
        }
    }
    return std::nullopt;
}

std::string_view project_file_basename(Ecosystem eco) {
    switch (eco) {
    case Ecosystem::python_poetry: return "pyproject.toml";
    case Ecosystem::rust_cargo: return "Cargo.toml";
    case Ecosystem::ruby_bundler: return "Gemfile";
    case Ecosystem::php_composer: return "composer.json";
    }
    return "Cargo.toml";
}

std::optional<Ecosystem> ecosystem_from_project_file_name(std::string_view basename) {
    for (Ecosystem eco : all_ecosystems) {
        if (project_file_basename(eco) == basename) {
            return eco;
        }
    }
    return std::nullopt;
}

std::string_view purl_type(Ecosystem eco) {
    switch (eco) {
    case Ecosystem::python_poetry: return "pypi";
    case Ecosystem::rust_cargo: return "cargo";
    case Ecosystem::ruby_bundler: return "gem";
    case Ecosystem::php_composer: return "composer";
    }
    return "cargo";
}

std::optional<Ecosystem> ecosystem_from_purl_type(std::string_view type) {
    for (Ecosystem eco : all_ecosystems) {
        if (purl_type(eco) == type) {
            return eco;
        }
    }
    return std::nullopt;
}

std::string_view advisory_ecosystem_name(Ecosystem eco) {
    switch (eco) {
    case Ecosystem::python_poetry: return "PyPI";
    case Ecosystem::rust_cargo: return "crates.io";
    case Ecosystem::ruby_bundler: return "RubyGems";
    case Ecosystem::php_composer: return "Packagist";
    }
    return "crates.io";
}

std::optional<Ecosystem> ecosystem_from_advisory_name(std::string_view name) {
    for (Ecosystem eco : all_ecosystems) {
        if (advisory_ecosystem_name(eco) == name) {
            return eco;
        }
    }
    return std::nullopt;
}

std::string_view source_extension(Ecosystem eco) {
    switch (eco) {
    case Ecosystem::python_poetry: return ".py";
    case Ecosystem::rust_cargo: return ".rs";
    case Ecosystem::ruby_bundler: return ".rb";
    case Ecosystem::php_composer: return ".php";
    }
    return ".rs";
}

std::string_view to_string(DependencyScope scope) {
    switch (scope) {
    case DependencyScope::runtime: return "runtime";
    case DependencyScope::dev: return "dev";
    case DependencyScope::unknown: return "unknown";
    }
    return "unknown";
}

std::optional<DependencyScope> scope_from_string(std::string_view name) {
    if (name == "runtime") {
        return DependencyScope::runtime;
    }
    if (name == "dev") {
        return DependencyScope::dev;
    }
    if (name == "unknown") {
        return DependencyScope::unknown;
    }
    return std::nullopt;
}

} // namespace lockbom
