#include "lockbom/lockfile/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "lockbom/error.hpp"
#include "lockbom/lockfile/toml_lite.hpp"

namespace lockbom::lockfile {

std::string_view to_string(ManifestKind kind) {
    return kind == ManifestKind::project ? "project" : "lock";
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw Error(ErrorCode::malformed_lockfile, what);
}

[[noreturn]] void unsupported(const std::string& what) {
    throw Error(ErrorCode::unsupported_lock_version, what);
}

// Lock files pin exact versions; a constraint expression here means the
// input is not a lock file (or we misparsed it).
void validate_entry(const std::string& name, const std::string& version) {
    if (name.empty()) {
        malformed("package stanza with empty name");
    }
    if (version.empty()) {
        malformed("package '" + name + "' has no version");
    }
    for (char c : version) {
        if (c == '<' || c == '>' || c == '=' || c == '*' || c == '^' || c == '~' ||
            std::isspace(static_cast<unsigned char>(c))) {
            malformed("package '" + name + "' carries a constraint, not an exact version: '" +
                      version + "'");
        }
    }
}

std::string require_string(const TomlValue& table, std::string_view key,
                           const std::string& context) {
    const TomlValue* v = table.get(key);
    if (v == nullptr || !v->is_string()) {
        malformed(context + " lacks string field '" + std::string(key) + "'");
    }
    return v->str;
}

DependencySet parse_cargo_lock(std::string_view content, std::string source_path) {
    const TomlValue doc = parse_toml(content);

    const TomlValue* version = doc.get("version");
    if (version == nullptr) {
        unsupported("Cargo.lock without a version key (v1/v2 era) is not supported");
    }
    if (version->kind != TomlValue::Kind::integer ||
        (version->integer != 3 && version->integer != 4)) {
        unsupported("Cargo.lock format version " +
                    (version->kind == TomlValue::Kind::integer
                         ? std::to_string(version->integer)
                         : std::string("<non-integer>")) +
                    " is not supported (expected 3 or 4)");
    }

    DependencySet out(Ecosystem::rust_cargo, std::move(source_path));
    const TomlValue* packages = doc.get("package");
    if (packages == nullptr) {
        return out;
    }
    if (!packages->is_array()) {
        malformed("'package' is not an array of tables");
    }
    for (const TomlValue& pkg : packages->array) {
        if (!pkg.is_table()) {
            malformed("package stanza is not a table");
        }
        Dependency dep;
        dep.ecosystem = Ecosystem::rust_cargo;
        dep.name = require_string(pkg, "name", "package stanza");
        dep.version = require_string(pkg, "version", "package '" + dep.name + "'");
        const std::string source = pkg.get_string_or("source", "");
        if (source.starts_with("git+")) {
            dep.source_section = SourceSection::git;
        } else if (source.empty()) {
            // workspace members have no source entry
            dep.source_section = SourceSection::path;
        }
        validate_entry(dep.name, dep.version);
        out.insert(std::move(dep));
    }
    return out;
}

DependencySet parse_poetry_lock(std::string_view content, std::string source_path) {
    const TomlValue doc = parse_toml(content);

    const TomlValue* metadata = doc.get("metadata");
    const std::string lock_version =
        metadata != nullptr ? metadata->get_string_or("lock-version", "") : "";
    if (lock_version.empty()) {
        unsupported("poetry.lock without metadata.lock-version is not supported");
    }
    if (!lock_version.starts_with("2.")) {
        unsupported("poetry.lock lock-version " + lock_version +
                    " is not supported (expected 2.x)");
    }

    DependencySet out(Ecosystem::python_poetry, std::move(source_path));
    const TomlValue* packages = doc.get("package");
    if (packages == nullptr) {
        return out;
    }
    if (!packages->is_array()) {
        malformed("'package' is not an array of tables");
    }
    for (const TomlValue& pkg : packages->array) {
        if (!pkg.is_table()) {
            malformed("package stanza is not a table");
        }
        Dependency dep;
        dep.ecosystem = Ecosystem::python_poetry;
        dep.name = require_string(pkg, "name", "package stanza");
        dep.version = require_string(pkg, "version", "package '" + dep.name + "'");

        // Dev markers are retained, never dropped: category = "dev"
        // (older emitters) or a groups list without "main".
        if (pkg.get_string_or("category", "") == "dev") {
            dep.scope = DependencyScope::dev;
        } else if (const TomlValue* groups = pkg.get("groups"); groups != nullptr) {
            if (!groups->is_array()) {
                malformed("package '" + dep.name + "': groups is not an array");
            }
            bool has_main = false;
            for (const TomlValue& g : groups->array) {
                if (g.is_string() && g.str == "main") {
                    has_main = true;
                }
            }
            dep.scope = has_main ? DependencyScope::runtime : DependencyScope::dev;
        }

        if (const TomlValue* source = pkg.get("source"); source != nullptr) {
            const std::string type = source->get_string_or("type", "");
            if (type == "git") {
                dep.source_section = SourceSection::git;
            } else if (type == "directory" || type == "file") {
                dep.source_section = SourceSection::path;
            }
        }

        validate_entry(dep.name, dep.version);
        out.insert(std::move(dep));
    }
    return out;
}

DependencySet parse_composer_lock(std::string_view content, std::string source_path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
        malformed(std::string("composer.lock is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        malformed("composer.lock root is not an object");
    }

    const auto plugin_api = doc.value("plugin-api-version", std::string{});
    if (plugin_api.empty()) {
        unsupported("composer.lock without plugin-api-version is not supported");
    }
    if (!plugin_api.starts_with("2.")) {
        unsupported("composer.lock plugin-api-version " + plugin_api +
                    " is not supported (expected 2.x)");
    }

    DependencySet out(Ecosystem::php_composer, std::move(source_path));
    auto read_section = [&](const char* key, DependencyScope scope) {
        auto it = doc.find(key);
        if (it == doc.end()) {
            return;
        }
        if (!it->is_array()) {
            malformed(std::string("'") + key + "' is not an array");
        }
        for (const auto& pkg : *it) {
            if (!pkg.is_object() || !pkg.contains("name") || !pkg["name"].is_string()) {
                malformed(std::string("package entry in '") + key + "' lacks a name");
            }
            Dependency dep;
            dep.ecosystem = Ecosystem::php_composer;
            dep.scope = scope;
            dep.name = pkg["name"].get<std::string>();
            if (!pkg.contains("version") || !pkg["version"].is_string()) {
                malformed("package '" + dep.name + "' lacks a version");
            }
            dep.version = pkg["version"].get<std::string>();
            validate_entry(dep.name, dep.version);
            out.insert(std::move(dep));
        }
    };
    read_section("packages", DependencyScope::runtime);
    read_section("packages-dev", DependencyScope::dev);
    return out;
}

// Bundler's indentation-based format. Packages are exactly the 4-space
// indented lines under a "specs:" marker; 6-space lines are the gem's own
// constraints, not packages.
DependencySet parse_gemfile_lock(std::string_view content, std::string source_path) {
    DependencySet out(Ecosystem::ruby_bundler, std::move(source_path));

    enum class Section { none, source, platforms_or_other, bundled_with };
    Section section = Section::none;
    SourceSection source_kind = SourceSection::registry;
    bool in_specs = false;
    std::string bundler_version;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        std::string_view line = content.substr(
            pos, eol == std::string_view::npos ? content.size() - pos : eol - pos);
        if (eol == std::string_view::npos && line.empty() && pos >= content.size()) {
            break;
        }
        pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }

        std::size_t indent = line.find_first_not_of(' ');
        if (indent == std::string_view::npos) {
            continue;
        }

        if (indent == 0) {
            in_specs = false;
            if (line == "GEM") {
                section = Section::source;
                source_kind = SourceSection::registry;
            } else if (line == "GIT") {
                section = Section::source;
                source_kind = SourceSection::git;
            } else if (line == "PATH") {
                section = Section::source;
                source_kind = SourceSection::path;
            } else if (line == "BUNDLED WITH") {
                section = Section::bundled_with;
            } else {
                // PLATFORMS, DEPENDENCIES, RUBY VERSION, CHECKSUMS, ...
                section = Section::platforms_or_other;
            }
            continue;
        }

        if (section == Section::bundled_with) {
            if (bundler_version.empty()) {
                bundler_version = std::string(line.substr(indent));
            }
            continue;
        }
        if (section != Section::source) {
            continue;
        }

        if (indent == 2) {
            in_specs = line.substr(indent) == "specs:";
            continue;
        }
        if (!in_specs || indent != 4) {
            // deeper lines are the gem's own dependency constraints
            continue;
        }

        std::string_view entry = line.substr(4);
        std::size_t open = entry.find(" (");
        if (open == std::string_view::npos || entry.back() != ')' ||
            open + 2 >= entry.size() - 1) {
            malformed("Gemfile.lock line " + std::to_string(line_no) +
                      ": expected 'name (version)': '" + std::string(entry) + "'");
        }
        Dependency dep;
        dep.ecosystem = Ecosystem::ruby_bundler;
        dep.source_section = source_kind;
        dep.name = std::string(entry.substr(0, open));
        std::string version(entry.substr(open + 2, entry.size() - open - 3));

        // "2.0.2-aarch64-linux-gnu": everything after the first dash is the
        // platform, split off the version and never off the name.
        if (std::size_t dash = version.find('-'); dash != std::string::npos) {
            dep.platform_qualifier = version.substr(dash + 1);
            version.resize(dash);
            if (dep.platform_qualifier->empty()) {
                malformed("Gemfile.lock line " + std::to_string(line_no) +
                          ": empty platform suffix");
            }
        }
        dep.version = std::move(version);
        validate_entry(dep.name, dep.version);
        out.insert(std::move(dep));
    }

    if (bundler_version.empty()) {
        unsupported("Gemfile.lock without a BUNDLED WITH section is not supported");
    }
    if (!bundler_version.starts_with("2.")) {
        unsupported("Gemfile.lock from Bundler " + bundler_version +
                    " is not supported (expected 2.x)");
    }
    return out;
}

} // namespace

std::vector<ManifestInfo> detect_manifests(const std::filesystem::path& directory) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::file_status st = fs::status(directory, ec);
    if (ec || !fs::exists(st)) {
        throw Error(ErrorCode::not_a_directory,
                    "no such directory: " + directory.string());
    }
    if (!fs::is_directory(st)) {
        throw Error(ErrorCode::not_a_directory,
                    directory.string() + " is not a directory");
    }

    std::vector<ManifestInfo> out;
    fs::directory_iterator it(directory, ec);
    if (ec) {
        throw Error(ec == std::errc::permission_denied ? ErrorCode::permission_denied
                                                       : ErrorCode::io_error,
                    "cannot read directory " + directory.string() + ": " + ec.message());
    }
    for (const fs::directory_entry& entry : it) {
        if (!entry.is_regular_file(ec)) {
            continue;
        }
        const std::string basename = entry.path().filename().string();
        if (auto eco = ecosystem_from_project_file_name(basename); eco.has_value()) {
            out.push_back({*eco, ManifestKind::project, entry.path()});
        } else if (auto lock = ecosystem_from_lockfile_name(basename); lock.has_value()) {
            out.push_back({*lock, ManifestKind::lock, entry.path()});
        }
    }
    std::sort(out.begin(), out.end(), [](const ManifestInfo& a, const ManifestInfo& b) {
        return a.path < b.path;
    });
    return out;
}

DependencySet parse_lockfile(std::string_view content, Ecosystem ecosystem,
                             std::string source_path) {
    switch (ecosystem) {
    case Ecosystem::rust_cargo:
        return parse_cargo_lock(content, std::move(source_path));
    case Ecosystem::python_poetry:
        return parse_poetry_lock(content, std::move(source_path));
    case Ecosystem::php_composer:
        return parse_composer_lock(content, std::move(source_path));
    case Ecosystem::ruby_bundler:
        return parse_gemfile_lock(content, std::move(source_path));
    }
    throw Error(ErrorCode::invalid_argument, "unknown ecosystem");
}

DependencySet parse_lockfile_at(const std::filesystem::path& lock_path,
                                Ecosystem ecosystem) {
    std::ifstream in(lock_path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::path_not_found, "cannot open " + lock_path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::io_error, "read failed for " + lock_path.string());
    }
    return parse_lockfile(buffer.str(), ecosystem, lock_path.string());
}

} // namespace lockbom::lockfile
