#include "lockbom/sbom/cyclonedx.hpp"

#include <json.hpp>

#include "lockbom/error.hpp"
#include "lockbom/sbom/normalize.hpp"

namespace lockbom::sbom {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void bad_sbom(const std::string& why) {
    throw Error(ErrorCode::malformed_sbom, "malformed SBOM: " + why);
}

std::string_view cyclonedx_scope(DependencyScope scope) {
    switch (scope) {
    case DependencyScope::runtime: return "required";
    case DependencyScope::dev: return "optional";
    case DependencyScope::unknown: return "";
    }
    return "";
}

DependencyScope scope_from_cyclonedx(std::string_view s) {
    if (s == "required") {
        return DependencyScope::runtime;
    }
    if (s == "optional") {
        return DependencyScope::dev;
    }
    return DependencyScope::unknown;
}

// Syft-style gem versions carry the platform after the version
// ("2.0.2-aarch64-linux-gnu"); canonical identity keeps only the version.
std::string strip_gem_platform(std::string version) {
    if (std::size_t dash = version.find('-'); dash != std::string::npos) {
        version.resize(dash);
    }
    return version;
}

} // namespace

std::string emit_cyclonedx(const SbomDocument& doc) {
    ordered_json root;
    root["bomFormat"] = "CycloneDX";
    root["specVersion"] = "1.5";
    root["serialNumber"] = doc.serial_id;
    root["version"] = 1;

    ordered_json components = ordered_json::array();
    for (const Component& c : doc.components) {
        ordered_json item;
        item["type"] = "library";
        item["bom-ref"] = c.purl.to_string();
        item["name"] = c.display_name;
        item["version"] = c.purl.version;
        item["purl"] = c.purl.to_string();
        const std::string_view scope = cyclonedx_scope(c.scope);
        if (!scope.empty()) {
            item["scope"] = scope;
        }
        components.push_back(std::move(item));
    }
    root["components"] = std::move(components);

    return root.dump(2) + "\n";
}

SbomDocument parse_sbom(std::string_view content) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
        bad_sbom(std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        bad_sbom("root is not an object");
    }
    if (root.value("bomFormat", std::string{}) != "CycloneDX") {
        bad_sbom("bomFormat is not CycloneDX");
    }

    SbomDocument doc;
    const std::string spec_version = root.value("specVersion", std::string{"1.5"});
    doc.spec_label = "CycloneDX-" + spec_version;

    auto components = root.find("components");
    if (components != root.end() && !components->is_null()) {
        if (!components->is_array()) {
            bad_sbom("components is not an array");
        }
        for (const auto& item : *components) {
            if (!item.is_object()) {
                bad_sbom("component entry is not an object");
            }
            Component c;
            if (!item.contains("name") || !item["name"].is_string()) {
                bad_sbom("component without a name");
            }
            c.display_name = item["name"].get<std::string>();
            if (!item.contains("version") || !item["version"].is_string() ||
                item["version"].get<std::string>().empty()) {
                throw Error(ErrorCode::missing_version,
                            "component '" + c.display_name + "' has no version");
            }
            const std::string version = item["version"].get<std::string>();

            if (item.contains("purl") && item["purl"].is_string()) {
                c.purl = parse_purl(item["purl"].get<std::string>());
            } else {
                c.purl.type = "generic";
                c.purl.name = c.display_name;
                c.purl.version = version;
            }
            c.scope = scope_from_cyclonedx(item.value("scope", std::string{}));
            doc.components.push_back(std::move(c));
        }
    }

    doc.finalize();
    return doc;
}

metrics::PairSet pair_set_of(const SbomDocument& doc) {
    metrics::PairSet out;
    for (const Component& c : doc.components) {
        const auto eco = ecosystem_from_purl_type(c.purl.type);
        std::string name = c.display_name;
        if (eco.has_value()) {
            name = normalize_name(name, *eco);
        }
        std::string version = c.purl.version;
        if (eco == Ecosystem::ruby_bundler) {
            version = strip_gem_platform(std::move(version));
        }
        out.emplace(std::move(name), std::move(version));
    }
    return out;
}

metrics::PairSet ingest_sbom(std::string_view content) {
    return pair_set_of(parse_sbom(content));
}

metrics::PairSet pair_set_of(const DependencySet& deps) {
    metrics::PairSet out;
    for (const Dependency& d : deps.entries()) {
        out.emplace(normalize_name(d.name, d.ecosystem), d.version);
    }
    return out;
}

} // namespace lockbom::sbom
