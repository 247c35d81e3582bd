#include "lockbom/sbom/document.hpp"

#include <algorithm>

#include <openssl/evp.h>

#include "lockbom/error.hpp"
#include "lockbom/sbom/normalize.hpp"

namespace lockbom::sbom {

namespace {

// Deterministic serial number: SHA-256 of the sorted component lines,
// rendered as a urn:uuid so standard CycloneDX consumers accept it.
std::string content_serial(const std::vector<Component>& components) {
    std::string material;
    for (const Component& c : components) {
        material += c.purl.to_string();
        material += '\t';
        material += to_string(c.scope);
        material += '\n';
    }

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (EVP_Digest(material.data(), material.size(), digest, &digest_len,
                   EVP_sha256(), nullptr) != 1 ||
        digest_len < 16) {
        throw Error(ErrorCode::io_error, "digest computation failed");
    }

    digest[6] = static_cast<unsigned char>((digest[6] & 0x0F) | 0x80);
    digest[8] = static_cast<unsigned char>((digest[8] & 0x3F) | 0x80);

    static const char* hex = "0123456789abcdef";
    std::string uuid;
    uuid.reserve(36);
    for (int i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) {
            uuid += '-';
        }
        uuid += hex[digest[i] >> 4];
        uuid += hex[digest[i] & 0xF];
    }
    return "urn:uuid:" + uuid;
}

} // namespace

void SbomDocument::finalize() {
    std::sort(components.begin(), components.end(),
              [](const Component& a, const Component& b) { return a.purl < b.purl; });
    // duplicates collapse; a runtime occurrence wins over dev
    std::vector<Component> unique;
    unique.reserve(components.size());
    for (Component& c : components) {
        if (!unique.empty() && unique.back().purl == c.purl) {
            if (unique.back().scope == DependencyScope::dev &&
                c.scope == DependencyScope::runtime) {
                unique.back().scope = DependencyScope::runtime;
            }
            continue;
        }
        unique.push_back(std::move(c));
    }
    components = std::move(unique);
    serial_id = content_serial(components);
}

SbomDocument build_sbom(const DependencySet& deps) {
    SbomDocument doc;
    doc.source_ecosystem = deps.ecosystem();
    doc.source_path = deps.source_path();
    doc.components.reserve(deps.size());

    for (const Dependency& dep : deps.entries()) {
        Component c;
        c.display_name = dep.name;
        c.scope = dep.scope;
        c.purl.type = std::string(purl_type(dep.ecosystem));
        c.purl.version = dep.version;

        std::string canonical = normalize_name(dep.name, dep.ecosystem);
        if (dep.ecosystem == Ecosystem::php_composer) {
            // vendor/package becomes namespace/name
            if (std::size_t slash = canonical.find('/'); slash != std::string::npos) {
                c.purl.ns = canonical.substr(0, slash);
                canonical = canonical.substr(slash + 1);
            }
        }
        c.purl.name = std::move(canonical);

        if (dep.platform_qualifier) {
            c.purl.qualifiers["platform"] = *dep.platform_qualifier;
        }
        doc.components.push_back(std::move(c));
    }

    doc.finalize();
    return doc;
}

} // namespace lockbom::sbom
