#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lockbom/dependency.hpp"
#include "lockbom/sbom/purl.hpp"

namespace lockbom::sbom {

struct Component {
    PackageUrl purl;
    std::string display_name; // raw name as parsed
    DependencyScope scope = DependencyScope::unknown;
};

// Inventory document. Components are sorted by canonical purl string with
// no duplicates; serial_id is a pure function of that sorted list, so
// re-emission of the same set is byte-identical.
struct SbomDocument {
    std::string spec_label = "CycloneDX-1.5";
    std::string serial_id;                  // urn:uuid content hash
    std::vector<Component> components;
    std::optional<Ecosystem> source_ecosystem; // in-memory provenance
    std::string source_path;                   // in-memory provenance

    // Recomputes serial_id after components change; sorts and dedups.
    void finalize();
};

// One component per dependency; platform qualifiers become purl
// qualifiers, names are canonicalized.
SbomDocument build_sbom(const DependencySet& deps);

} // namespace lockbom::sbom
