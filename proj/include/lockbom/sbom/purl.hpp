#pragma once

#include <map>
#include <string>
#include <string_view>

#include "lockbom/ecosystem.hpp"

namespace lockbom::sbom {

// Package URL identity: pkg:TYPE[/NAMESPACE]/NAME@VERSION[?qualifiers],
// qualifiers sorted by key. Two PackageUrls are equal iff their canonical
// strings are equal.
struct PackageUrl {
    std::string type;      // cargo | pypi | gem | composer
    std::string ns;        // vendor segment (composer only)
    std::string name;      // canonical name
    std::string version;   // exact version
    std::map<std::string, std::string> qualifiers;

    std::string to_string() const;

    friend bool operator==(const PackageUrl& a, const PackageUrl& b) {
        return a.to_string() == b.to_string();
    }
    friend auto operator<=>(const PackageUrl& a, const PackageUrl& b) {
        return a.to_string() <=> b.to_string();
    }
};

// Parses a canonical purl string. Throws MalformedSbom on anything that
// does not match the canonical form.
PackageUrl parse_purl(std::string_view text);

} // namespace lockbom::sbom
