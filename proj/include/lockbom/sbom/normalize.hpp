#pragma once

#include <string>
#include <string_view>

#include "lockbom/ecosystem.hpp"

namespace lockbom::sbom {

// Canonical identity key for a package name. Python names are lowercased
// with runs of '-', '_' and '.' collapsed to a single '-' (the registry
// community rule); the other registries are case-sensitive, so their
// names pass through unchanged. Idempotent. Throws EmptyName.
std::string normalize_name(std::string_view raw, Ecosystem ecosystem);

} // namespace lockbom::sbom
