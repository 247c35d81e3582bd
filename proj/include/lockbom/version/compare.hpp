#pragma once

#include <string_view>

#include "lockbom/ecosystem.hpp"

namespace lockbom::version {

enum class Order { less, equal, greater };

// Total order on exact version strings under the ecosystem's own scheme:
//   rust-cargo     semantic-versioning precedence; build metadata ignored
//   python-poetry  epoch / release tuple / pre / post / dev / local ordering
//   ruby-bundler   segment-wise mixed numeric/alphabetic, letters sort first
//   php-composer   semver precedence with 4-segment tolerance, "v" stripped
// Throws UnparsableVersion.
Order compare_versions(std::string_view x, std::string_view y, Ecosystem ecosystem);

// True when the string parses under the ecosystem's scheme.
bool version_parses(std::string_view v, Ecosystem ecosystem);

} // namespace lockbom::version
