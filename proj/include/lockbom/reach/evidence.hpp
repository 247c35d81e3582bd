#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace lockbom::reach {

enum class Reachability { unchecked, reachable, unreachable, unknown };

std::string_view to_string(Reachability r);

// One line of proof that a vulnerable symbol or module is referenced:
// re-reading (file, line) reproduces the token match.
struct ReachabilityEvidence {
    enum class Kind { symbol_reference, module_import };

    std::string file; // relative to the codebase root
    std::size_t line = 0; // 1-based
    std::string token;
    Kind kind = Kind::symbol_reference;

    friend auto operator<=>(const ReachabilityEvidence&,
                            const ReachabilityEvidence&) = default;
};

std::string_view to_string(ReachabilityEvidence::Kind k);

} // namespace lockbom::reach
