#include "lockbom/sbom/normalize.hpp"

#include <cctype>

#include "lockbom/error.hpp"

namespace lockbom::sbom {

std::string normalize_name(std::string_view raw, Ecosystem ecosystem) {
    if (raw.empty()) {
        throw Error(ErrorCode::empty_name, "package name is empty");
    }
    if (ecosystem != Ecosystem::python_poetry) {
        return std::string(raw);
    }
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        if (c == '-' || c == '_' || c == '.') {
            if (out.empty() || out.back() != '-') {
                out += '-';
            }
            continue;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

} // namespace lockbom::sbom
