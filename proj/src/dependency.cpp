#include "lockbom/dependency.hpp"

#include <algorithm>
#include <tuple>

#include "lockbom/error.hpp"

namespace lockbom {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::malformed_lockfile: return "malformed_lockfile";
    case ErrorCode::unsupported_lock_version: return "unsupported_lock_version";
    case ErrorCode::not_a_directory: return "not_a_directory";
    case ErrorCode::permission_denied: return "permission_denied";
    case ErrorCode::path_not_found: return "path_not_found";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::empty_name: return "empty_name";
    case ErrorCode::malformed_sbom: return "malformed_sbom";
    case ErrorCode::missing_version: return "missing_version";
    case ErrorCode::malformed_advisory: return "malformed_advisory";
    case ErrorCode::unparsable_version: return "unparsable_version";
    case ErrorCode::count_inversion: return "count_inversion";
    case ErrorCode::tool_not_installed: return "tool_not_installed";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::unsupported_requirement_line: return "unsupported_requirement_line";
    case ErrorCode::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

std::string_view to_string(SourceSection s) {
    switch (s) {
    case SourceSection::registry: return "registry";
    case SourceSection::git: return "git";
    case SourceSection::path: return "path";
    }
    return "registry";
}

namespace {

auto order_key(const Dependency& d) {
    static const std::string empty;
    return std::tie(d.name, d.version,
                    d.platform_qualifier ? *d.platform_qualifier : empty);
}

} // namespace

void DependencySet::insert(Dependency dep) {
    auto pos = std::lower_bound(entries_.begin(), entries_.end(), dep,
                                [](const Dependency& a, const Dependency& b) {
                                    return order_key(a) < order_key(b);
                                });
    if (pos != entries_.end() && order_key(*pos) == order_key(dep)) {
        if (pos->scope == DependencyScope::dev && dep.scope == DependencyScope::runtime) {
            pos->scope = DependencyScope::runtime;
        }
        return;
    }
    entries_.insert(pos, std::move(dep));
}

std::string DependencySet::canonical_string() const {
    std::string out;
    for (const Dependency& d : entries_) {
        out += d.name;
        out += '\t';
        out += d.version;
        if (d.platform_qualifier) {
            out += '\t';
            out += *d.platform_qualifier;
        }
        out += '\t';
        out += to_string(d.scope);
        out += '\n';
    }
    return out;
}

} // namespace lockbom
