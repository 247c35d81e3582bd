#include "lockbom/sbom/purl.hpp"

#include "lockbom/error.hpp"

namespace lockbom::sbom {

namespace {

[[noreturn]] void bad_purl(std::string_view text, const std::string& why) {
    throw Error(ErrorCode::malformed_sbom,
                "malformed purl '" + std::string(text) + "': " + why);
}

bool needs_escape(char c) {
    return c == '%' || c == '@' || c == '?' || c == '#' || c == '&' || c == '=' ||
           c == ' ';
}

std::string escape(std::string_view s) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (needs_escape(c)) {
            out += '%';
            out += hex[static_cast<unsigned char>(c) >> 4];
            out += hex[static_cast<unsigned char>(c) & 0xF];
        } else {
            out += c;
        }
    }
    return out;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') {
        return c - '0';
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    if (c >= 'A' && c <= 'F') {
        return c - 'A' + 10;
    }
    return -1;
}

std::string unescape(std::string_view s, std::string_view whole) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '%') {
            out += s[i];
            continue;
        }
        if (i + 2 >= s.size()) {
            bad_purl(whole, "truncated percent escape");
        }
        const int hi = hex_digit(s[i + 1]);
        const int lo = hex_digit(s[i + 2]);
        if (hi < 0 || lo < 0) {
            bad_purl(whole, "invalid percent escape");
        }
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
    }
    return out;
}

} // namespace

std::string PackageUrl::to_string() const {
    std::string out = "pkg:";
    out += type;
    out += '/';
    if (!ns.empty()) {
        out += escape(ns);
        out += '/';
    }
    out += escape(name);
    out += '@';
    out += escape(version);
    if (!qualifiers.empty()) {
        out += '?';
        bool first = true;
        for (const auto& [key, value] : qualifiers) {
            if (!first) {
                out += '&';
            }
            first = false;
            out += escape(key);
            out += '=';
            out += escape(value);
        }
    }
    return out;
}

PackageUrl parse_purl(std::string_view text) {
    std::string_view rest = text;
    if (!rest.starts_with("pkg:")) {
        bad_purl(text, "missing pkg: scheme");
    }
    rest.remove_prefix(4);

    PackageUrl out;
    if (std::size_t q = rest.find('?'); q != std::string_view::npos) {
        std::string_view quals = rest.substr(q + 1);
        rest = rest.substr(0, q);
        while (!quals.empty()) {
            std::size_t amp = quals.find('&');
            std::string_view item = quals.substr(0, amp);
            quals = amp == std::string_view::npos ? std::string_view{}
                                                  : quals.substr(amp + 1);
            std::size_t eq = item.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                bad_purl(text, "qualifier without key=value form");
            }
            out.qualifiers[unescape(item.substr(0, eq), text)] =
                unescape(item.substr(eq + 1), text);
        }
    }

    std::size_t at = rest.rfind('@');
    if (at == std::string_view::npos || at + 1 == rest.size()) {
        bad_purl(text, "missing @version");
    }
    out.version = unescape(rest.substr(at + 1), text);
    rest = rest.substr(0, at);

    std::size_t first_slash = rest.find('/');
    if (first_slash == std::string_view::npos || first_slash == 0) {
        bad_purl(text, "missing type/name separator");
    }
    out.type = std::string(rest.substr(0, first_slash));
    rest = rest.substr(first_slash + 1);

    if (std::size_t last_slash = rest.rfind('/'); last_slash != std::string_view::npos) {
        out.ns = unescape(rest.substr(0, last_slash), text);
        rest = rest.substr(last_slash + 1);
    }
    if (rest.empty()) {
        bad_purl(text, "empty name");
    }
    out.name = unescape(rest, text);
    return out;
}

} // namespace lockbom::sbom
