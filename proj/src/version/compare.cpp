#include "lockbom/version/compare.hpp"

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "lockbom/error.hpp"

namespace lockbom::version {

namespace {

[[noreturn]] void unparsable(std::string_view v, Ecosystem eco) {
    throw Error(ErrorCode::unparsable_version,
                "cannot parse '" + std::string(v) + "' as a " +
                    std::string(to_string(eco)) + " version");
}

bool is_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

std::int64_t to_number(std::string_view s) {
    std::int64_t out = 0;
    for (char c : s) {
        out = out * 10 + (c - '0');
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

int cmp(std::int64_t a, std::int64_t b) {
    return a < b ? -1 : a > b ? 1 : 0;
}

// ---------------------------------------------------------------- semver

struct SemverParts {
    std::vector<std::int64_t> release;
    std::vector<std::string_view> prerelease; // empty = final release
};

// semver prerelease identifiers: numeric < alphanumeric, numerics compare
// as numbers, alphanumerics bytewise, fewer identifiers sort first.
int compare_prerelease(const std::vector<std::string_view>& a,
                       const std::vector<std::string_view>& b) {
    if (a.empty() != b.empty()) {
        return a.empty() ? 1 : -1;
    }
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        const bool na = is_digits(a[i]);
        const bool nb = is_digits(b[i]);
        if (na && nb) {
            if (int c = cmp(to_number(a[i]), to_number(b[i])); c != 0) {
                return c;
            }
        } else if (na != nb) {
            return na ? -1 : 1;
        } else if (a[i] != b[i]) {
            return a[i] < b[i] ? -1 : 1;
        }
    }
    return cmp(static_cast<std::int64_t>(a.size()), static_cast<std::int64_t>(b.size()));
}

bool valid_identifier(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') {
            return false;
        }
    }
    return true;
}

// max_segments: 3 for cargo (exact), 4 for composer (1..4, padded).
SemverParts parse_semver(std::string_view v, Ecosystem eco, std::size_t min_segments,
                         std::size_t max_segments) {
    std::string_view rest = v;
    if (std::size_t plus = rest.find('+'); plus != std::string_view::npos) {
        rest = rest.substr(0, plus); // build metadata never participates
    }
    std::string_view pre;
    bool has_dash = false;
    if (std::size_t dash = rest.find('-'); dash != std::string_view::npos) {
        has_dash = true;
        pre = rest.substr(dash + 1);
        rest = rest.substr(0, dash);
    }

    SemverParts out;
    const auto segments = split(rest, '.');
    if (segments.size() < min_segments || segments.size() > max_segments) {
        unparsable(v, eco);
    }
    for (std::string_view seg : segments) {
        if (!is_digits(seg)) {
            unparsable(v, eco);
        }
        out.release.push_back(to_number(seg));
    }
    out.release.resize(max_segments, 0);

    if (has_dash) {
        if (pre.empty()) {
            unparsable(v, eco);
        }
        for (std::string_view ident : split(pre, '.')) {
            if (!valid_identifier(ident)) {
                unparsable(v, eco);
            }
            out.prerelease.push_back(ident);
        }
    }
    return out;
}

int compare_semver(std::string_view x, std::string_view y, Ecosystem eco,
                   std::size_t min_segments, std::size_t max_segments) {
    const SemverParts a = parse_semver(x, eco, min_segments, max_segments);
    const SemverParts b = parse_semver(y, eco, min_segments, max_segments);
    for (std::size_t i = 0; i < max_segments; ++i) {
        if (int c = cmp(a.release[i], b.release[i]); c != 0) {
            return c;
        }
    }
    return compare_prerelease(a.prerelease, b.prerelease);
}

// ---------------------------------------------------------------- pep440

struct PythonVersion {
    std::int64_t epoch = 0;
    std::vector<std::int64_t> release;
    // pre-release key: (-1, n) dev-only sentinel handled separately
    bool has_pre = false;
    int pre_rank = 0; // a=0 b=1 rc=2
    std::int64_t pre_n = 0;
    bool has_post = false;
    std::int64_t post_n = 0;
    bool has_dev = false;
    std::int64_t dev_n = 0;
    struct LocalSegment {
        bool numeric;
        std::int64_t num;
        std::string text;
    };
    std::vector<LocalSegment> local;
};

class PythonParser {
public:
    PythonParser(std::string_view input, std::string_view original)
        : s_(input), original_(original) {}

    PythonVersion parse() {
        PythonVersion out;
        if (!s_.empty() && (s_[0] == 'v')) {
            s_.remove_prefix(1);
        }

        std::string_view digits = take_digits();
        if (digits.empty()) {
            fail();
        }
        if (!s_.empty() && s_[0] == '!') {
            out.epoch = to_number(digits);
            s_.remove_prefix(1);
            digits = take_digits();
            if (digits.empty()) {
                fail();
            }
        }
        out.release.push_back(to_number(digits));
        while (!s_.empty() && s_[0] == '.') {
            // a dot may introduce a release segment or a post/dev word
            if (s_.size() < 2 || !std::isdigit(static_cast<unsigned char>(s_[1]))) {
                break;
            }
            s_.remove_prefix(1);
            out.release.push_back(to_number(take_digits()));
        }

        // pre segment
        if (auto word = peek_word({"alpha", "beta", "preview", "pre", "rc", "a", "b", "c"});
            !word.empty()) {
            consume_word(word);
            out.has_pre = true;
            out.pre_rank = (word == "a" || word == "alpha") ? 0
                           : (word == "b" || word == "beta") ? 1
                                                             : 2;
            out.pre_n = optional_number();
        }

        // post segment: ".post1", "-1", "rev", "r"
        if (!s_.empty() && s_[0] == '-' && s_.size() > 1 &&
            std::isdigit(static_cast<unsigned char>(s_[1]))) {
            s_.remove_prefix(1);
            out.has_post = true;
            out.post_n = to_number(take_digits());
        } else if (auto word = peek_word({"post", "rev", "r"}); !word.empty()) {
            consume_word(word);
            out.has_post = true;
            out.post_n = optional_number();
        }

        // dev segment
        if (auto word = peek_word({"dev"}); !word.empty()) {
            consume_word(word);
            out.has_dev = true;
            out.dev_n = optional_number();
        }

        // local segment
        if (!s_.empty() && s_[0] == '+') {
            s_.remove_prefix(1);
            if (s_.empty()) {
                fail();
            }
            std::string current;
            auto push = [&] {
                if (current.empty()) {
                    fail();
                }
                PythonVersion::LocalSegment seg;
                seg.numeric = is_digits(current);
                seg.num = seg.numeric ? to_number(current) : 0;
                seg.text = current;
                out.local.push_back(std::move(seg));
                current.clear();
            };
            for (char c : s_) {
                if (c == '.' || c == '-' || c == '_') {
                    push();
                } else if (std::isalnum(static_cast<unsigned char>(c))) {
                    current += static_cast<char>(
                        std::tolower(static_cast<unsigned char>(c)));
                } else {
                    fail();
                }
            }
            push();
            s_ = {};
        }

        if (!s_.empty()) {
            fail();
        }
        return out;
    }

private:
    [[noreturn]] void fail() { unparsable(original_, Ecosystem::python_poetry); }

    std::string_view take_digits() {
        std::size_t n = 0;
        while (n < s_.size() && std::isdigit(static_cast<unsigned char>(s_[n]))) {
            ++n;
        }
        std::string_view out = s_.substr(0, n);
        s_.remove_prefix(n);
        return out;
    }

    // candidate words must be ordered longest-first where one prefixes another
    std::string_view peek_word(std::initializer_list<std::string_view> words) {
        std::string_view body = s_;
        if (!body.empty() && (body[0] == '.' || body[0] == '-' || body[0] == '_')) {
            body.remove_prefix(1);
        }
        for (std::string_view w : words) {
            if (body.size() >= w.size() && body.substr(0, w.size()) == w) {
                // the word must not continue with another letter
                if (body.size() > w.size() &&
                    std::isalpha(static_cast<unsigned char>(body[w.size()]))) {
                    continue;
                }
                return w;
            }
        }
        return {};
    }

    void consume_word(std::string_view word) {
        if (!s_.empty() && (s_[0] == '.' || s_[0] == '-' || s_[0] == '_')) {
            s_.remove_prefix(1);
        }
        s_.remove_prefix(word.size());
    }

    std::int64_t optional_number() {
        if (!s_.empty() && (s_[0] == '.' || s_[0] == '-' || s_[0] == '_')) {
            if (s_.size() > 1 && std::isdigit(static_cast<unsigned char>(s_[1]))) {
                s_.remove_prefix(1);
            } else {
                return 0;
            }
        }
        std::string_view digits = take_digits();
        return digits.empty() ? 0 : to_number(digits);
    }

    std::string_view s_;
    std::string_view original_;
};

int compare_python(std::string_view x, std::string_view y) {
    std::string lx(x), ly(y);
    for (char& c : lx) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (char& c : ly) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    const PythonVersion a = PythonParser(lx, x).parse();
    const PythonVersion b = PythonParser(ly, y).parse();

    if (int c = cmp(a.epoch, b.epoch); c != 0) {
        return c;
    }

    // release tuples compare with trailing zeros stripped
    auto effective_len = [](const std::vector<std::int64_t>& r) {
        std::size_t n = r.size();
        while (n > 1 && r[n - 1] == 0) {
            --n;
        }
        return n;
    };
    const std::size_t la = effective_len(a.release);
    const std::size_t lb = effective_len(b.release);
    for (std::size_t i = 0; i < la && i < lb; ++i) {
        if (int c = cmp(a.release[i], b.release[i]); c != 0) {
            return c;
        }
    }
    if (la != lb) {
        return la < lb ? -1 : 1;
    }

    // pre key: dev-only releases sort below any pre-release, which sorts
    // below the final release
    auto pre_key = [](const PythonVersion& v) -> std::pair<std::int64_t, std::int64_t> {
        if (v.has_pre) {
            return {v.pre_rank, v.pre_n};
        }
        if (!v.has_post && v.has_dev) {
            return {-1000, 0};
        }
        return {1000, 0};
    };
    if (auto ka = pre_key(a), kb = pre_key(b); ka != kb) {
        return ka < kb ? -1 : 1;
    }

    const std::int64_t post_a = a.has_post ? a.post_n : -1;
    const std::int64_t post_b = b.has_post ? b.post_n : -1;
    if (int c = cmp(post_a, post_b); c != 0) {
        return c;
    }

    const std::int64_t dev_a = a.has_dev ? a.dev_n : INT64_MAX;
    const std::int64_t dev_b = b.has_dev ? b.dev_n : INT64_MAX;
    if (int c = cmp(dev_a, dev_b); c != 0) {
        return c;
    }

    // local: absent sorts first; numeric segments outrank alphanumeric ones
    const std::size_t n = std::max(a.local.size(), b.local.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= a.local.size()) {
            return -1;
        }
        if (i >= b.local.size()) {
            return 1;
        }
        const auto& sa = a.local[i];
        const auto& sb = b.local[i];
        if (sa.numeric != sb.numeric) {
            return sa.numeric ? 1 : -1;
        }
        if (sa.numeric) {
            if (int c = cmp(sa.num, sb.num); c != 0) {
                return c;
            }
        } else if (sa.text != sb.text) {
            return sa.text < sb.text ? -1 : 1;
        }
    }
    return 0;
}

// ------------------------------------------------------------------ gem

struct GemSegment {
    bool numeric;
    std::int64_t num;
    std::string text;
};

std::vector<GemSegment> parse_gem(std::string_view v) {
    // a dash reads as ".pre." the way rubygems canonicalizes it
    std::string expanded;
    expanded.reserve(v.size());
    for (char c : v) {
        if (c == '-') {
            expanded += ".pre.";
        } else {
            expanded += c;
        }
    }

    std::vector<GemSegment> out;
    std::string run;
    bool run_numeric = false;
    auto push = [&] {
        if (run.empty()) {
            return;
        }
        GemSegment seg;
        seg.numeric = run_numeric;
        seg.num = run_numeric ? to_number(run) : 0;
        seg.text = run;
        out.push_back(std::move(seg));
        run.clear();
    };
    bool any_char = false;
    for (char c : expanded) {
        if (c == '.') {
            push();
            continue;
        }
        const bool digit = std::isdigit(static_cast<unsigned char>(c));
        const bool alpha = std::isalpha(static_cast<unsigned char>(c));
        if (!digit && !alpha) {
            unparsable(v, Ecosystem::ruby_bundler);
        }
        any_char = true;
        if (!run.empty() && run_numeric != digit) {
            push();
        }
        run_numeric = digit;
        run += c;
    }
    push();
    if (!any_char || out.empty() || !out.front().numeric) {
        unparsable(v, Ecosystem::ruby_bundler);
    }
    return out;
}

int compare_gem(std::string_view x, std::string_view y) {
    const auto a = parse_gem(x);
    const auto b = parse_gem(y);
    const GemSegment zero{true, 0, "0"};
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const GemSegment& sa = i < a.size() ? a[i] : zero;
        const GemSegment& sb = i < b.size() ? b[i] : zero;
        if (sa.numeric && sb.numeric) {
            if (int c = cmp(sa.num, sb.num); c != 0) {
                return c;
            }
        } else if (sa.numeric != sb.numeric) {
            // alphabetic segments (pre-releases) order before numbers
            return sa.numeric ? 1 : -1;
        } else if (sa.text != sb.text) {
            return sa.text < sb.text ? -1 : 1;
        }
    }
    return 0;
}

// ------------------------------------------------------------- dispatch

int compare_impl(std::string_view x, std::string_view y, Ecosystem eco) {
    switch (eco) {
    case Ecosystem::rust_cargo:
        return compare_semver(x, y, eco, 3, 3);
    case Ecosystem::php_composer: {
        auto strip = [](std::string_view v) {
            if (!v.empty() && (v[0] == 'v' || v[0] == 'V')) {
                v.remove_prefix(1);
            }
            return v;
        };
        return compare_semver(strip(x), strip(y), eco, 1, 4);
    }
    case Ecosystem::python_poetry:
        return compare_python(x, y);
    case Ecosystem::ruby_bundler:
        return compare_gem(x, y);
    }
    throw Error(ErrorCode::invalid_argument, "unknown ecosystem");
}

} // namespace

Order compare_versions(std::string_view x, std::string_view y, Ecosystem ecosystem) {
    const int c = compare_impl(x, y, ecosystem);
    return c < 0 ? Order::less : c > 0 ? Order::greater : Order::equal;
}

bool version_parses(std::string_view v, Ecosystem ecosystem) {
    try {
        (void)compare_versions(v, v, ecosystem);
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace lockbom::version
