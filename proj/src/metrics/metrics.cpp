#include "lockbom/metrics/metrics.hpp"

#include <algorithm>
#include <iterator>

#include "lockbom/error.hpp"

namespace lockbom::metrics {

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) {
        throw Error(ErrorCode::invalid_argument, "rational with zero denominator");
    }
    if (num_ < 0 || den_ < 0) {
        throw Error(ErrorCode::invalid_argument, "negative rational");
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

namespace {

// Smallest integer k such that value >= (k - 1/2) / scale, i.e. round
// half-up of r*scale.
std::int64_t scaled_half_up(const Rational& r, std::int64_t scale) {
    return (2 * scale * r.num() + r.den()) / (2 * r.den());
}

std::string fixed_point(std::int64_t scaled, int places) {
    std::int64_t pow10 = 1;
    for (int i = 0; i < places; ++i) {
        pow10 *= 10;
    }
    std::string frac = std::to_string(scaled % pow10);
    frac.insert(frac.begin(), places - static_cast<int>(frac.size()), '0');
    return std::to_string(scaled / pow10) + "." + frac;
}

} // namespace

std::string percent1(const Rational& r) {
    return fixed_point(scaled_half_up(r, 1000), 1) + "%";
}

std::string percent2(const Rational& r) {
    return fixed_point(scaled_half_up(r, 10000), 2) + "%";
}

std::string decimal2(const Rational& r) {
    return fixed_point(scaled_half_up(r, 100), 2);
}

std::optional<Rational> jaccard(const PairSet& a, const PairSet& b) {
    if (a.empty() && b.empty()) {
        return std::nullopt;
    }
    std::vector<Pair> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(common));
    const std::int64_t inter = static_cast<std::int64_t>(common.size());
    const std::int64_t uni =
        static_cast<std::int64_t>(a.size() + b.size()) - inter;
    return Rational(inter, uni);
}

std::optional<Rational> accuracy(const PairSet& a, const PairSet& g) {
    if (g.empty()) {
        return std::nullopt;
    }
    std::vector<Pair> common;
    std::set_intersection(a.begin(), a.end(), g.begin(), g.end(),
                          std::back_inserter(common));
    return Rational(static_cast<std::int64_t>(common.size()),
                    static_cast<std::int64_t>(g.size()));
}

std::optional<Rational> false_positive_rate(std::int64_t v_r, std::int64_t v_c) {
    if (v_c > v_r) {
        throw Error(ErrorCode::count_inversion,
                    "confirmed count exceeds reported count");
    }
    if (v_r == 0) {
        return std::nullopt;
    }
    return Rational(v_r - v_c, v_r);
}

std::optional<Rational> prune_rate(std::int64_t before, std::int64_t after,
                                   std::int64_t confirmed) {
    if (confirmed > after || after > before) {
        throw Error(ErrorCode::count_inversion,
                    "prune counts must satisfy confirmed <= after <= before");
    }
    if (before == confirmed) {
        return std::nullopt;
    }
    return Rational(before - after, before - confirmed);
}

DiffResult diff(const PairSet& a, const PairSet& b) {
    DiffResult out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out.left_only));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                        std::back_inserter(out.right_only));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out.overlap));
    return out;
}

MetricsReport compare_sets(const PairSet& a, const PairSet& b,
                           const PairSet* ground_truth) {
    MetricsReport out;
    out.jaccard = jaccard(a, b);
    const DiffResult d = diff(a, b);
    out.left_only = d.left_only.size();
    out.right_only = d.right_only.size();
    out.overlap = d.overlap.size();
    if (ground_truth != nullptr) {
        out.accuracy = accuracy(a, *ground_truth);
    }
    return out;
}

namespace {

std::string rational_cell(const std::optional<Rational>& r) {
    return r.has_value() ? percent1(*r) : "undefined";
}

void append_field(std::string& json, const char* key,
                  const std::optional<Rational>& r, bool trailing_comma = true) {
    json += std::string("  \"") + key + "\": ";
    if (r.has_value()) {
        json += "\"" + percent1(*r) + "\"";
    } else {
        json += "null";
    }
    if (trailing_comma) {
        json += ",";
    }
    json += "\n";
}

} // namespace

std::string render_metrics_json(const MetricsReport& report) {
    std::string out = "{\n";
    append_field(out, "jaccard", report.jaccard);
    append_field(out, "accuracy", report.accuracy);
    out += "  \"left_only\": " + std::to_string(report.left_only) + ",\n";
    out += "  \"right_only\": " + std::to_string(report.right_only) + ",\n";
    out += "  \"overlap\": " + std::to_string(report.overlap) + ",\n";
    append_field(out, "fpr", report.fpr);
    append_field(out, "prune_rate", report.prune_rate, false);
    out += "}\n";
    return out;
}

std::string render_metrics_text(const MetricsReport& report) {
    std::string out;
    auto row = [&out](const char* label, const std::string& value) {
        std::string line = label;
        line.resize(12, ' ');
        out += line + value + "\n";
    };
    row("jaccard", rational_cell(report.jaccard));
    row("accuracy", rational_cell(report.accuracy));
    row("left_only", std::to_string(report.left_only));
    row("right_only", std::to_string(report.right_only));
    row("overlap", std::to_string(report.overlap));
    row("fpr", rational_cell(report.fpr));
    row("prune_rate", rational_cell(report.prune_rate));
    return out;
}

} // namespace lockbom::metrics
