#pragma once

#include <cstdint>
#include <numeric>
#include <string>

namespace lockbom::metrics {

// Exact non-negative rational on 64-bit counts. All metric values live in
// [0,1], so overflow is out of reach for any realistic corpus.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend bool operator==(const Rational&, const Rational&) = default;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// "97.5%" style: one decimal place, ties round up.
std::string percent1(const Rational& r);

// "100.00%" style: two decimal places, ties round up.
std::string percent2(const Rational& r);

// "11.32" style plain decimal, two places, ties round up.
std::string decimal2(const Rational& r);

} // namespace lockbom::metrics
