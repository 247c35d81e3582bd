#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lockbom/metrics/rational.hpp"

namespace lockbom::metrics {

// A set of (canonical name, version) pairs extracted from an SBOM or a
// lock file; the comparison unit for all metrics.
using Pair = std::pair<std::string, std::string>;
using PairSet = std::set<Pair>;

struct DiffResult {
    std::vector<Pair> left_only;
    std::vector<Pair> right_only;
    std::vector<Pair> overlap;
};

struct MetricsReport {
    std::optional<Rational> jaccard;
    std::optional<Rational> accuracy;
    std::size_t left_only = 0;
    std::size_t right_only = 0;
    std::size_t overlap = 0;
    std::optional<Rational> fpr;
    std::optional<Rational> prune_rate;
};

// |A∩B| / |A∪B|; undefined when both sets are empty.
std::optional<Rational> jaccard(const PairSet& a, const PairSet& b);

// |A∩G| / |G|; undefined when the ground truth G is empty.
std::optional<Rational> accuracy(const PairSet& a, const PairSet& g);

// (v_r − v_c) / v_r; undefined when v_r = 0. Throws CountInversion when
// more findings are confirmed than were reported.
std::optional<Rational> false_positive_rate(std::int64_t v_r, std::int64_t v_c);

// (before − after) / (before − confirmed): the fraction of false positives
// removed by pruning. Undefined when before = confirmed.
std::optional<Rational> prune_rate(std::int64_t before, std::int64_t after,
                                   std::int64_t confirmed);

// Three sorted disjoint lists partitioning A∪B.
DiffResult diff(const PairSet& a, const PairSet& b);

// Jaccard plus diff counts for (a, b); accuracy of a against the ground
// truth when one is supplied.
MetricsReport compare_sets(const PairSet& a, const PairSet& b,
                           const PairSet* ground_truth = nullptr);

std::string render_metrics_json(const MetricsReport& report);
std::string render_metrics_text(const MetricsReport& report);

} // namespace lockbom::metrics
