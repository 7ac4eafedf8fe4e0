#pragma once

#include "trajmatch/matching.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace trajmatch {

/// How zero-distance ties between the two samples are resolved.
///  - Neutral: whatever the exact solver returns for the pooled order.
///  - PreferCross: within-sample distances are inflated by a tiny epsilon so
///    that among optimal matchings one with more cross pairs is chosen.
enum class TieMode { Neutral, PreferCross };

TieMode parse_tie_mode(std::string_view text);
std::string_view to_string(TieMode mode);

struct CrossmatchStatistic {
    std::size_t a1 = 0; ///< X-Y pairs (crossmatches)
    std::size_t a0 = 0; ///< X-X pairs
    std::size_t a2 = 0; ///< Y-Y pairs
    /// Matching over the pooled indices: 0..m-1 are X, m..m+n-1 are Y.
    Matching matching;
};

/// Exact permutation null of the crossmatch count for sample sizes (m, n).
class NullDistribution {
public:
    NullDistribution(std::size_t m, std::size_t n);

    std::size_t m() const { return m_; }
    std::size_t n() const { return n_; }

    /// P(A1 = a1); zero outside the support.
    double pmf(std::size_t a1) const { return a1 < pmf_.size() ? pmf_[a1] : 0.0; }
    /// Lower tail P(A1 <= a1), clamped to [0, 1].
    double cdf(std::size_t a1) const;
    double expectation() const;
    /// Admissible a1 values in increasing order.
    std::vector<std::size_t> support() const;
    const std::vector<double>& probabilities() const { return pmf_; }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> pmf_; // indexed by a1 in [0, min(m, n)]
};

/// Computes the null distribution. Throws InputError on invalid sizes.
NullDistribution null_pmf(std::size_t m, std::size_t n);

/// Shared, thread-safe memoised null distributions keyed by (m, n).
std::shared_ptr<const NullDistribution> cached_null_pmf(std::size_t m, std::size_t n);

struct CrossmatchResult {
    std::size_t a1 = 0;
    std::size_t a0 = 0;
    std::size_t a2 = 0;
    double p_value = 1.0;
    double expected_a1 = 0.0;
    std::size_t m = 0;
    std::size_t n = 0;
};

CrossmatchStatistic crossmatch_statistic(std::span<const Point> xs, std::span<const Point> ys,
                                         TieMode tie_mode = TieMode::Neutral);

/// Lower-tail p-value of the observed crossmatch count under the null.
CrossmatchResult crossmatch_test(std::span<const Point> xs, std::span<const Point> ys,
                                 TieMode tie_mode = TieMode::Neutral);

/// Tie-breaking epsilon used by PreferCross: the smallest positive gap
/// between distinct distance values, times 1e-6.
double prefer_cross_epsilon(const DistanceMatrix& d);

} // namespace trajmatch
