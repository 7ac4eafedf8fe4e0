#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace trajmatch {

using Point = std::vector<double>;

/// Dense symmetric matrix of pairwise distances with a zero diagonal.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    /// Takes ownership of a row-major n*n buffer and validates it
    /// (symmetric, zero diagonal, finite, non-negative). Throws InputError.
    DistanceMatrix(std::size_t n, std::vector<double> entries);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }
    const std::vector<double>& entries() const { return entries_; }

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
};

/// Euclidean distances between all pairs of points.
DistanceMatrix build_distance_matrix(std::span<const Point> points);

struct Matching {
    /// Pairs (i, j) with i < j, sorted by i.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double total_weight = 0.0;
};

/// Sum of d(i, j) over the pairs, accumulated in pair order. Both solvers
/// report their weight through this so that equal matchings compare equal
/// bit for bit.
double matching_weight(const DistanceMatrix& d,
                       std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Exact minimum-weight perfect matching on the complete graph described by
/// `d` (primal-dual blossom algorithm, O(n^3)). Deterministic for a given
/// entry order. Throws std::invalid_argument for odd or zero n.
Matching min_weight_perfect_matching(const DistanceMatrix& d);

/// Exhaustive enumeration of all (n-1)!! perfect matchings. Only for n <= 12.
Matching brute_force_matching(const DistanceMatrix& d);

inline constexpr std::size_t kBruteForceLimit = 12;

} // namespace trajmatch
