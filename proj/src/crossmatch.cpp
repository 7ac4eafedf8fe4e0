#include "trajmatch/crossmatch.hpp"

#include "trajmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>

namespace trajmatch {

TieMode parse_tie_mode(std::string_view text)
{
    if (text == "neutral")
        return TieMode::Neutral;
    if (text == "prefer-cross" || text == "prefer_cross")
        return TieMode::PreferCross;
    throw InputError("unknown tie mode '" + std::string(text) + "' (expected neutral or prefer-cross)");
}

std::string_view to_string(TieMode mode)
{
    return mode == TieMode::Neutral ? "neutral" : "prefer-cross";
}

NullDistribution::NullDistribution(std::size_t m, std::size_t n) : m_(m), n_(n)
{
    if (m == 0 || n == 0)
        throw InputError("null distribution needs m >= 1 and n >= 1");
    if ((m + n) % 2 != 0)
        throw InputError("null distribution needs m + n even (got m=" + std::to_string(m) +
                         ", n=" + std::to_string(n) + ")");

    const std::size_t total = m + n;
    const std::size_t pairs = total / 2;
    std::vector<double> log_fact(total + 1, 0.0);
    for (std::size_t k = 2; k <= total; ++k)
        log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));

    // Sum in (smaller, larger) order so that (m, n) and (n, m) agree bit for bit.
    const std::size_t lo = std::min(m, n);
    const std::size_t hi = std::max(m, n);
    const double log_labelings = log_fact[total] - log_fact[lo] - log_fact[hi];
    pmf_.assign(lo + 1, 0.0);
    for (std::size_t a1 = m % 2; a1 <= lo; a1 += 2) {
        const std::size_t a_lo = (lo - a1) / 2;
        const std::size_t a_hi = (hi - a1) / 2;
        double log_p = static_cast<double>(a1) * std::log(2.0) + log_fact[pairs] - log_labelings - log_fact[a_lo] -
                       log_fact[a1] - log_fact[a_hi];
        pmf_[a1] = std::exp(log_p);
    }
}

double NullDistribution::cdf(std::size_t a1) const
{
    const std::size_t top = pmf_.size() - 1;
    const std::size_t max_support = (top % 2 == m_ % 2) ? top : top - 1;
    if (a1 >= max_support)
        return 1.0;
    double acc = 0.0;
    for (std::size_t k = 0; k <= a1; ++k)
        acc += pmf_[k];
    return std::min(acc, 1.0);
}

double NullDistribution::expectation() const
{
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf_.size(); ++k)
        acc += static_cast<double>(k) * pmf_[k];
    return acc;
}

std::vector<std::size_t> NullDistribution::support() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = m_ % 2; k < pmf_.size(); k += 2)
        out.push_back(k);
    return out;
}

NullDistribution null_pmf(std::size_t m, std::size_t n)
{
    return NullDistribution(m, n);
}

std::shared_ptr<const NullDistribution> cached_null_pmf(std::size_t m, std::size_t n)
{
    static std::shared_mutex mutex;
    static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const NullDistribution>> cache;

    const auto key = std::make_pair(m, n);
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    auto dist = std::make_shared<const NullDistribution>(m, n);
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(key, std::move(dist));
    return it->second;
}

double prefer_cross_epsilon(const DistanceMatrix& d)
{
    std::vector<double> values;
    values.reserve(d.size() * (d.size() - 1) / 2 + 1);
    values.push_back(0.0);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j)
            values.push_back(d(i, j));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    double gap = 0.0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        double g = values[k] - values[k - 1];
        if (g > 0.0 && (gap == 0.0 || g < gap))
            gap = g;
    }
    if (gap == 0.0)
        gap = 1.0; // all distances zero
    return gap * 1e-6;
}

namespace {

void validate_samples(std::span<const Point> xs, std::span<const Point> ys)
{
    if (xs.empty() || ys.empty())
        throw InputError("crossmatch needs at least one point in each sample");
    if ((xs.size() + ys.size()) % 2 != 0)
        throw InputError("crossmatch needs an even pooled size (got " + std::to_string(xs.size()) + " + " +
                         std::to_string(ys.size()) + ")");
    const std::size_t dim = xs[0].size();
    for (const auto& sample : {xs, ys})
        for (const auto& p : sample)
            if (p.size() != dim)
                throw InputError("crossmatch: dimension mismatch between points (" + std::to_string(p.size()) +
                                 " vs " + std::to_string(dim) + ")");
}

bool lexicographically_less(std::span<const Point> a, std::span<const Point> b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

CrossmatchStatistic statistic_in_order(std::span<const Point> first, std::span<const Point> second, TieMode tie_mode,
                                       DistanceMatrix& pooled_out)
{
    const std::size_t m = first.size();
    std::vector<Point> pooled;
    pooled.reserve(first.size() + second.size());
    pooled.insert(pooled.end(), first.begin(), first.end());
    pooled.insert(pooled.end(), second.begin(), second.end());
    pooled_out = build_distance_matrix(pooled);
    const DistanceMatrix& d = pooled_out;

    Matching matching = min_weight_perfect_matching(d);
    if (tie_mode == TieMode::PreferCross) {
        const double eps = prefer_cross_epsilon(d);
        const std::size_t total = d.size();
        std::vector<double> perturbed = d.entries();
        for (std::size_t i = 0; i < total; ++i)
            for (std::size_t j = 0; j < total; ++j)
                if (i != j && ((i < m) == (j < m)))
                    perturbed[i * total + j] += eps;
        Matching candidate = min_weight_perfect_matching(DistanceMatrix(total, std::move(perturbed)));
        // Keep the cross-preferring matching only if it is still optimal for
        // the unperturbed distances.
        const double candidate_weight = matching_weight(d, candidate.pairs);
        const double tolerance = 1e-12 * std::max(1.0, matching.total_weight);
        if (candidate_weight <= matching.total_weight + tolerance) {
            candidate.total_weight = candidate_weight;
            matching = std::move(candidate);
        }
    }

    CrossmatchStatistic stat;
    for (auto [i, j] : matching.pairs) {
        const bool xi = i < m;
        const bool xj = j < m;
        if (xi && xj)
            ++stat.a0;
        else if (!xi && !xj)
            ++stat.a2;
        else
            ++stat.a1;
    }
    stat.matching = std::move(matching);
    return stat;
}

} // namespace

CrossmatchStatistic crossmatch_statistic(std::span<const Point> xs, std::span<const Point> ys, TieMode tie_mode)
{
    validate_samples(xs, ys);

    // Pool in a canonical sample order so that swapping X and Y cannot change
    // how the solver breaks ties.
    if (!lexicographically_less(ys, xs)) {
        DistanceMatrix d;
        return statistic_in_order(xs, ys, tie_mode, d);
    }

    DistanceMatrix swapped_d;
    CrossmatchStatistic swapped = statistic_in_order(ys, xs, tie_mode, swapped_d);
    const std::size_t m = xs.size();
    const std::size_t n = ys.size();
    // swapped pooled index k: k < n is Y[k], else X[k - n]
    auto to_original = [&](std::size_t k) { return k < n ? m + k : k - n; };
    auto to_swapped = [&](std::size_t k) { return k < m ? n + k : k - m; };

    CrossmatchStatistic stat;
    stat.a1 = swapped.a1;
    stat.a0 = swapped.a2;
    stat.a2 = swapped.a0;
    for (auto [i, j] : swapped.matching.pairs) {
        auto a = to_original(i);
        auto b = to_original(j);
        stat.matching.pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(stat.matching.pairs.begin(), stat.matching.pairs.end());
    double total = 0.0;
    for (auto [i, j] : stat.matching.pairs)
        total += swapped_d(to_swapped(i), to_swapped(j));
    stat.matching.total_weight = total;
    return stat;
}

CrossmatchResult crossmatch_test(std::span<const Point> xs, std::span<const Point> ys, TieMode tie_mode)
{
    CrossmatchStatistic stat = crossmatch_statistic(xs, ys, tie_mode);
    auto null = cached_null_pmf(xs.size(), ys.size());

    CrossmatchResult result;
    result.a1 = stat.a1;
    result.a0 = stat.a0;
    result.a2 = stat.a2;
    result.m = xs.size();
    result.n = ys.size();
    result.p_value = null->cdf(stat.a1);
    const double m = static_cast<double>(result.m);
    const double n = static_cast<double>(result.n);
    result.expected_a1 = m * n / (m + n - 1.0);
    return result;
}

} // namespace trajmatch
