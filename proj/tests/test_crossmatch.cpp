#include "trajmatch/crossmatch.hpp"
#include "trajmatch/errors.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

using namespace trajmatch;

namespace {

// Exact null by enumerating every labelling of N = m + n units against the
// fixed matching {(0,1), (2,3), ...}.
std::map<std::size_t, double> enumerate_null(std::size_t m, std::size_t n)
{
    const std::size_t total = m + n;
    std::map<std::size_t, std::uint64_t> counts;
    std::uint64_t labellings = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << total); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != m)
            continue;
        ++labellings;
        std::size_t a1 = 0;
        for (std::size_t p = 0; p < total; p += 2)
            a1 += ((mask >> p) & 1U) != ((mask >> (p + 1)) & 1U);
        ++counts[a1];
    }
    std::map<std::size_t, double> pmf;
    for (auto [a1, c] : counts)
        pmf[a1] = static_cast<double>(c) / static_cast<double>(labellings);
    return pmf;
}

std::vector<Point> uniform_points(std::size_t count, std::size_t dim, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts(count, Point(dim));
    for (auto& p : pts)
        for (auto& c : p)
            c = u(rng);
    return pts;
}

} // namespace

TEST_CASE("null pmf for m = n = 2")
{
    auto null = null_pmf(2, 2);
    CHECK(std::abs(null.pmf(0) - 1.0 / 3.0) <= 1e-12);
    CHECK(null.pmf(1) == 0.0);
    CHECK(std::abs(null.pmf(2) - 2.0 / 3.0) <= 1e-12);
    CHECK(std::abs(null.expectation() - 4.0 / 3.0) <= 1e-12);
    CHECK(null.support() == std::vector<std::size_t>{0, 2});
}

TEST_CASE("null pmf matches label enumeration")
{
    for (std::size_t total = 2; total <= 20; total += 2) {
        for (std::size_t m = 1; m < total; ++m) {
            const std::size_t n = total - m;
            auto exact = enumerate_null(m, n);
            auto null = null_pmf(m, n);
            INFO("m=" << m << " n=" << n);
            for (std::size_t a1 = 0; a1 <= std::min(m, n) + 1; ++a1) {
                const double want = exact.count(a1) ? exact[a1] : 0.0;
                CHECK(std::abs(null.pmf(a1) - want) <= 1e-12);
            }
        }
    }
}

TEST_CASE("null pmf sums to one and has the closed-form mean")
{
    for (std::size_t m = 1; m <= 80; ++m) {
        for (std::size_t n : {m, m + 2, m + 10}) {
            auto null = null_pmf(m, n);
            double sum = 0.0;
            for (double p : null.probabilities()) {
                CHECK(p >= 0.0);
                sum += p;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-9);
            const double mean = double(m) * double(n) / double(m + n - 1);
            CHECK(std::abs(null.expectation() - mean) <= 1e-9);
            for (std::size_t a1 : null.support())
                CHECK((a1 % 2) == (m % 2));
        }
    }
}

TEST_CASE("m = n = 50 support")
{
    auto null = null_pmf(50, 50);
    auto support = null.support();
    REQUIRE(support.size() == 26);
    CHECK(support.front() == 0);
    CHECK(support.back() == 50);
    for (std::size_t a1 : support)
        CHECK(a1 % 2 == 0);
    CHECK(null.cdf(50) == 1.0);
    for (std::size_t k = 1; k < support.size(); ++k)
        CHECK(null.cdf(support[k]) >= null.cdf(support[k - 1]));
}

TEST_CASE("null pmf errors")
{
    CHECK_THROWS_AS(null_pmf(3, 0), InputError);
    CHECK_THROWS_AS(null_pmf(2, 3), InputError);
}

TEST_CASE("cached null is shared")
{
    auto a = cached_null_pmf(10, 10);
    auto b = cached_null_pmf(10, 10);
    CHECK(a.get() == b.get());
    CHECK(a->probabilities() == null_pmf(10, 10).probabilities());
}

TEST_CASE("crossmatch on identical and separated samples")
{
    std::vector<Point> xs{{0.0, 0.0}, {1.0, 1.0}};
    auto s = crossmatch_statistic(xs, xs, TieMode::PreferCross);
    CHECK(s.a1 == 2);
    CHECK(s.a0 == 0);
    CHECK(s.a2 == 0);
    CHECK(crossmatch_test(xs, xs, TieMode::PreferCross).p_value == 1.0);

    std::vector<Point> x{{0.0}, {1.0}};
    std::vector<Point> y{{10.0}, {11.0}};
    for (auto mode : {TieMode::Neutral, TieMode::PreferCross}) {
        auto r = crossmatch_test(x, y, mode);
        CHECK(r.a1 == 0);
        CHECK(r.a0 == 1);
        CHECK(r.a2 == 1);
        CHECK(std::abs(r.p_value - 1.0 / 3.0) <= 1e-12);
        CHECK(std::abs(r.expected_a1 - 4.0 / 3.0) <= 1e-12);
    }
}

TEST_CASE("prefer cross pairs every duplicated point across")
{
    std::mt19937_64 rng(17);
    for (std::size_t size : {2u, 7u, 50u}) {
        auto xs = uniform_points(size, 3, rng);
        auto s = crossmatch_statistic(xs, xs, TieMode::PreferCross);
        CHECK(s.a1 == size);
    }
    // Everything in one spot.
    std::vector<Point> flat(12, Point{0.5, 0.5});
    CHECK(crossmatch_statistic(flat, flat, TieMode::PreferCross).a1 == 12);
}

TEST_CASE("prefer cross keeps an optimal matching")
{
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> grid(0, 3);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<Point> xs(6, Point(2)), ys(6, Point(2));
        for (auto* s : {&xs, &ys})
            for (auto& p : *s)
                p = {double(grid(rng)), double(grid(rng))};
        auto neutral = crossmatch_statistic(xs, ys, TieMode::Neutral);
        auto cross = crossmatch_statistic(xs, ys, TieMode::PreferCross);
        CHECK(cross.matching.total_weight == neutral.matching.total_weight);
        CHECK(cross.a1 >= neutral.a1);
    }
}

TEST_CASE("statistic invariants")
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> size(1, 30);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t m = size(rng);
        std::size_t n = size(rng);
        if ((m + n) % 2)
            ++n;
        auto xs = uniform_points(m, 2, rng);
        auto ys = uniform_points(n, 2, rng);
        for (auto mode : {TieMode::Neutral, TieMode::PreferCross}) {
            auto s = crossmatch_statistic(xs, ys, mode);
            CHECK(s.a1 + s.a0 + s.a2 == (m + n) / 2);
            CHECK(s.a1 + 2 * s.a0 == m);
            CHECK(s.a1 + 2 * s.a2 == n);
            CHECK(s.a1 <= std::min(m, n));

            auto swapped = crossmatch_statistic(ys, xs, mode);
            CHECK(swapped.a1 == s.a1);
            CHECK(swapped.a0 == s.a2);
            CHECK(swapped.a2 == s.a0);

            auto r = crossmatch_test(xs, ys, mode);
            CHECK(r.p_value >= 0.0);
            CHECK(r.p_value <= 1.0);
            CHECK(r.p_value == crossmatch_test(ys, xs, mode).p_value);
        }
    }
}

TEST_CASE("crossmatch input errors")
{
    std::vector<Point> one{{0.0}};
    std::vector<Point> two{{0.0}, {1.0}};
    std::vector<Point> mixed{{0.0}, {1.0, 2.0}, {3.0}};
    std::vector<Point> none;
    CHECK_THROWS_AS(crossmatch_statistic(one, two), InputError);
    CHECK_THROWS_AS(crossmatch_statistic(none, two), InputError);
    CHECK_THROWS_AS(crossmatch_statistic(one, mixed), InputError);
    CHECK(parse_tie_mode("prefer_cross") == TieMode::PreferCross);
    CHECK(parse_tie_mode("neutral") == TieMode::Neutral);
    CHECK_THROWS_AS(parse_tie_mode("bogus"), InputError);
}

TEST_CASE("epsilon is below the smallest gap")
{
    std::vector<Point> pts{{0.0}, {0.5}, {0.75}, {2.0}};
    auto d = build_distance_matrix(pts);
    CHECK(prefer_cross_epsilon(d) == Catch::Approx(0.25e-6));
    std::vector<Point> same(4, Point{1.0});
    CHECK(prefer_cross_epsilon(build_distance_matrix(same)) == 1e-6);
}

TEST_CASE("Monte-Carlo distribution of a1 matches the null")
{
    constexpr std::size_t kTrials = 20000;
    std::mt19937_64 rng(41);
    std::vector<double> freq(11, 0.0);
    for (std::size_t t = 0; t < kTrials; ++t) {
        auto xs = uniform_points(10, 2, rng);
        auto ys = uniform_points(10, 2, rng);
        freq[crossmatch_statistic(xs, ys).a1] += 1.0 / kTrials;
    }
    auto null = null_pmf(10, 10);
    double worst = 0.0;
    for (std::size_t a1 = 0; a1 <= 10; ++a1)
        worst = std::max(worst, std::abs(freq[a1] - null.pmf(a1)));
    CHECK(worst < 0.02);
}
