#include "fixtures.hpp"

#include "trajmatch/analysis.hpp"
#include "trajmatch/errors.hpp"
#include "trajmatch/portfolio.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace trajmatch;

namespace {

TrajectoryStore small_store(std::vector<std::string> algorithms, std::size_t runs = 2)
{
    std::vector<AlgorithmSpec> specs;
    for (auto& a : algorithms)
        specs.push_back({a, {}, 20});
    RunConfig config;
    config.runs = runs;
    config.budget_factor = 100;
    std::vector<std::size_t> dims{2, 3};
    std::vector<std::string> problems{"sphere", "rastrigin"};
    return run_suite(specs, builtin_suite(dims, problems), config);
}

TrajectoryStore renamed(const TrajectoryStore& store, const std::string& from, const std::string& to)
{
    TrajectoryStore out;
    for (const auto& [key, t] : store) {
        out.add(t);
        if (t.algorithm_id == from) {
            Trajectory copy = t;
            copy.algorithm_id = to;
            out.add(copy);
        }
    }
    return out;
}

} // namespace

TEST_CASE("Bonferroni threshold")
{
    CHECK(bonferroni_threshold(0.05, 20) == 0.0025);
    CHECK(bonferroni_threshold(0.05, 1) == 0.05);
    CHECK_THROWS_AS(bonferroni_threshold(0.0, 20), InputError);
    CHECK_THROWS_AS(bonferroni_threshold(1.0, 20), InputError);
    CHECK_THROWS_AS(bonferroni_threshold(0.05, 0), InputError);
}

TEST_CASE("fixture populations give the requested a1")
{
    for (std::size_t a1 = 0; a1 <= 50; a1 += 2) {
        auto [x, y] = fixtures::populations_with_a1(50, a1, 0);
        CHECK(crossmatch_statistic(x.solutions, y.solutions).a1 == a1);
    }
}

TEST_CASE("p-values straddling the corrected threshold")
{
    // Find the largest a1 whose lower tail stays below alpha / I.
    auto null = null_pmf(50, 50);
    std::size_t below = 0;
    for (std::size_t a1 : null.support())
        if (null.cdf(a1) < 0.0025)
            below = a1;
    const std::size_t above = below + 2;
    REQUIRE(null.cdf(above) >= 0.0025);

    std::vector<std::size_t> a1s;
    for (int k = 0; k < 20; ++k)
        a1s.push_back(k < 6 ? below : above);
    auto [a, b] = fixtures::trajectories_with_a1(50, a1s);
    TrajectoryStore store;
    store.add(a);
    store.add(b);
    auto scaling = compute_scaling(store, "fixture", 1);
    auto cmp = compare_run(a, b, scaling, {});
    REQUIRE(cmp.per_iteration.size() == 20);
    for (std::size_t k = 0; k < 20; ++k) {
        CHECK(cmp.per_iteration[k].a1 == a1s[k]);
        CHECK(cmp.per_iteration[k].rejected == (k < 6));
    }
    CHECK(cmp.similarity == Catch::Approx(0.7));
}

TEST_CASE("self comparison under prefer_cross")
{
    auto store = small_store({"de_rand_1_bin"});
    AnalysisOptions options;
    options.tie_mode = TieMode::PreferCross;
    for (const auto& [key, t] : store) {
        auto scaling = compute_scaling(store, t.problem_id, t.dimension);
        auto cmp = compare_run(t, t, scaling, options);
        CHECK(cmp.similarity == 1.0);
        for (const auto& p : statistic_series(t, t, scaling, options))
            CHECK(p.a1 == t.population_size());
    }
}

TEST_CASE("duplicated algorithm gives overall similarity 1")
{
    auto store = renamed(small_store({"ga", "pso"}), "ga", "ga_copy");
    AnalysisOptions options;
    options.tie_mode = TieMode::PreferCross;
    auto report = pairwise_similarity(store, options);
    const auto& m = report.overall;
    CHECK(m(m.index_of("ga"), m.index_of("ga_copy")) == 1.0);
    CHECK_NOTHROW(m.validate());
    CHECK(report.dimensions == std::vector<std::size_t>{2, 3});
    CHECK(report.comparisons.size() == 3 * 2 * 2 * 2);
}

TEST_CASE("report structure and aggregation")
{
    auto store = small_store({"random_search", "de_rand_1_bin", "pso"});
    AnalysisOptions options;
    auto report = pairwise_similarity(store, options);
    REQUIRE(report.per_dimension.size() == 2);
    const auto& ids = report.overall.ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = 0; j < ids.size(); ++j) {
            double mean = 0.5 * (report.per_dimension[0](i, j) + report.per_dimension[1](i, j));
            CHECK(report.overall(i, j) == Catch::Approx(mean).margin(1e-15));
        }

    // per-dimension entry = mean over (problem, run)
    for (std::size_t k = 0; k < report.dimensions.size(); ++k) {
        double sum = 0.0;
        int count = 0;
        for (const auto& c : report.comparisons)
            if (c.dimension == report.dimensions[k] && c.algorithm_a == "de_rand_1_bin" && c.algorithm_b == "pso") {
                sum += c.similarity;
                ++count;
            }
        REQUIRE(count == 4);
        const auto& m = report.per_dimension[k];
        CHECK(m(m.index_of("de_rand_1_bin"), m.index_of("pso")) == Catch::Approx(sum / count).margin(1e-15));
    }

    for (const auto& c : report.comparisons)
        for (const auto& o : c.per_iteration)
            CHECK(o.a1 <= 20);
}

TEST_CASE("thread count does not change the report")
{
    auto store = small_store({"random_search", "ga", "sade"});
    AnalysisOptions one;
    AnalysisOptions many;
    many.threads = 4;
    auto a = pairwise_similarity(store, one);
    auto b = pairwise_similarity(store, many);
    CHECK(a.overall == b.overall);
    CHECK(a.per_dimension == b.per_dimension);
    std::ostringstream sa, sb;
    write_series_csv(a.comparisons, sa);
    write_series_csv(b.comparisons, sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("analysis input errors")
{
    auto store = small_store({"ga"});
    CHECK_THROWS_AS(pairwise_similarity(store, {}), InputError);

    auto two = small_store({"ga", "pso"});
    AnalysisOptions bad;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(pairwise_similarity(two, bad), InputError);

    // missing slot
    TrajectoryStore partial;
    for (const auto& [key, t] : two)
        if (!(key.algorithm == "pso" && key.run == 1 && key.problem == "sphere" && key.dim == 2))
            partial.add(t);
    CHECK_THROWS_AS(pairwise_similarity(partial, {}), InputError);

    const auto& a = two.at({"ga", "sphere", 2, 0});
    const auto& b = two.at({"pso", "sphere", 2, 1});
    auto scaling = compute_scaling(two, "sphere", 2);
    CHECK_THROWS_AS(compare_run(a, b, scaling, {}), InputError);
}

TEST_CASE("matrix csv round trip")
{
    SimilarityMatrix m({"a", "b", "c"});
    m.set(0, 1, 0.25);
    m.set(0, 2, 0.1 + 0.2);
    m.set(1, 2, 1.0 / 3.0);
    std::ostringstream out;
    write_matrix_csv(m, out);
    CHECK(out.str().rfind("algorithm,a,b,c\n", 0) == 0);
    std::istringstream in(out.str());
    CHECK(read_matrix_csv(in) == m);

    std::istringstream asym("algorithm,a,b\na,1,0.5\nb,0.4,1\n");
    CHECK_THROWS_AS(read_matrix_csv(asym), InputError);
    std::istringstream diag("algorithm,a,b\na,0.9,0.5\nb,0.5,1\n");
    CHECK_THROWS_AS(read_matrix_csv(diag), InputError);
    std::istringstream range("algorithm,a,b\na,1,1.5\nb,1.5,1\n");
    CHECK_THROWS_AS(read_matrix_csv(range), InputError);
}

TEST_CASE("series csv: 14 of 20 kept gives 0.7")
{
    RunComparison c{"a", "b", "sphere", 2, 0, {}, 0.0};
    for (std::size_t it = 0; it < 20; ++it)
        c.per_iteration.push_back({it, 10, it < 6 ? 1e-4 : 0.5, it < 6});
    std::ostringstream out;
    write_series_csv({c}, out);
    std::istringstream in(out.str());
    auto back = read_series_csv(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0].similarity == Catch::Approx(0.7));
    CHECK(back[0].per_iteration == c.per_iteration);
}
