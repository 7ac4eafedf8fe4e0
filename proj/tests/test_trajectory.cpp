#include "trajmatch/errors.hpp"
#include "trajmatch/trajectory.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace trajmatch;

namespace {

Trajectory make_trajectory(std::string alg, std::size_t dim, std::size_t iterations, std::size_t n_pop,
                           std::uint64_t seed, double lo = -5.0, double hi = 5.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Trajectory t{std::move(alg), "sphere", dim, 0, {}};
    for (std::size_t it = 0; it < iterations; ++it) {
        Population p;
        p.iteration = it;
        for (std::size_t r = 0; r < n_pop; ++r) {
            Point x(dim);
            double f = 0.0;
            for (auto& c : x) {
                c = u(rng);
                f += c * c;
            }
            p.solutions.push_back(x);
            p.fitness.push_back(f);
        }
        t.populations.push_back(std::move(p));
    }
    return t;
}

std::string csv_header(std::size_t dim)
{
    std::string h = "algorithm,problem,dim,run,iteration,member,fitness";
    for (std::size_t k = 0; k < dim; ++k)
        h += ",x" + std::to_string(k);
    return h + "\n";
}

} // namespace

TEST_CASE("csv row counting")
{
    std::ostringstream text;
    text << csv_header(2);
    for (std::string alg : {"a", "b"})
        for (int it = 0; it < 3; ++it)
            for (int m = 0; m < 4; ++m)
                text << alg << ",sphere,2,0," << it << ',' << m << ",1.5," << m << ',' << -m << '\n';
    std::istringstream in(text.str());
    auto store = read_trajectories_csv(in);
    REQUIRE(store.size() == 2);
    for (const auto& [key, t] : store) {
        CHECK(t.iterations() == 3);
        CHECK(t.population_size() == 4);
        CHECK(t.populations[2].solutions[3] == Point{3.0, -3.0});
    }
    CHECK(store.algorithms() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("csv errors")
{
    SECTION("empty file")
    {
        std::istringstream in("");
        CHECK_THROWS_AS(read_trajectories_csv(in), InputError);
    }
    SECTION("header only")
    {
        std::istringstream in(csv_header(1));
        CHECK_THROWS_AS(read_trajectories_csv(in), InputError);
    }
    SECTION("NaN fitness names the row")
    {
        std::istringstream in(csv_header(1) + "a,p,1,0,0,0,1,0\na,p,1,0,0,1,nan,0\n");
        try {
            read_trajectories_csv(in);
            FAIL("expected an error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        }
    }
    SECTION("bad header")
    {
        std::istringstream in("algo,problem,dim,run,iteration,member,fitness,x0\n");
        CHECK_THROWS_AS(read_trajectories_csv(in), InputError);
    }
    SECTION("missing member")
    {
        std::istringstream in(csv_header(1) + "a,p,1,0,0,0,1,0\na,p,1,0,0,2,1,0\n");
        CHECK_THROWS_AS(read_trajectories_csv(in), InputError);
    }
    SECTION("duplicate member")
    {
        std::istringstream in(csv_header(1) + "a,p,1,0,0,0,1,0\na,p,1,0,0,0,1,0\n");
        CHECK_THROWS_AS(read_trajectories_csv(in), InputError);
    }
    SECTION("wrong field count")
    {
        std::istringstream in(csv_header(2) + "a,p,2,0,0,0,1,0\n");
        CHECK_THROWS_AS(read_trajectories_csv(in), InputError);
    }
    SECTION("mismatched iteration counts across algorithms")
    {
        std::istringstream in(csv_header(1) + "a,p,1,0,0,0,1,0\na,p,1,0,0,1,1,0\n"
                                              "b,p,1,0,0,0,1,0\nb,p,1,0,0,1,1,0\n"
                                              "b,p,1,0,1,0,1,0\nb,p,1,0,1,1,1,0\n");
        CHECK_THROWS_AS(read_trajectories_csv(in), InputError);
    }
}

TEST_CASE("csv and json round trips")
{
    TrajectoryStore store;
    store.add(make_trajectory("alpha", 2, 3, 6, 1));
    store.add(make_trajectory("beta", 2, 3, 6, 2));
    auto t5 = make_trajectory("alpha", 5, 3, 6, 3);
    store.add(t5);

    std::ostringstream csv;
    write_trajectories_csv(store, csv);
    std::istringstream csv_in(csv.str());
    CHECK(read_trajectories_csv(csv_in) == store);

    std::ostringstream json;
    write_trajectories_json(store, json);
    std::istringstream json_in(json.str());
    CHECK(read_trajectories_json(json_in) == store);

    auto dir = std::filesystem::temp_directory_path() / "trajmatch_test_io";
    std::filesystem::create_directories(dir);
    save_trajectories(store, dir / "t.csv");
    save_trajectories(store, dir / "t.json");
    CHECK(load_trajectories(dir / "t.csv") == store);
    CHECK(load_trajectories(dir / "t.json") == store);
    std::filesystem::remove_all(dir);
}

TEST_CASE("store rejects duplicates and shape mismatches")
{
    TrajectoryStore store;
    store.add(make_trajectory("a", 2, 3, 4, 1));
    CHECK_THROWS_AS(store.add(make_trajectory("a", 2, 3, 4, 2)), InputError);
    CHECK_THROWS_AS(store.add(make_trajectory("b", 2, 4, 4, 2)), InputError);
    CHECK_THROWS_AS(store.add(make_trajectory("b", 2, 3, 6, 2)), InputError);
    CHECK_THROWS_AS(store.add(make_trajectory("b,c", 2, 3, 4, 2)), InputError);
    auto bad = make_trajectory("b", 2, 3, 4, 2);
    bad.populations[1].fitness[0] = INFINITY;
    CHECK_THROWS_AS(store.add(bad), InputError);
    CHECK(store.size() == 1);
    CHECK_THROWS_AS(store.at({"zzz", "sphere", 2, 0}), InputError);
}

TEST_CASE("scaling ranges")
{
    Trajectory t{"a", "p", 1, 0, {}};
    Population p;
    p.solutions = {{2.0}, {4.0}, {6.0}};
    p.fitness = {3.0, 3.0, 3.0};
    t.populations.push_back(p);
    TrajectoryStore one;
    one.add(t);
    auto s = compute_scaling(one, "p", 1);
    CHECK(s.x_min == std::vector<double>{2.0});
    CHECK(s.x_max == std::vector<double>{6.0});
    CHECK(s.fitness_min == 3.0);
    CHECK(s.fitness_max == 3.0);

    Trajectory a{"a", "q", 1, 0, {}}, b{"b", "q", 1, 0, {}};
    Population pa, pb;
    pa.solutions = {{-1.0}, {2.0}};
    pa.fitness = {0.0, 1.0};
    pb.solutions = {{0.0}, {5.0}};
    pb.fitness = {0.0, 1.0};
    a.populations.push_back(pa);
    b.populations.push_back(pb);
    TrajectoryStore two;
    two.add(a);
    two.add(b);
    auto u = compute_scaling(two, "q", 1);
    CHECK(u.x_min[0] == -1.0);
    CHECK(u.x_max[0] == 5.0);

    CHECK_THROWS_AS(compute_scaling(two, "missing", 1), InputError);
}

TEST_CASE("scale_value")
{
    CHECK(scale_value(4, 2, 6) == 0.5);
    CHECK(scale_value(2, 2, 6) == 0.0);
    CHECK(scale_value(6, 2, 6) == 1.0);
    CHECK(scale_value(3, 3, 3) == 0.0);
    CHECK(scale_value(-7, 3, 3) == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-100, 100);
    for (int k = 0; k < 1000; ++k) {
        double lo = u(rng), hi = u(rng);
        if (lo == hi)
            continue;
        if (lo > hi)
            std::swap(lo, hi);
        double v = lo + (hi - lo) * std::abs(std::sin(k));
        double back = scale_value(v, lo, hi) * (hi - lo) + lo;
        CHECK(std::abs(back - v) <= 1e-12 * std::max(1.0, std::abs(v)));
    }
}

TEST_CASE("scaled trajectories stay in the unit box")
{
    TrajectoryStore store;
    store.add(make_trajectory("a", 3, 4, 10, 11, -5, 0));
    store.add(make_trajectory("b", 3, 4, 10, 12, 0, 5));
    auto s = compute_scaling(store, "sphere", 3);
    for (const auto& [key, t] : store) {
        auto scaled = apply_scaling(t, s);
        for (const auto& p : scaled.populations) {
            for (const auto& x : p.solutions)
                for (double c : x) {
                    CHECK(c >= 0.0);
                    CHECK(c <= 1.0);
                }
            for (double f : p.fitness) {
                CHECK(f >= 0.0);
                CHECK(f <= 1.0);
            }
        }
    }
}

TEST_CASE("feature vectors")
{
    auto t = make_trajectory("a", 2, 1, 50, 3);
    auto plain = feature_vectors(t.populations[0], false);
    auto with_f = feature_vectors(t.populations[0], true);
    REQUIRE(plain.size() == 50);
    REQUIRE(with_f.size() == 50);
    CHECK(plain[0].size() == 2);
    CHECK(with_f[0].size() == 3);
    CHECK(with_f[7][2] == t.populations[0].fitness[7]);
}
