#pragma once

#include "trajmatch/random.hpp"
#include "trajmatch/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trajmatch {

inline constexpr double kDomainLower = -5.0;
inline constexpr double kDomainUpper = 5.0;

/// A deterministic objective on the box [-5, 5]^d.
struct Problem {
    std::string id;
    std::size_t dimension = 0;
    std::function<double(std::span<const double>)> objective;

    double operator()(std::span<const double> x) const { return objective(x); }
};

/// sphere, ellipsoid_rotated, rosenbrock, rastrigin, schwefel_1_2, gallagher
const std::vector<std::string>& builtin_problem_ids();
Problem make_problem(std::string_view id, std::size_t dimension);
std::vector<Problem> builtin_suite(std::size_t dimension);
/// Every built-in problem for every listed dimension (dimension-major).
std::vector<Problem> builtin_suite(std::span<const std::size_t> dimensions,
                                   std::span<const std::string> ids = builtin_problem_ids());

struct AlgorithmSpec {
    std::string algorithm_id;
    /// Overrides of the algorithm's defaults; unknown names are rejected.
    std::map<std::string, double> hyperparameters;
    std::size_t n_pop = 50;
};

/// random_search, de_rand_1_bin, sade, ga, pso
const std::vector<std::string>& builtin_algorithm_ids();
/// Default hyperparameters of an algorithm (throws InputError when unknown).
std::map<std::string, double> default_hyperparameters(std::string_view algorithm_id);

struct RunConfig {
    std::size_t budget_factor = 500; ///< evaluations per dimension
    std::size_t runs = 5;
    std::uint64_t base_seed = 1;
    /// Per-run seeds; derived from base_seed when empty.
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> dimensions{2, 5};
    std::size_t threads = 1;

    std::size_t budget(std::size_t dimension) const { return budget_factor * dimension; }
    std::uint64_t run_seed(std::size_t run) const;
};

/// Uniform sample of the box, keyed only by (problem, dimension, seed) so
/// that every algorithm starts a run from the same points.
Population initial_population(const Problem& problem, std::uint64_t seed, std::size_t n_pop);

struct RunResult {
    Trajectory trajectory;
    /// Best objective value seen up to and including each iteration.
    std::vector<double> best_so_far;
    std::size_t evaluations = 0;
};

RunResult run_algorithm_detailed(const AlgorithmSpec& spec, const Problem& problem, const RunConfig& config,
                                 std::size_t run);

/// floor(budget / n_pop) populations; iteration 0 is the shared initial one.
Trajectory run_algorithm(const AlgorithmSpec& spec, const Problem& problem, const RunConfig& config, std::size_t run);

/// Every (spec, problem, run) combination; parallel over config.threads.
TrajectoryStore run_suite(std::span<const AlgorithmSpec> specs, std::span<const Problem> problems,
                          const RunConfig& config);

} // namespace trajmatch
