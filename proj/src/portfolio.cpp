#include "trajmatch/portfolio.hpp"

#include "optimizers.hpp"
#include "trajmatch/errors.hpp"
#include "trajmatch/parallel.hpp"

#include <optional>

namespace trajmatch {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<Point> sample_box(const Problem& problem, std::uint64_t seed, std::size_t n_pop)
{
    auto rng = make_stream(seed, "init/" + problem.id + "/" + std::to_string(problem.dimension));
    std::uniform_real_distribution<double> box(kDomainLower, kDomainUpper);
    std::vector<Point> out(n_pop, Point(problem.dimension));
    for (auto& x : out)
        for (double& v : x)
            v = box(rng);
    return out;
}

} // namespace

std::uint64_t substream_seed(std::uint64_t base, std::string_view label)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(base ^ splitmix64(h));
}

std::uint64_t RunConfig::run_seed(std::size_t run) const
{
    if (!seeds.empty()) {
        if (run >= seeds.size())
            throw InputError("no seed configured for run " + std::to_string(run));
        return seeds[run];
    }
    return substream_seed(base_seed, "run/" + std::to_string(run));
}

Population initial_population(const Problem& problem, std::uint64_t seed, std::size_t n_pop)
{
    Population p;
    p.iteration = 0;
    p.solutions = sample_box(problem, seed, n_pop);
    for (const auto& x : p.solutions)
        p.fitness.push_back(problem(x));
    return p;
}

RunResult run_algorithm_detailed(const AlgorithmSpec& spec, const Problem& problem, const RunConfig& config,
                                 std::size_t run)
{
    if (spec.n_pop < 4)
        throw InputError("population size must be at least 4 (got " + std::to_string(spec.n_pop) + ")");
    const std::size_t budget = config.budget(problem.dimension);
    const std::size_t iterations = budget / spec.n_pop;
    if (iterations < 2)
        throw InputError("budget of " + std::to_string(budget) + " evaluations allows fewer than 2 generations of " +
                         std::to_string(spec.n_pop));

    const std::uint64_t seed = config.run_seed(run);
    auto optimizer = detail::make_optimizer(
        spec, problem,
        make_stream(seed, "algorithm/" + spec.algorithm_id + "/" + problem.id + "/" + std::to_string(problem.dimension)));

    detail::Evaluator evaluate(problem, budget);
    Population init;
    init.solutions = sample_box(problem, seed, spec.n_pop);
    for (const auto& x : init.solutions)
        init.fitness.push_back(evaluate(x));

    RunResult result;
    result.trajectory.algorithm_id = spec.algorithm_id;
    result.trajectory.problem_id = problem.id;
    result.trajectory.dimension = problem.dimension;
    result.trajectory.run = run;
    result.trajectory.populations.push_back(init);
    result.best_so_far.push_back(evaluate.best());

    optimizer->initialize(init);
    for (std::size_t it = 1; it < iterations; ++it) {
        optimizer->step(evaluate);
        Population p = optimizer->snapshot();
        p.iteration = it;
        result.trajectory.populations.push_back(std::move(p));
        result.best_so_far.push_back(evaluate.best());
    }
    result.evaluations = evaluate.count();
    return result;
}

Trajectory run_algorithm(const AlgorithmSpec& spec, const Problem& problem, const RunConfig& config, std::size_t run)
{
    return run_algorithm_detailed(spec, problem, config, run).trajectory;
}

TrajectoryStore run_suite(std::span<const AlgorithmSpec> specs, std::span<const Problem> problems,
                          const RunConfig& config)
{
    if (specs.empty())
        throw InputError("run_suite needs at least one algorithm");
    if (problems.empty())
        throw InputError("run_suite needs at least one problem");
    if (config.runs == 0)
        throw InputError("run_suite needs at least one run");
    for (const auto& spec : specs)
        default_hyperparameters(spec.algorithm_id); // rejects unknown ids before any work

    const std::size_t per_spec = problems.size() * config.runs;
    std::vector<std::optional<Trajectory>> results(specs.size() * per_spec);
    parallel_for(results.size(), config.threads, [&](std::size_t task) {
        const auto& spec = specs[task / per_spec];
        const auto& problem = problems[(task % per_spec) / config.runs];
        const std::size_t run = task % config.runs;
        results[task] = run_algorithm(spec, problem, config, run);
    });

    TrajectoryStore store;
    for (auto& t : results)
        store.add(std::move(*t));
    return store;
}

} // namespace trajmatch
