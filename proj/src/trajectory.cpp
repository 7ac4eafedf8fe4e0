#include "trajmatch/trajectory.hpp"

#include "trajmatch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace trajmatch {

namespace {

std::string describe(const TrajectoryKey& k)
{
    return "(" + k.algorithm + ", " + k.problem + ", dim " + std::to_string(k.dim) + ", run " +
           std::to_string(k.run) + ")";
}

} // namespace

void Trajectory::validate() const
{
    const std::string who = "trajectory " + describe(key());
    for (const std::string* id : {&algorithm_id, &problem_id})
        if (id->empty() || id->find_first_of(",\r\n\"") != std::string::npos)
            throw InputError(who + ": ids must be non-empty and free of commas, quotes and line breaks");
    if (dimension == 0)
        throw InputError(who + ": dimension must be positive");
    if (populations.empty())
        throw InputError(who + ": no populations");
    const std::size_t n_pop = populations.front().size();
    for (std::size_t it = 0; it < populations.size(); ++it) {
        const Population& p = populations[it];
        const std::string where = who + " iteration " + std::to_string(it);
        if (p.iteration != it)
            throw InputError(where + ": iterations must be consecutive from 0 (found " + std::to_string(p.iteration) +
                             ")");
        if (p.size() < 2)
            throw InputError(where + ": population needs at least 2 members");
        if (p.size() != n_pop)
            throw InputError(where + ": population size " + std::to_string(p.size()) + " differs from " +
                             std::to_string(n_pop));
        if (p.fitness.size() != p.size())
            throw InputError(where + ": fitness count does not match solution count");
        for (std::size_t r = 0; r < p.size(); ++r) {
            if (p.solutions[r].size() != dimension)
                throw InputError(where + " member " + std::to_string(r) + ": expected " + std::to_string(dimension) +
                                 " coordinates");
            if (!std::isfinite(p.fitness[r]))
                throw InputError(where + " member " + std::to_string(r) + ": non-finite fitness");
            for (double v : p.solutions[r])
                if (!std::isfinite(v))
                    throw InputError(where + " member " + std::to_string(r) + ": non-finite coordinate");
        }
    }
}

void TrajectoryStore::add(Trajectory t)
{
    t.validate();
    TrajectoryKey key = t.key();
    if (trajectories_.contains(key))
        throw InputError("duplicate trajectory " + describe(key));
    for (const auto& [other_key, other] : trajectories_) {
        if (other_key.problem != key.problem || other_key.dim != key.dim || other_key.run != key.run)
            continue;
        if (other.iterations() != t.iterations())
            throw InputError("trajectory " + describe(key) + " has " + std::to_string(t.iterations()) +
                             " iterations but " + describe(other_key) + " has " +
                             std::to_string(other.iterations()));
        if (other.population_size() != t.population_size())
            throw InputError("trajectory " + describe(key) + " has population size " +
                             std::to_string(t.population_size()) + " but " + describe(other_key) + " has " +
                             std::to_string(other.population_size()));
        break;
    }
    trajectories_.emplace(std::move(key), std::move(t));
}

const Trajectory& TrajectoryStore::at(const TrajectoryKey& key) const
{
    const Trajectory* t = find(key);
    if (t == nullptr)
        throw InputError("no trajectory " + describe(key));
    return *t;
}

const Trajectory* TrajectoryStore::find(const TrajectoryKey& key) const
{
    auto it = trajectories_.find(key);
    return it == trajectories_.end() ? nullptr : &it->second;
}

std::vector<std::string> TrajectoryStore::algorithms() const
{
    std::set<std::string> ids;
    for (const auto& [key, t] : trajectories_)
        ids.insert(key.algorithm);
    return {ids.begin(), ids.end()};
}

std::vector<std::pair<std::string, std::size_t>> TrajectoryStore::problem_instances() const
{
    std::set<std::pair<std::string, std::size_t>> ids;
    for (const auto& [key, t] : trajectories_)
        ids.emplace(key.problem, key.dim);
    return {ids.begin(), ids.end()};
}

std::vector<std::size_t> TrajectoryStore::dimensions() const
{
    std::set<std::size_t> dims;
    for (const auto& [key, t] : trajectories_)
        dims.insert(key.dim);
    return {dims.begin(), dims.end()};
}

std::vector<std::size_t> TrajectoryStore::runs(const std::string& problem, std::size_t dim) const
{
    std::set<std::size_t> out;
    for (const auto& [key, t] : trajectories_)
        if (key.problem == problem && key.dim == dim)
            out.insert(key.run);
    return {out.begin(), out.end()};
}

ScalingParams compute_scaling(const TrajectoryStore& store, const std::string& problem_id, std::size_t dimension)
{
    ScalingParams params;
    params.problem_id = problem_id;
    params.dimension = dimension;
    params.x_min.assign(dimension, std::numeric_limits<double>::infinity());
    params.x_max.assign(dimension, -std::numeric_limits<double>::infinity());
    params.fitness_min = std::numeric_limits<double>::infinity();
    params.fitness_max = -std::numeric_limits<double>::infinity();

    bool found = false;
    for (const auto& [key, t] : store) {
        if (key.problem != problem_id || key.dim != dimension)
            continue;
        found = true;
        for (const Population& p : t.populations) {
            for (std::size_t r = 0; r < p.size(); ++r) {
                for (std::size_t c = 0; c < dimension; ++c) {
                    params.x_min[c] = std::min(params.x_min[c], p.solutions[r][c]);
                    params.x_max[c] = std::max(params.x_max[c], p.solutions[r][c]);
                }
                params.fitness_min = std::min(params.fitness_min, p.fitness[r]);
                params.fitness_max = std::max(params.fitness_max, p.fitness[r]);
            }
        }
    }
    if (!found)
        throw InputError("no trajectories for problem '" + problem_id + "' in dimension " +
                         std::to_string(dimension));
    return params;
}

double scale_value(double v, double lo, double hi)
{
    if (hi == lo)
        return 0.0;
    return (v - lo) / (hi - lo);
}

Trajectory apply_scaling(const Trajectory& t, const ScalingParams& params)
{
    if (t.problem_id != params.problem_id || t.dimension != params.dimension ||
        params.x_min.size() != t.dimension || params.x_max.size() != t.dimension)
        throw InputError("scaling parameters for (" + params.problem_id + ", dim " +
                         std::to_string(params.dimension) + ") do not match trajectory (" + t.problem_id +
                         ", dim " + std::to_string(t.dimension) + ")");
    Trajectory scaled = t;
    for (Population& p : scaled.populations) {
        for (std::size_t r = 0; r < p.size(); ++r) {
            for (std::size_t c = 0; c < t.dimension; ++c)
                p.solutions[r][c] = scale_value(p.solutions[r][c], params.x_min[c], params.x_max[c]);
            p.fitness[r] = scale_value(p.fitness[r], params.fitness_min, params.fitness_max);
        }
    }
    return scaled;
}

std::vector<Point> feature_vectors(const Population& p, bool include_fitness)
{
    std::vector<Point> out;
    out.reserve(p.size());
    for (std::size_t r = 0; r < p.size(); ++r) {
        Point v = p.solutions[r];
        if (include_fitness)
            v.push_back(p.fitness[r]);
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace trajmatch
