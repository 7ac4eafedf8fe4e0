#pragma once

#include "trajmatch/matching.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace trajmatch {

/// One iteration's snapshot of an optimizer's population.
struct Population {
    std::size_t iteration = 0;
    std::vector<Point> solutions; ///< n_pop rows of d coordinates
    std::vector<double> fitness;  ///< one objective value per row

    std::size_t size() const { return solutions.size(); }
    std::size_t dimension() const { return solutions.empty() ? 0 : solutions.front().size(); }

    bool operator==(const Population&) const = default;
};

struct TrajectoryKey {
    std::string algorithm;
    std::string problem;
    std::size_t dim = 0;
    std::size_t run = 0;

    auto operator<=>(const TrajectoryKey&) const = default;
};

/// Ordered populations of one (algorithm, problem, dimension, run).
struct Trajectory {
    std::string algorithm_id;
    std::string problem_id;
    std::size_t dimension = 0;
    std::size_t run = 0;
    std::vector<Population> populations;

    TrajectoryKey key() const { return {algorithm_id, problem_id, dimension, run}; }
    std::size_t iterations() const { return populations.size(); }
    std::size_t population_size() const { return populations.empty() ? 0 : populations.front().size(); }

    /// Checks internal invariants; throws InputError naming the trajectory.
    void validate() const;

    bool operator==(const Trajectory&) const = default;
};

/// Trajectories keyed by (algorithm, problem, dim, run). Iteration order is
/// the key order, which makes every downstream reduction deterministic.
class TrajectoryStore {
public:
    /// Adds a validated trajectory. Duplicate keys and inconsistencies with
    /// already stored trajectories of the same (problem, dim, run) throw.
    void add(Trajectory t);

    bool empty() const { return trajectories_.empty(); }
    std::size_t size() const { return trajectories_.size(); }

    const Trajectory& at(const TrajectoryKey& key) const;
    const Trajectory* find(const TrajectoryKey& key) const;

    auto begin() const { return trajectories_.begin(); }
    auto end() const { return trajectories_.end(); }

    std::vector<std::string> algorithms() const;
    /// Distinct (problem, dim) instances.
    std::vector<std::pair<std::string, std::size_t>> problem_instances() const;
    std::vector<std::size_t> dimensions() const;
    std::vector<std::size_t> runs(const std::string& problem, std::size_t dim) const;

    bool operator==(const TrajectoryStore&) const = default;

private:
    std::map<TrajectoryKey, Trajectory> trajectories_;
};

/// Min-max bounds for one problem instance, over all algorithms and runs.
struct ScalingParams {
    std::string problem_id;
    std::size_t dimension = 0;
    std::vector<double> x_min;
    std::vector<double> x_max;
    double fitness_min = 0.0;
    double fitness_max = 0.0;
};

ScalingParams compute_scaling(const TrajectoryStore& store, const std::string& problem_id, std::size_t dimension);

/// Maps every value to (v - min) / (max - min); constant ranges map to 0.
Trajectory apply_scaling(const Trajectory& t, const ScalingParams& params);

/// Scales one value; a degenerate range (max == min) yields 0.
double scale_value(double v, double lo, double hi);

/// Rows fed to the crossmatch test: solution coordinates, plus the fitness
/// as a trailing coordinate when requested.
std::vector<Point> feature_vectors(const Population& p, bool include_fitness);

// I/O. CSV columns: algorithm,problem,dim,run,iteration,member,fitness,x0..x{d-1}
TrajectoryStore read_trajectories_csv(std::istream& in);
TrajectoryStore read_trajectories_json(std::istream& in);
/// Picks the format from the extension (.json, anything else is CSV).
TrajectoryStore load_trajectories(const std::filesystem::path& path);

void write_trajectories_csv(const TrajectoryStore& store, std::ostream& out);
void write_trajectories_json(const TrajectoryStore& store, std::ostream& out);
void save_trajectories(const TrajectoryStore& store, const std::filesystem::path& path);

} // namespace trajmatch
