#pragma once

#include "trajmatch/crossmatch.hpp"
#include "trajmatch/trajectory.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace trajmatch {

struct AnalysisOptions {
    double alpha = 0.05;
    TieMode tie_mode = TieMode::Neutral;
    bool include_fitness = false;
    std::size_t threads = 1;
};

/// Per-test significance level after Bonferroni correction over the
/// iterations of one run.
double bonferroni_threshold(double alpha, std::size_t iterations);

struct IterationOutcome {
    std::size_t iteration = 0;
    std::size_t a1 = 0;
    double p_value = 1.0;
    bool rejected = false;

    bool operator==(const IterationOutcome&) const = default;
};

struct RunComparison {
    std::string algorithm_a;
    std::string algorithm_b;
    std::string problem_id;
    std::size_t dimension = 0;
    std::size_t run = 0;
    std::vector<IterationOutcome> per_iteration;
    /// Fraction of iterations where the test did not reject.
    double similarity = 0.0;
};

/// Symmetric algorithm x algorithm matrix with unit diagonal.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::vector<std::string> ids);

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * ids_.size() + j]; }
    /// Sets (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double value);
    std::size_t index_of(const std::string& id) const;

    /// Throws InputError unless symmetric, unit diagonal, entries in [0, 1].
    void validate() const;

    bool operator==(const SimilarityMatrix&) const = default;

private:
    std::vector<std::string> ids_;
    std::vector<double> entries_;
};

/// Tests population i of `a` against population i of `b` for every
/// iteration, after min-max scaling with `scaling`.
RunComparison compare_run(const Trajectory& a, const Trajectory& b, const ScalingParams& scaling,
                          const AnalysisOptions& options);

struct SeriesPoint {
    std::size_t iteration = 0;
    std::size_t a1 = 0;

    bool operator==(const SeriesPoint&) const = default;
};

/// Crossmatch statistic per iteration (for plotting).
std::vector<SeriesPoint> statistic_series(const Trajectory& a, const Trajectory& b, const ScalingParams& scaling,
                                          const AnalysisOptions& options);

struct SimilarityReport {
    std::vector<std::size_t> dimensions;
    std::vector<SimilarityMatrix> per_dimension; ///< parallel to `dimensions`
    SimilarityMatrix overall;                    ///< mean of the per-dimension matrices
    /// Every (pair, problem, dim, run) comparison, pairs with a < b, in key order.
    std::vector<RunComparison> comparisons;
};

/// Scales each problem instance over all its trajectories, compares every
/// algorithm pair on every (problem, dim, run) and averages the run
/// similarities. Parallel over options.threads; the result does not depend
/// on the thread count.
SimilarityReport pairwise_similarity(const TrajectoryStore& store, const AnalysisOptions& options);

// Matrix CSV: header "algorithm,<id>,<id>,..." then one row per id.
void write_matrix_csv(const SimilarityMatrix& m, std::ostream& out);
SimilarityMatrix read_matrix_csv(std::istream& in);

// Series CSV: algorithm_a,algorithm_b,problem,dim,run,iteration,a1,p_value,rejected
void write_series_csv(const std::vector<RunComparison>& comparisons, std::ostream& out);
/// Rebuilds run comparisons (similarity recomputed from the rejection flags).
std::vector<RunComparison> read_series_csv(std::istream& in);

} // namespace trajmatch
