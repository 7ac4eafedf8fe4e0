#pragma once

#include "trajmatch/portfolio.hpp"

#include <limits>
#include <memory>

namespace trajmatch::detail {

/// Counts objective evaluations and refuses to exceed the budget.
class Evaluator {
public:
    Evaluator(const Problem& problem, std::size_t limit) : problem_(problem), limit_(limit) {}

    double operator()(const Point& x);
    std::size_t count() const { return count_; }
    double best() const { return best_; }

private:
    const Problem& problem_;
    std::size_t limit_;
    std::size_t count_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

/// A population-based optimizer advanced one generation at a time. Every
/// step evaluates exactly n_pop new candidates.
class Optimizer {
public:
    virtual ~Optimizer() = default;

    /// Starts from an already evaluated population.
    virtual void initialize(const Population& initial) = 0;
    virtual void step(Evaluator& evaluate) = 0;
    /// Current population (solutions + fitness) as recorded in trajectories.
    virtual Population snapshot() const = 0;
};

std::unique_ptr<Optimizer> make_optimizer(const AlgorithmSpec& spec, const Problem& problem, Rng rng);

} // namespace trajmatch::detail
