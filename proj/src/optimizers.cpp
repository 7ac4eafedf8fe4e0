#include "optimizers.hpp"

#include "trajmatch/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trajmatch::detail {

double Evaluator::operator()(const Point& x)
{
    if (count_ >= limit_)
        throw std::logic_error("evaluation budget of " + std::to_string(limit_) + " exceeded on " + problem_.id);
    ++count_;
    double f = problem_(x);
    best_ = std::min(best_, f);
    return f;
}

namespace {

constexpr double kRange = kDomainUpper - kDomainLower;

void clamp_to_box(Point& x)
{
    for (double& v : x)
        v = std::clamp(v, kDomainLower, kDomainUpper);
}

std::size_t uniform_index(Rng& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// k distinct indices from [0, n), none equal to `exclude`.
template <std::size_t K>
std::array<std::size_t, K> distinct_indices(Rng& rng, std::size_t n, std::size_t exclude)
{
    std::array<std::size_t, K> out{};
    for (std::size_t k = 0; k < K; ++k) {
        for (;;) {
            std::size_t c = uniform_index(rng, n);
            if (c == exclude || std::find(out.begin(), out.begin() + k, c) != out.begin() + k)
                continue;
            out[k] = c;
            break;
        }
    }
    return out;
}

std::size_t best_index(const std::vector<double>& fitness)
{
    return static_cast<std::size_t>(std::min_element(fitness.begin(), fitness.end()) - fitness.begin());
}

// Binomial crossover of a mutant into the target; gene j_rand always comes
// from the mutant.
Point binomial_crossover(const Point& target, const Point& mutant, double cr, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t d = target.size();
    const std::size_t j_rand = uniform_index(rng, d);
    Point trial(d);
    for (std::size_t j = 0; j < d; ++j)
        trial[j] = (unit(rng) < cr || j == j_rand) ? mutant[j] : target[j];
    clamp_to_box(trial);
    return trial;
}

class PopulationOptimizer : public Optimizer {
public:
    void initialize(const Population& initial) override
    {
        solutions_ = initial.solutions;
        fitness_ = initial.fitness;
    }

    Population snapshot() const override
    {
        Population p;
        p.solutions = solutions_;
        p.fitness = fitness_;
        return p;
    }

protected:
    std::vector<Point> solutions_;
    std::vector<double> fitness_;
};

class RandomSearch final : public PopulationOptimizer {
public:
    RandomSearch(std::size_t dim, Rng rng) : dim_(dim), rng_(rng) {}

    void step(Evaluator& evaluate) override
    {
        std::uniform_real_distribution<double> box(kDomainLower, kDomainUpper);
        for (std::size_t i = 0; i < solutions_.size(); ++i) {
            Point x(dim_);
            for (double& v : x)
                v = box(rng_);
            fitness_[i] = evaluate(x);
            solutions_[i] = std::move(x);
        }
    }

private:
    std::size_t dim_;
    Rng rng_;
};

/// DE/rand/1/bin with greedy one-to-one replacement.
class DifferentialEvolution final : public PopulationOptimizer {
public:
    DifferentialEvolution(double f, double cr, Rng rng) : f_(f), cr_(cr), rng_(rng) {}

    void step(Evaluator& evaluate) override
    {
        const std::size_t n = solutions_.size();
        std::vector<Point> trials(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto [r1, r2, r3] = distinct_indices<3>(rng_, n, i);
            Point mutant(solutions_[i].size());
            for (std::size_t j = 0; j < mutant.size(); ++j)
                mutant[j] = solutions_[r1][j] + f_ * (solutions_[r2][j] - solutions_[r3][j]);
            trials[i] = binomial_crossover(solutions_[i], mutant, cr_, rng_);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double ft = evaluate(trials[i]);
            if (ft <= fitness_[i]) {
                solutions_[i] = std::move(trials[i]);
                fitness_[i] = ft;
            }
        }
    }

private:
    double f_;
    double cr_;
    Rng rng_;
};

/// Self-adaptive DE: each trial picks rand/1 (probability p1) or
/// current-to-best/1 + difference, with per-individual F ~ N(f_mean, f_sd)
/// and CR ~ N(cr_mean, cr_sd). cr_mean is re-estimated from successful CRs
/// every cr_period generations; p1 from success/failure counts every
/// learning_period generations.
class SelfAdaptiveDE final : public PopulationOptimizer {
public:
    SelfAdaptiveDE(const std::map<std::string, double>& hp, Rng rng)
        : f_mean_(hp.at("f_mean")), f_sd_(hp.at("f_sd")), cr_mean_(hp.at("cr_init")), cr_sd_(hp.at("cr_sd")),
          cr_period_(static_cast<std::size_t>(hp.at("cr_period"))),
          learning_period_(static_cast<std::size_t>(hp.at("learning_period"))), rng_(rng)
    {
    }

    void step(Evaluator& evaluate) override
    {
        const std::size_t n = solutions_.size();
        const std::size_t best = best_index(fitness_);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> f_dist(f_mean_, f_sd_);
        std::normal_distribution<double> cr_dist(cr_mean_, cr_sd_);

        std::vector<Point> trials(n);
        std::vector<double> crs(n);
        std::vector<char> used_rand(n);
        for (std::size_t i = 0; i < n; ++i) {
            crs[i] = std::clamp(cr_dist(rng_), 0.0, 1.0);
            double f = f_dist(rng_);
            while (f < 0.0)
                f = f_dist(rng_);
            f = std::min(f, 1.0);

            auto [r1, r2, r3] = distinct_indices<3>(rng_, n, i);
            Point mutant(solutions_[i].size());
            used_rand[i] = unit(rng_) < p1_;
            for (std::size_t j = 0; j < mutant.size(); ++j) {
                if (used_rand[i])
                    mutant[j] = solutions_[r1][j] + f * (solutions_[r2][j] - solutions_[r3][j]);
                else
                    mutant[j] = solutions_[i][j] + f * (solutions_[best][j] - solutions_[i][j]) +
                                f * (solutions_[r1][j] - solutions_[r2][j]);
            }
            trials[i] = binomial_crossover(solutions_[i], mutant, crs[i], rng_);
        }

        for (std::size_t i = 0; i < n; ++i) {
            double ft = evaluate(trials[i]);
            const bool success = ft <= fitness_[i];
            if (success) {
                solutions_[i] = std::move(trials[i]);
                fitness_[i] = ft;
                successful_crs_.push_back(crs[i]);
            }
            if (used_rand[i])
                (success ? ns1_ : nf1_) += 1;
            else
                (success ? ns2_ : nf2_) += 1;
        }

        ++generation_;
        if (cr_period_ > 0 && generation_ % cr_period_ == 0) {
            if (!successful_crs_.empty())
                cr_mean_ = std::accumulate(successful_crs_.begin(), successful_crs_.end(), 0.0) /
                           static_cast<double>(successful_crs_.size());
            successful_crs_.clear();
        }
        if (learning_period_ > 0 && generation_ % learning_period_ == 0) {
            const double denom = ns2_ * (ns1_ + nf1_) + ns1_ * (ns2_ + nf2_);
            if (denom > 0.0)
                p1_ = ns1_ * (ns2_ + nf2_) / denom;
            ns1_ = nf1_ = ns2_ = nf2_ = 0.0;
        }
    }

private:
    double f_mean_;
    double f_sd_;
    double cr_mean_;
    double cr_sd_;
    std::size_t cr_period_;
    std::size_t learning_period_;
    Rng rng_;
    double p1_ = 0.5;
    double ns1_ = 0, nf1_ = 0, ns2_ = 0, nf2_ = 0;
    std::size_t generation_ = 0;
    std::vector<double> successful_crs_;
};

/// Real-coded GA: tournament selection, uniform crossover, Gaussian
/// mutation, then (mu + lambda) truncation to the best n_pop.
class GeneticAlgorithm final : public PopulationOptimizer {
public:
    GeneticAlgorithm(const std::map<std::string, double>& hp, std::size_t dim, Rng rng)
        : tournament_(static_cast<std::size_t>(hp.at("tournament_size"))), crossover_rate_(hp.at("crossover_rate")),
          sigma_(hp.at("mutation_sigma_fraction") * kRange),
          mutation_rate_(hp.at("mutation_rate") > 0.0 ? hp.at("mutation_rate") : 1.0 / static_cast<double>(dim)),
          rng_(rng)
    {
    }

    void step(Evaluator& evaluate) override
    {
        const std::size_t n = solutions_.size();
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> noise(0.0, sigma_);

        std::vector<Point> children;
        children.reserve(n);
        while (children.size() < n) {
            Point a = solutions_[select()];
            Point b = solutions_[select()];
            if (unit(rng_) < crossover_rate_)
                for (std::size_t j = 0; j < a.size(); ++j)
                    if (unit(rng_) < 0.5)
                        std::swap(a[j], b[j]);
            for (Point* child : {&a, &b}) {
                for (double& v : *child)
                    if (unit(rng_) < mutation_rate_)
                        v += noise(rng_);
                clamp_to_box(*child);
            }
            children.push_back(std::move(a));
            if (children.size() < n)
                children.push_back(std::move(b));
        }

        std::vector<Point> pool = solutions_;
        std::vector<double> pool_fitness = fitness_;
        for (auto& c : children) {
            pool_fitness.push_back(evaluate(c));
            pool.push_back(std::move(c));
        }
        std::vector<std::size_t> order(pool.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return pool_fitness[x] < pool_fitness[y]; });
        for (std::size_t i = 0; i < n; ++i) {
            solutions_[i] = pool[order[i]];
            fitness_[i] = pool_fitness[order[i]];
        }
    }

private:
    std::size_t select()
    {
        std::size_t winner = uniform_index(rng_, solutions_.size());
        for (std::size_t k = 1; k < tournament_; ++k) {
            std::size_t c = uniform_index(rng_, solutions_.size());
            if (fitness_[c] < fitness_[winner])
                winner = c;
        }
        return winner;
    }

    std::size_t tournament_;
    double crossover_rate_;
    double sigma_;
    double mutation_rate_;
    Rng rng_;
};

/// Global-best PSO with inertia weight and velocity clamping. The recorded
/// population is the swarm's current positions.
class ParticleSwarm final : public PopulationOptimizer {
public:
    ParticleSwarm(const std::map<std::string, double>& hp, Rng rng)
        : inertia_(hp.at("inertia")), c1_(hp.at("c1")), c2_(hp.at("c2")), v_max_(hp.at("v_max_fraction") * kRange),
          rng_(rng)
    {
    }

    void initialize(const Population& initial) override
    {
        PopulationOptimizer::initialize(initial);
        personal_best_ = solutions_;
        personal_best_fitness_ = fitness_;
        std::uniform_real_distribution<double> velocity(-v_max_, v_max_);
        velocities_.assign(solutions_.size(), Point(solutions_.front().size()));
        for (auto& v : velocities_)
            for (double& c : v)
                c = velocity(rng_);
        update_global_best();
    }

    void step(Evaluator& evaluate) override
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const Point global = personal_best_[global_best_];
        for (std::size_t i = 0; i < solutions_.size(); ++i) {
            Point& x = solutions_[i];
            Point& v = velocities_[i];
            for (std::size_t j = 0; j < x.size(); ++j) {
                double r1 = unit(rng_);
                double r2 = unit(rng_);
                v[j] = inertia_ * v[j] + c1_ * r1 * (personal_best_[i][j] - x[j]) + c2_ * r2 * (global[j] - x[j]);
                v[j] = std::clamp(v[j], -v_max_, v_max_);
                x[j] += v[j];
            }
            clamp_to_box(x);
            fitness_[i] = evaluate(x);
            if (fitness_[i] <= personal_best_fitness_[i]) {
                personal_best_[i] = x;
                personal_best_fitness_[i] = fitness_[i];
            }
        }
        update_global_best();
    }

private:
    void update_global_best() { global_best_ = best_index(personal_best_fitness_); }

    double inertia_;
    double c1_;
    double c2_;
    double v_max_;
    Rng rng_;
    std::vector<Point> velocities_;
    std::vector<Point> personal_best_;
    std::vector<double> personal_best_fitness_;
    std::size_t global_best_ = 0;
};

std::map<std::string, double> resolve_hyperparameters(const AlgorithmSpec& spec)
{
    auto params = default_hyperparameters(spec.algorithm_id);
    for (const auto& [name, value] : spec.hyperparameters) {
        auto it = params.find(name);
        if (it == params.end())
            throw InputError("algorithm '" + spec.algorithm_id + "' has no hyperparameter '" + name + "'");
        if (!std::isfinite(value))
            throw InputError("hyperparameter '" + name + "' must be finite");
        it->second = value;
    }
    return params;
}

} // namespace

std::unique_ptr<Optimizer> make_optimizer(const AlgorithmSpec& spec, const Problem& problem, Rng rng)
{
    const auto hp = resolve_hyperparameters(spec);
    const std::string& id = spec.algorithm_id;
    if (id == "random_search")
        return std::make_unique<RandomSearch>(problem.dimension, rng);
    if (id == "de_rand_1_bin")
        return std::make_unique<DifferentialEvolution>(hp.at("F"), hp.at("CR"), rng);
    if (id == "sade")
        return std::make_unique<SelfAdaptiveDE>(hp, rng);
    if (id == "ga")
        return std::make_unique<GeneticAlgorithm>(hp, problem.dimension, rng);
    if (id == "pso")
        return std::make_unique<ParticleSwarm>(hp, rng);
    throw InputError("unknown algorithm '" + id + "'");
}

} // namespace trajmatch::detail

namespace trajmatch {

std::map<std::string, double> default_hyperparameters(std::string_view algorithm_id)
{
    if (algorithm_id == "random_search")
        return {};
    if (algorithm_id == "de_rand_1_bin")
        return {{"F", 0.8}, {"CR", 0.9}};
    if (algorithm_id == "sade")
        return {{"f_mean", 0.5}, {"f_sd", 0.3}, {"cr_init", 0.5},
                {"cr_sd", 0.1},  {"cr_period", 5}, {"learning_period", 50}};
    if (algorithm_id == "ga")
        // mutation_rate 0 selects 1/d
        return {{"tournament_size", 2}, {"crossover_rate", 0.9}, {"mutation_sigma_fraction", 0.1}, {"mutation_rate", 0}};
    if (algorithm_id == "pso")
        return {{"inertia", 0.729}, {"c1", 1.49445}, {"c2", 1.49445}, {"v_max_fraction", 0.5}};
    throw InputError("unknown algorithm '" + std::string(algorithm_id) + "'");
}

const std::vector<std::string>& builtin_algorithm_ids()
{
    static const std::vector<std::string> ids{"random_search", "de_rand_1_bin", "sade", "ga", "pso"};
    return ids;
}

} // namespace trajmatch
