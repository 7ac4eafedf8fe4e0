#include "trajmatch/errors.hpp"
#include "trajmatch/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace trajmatch {

namespace {

// Fixed structure (rotations, peak locations) comes from this seed so a
// problem is the same function in every run and every process.
constexpr std::uint64_t kProblemStructureSeed = 0x5eed'0f'7e57ULL;

using Matrix = std::vector<std::vector<double>>;

Matrix random_rotation(std::size_t d, Rng rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix q(d, std::vector<double>(d));
    for (auto& row : q)
        for (double& v : row)
            v = normal(rng);
    // Gram-Schmidt on the rows.
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                dot += q[i][j] * q[k][j];
            for (std::size_t j = 0; j < d; ++j)
                q[i][j] -= dot * q[k][j];
        }
        double norm = 0.0;
        for (double v : q[i])
            norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : q[i])
            v /= norm;
    }
    return q;
}

double conditioning_exponent(std::size_t i, std::size_t d)
{
    return d == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(d - 1);
}

Problem sphere(std::size_t d)
{
    return {"sphere", d, [](std::span<const double> x) {
                double acc = 0.0;
                for (double v : x)
                    acc += v * v;
                return acc;
            }};
}

Problem ellipsoid_rotated(std::size_t d)
{
    auto rotation = std::make_shared<const Matrix>(
        random_rotation(d, make_stream(kProblemStructureSeed, "ellipsoid_rotated/" + std::to_string(d))));
    return {"ellipsoid_rotated", d, [rotation, d](std::span<const double> x) {
                double acc = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    double z = 0.0;
                    for (std::size_t j = 0; j < d; ++j)
                        z += (*rotation)[i][j] * x[j];
                    acc += std::pow(1e6, conditioning_exponent(i, d)) * z * z;
                }
                return acc;
            }};
}

Problem rosenbrock(std::size_t d)
{
    return {"rosenbrock", d, [](std::span<const double> x) {
                double acc = 0.0;
                for (std::size_t i = 0; i + 1 < x.size(); ++i) {
                    double a = x[i + 1] - x[i] * x[i];
                    double b = 1.0 - x[i];
                    acc += 100.0 * a * a + b * b;
                }
                return acc;
            }};
}

Problem rastrigin(std::size_t d)
{
    return {"rastrigin", d, [](std::span<const double> x) {
                double acc = 10.0 * static_cast<double>(x.size());
                for (double v : x)
                    acc += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
                return acc;
            }};
}

Problem schwefel_1_2(std::size_t d)
{
    return {"schwefel_1_2", d, [](std::span<const double> x) {
                double acc = 0.0;
                double prefix = 0.0;
                for (double v : x) {
                    prefix += v;
                    acc += prefix * prefix;
                }
                return acc;
            }};
}

// Mixture of 21 Gaussian peaks with individual axis conditioning; peak 0 is
// the global optimum with height 10, the others range over [1.1, 9.1].
struct GallagherPeaks {
    std::vector<Point> centers;
    std::vector<Point> conditioning;
    std::vector<double> heights;
};

Problem gallagher(std::size_t d)
{
    constexpr std::size_t kPeaks = 21;
    auto rng = make_stream(kProblemStructureSeed, "gallagher/" + std::to_string(d));
    std::uniform_real_distribution<double> centre(-4.0, 4.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto peaks = std::make_shared<GallagherPeaks>();
    for (std::size_t k = 0; k < kPeaks; ++k) {
        Point c(d);
        for (double& v : c)
            v = centre(rng);
        const double alpha = k == 0 ? 1000.0 : std::pow(1000.0, 2.0 * unit(rng));
        Point cond(d);
        for (std::size_t i = 0; i < d; ++i)
            cond[i] = std::pow(alpha, 0.5 * conditioning_exponent(i, d)) / std::pow(alpha, 0.25);
        peaks->centers.push_back(std::move(c));
        peaks->conditioning.push_back(std::move(cond));
        peaks->heights.push_back(k == 0 ? 10.0 : 1.1 + 8.0 * static_cast<double>(k - 1) / (kPeaks - 2));
    }

    return {"gallagher", d, [peaks = std::shared_ptr<const GallagherPeaks>(peaks), d](std::span<const double> x) {
                double best = 0.0;
                for (std::size_t k = 0; k < peaks->centers.size(); ++k) {
                    double q = 0.0;
                    for (std::size_t i = 0; i < d; ++i) {
                        double diff = x[i] - peaks->centers[k][i];
                        q += peaks->conditioning[k][i] * diff * diff;
                    }
                    best = std::max(best, peaks->heights[k] * std::exp(-q / (2.0 * static_cast<double>(d))));
                }
                double gap = 10.0 - best;
                return gap * gap;
            }};
}

} // namespace

const std::vector<std::string>& builtin_problem_ids()
{
    static const std::vector<std::string> ids{"sphere",    "ellipsoid_rotated", "rosenbrock",
                                              "rastrigin", "schwefel_1_2",      "gallagher"};
    return ids;
}

Problem make_problem(std::string_view id, std::size_t dimension)
{
    if (dimension == 0)
        throw InputError("problem dimension must be positive");
    if (id == "sphere")
        return sphere(dimension);
    if (id == "ellipsoid_rotated")
        return ellipsoid_rotated(dimension);
    if (id == "rosenbrock")
        return rosenbrock(dimension);
    if (id == "rastrigin")
        return rastrigin(dimension);
    if (id == "schwefel_1_2")
        return schwefel_1_2(dimension);
    if (id == "gallagher")
        return gallagher(dimension);
    throw InputError("unknown problem '" + std::string(id) + "'");
}

std::vector<Problem> builtin_suite(std::size_t dimension)
{
    std::vector<Problem> out;
    for (const auto& id : builtin_problem_ids())
        out.push_back(make_problem(id, dimension));
    return out;
}

std::vector<Problem> builtin_suite(std::span<const std::size_t> dimensions, std::span<const std::string> ids)
{
    std::vector<Problem> out;
    for (std::size_t d : dimensions)
        for (const auto& id : ids)
            out.push_back(make_problem(id, d));
    return out;
}

} // namespace trajmatch
