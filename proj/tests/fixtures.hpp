#pragma once

#include "trajmatch/trajectory.hpp"

#include <utility>

namespace trajmatch::fixtures {

// Two 1-d populations of `size` members each, built from co-located pairs at
// well separated sites, so that the crossmatch count is exactly `a1`.
inline std::pair<Population, Population> populations_with_a1(std::size_t size, std::size_t a1, std::size_t iteration)
{
    Population x, y;
    x.iteration = y.iteration = iteration;
    double site = 0.0;
    auto put = [&](Population& p) {
        p.solutions.push_back({site});
        p.fitness.push_back(0.0);
    };
    for (std::size_t k = 0; k < a1; ++k, site += 10.0) {
        put(x);
        put(y);
    }
    for (std::size_t k = 0; k < (size - a1) / 2; ++k, site += 10.0) {
        put(x);
        put(x);
    }
    for (std::size_t k = 0; k < (size - a1) / 2; ++k, site += 10.0) {
        put(y);
        put(y);
    }
    return {x, y};
}

// Trajectories "x" and "y" whose iteration i has crossmatch count a1s[i].
inline std::pair<Trajectory, Trajectory> trajectories_with_a1(std::size_t size, const std::vector<std::size_t>& a1s)
{
    Trajectory a{"x", "fixture", 1, 0, {}};
    Trajectory b{"y", "fixture", 1, 0, {}};
    for (std::size_t it = 0; it < a1s.size(); ++it) {
        auto [px, py] = populations_with_a1(size, a1s[it], it);
        a.populations.push_back(std::move(px));
        b.populations.push_back(std::move(py));
    }
    return {a, b};
}

} // namespace trajmatch::fixtures
