#include "trajmatch/cluster.hpp"

#include "trajmatch/errors.hpp"

#include <cmath>
#include <limits>

namespace trajmatch {

Dissimilarity to_dissimilarity(const SimilarityMatrix& m)
{
    m.validate();
    Dissimilarity d;
    d.ids = m.ids();
    const std::size_t n = m.size();
    d.entries.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d.entries[i * n + j] = 1.0 - m(i, j);
    return d;
}

Dendrogram ward_cluster(const Dissimilarity& d)
{
    const std::size_t n = d.ids.size();
    if (n < 2)
        throw InputError("clustering needs at least 2 leaves");
    if (d.entries.size() != n * n)
        throw InputError("dissimilarity has the wrong number of entries");
    for (std::size_t i = 0; i < n; ++i) {
        if (d(i, i) != 0.0)
            throw InputError("dissimilarity diagonal must be 0");
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(d(i, j)) || d(i, j) < 0.0 || d(i, j) != d(j, i))
                throw InputError("dissimilarity must be finite, non-negative and symmetric");
    }

    // Squared distances between active clusters, indexed by node id.
    const std::size_t total = 2 * n - 1;
    std::vector<std::vector<double>> sq(total, std::vector<double>(total, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sq[i][j] = d(i, j) * d(i, j);
    std::vector<std::size_t> size(total, 1);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i)
        active.push_back(i);

    Dendrogram dg;
    dg.leaves = d.ids;
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_a = 0;
        std::size_t best_b = 0;
        double best = std::numeric_limits<double>::infinity();
        // `active` is kept sorted, so scanning in order gives lexicographic
        // tie-breaking on (node_a, node_b).
        for (std::size_t x = 0; x < active.size(); ++x)
            for (std::size_t y = x + 1; y < active.size(); ++y)
                if (sq[active[x]][active[y]] < best) {
                    best = sq[active[x]][active[y]];
                    best_a = active[x];
                    best_b = active[y];
                }

        const std::size_t node = n + step;
        const double ni = static_cast<double>(size[best_a]);
        const double nj = static_cast<double>(size[best_b]);
        for (std::size_t k : active) {
            if (k == best_a || k == best_b)
                continue;
            const double nk = static_cast<double>(size[k]);
            double updated = ((ni + nk) * sq[best_a][k] + (nj + nk) * sq[best_b][k] - nk * sq[best_a][best_b]) /
                             (ni + nj + nk);
            updated = std::max(updated, 0.0);
            sq[node][k] = sq[k][node] = updated;
        }
        size[node] = size[best_a] + size[best_b];
        dg.merges.push_back({best_a, best_b, std::sqrt(best), node});

        std::erase(active, best_a);
        std::erase(active, best_b);
        active.push_back(node); // largest id so far, order stays sorted
    }
    return dg;
}

std::vector<std::size_t> leaves_under(const Dendrogram& dg, std::size_t node)
{
    const std::size_t n = dg.leaves.size();
    if (node < n)
        return {node};
    const Merge& m = dg.merges.at(node - n);
    auto left = leaves_under(dg, m.node_a);
    auto right = leaves_under(dg, m.node_b);
    left.insert(left.end(), right.begin(), right.end());
    return left;
}

} // namespace trajmatch
