#pragma once

#include "trajmatch/analysis.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace trajmatch {

/// 1 - similarity; symmetric with zero diagonal.
struct Dissimilarity {
    std::vector<std::string> ids;
    std::vector<double> entries; // row-major, ids.size()^2

    double operator()(std::size_t i, std::size_t j) const { return entries[i * ids.size() + j]; }
};

Dissimilarity to_dissimilarity(const SimilarityMatrix& m);

/// One agglomeration step. Leaves are nodes 0..n-1 (input order); merge k
/// creates node n + k. node_a < node_b.
struct Merge {
    std::size_t node_a = 0;
    std::size_t node_b = 0;
    double height = 0.0;
    std::size_t node = 0;

    bool operator==(const Merge&) const = default;
};

struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;

    bool operator==(const Dendrogram&) const = default;
};

/// Agglomerative clustering with the Lance-Williams Ward update applied to
/// the precomputed dissimilarity. Ties between equal distances go to the
/// lexicographically smallest (node_a, node_b).
Dendrogram ward_cluster(const Dissimilarity& d);

enum class DendrogramFormat { Newick, Json, Svg };

DendrogramFormat parse_dendrogram_format(std::string_view text);
std::string export_dendrogram(const Dendrogram& dg, DendrogramFormat format);
std::string export_dendrogram(const Dendrogram& dg, std::string_view format);

/// Inverse of the JSON export.
Dendrogram dendrogram_from_json(std::string_view text);

/// Leaves under `node`, in drawing order.
std::vector<std::size_t> leaves_under(const Dendrogram& dg, std::size_t node);

} // namespace trajmatch
