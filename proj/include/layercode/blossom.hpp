#pragma once

#include <vector>

namespace layercode {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    long long weight = 0;
};

/// Maximum-weight matching on a general graph (primal-dual blossom method, O(n^3)).
/// With `max_cardinality`, maximizes weight among maximum-cardinality matchings.
/// Returns mate[v] (or -1) for every vertex 0..n-1. Integer arithmetic throughout.
std::vector<int> max_weight_matching(int num_vertices, const std::vector<WeightedEdge>& edges,
                                     bool max_cardinality);

}  // namespace layercode
