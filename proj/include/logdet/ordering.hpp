#pragma once

#include <vector>

#include "logdet/pattern.hpp"

namespace logdet {

// Minimum degree ordering of the adjacency graph of raw, with ties broken
// toward the smallest vertex. Position k holds the k-th eliminated vertex.
std::vector<int> order_heuristic(const SparsityPattern& raw);

}  // namespace logdet
