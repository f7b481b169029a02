#pragma once

#include <variant>

#include "taxoforge/score_matrix.hpp"
#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

/// Root is fixed by the caller.
struct GivenRoot {
  TermIndex root = 0;
};

/// Solve once per candidate root and keep the best total (smaller root
/// index on ties).
struct BestOfAllRoots {};

/// Add a phantom root whose outgoing edges all score `prior`, solve, then
/// remove it. If the phantom ends up with several children, strict mode
/// throws; otherwise the child with the highest phantom-edge score (smaller
/// index on ties) becomes the root and adopts its siblings.
struct VirtualRoot {
  double prior = 0.0;
  bool strict = false;
};

using RootPolicy = std::variant<GivenRoot, BestOfAllRoots, VirtualRoot>;

Taxonomy induce(const EdgeScoreMatrix& matrix, const RootPolicy& policy);

}  // namespace taxoforge
