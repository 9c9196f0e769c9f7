#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace torus {

struct Assignment {
  /// row -> column, a bijection.
  std::vector<std::size_t> column;
  double cost = 0.0;
  /// "hungarian" or "greedy".
  std::string method;
};

/// Minimum-cost perfect matching on a dense n x n row-major cost matrix
/// (Kuhn-Munkres with potentials, O(n^3)).
Assignment hungarian(std::span<const double> cost, std::size_t n);

/// Greedy matching by increasing cost, accepted only when every row received
/// its row minimum (which makes it optimal); otherwise falls back to the
/// Hungarian method.
Assignment greedy_with_audit(std::span<const double> cost, std::size_t n);

/// Hungarian up to `exact_limit` rows, audited greedy above.
Assignment match(std::span<const double> cost, std::size_t n, std::size_t exact_limit = 256);

}  // namespace torus
