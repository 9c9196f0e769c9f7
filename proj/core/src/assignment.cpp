#include "torus/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace torus {

Assignment hungarian(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw std::invalid_argument("cost matrix must be n x n");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; p[j] is the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment out;
  out.method = "hungarian";
  out.column.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.column[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) out.cost += cost[i * n + out.column[i]];
  return out;
}

Assignment greedy_with_audit(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw std::invalid_argument("cost matrix must be n x n");
  std::vector<std::size_t> order(n * n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
  Assignment out;
  out.method = "greedy";
  out.column.assign(n, n);
  std::vector<bool> taken(n, false);
  std::size_t matched = 0;
  for (std::size_t idx : order) {
    const std::size_t i = idx / n, j = idx % n;
    if (out.column[i] != n || taken[j]) continue;
    out.column[i] = j;
    taken[j] = true;
    if (++matched == n) break;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = cost.subspan(i * n, n);
    if (cost[i * n + out.column[i]] > *std::min_element(row.begin(), row.end())) {
      return hungarian(cost, n);
    }
    out.cost += cost[i * n + out.column[i]];
  }
  return out;
}

Assignment match(std::span<const double> cost, std::size_t n, std::size_t exact_limit) {
  return n <= exact_limit ? hungarian(cost, n) : greedy_with_audit(cost, n);
}

}  // namespace torus
