#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "torus/configuration.hpp"

namespace torus {

/// Aligned comparison of a configuration against a reference.
struct DefectReport {
  int dim = 1;
  /// Translation applied to the configuration.
  std::array<double, 2> shift{0.0, 0.0};
  /// permutation[k] = index of the reference point matched to point k.
  std::vector<std::size_t> permutation;
  /// Minimum-image x_k + shift - t_{permutation[k]}, flattened.
  std::vector<double> delta;
  double sup_norm = 0.0;
  double l2_norm = 0.0;
  /// Sup norm of the same matching after re-centering the defect to zero mean
  /// (the gauge in which translation is fixed by the centroid).
  double mean_gauge_sup = 0.0;
  /// "hungarian", "greedy" or "rotation" (exact 1D circular matching).
  std::string method;
};

/// Rebuilds delta, sup_norm, l2_norm and mean_gauge_sup from shift and
/// permutation.
DefectReport defect_from(const Configuration& config, const Configuration& reference,
                         const std::array<double, 2>& shift, std::vector<std::size_t> permutation);

/// Translation and relabeling minimizing the sup defect against `reference`.
///
/// 1D is solved exactly: for a fixed shift the bottleneck matching between
/// two circular point sets is a cyclic rotation of the sorted orders, and for
/// a fixed rotation the best shift is the centre of the shortest arc holding
/// all differences. 2D scans shifts carrying one point onto each reference
/// point, matches by squared periodic distance, and moves the shift to the
/// centre of the smallest circle enclosing the defects until the matching is
/// stable.
std::pair<Configuration, DefectReport> canonicalize_translation(const Configuration& config,
                                                                const Configuration& reference);

}  // namespace torus
