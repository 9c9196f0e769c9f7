#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torus/alignment.hpp"
#include "torus/kernel.hpp"
#include "torus/minimizer.hpp"

namespace torus {

struct VerifyOptions {
  MinimizeOptions minimize;
  /// Sup-defect tolerance for the verdict; unset selects 1e-6 in 1D and
  /// 1e-4 in 2D.
  std::optional<double> tolerance;
  DecayThresholds thresholds;
  /// Exponent in the 2D ratio e^{lambda L} eps~_L / a_{2L/3,L}.
  double lambda = 0.1;
};

/// Outcome of a recovery experiment: minimize, align against the expected
/// lattice, report the defect and the spectral diagnostics.
struct VerdictReport {
  int dim = 1;
  /// N in 1D, L in 2D.
  int size = 0;
  std::size_t points = 0;
  bool recovered = false;
  double tolerance = 0.0;
  double sup_defect = 0.0;
  DefectReport defect;
  MinimizationResult minimization;

  /// log10 of the gap of the reference lattice (eps_N or eps_L).
  double target_log10_gap = 0.0;
  double best_log10_gap = 0.0;

  /// Decay hypotheses; absent when they could not be evaluated.
  std::optional<DecayReport> decay;
  bool hypothesis_warning = false;
  std::string warning;

  /// 1D: sup_defect / sqrt(eps_N / (N a_{floor(N/2)})), in log10 and plain
  /// (0 when the defect vanishes).
  double defect_ratio = 0.0;
  double log10_defect_ratio = 0.0;

  /// 2D: smallest periodic distance in the best configuration.
  double min_separation = 0.0;
  /// 2D: max |b_mn| over S_1 without the zeros of the triplet factor, and the
  /// bound sqrt(best_gap / min a_mn) over the same set, both as log10.
  double log10_max_b_s1 = 0.0;
  double log10_b_bound_s1 = 0.0;
  bool b_bound_holds = false;
  std::size_t s1_modes = 0;
  std::size_t exceptional_modes = 0;

  double seconds = 0.0;
};

/// Throws std::invalid_argument for a kernel that is not 1D or N < 1.
VerdictReport verify_theorem_1d(const FourierKernel& kernel, int N, const VerifyOptions& options = {});

/// Throws std::invalid_argument("L must be divisible by 3") and for kernels
/// not on the (sqrt(3), 1) cell.
VerdictReport verify_theorem_2d(const FourierKernel& kernel, int L, const VerifyOptions& options = {});

}  // namespace torus
