#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torus/alignment.hpp"
#include "torus/configuration.hpp"
#include "torus/kernel.hpp"

namespace torus {

enum class Constraint { none, triplet };
enum class Polish { automatic, on, off };

std::string to_string(Polish polish);
Polish polish_from_string(const std::string& name);

struct MinimizeOptions {
  int starts = 20;
  int max_iters = 2000;
  /// Sup-norm gradient tolerance; 0 selects 1e-10 * N.
  double grad_tol = 0.0;
  /// First trial step as a fraction of the smallest period, divided by the
  /// gradient sup-norm.
  double step_init = 0.1;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  std::uint64_t seed = 0;
  /// Box radius used by the objective; 0 selects the kernel's own.
  int mode_cap = 0;
  /// Worker threads for independent starts; 0 selects hardware concurrency.
  int threads = 0;
  /// Extended-precision Newton stage after gradient descent. `automatic`
  /// enables it when the coefficients on the structural modes span more than
  /// six decades, which is when double arithmetic cannot resolve the
  /// flattest directions of the objective.
  Polish polish = Polish::automatic;
  int newton_iters = 200;
  /// Working digits of the Newton stage; 0 derives them from the coefficient
  /// range.
  unsigned precision_digits = 0;
  /// Newton stage convergence: sup-norm of the last step.
  double step_tol = 1e-13;
  bool record_trace = false;
};

struct StartRecord {
  std::uint64_t seed = 0;
  double gap = 0.0;
  /// log10 of the final gap, finite even when `gap` underflows.
  double log10_gap = 0.0;
  int iterations = 0;
  int newton_iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

struct TracePoint {
  int start = 0;
  int iter = 0;
  /// 1 = gradient descent, 2 = Newton.
  int phase = 1;
  double gap = 0.0;
  double log10_gap = 0.0;
  double grad_norm = 0.0;
};

struct MinimizationResult {
  Configuration best{Cell::unit(1), std::vector<double>{0.0}};
  /// Best configuration at full working precision (Newton stage only).
  std::optional<ExtendedConfiguration> best_extended;
  double best_gap = 0.0;
  double best_log10_gap = 0.0;
  std::size_t best_start = 0;
  std::vector<StartRecord> per_start;
  std::vector<TracePoint> trace;
  std::optional<DefectReport> defect;
  double grad_tol = 0.0;
  bool polished = false;
  unsigned precision_digits = 0;
};

/// Modes whose coefficients shape the minimizer: 1 <= n <= N/2 in 1D; under
/// the triplet constraint the set max(3|p|/2, |q|) <= L without the origin;
/// otherwise the box of radius ceil(sqrt(N)) without the origin.
std::vector<Mode> structural_modes(int dim, int size, Constraint constraint);

/// Modes of the first dual-lattice shell of the expected minimizer: N in 1D,
/// (L, L), (2L, 0), (0, 2L) under the triplet constraint; empty otherwise.
std::vector<Mode> first_shell_modes(int dim, int size, Constraint constraint);

/// Working digits for the Newton stage: the decade span of the structural
/// coefficients plus 40, raised when needed so that a gap of the size of the
/// first-shell coefficients is resolved.
unsigned newton_digits(const FourierKernel& kernel, int size, Constraint constraint);

/// Multi-start minimization of the spectral gap. `size` is N, or L under the
/// triplet constraint (then N = 2L^2 on the (sqrt(3), 1) cell).
///
/// Each start draws a random configuration (seed + i), runs projected gradient
/// descent with Armijo backtracking in double precision and, when the Newton
/// stage is enabled, continues with saddle-free Newton steps in extended
/// precision. The best start is chosen by (gap, seed).
///
/// Throws std::invalid_argument on bad options, on a constraint that does not
/// fit the kernel, and when a structural coefficient is not positive.
MinimizationResult minimize(const FourierKernel& kernel, int size, Constraint constraint,
                            const MinimizeOptions& options);

/// log10 of the gap evaluated at the current Extended working precision
/// (-inf for an exact zero).
double log10_gap_extended(const FourierKernel& kernel, const ExtendedConfiguration& config, int mode_cap = 0);

}  // namespace torus
