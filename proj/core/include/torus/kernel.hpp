#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "torus/cell.hpp"
#include "torus/extended.hpp"

namespace torus {

enum class KernelFamily { gaussian, heat, inverse_laplacian, table };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Even, Fourier-nonnegative pair potential on a rectangular torus,
///
///   f(x) = sum_n a_n e(n . L^{-1} x),    e(s) = exp(2 pi i s),
///
/// with L = diag(periods). Under this convention the uniform measure has
/// energy a_0 and a_n = |cell|^{-1} \int_cell f(x) e(-n . L^{-1} x) dx.
///
/// Coefficients are stored densely on the box {-M..M}^d. A log-magnitude copy
/// is kept alongside because Gaussian coefficients underflow double long
/// before they stop mattering to the minimization problem.
class FourierKernel {
 public:
  const Cell& cell() const noexcept { return cell_; }
  int dim() const noexcept { return cell_.dim(); }
  int mode_cap() const noexcept { return mode_cap_; }
  KernelFamily family() const noexcept { return family_; }
  /// Width parameter for gaussian/heat kernels.
  std::optional<double> t() const noexcept { return t_; }
  /// Certified bound on the sum of all coefficients outside the stored box.
  /// May be +inf (the 2D inverse Laplacian has a divergent coefficient sum).
  double tail_bound() const noexcept { return tail_bound_; }

  bool in_box(const Mode& n) const noexcept;
  /// a_n; zero outside the stored box.
  double coefficient(const Mode& n) const noexcept;
  /// log(a_n); -inf for vanishing or unstored coefficients.
  double log_coefficient(const Mode& n) const noexcept;

  /// a_n in the requested scalar type. For `Extended` this is rebuilt from
  /// the log-magnitude and therefore survives double underflow.
  template <class Real>
  Real coefficient_as(const Mode& n) const {
    if constexpr (is_extended_v<Real>) {
      const double lg = log_coefficient(n);
      if (lg == -std::numeric_limits<double>::infinity()) return Real(0);
      return exp(Real(lg));
    } else {
      return coefficient(n);
    }
  }

  /// Sum of all stored coefficients, i.e. the truncated f(0).
  double value_at_origin() const noexcept { return sum_; }
  double max_nonzero_log_coefficient() const noexcept;

  /// Every stored mode, lexicographic order (n1 major).
  std::vector<Mode> modes() const;
  int box_size() const noexcept;

  /// Same kernel with the box shrunk to `cap` (<= mode_cap()). The tail bound
  /// is recomputed for the smaller box.
  FourierKernel truncated(int cap) const;

 private:
  friend FourierKernel gaussian_kernel(double, const Cell&, int);
  friend FourierKernel heat_kernel(double, const Cell&, int);
  friend FourierKernel inverse_laplacian_kernel(const Cell&, int);
  friend FourierKernel custom_kernel(const Cell&, const std::function<double(const Mode&)>&, int);

  FourierKernel(Cell cell, int mode_cap, KernelFamily family);
  std::size_t index(const Mode& n) const noexcept;
  void finish();

  Cell cell_;
  int mode_cap_;
  KernelFamily family_;
  std::optional<double> t_;
  std::vector<double> coeffs_;
  std::vector<double> log_coeffs_;
  double tail_bound_ = 0.0;
  double sum_ = 0.0;
  // Retained so truncated() can rebuild table kernels.
  std::function<double(const Mode&)> rule_;
};

/// Periodized Gaussian f(x) = sum_j exp(-t |x - L j|^2):
/// a_n = (pi/t)^{d/2} / |cell| * exp(-pi^2 |L^{-1} n|^2 / t).
FourierKernel gaussian_kernel(double t, const Cell& cell, int mode_cap);

/// Periodic heat kernel with the constant mode removed:
/// a_0 = 0, a_w = exp(-4 pi^2 |L^{-1} w|^2 t).
FourierKernel heat_kernel(double t, const Cell& cell, int mode_cap);

/// Kernel of the periodic inverse of -Laplacian: a_0 = 0,
/// a_w = 1 / (4 pi^2 |L^{-1} w|^2). Violates the rapid-decay hypotheses; in
/// 2D its tail bound is +inf.
FourierKernel inverse_laplacian_kernel(const Cell& cell, int mode_cap);

/// Kernel from a user rule. Values are symmetrized, a_n = (r(n) + r(-n)) / 2.
/// Throws std::invalid_argument("negative Fourier coefficient") or
/// ("non-finite Fourier coefficient"). The kernel is the truncated series
/// itself, so its tail bound is 0.
FourierKernel custom_kernel(const Cell& cell, const std::function<double(const Mode&)>& rule,
                            int mode_cap);

/// Table kernel: listed modes take the listed values (mirrored to -n when
/// only one sign is given), all others vanish.
struct TableEntry {
  Mode mode{0, 0};
  double value = 0.0;
};
FourierKernel table_kernel(const Cell& cell, std::span<const TableEntry> entries,
                           std::optional<int> mode_cap = std::nullopt);

/// Truncated series sum_n a_n cos(2 pi n . L^{-1} x); x is wrapped implicitly.
double evaluate(const FourierKernel& kernel, std::span<const double> x);

// ---------------------------------------------------------------------------
// Decay hypotheses

struct DecayThresholds {
  /// Finite-size stand-in for the vanishing limits: pass when ratio < ratio_max.
  double ratio_max = 1.0;
  /// One-dimensional decay regularity: pass when C0 <= c0_max.
  double c0_max = 100.0;
  /// The truncation tail must be at most this fraction of the tail sum.
  double tail_fraction_max = 1e-6;
};

struct DecayReport {
  int dim = 1;
  int size = 0;  ///< N in 1D, L in 2D
  /// 1D: max_k [max_{m<=k} 1/(m^2 a_m)] k^2 a_k.
  /// 2D: max_{|m|<=2L/3,|n|<=L} a_mn / a_{2L/3,L}.
  double C0 = 0.0;
  /// 2D only: min over the same box (without the zero mode) of a_mn / a_{2L/3,L}.
  double box_min_ratio = 0.0;
  double epsilon = 0.0;        ///< eps_N or eps_L
  double epsilon_tilde = 0.0;  ///< 2D only
  double tail_bound = 0.0;
  double ratio = 0.0;          ///< N^2 eps_N / a_{N/2}, or e^{lambda L} eps~_L / a_{2L/3,L}
  double log10_ratio = 0.0;    ///< same, safe against underflow
  double lambda = 0.0;
  bool passed_decay = false;   ///< C0 hypothesis
  bool passed_ratio = false;   ///< vanishing-ratio hypothesis
  bool passed() const noexcept { return passed_decay && passed_ratio; }
};

/// Requires a 1D kernel and 2 <= N <= mode_cap. Throws std::domain_error
/// ("Fourier coefficient not positive at n=k") when some a_k, 1 <= k <= cap,
/// vanishes.
DecayReport check_decay_1d(const FourierKernel& kernel, int N, const DecayThresholds& thresholds = {});

/// Requires a 2D kernel, L >= 3 divisible by 3, and (2L/3, L) inside the box.
DecayReport check_decay_2d(const FourierKernel& kernel, int L, double lambda = 0.1,
                           const DecayThresholds& thresholds = {});

}  // namespace torus
