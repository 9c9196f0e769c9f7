#pragma once

#include <optional>
#include <span>
#include <vector>

#include "torus/configuration.hpp"
#include "torus/kernel.hpp"

namespace torus {

/// b_n = (1/N) sum_k e(n . L^{-1} x_k) on the dense box {-M..M}^d.
template <class Real>
struct BasicStructureFactor {
  int dim = 1;
  int mode_cap = 0;
  std::size_t N = 0;
  std::vector<Cplx<Real>> values;

  const Cplx<Real>& at(const Mode& n) const;
  std::vector<Mode> modes() const;
};
using StructureFactor = BasicStructureFactor<double>;

/// Single coefficient. Uses the same per-axis phase arithmetic and summation
/// order as structure_factor_grid, so the two agree bit for bit.
template <class Real>
Cplx<Real> structure_factor(const BasicConfiguration<Real>& config, const Mode& n);

template <class Real>
BasicStructureFactor<Real> structure_factor_grid(const BasicConfiguration<Real>& config, int mode_cap);

struct EnergyReport {
  /// (1/N^2) sum_{m,k} f(x_m - x_k), diagonal included, truncated kernel.
  double direct_energy = 0.0;
  /// sum_{n != 0} a_n |b_n|^2 over the box.
  double gap = 0.0;
  /// a_0.
  double uniform_energy = 0.0;
  /// (1/(N(N-1))) sum_{m != k} f(x_m - x_k); NaN for N = 1.
  double pair_energy = 0.0;
  /// Bound on the omitted part of the gap (|b_n| <= 1 for every n).
  double tail_bound = 0.0;
  int mode_cap_used = 0;
};

/// Gap over the box of radius `mode_cap` (0 selects the kernel's own box).
/// Throws std::invalid_argument for a cell mismatch or a cap larger than the
/// stored box. Fills gap, uniform_energy, tail_bound and mode_cap_used only.
EnergyReport energy_gap_spectral(const FourierKernel& kernel, const Configuration& config, int mode_cap = 0);

/// Spectral gap in an arbitrary scalar type. With `Extended` the coefficients
/// are rebuilt from their logarithms, so modes far below double range count.
template <class Real>
Real gap_spectral(const FourierKernel& kernel, const BasicConfiguration<Real>& config, int mode_cap = 0);

double energy_direct(const FourierKernel& kernel, const Configuration& config);

/// Throws std::invalid_argument for N < 2.
double pair_energy(const FourierKernel& kernel, const Configuration& config);

/// energy_gap_spectral plus the direct and pair energies.
EnergyReport energy_report(const FourierKernel& kernel, const Configuration& config, int mode_cap = 0);

/// d gap / d x_k for every point, flattened like the coordinates. Under a
/// triplet constraint the replica gradients are summed onto their generator
/// and only the 2L^2/3 generator gradients are returned.
std::vector<double> gap_gradient(const FourierKernel& kernel, const Configuration& config, int mode_cap = 0);

/// Gap, gradient and Hessian of sum_{n != 0} a_n |b_n|^2 as a function of the
/// free coordinates.
///
/// Modes n and -n are folded into one term of weight 2 a_n. Under the triplet
/// constraint with parameter L the configuration consists of the free points
/// and their images under the shifts (1, 1)/(2L) and (1, 0)/L (in cell-period
/// units), so b_n = F_n / N sum_free e(n . u_k) with
/// F_n = 1 + e(n_1/L) + e((n_1 + n_2)/(2L)).
template <class Real>
class GapModel {
 public:
  struct Options {
    /// Box radius; 0 selects the kernel's own.
    int mode_cap = 0;
    /// Modes with log(a_n) below this are dropped.
    double min_log_coefficient = -std::numeric_limits<double>::infinity();
    std::optional<int> triplet;
    /// Tempering exponent s in (0, 1]: weights become
    /// a_max^{1-s} a_n^s, compressing the coefficient range while keeping
    /// the largest weight. 1 is the true gap.
    double temper = 1.0;
  };

  GapModel(const FourierKernel& kernel, const Options& options);

  int dim() const noexcept { return dim_; }
  std::size_t mode_count() const noexcept { return entries_.size(); }
  /// Number of points N implied by `free_points` free points.
  std::size_t total_points(std::size_t free_points) const noexcept {
    return triplet_ ? 3 * free_points : free_points;
  }

  /// `coords` are the free coordinates (all points, or the generators).
  Real gap(std::span<const Real> coords) const;
  /// Writes the gradient into `grad` (same length as coords); returns the gap.
  Real gradient(std::span<const Real> coords, std::span<Real> grad) const;
  /// Also writes the dense row-major Hessian into `hess`.
  Real hessian(std::span<const Real> coords, std::span<Real> grad, std::vector<Real>& hess) const;

 private:
  struct Entry {
    Mode n;
    Real weight;               // 2 a_n
    std::array<Real, 2> theta;  // 2 pi n_i / l_i
    Cplx<Real> factor;          // F_n, or 1 without constraint
    Real factor_norm2;
  };

  // e(m u_{k,i}) for m = 0..cap_, laid out [k][i][m].
  std::vector<Cplx<Real>> phases(std::span<const Real> coords) const;
  Cplx<Real> phase(const std::vector<Cplx<Real>>& table, std::size_t k, int axis, int m) const;
  Cplx<Real> point_phase(const std::vector<Cplx<Real>>& table, std::size_t k, const Mode& n) const;

  int dim_;
  int cap_ = 0;
  std::array<Real, 2> period_;
  Real two_pi_;
  std::optional<int> triplet_;
  std::vector<Entry> entries_;
};

}  // namespace torus
