#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "torus/cell.hpp"
#include "torus/extended.hpp"

namespace torus {

/// x reduced into [0, period).
template <class Real>
Real wrap_coordinate(const Real& x, const Real& period) {
  using std::floor;
  Real r = x - period * floor(x / period);
  if (r >= period || r < 0) r = 0;
  return r;
}

/// N points in a rectangular cell, stored flattened (point-major). Points are
/// wrapped on construction.
///
/// Under the triplet constraint with parameter L the first 2L^2/3 points are
/// the free generators, the next block is the generators shifted by
/// (sqrt(3)/(2L), 1/(2L)) and the last block by (sqrt(3)/L, 0). The shifts
/// are expressed in units of the cell periods, so they coincide with the
/// physical shifts on the (sqrt(3), 1) cell.
template <class Real>
class BasicConfiguration {
 public:
  /// Throws std::invalid_argument on an empty or ragged coordinate list, on a
  /// triplet parameter that is not a positive multiple of 3 or does not match
  /// N = 2L^2, and when the replica blocks do not close under the shifts.
  BasicConfiguration(Cell cell, std::vector<Real> coords, std::optional<int> triplet = std::nullopt);

  const Cell& cell() const noexcept { return cell_; }
  int dim() const noexcept { return cell_.dim(); }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim()); }
  std::span<const Real> coords() const noexcept { return coords_; }
  const Real& coord(std::size_t k, int axis) const {
    return coords_[k * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(axis)];
  }
  std::optional<int> triplet() const noexcept { return triplet_; }

  /// 2L^2/3 under the triplet constraint, N otherwise.
  std::size_t generator_count() const noexcept;
  /// Flattened coordinates of the free points.
  std::vector<Real> generators() const;

  template <class Other>
  BasicConfiguration<Other> cast() const {
    std::vector<Other> c(coords_.begin(), coords_.end());
    return BasicConfiguration<Other>(cell_, std::move(c), triplet_);
  }

  friend bool operator==(const BasicConfiguration&, const BasicConfiguration&) = default;

 private:
  Cell cell_;
  std::vector<Real> coords_;
  std::optional<int> triplet_;
};

using Configuration = BasicConfiguration<double>;
using ExtendedConfiguration = BasicConfiguration<Extended>;

/// Replica shift number `copy` (1 or 2) for triplet parameter L, in units of
/// the cell periods: (1/2, 1/2)/L and (1, 0)/L.
std::array<double, 2> triplet_shift_fraction(int copy, int L);

/// Largest periodic deviation between the stored replica blocks and the
/// expansion recomputed from the generators. 0 without a triplet constraint.
template <class Real>
double triplet_closure_error(const BasicConfiguration<Real>& config);

/// Minimum over image vectors i of |x - y - Lambda i|.
double periodic_distance(std::span<const double> x, std::span<const double> y, const Cell& cell);

/// Signed minimum-image displacement x - y, each component in [-l/2, l/2).
std::array<double, 2> periodic_displacement(std::span<const double> x, std::span<const double> y,
                                            const Cell& cell);

/// x_k = (2k - N - 1)/(2N), k = 1..N, wrapped into [0, 1).
template <class Real = double>
BasicConfiguration<Real> equidistant_1d(int N);

/// Points Lambda (n / K) for n in {0..K-1}^d.
Configuration square_lattice(int K, const Cell& cell);

/// Triangular lattice with N = 2L^2 on the (sqrt(3), 1) cell, built as the
/// triplet expansion of the canonical generators
///   x = 3 sqrt(3) (2k - 1) / (4L),  y = (4j + 1 + (-1)^k) / (4L),
///   k = 1..2L/3, j = 1..L.
/// As a point set this is the column layout of triangular_lattice_columns
/// translated by (3 sqrt(3)/(4L), 0). Throws unless L >= 3 and 3 | L.
template <class Real = double>
BasicConfiguration<Real> triangular_lattice(int L);

/// Column layout: (sqrt(3)(k-1)/L, (j-1)/(2L)) for odd j and
/// (sqrt(3)(k-1/2)/L, (j-1)/(2L)) for even j, k = 1..L, j = 1..2L. No triplet
/// metadata. Throws for L < 1.
Configuration triangular_lattice_columns(int L);

/// Generators plus both shifted copies. Throws std::invalid_argument
/// ("wrong generator count") unless there are exactly 2L^2/3 free points.
template <class Real>
BasicConfiguration<Real> expand_triplet(std::span<const Real> free_coords, int L);

/// Uniform i.i.d. points, reproducible per seed. With a triplet parameter only
/// the generators are drawn and then expanded; N must equal 2L^2.
Configuration random_configuration(std::size_t N, const Cell& cell, std::uint64_t seed,
                                   std::optional<int> triplet = std::nullopt);

/// Translation making the generator mean equal to the cell centre, i.e.
/// (sqrt(3)/2, 1/2) on the triangular cell. The mean is taken over the
/// generators as stored (no unwrapping). Returns the translated configuration
/// and the applied shift.
std::pair<Configuration, std::array<double, 2>> normalize_centroid(const Configuration& config);

Configuration translate(const Configuration& config, std::span<const double> shift);

/// Throws std::invalid_argument for N < 2.
double min_separation(const Configuration& config);

/// Reports whether the configurations hold the same multiset of points up to
/// `tol` in the periodic metric (greedy nearest match on sorted candidates).
bool same_point_set(const Configuration& a, const Configuration& b, double tol);

}  // namespace torus
