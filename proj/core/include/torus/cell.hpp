#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace torus {

/// Integer mode vector. For one-dimensional cells the second entry is 0.
using Mode = std::array<int, 2>;

/// Rectangular torus cell diag(l_1, ..., l_d), d in {1, 2}.
class Cell {
 public:
  /// Throws std::invalid_argument unless 1 <= periods.size() <= 2 and all
  /// periods are finite and positive.
  explicit Cell(std::span<const double> periods);
  Cell(std::initializer_list<double> periods);

  static Cell unit(int dim);
  /// The (sqrt(3), 1) rectangle hosting the triangular lattice.
  static Cell triangular();

  int dim() const noexcept { return dim_; }
  double period(int axis) const { return periods_.at(static_cast<std::size_t>(axis)); }
  std::vector<double> periods() const;
  double volume() const noexcept;
  double min_period() const noexcept;

  /// Period in the requested scalar type. A period that is the correctly
  /// rounded square root of a small integer k (1, sqrt(3), 2, ...) is lifted to
  /// sqrt(Real(k)), so extended-precision work on the (sqrt(3), 1) cell sees
  /// the exact surd rather than its double rounding.
  template <class Real>
  Real period_as(int axis) const {
    using std::sqrt;
    const double p = period(axis);
    const double k = std::round(p * p);
    if (k >= 1.0 && k <= 1e6 && std::sqrt(k) == p) return sqrt(Real(k));
    return Real(p);
  }

  friend bool operator==(const Cell&, const Cell&) = default;

 private:
  std::array<double, 2> periods_{1.0, 1.0};
  int dim_ = 1;
};

}  // namespace torus
