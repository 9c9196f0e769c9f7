#pragma once

// Dense symmetric eigensolver for double and Extended, backed by Eigen.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cstddef>
#include <limits>
#include <vector>

#include "torus/extended.hpp"

namespace Eigen {

// Boost's own interop header predates Eigen 3.4 (no infinity/quiet_NaN).
template <>
struct NumTraits<torus::Extended> : GenericNumTraits<torus::Extended> {
  using Real = torus::Extended;
  using NonInteger = torus::Extended;
  using Nested = torus::Extended;
  using Literal = torus::Extended;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 8,
    MulCost = 16
  };
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return 1000 * epsilon(); }
  static Real highest() { return std::numeric_limits<Real>::max(); }
  static Real lowest() { return std::numeric_limits<Real>::lowest(); }
  static Real infinity() { return std::numeric_limits<Real>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
  static int digits10() { return static_cast<int>(Real::default_precision()); }
};

}  // namespace Eigen

namespace torus {

/// Eigen-decomposition of a dense symmetric matrix (row-major, n x n). On
/// return `values[k]` pairs with the eigenvector stored in row k of `vectors`.
template <class Real>
void symmetric_eigen(const std::vector<Real>& a, std::size_t n, std::vector<Real>& values,
                     std::vector<Real>& vectors) {
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  const auto m = static_cast<Eigen::Index>(n);
  Matrix A(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = a[static_cast<std::size_t>(i * m + j)];
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(A);
  values.resize(n);
  vectors.resize(n * n);
  for (Eigen::Index k = 0; k < m; ++k) {
    values[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    for (Eigen::Index i = 0; i < m; ++i) {
      vectors[static_cast<std::size_t>(k * m + i)] = solver.eigenvectors()(i, k);
    }
  }
}

}  // namespace torus
