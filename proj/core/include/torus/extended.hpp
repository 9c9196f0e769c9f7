#pragma once

// Scalar plumbing shared by the double and extended-precision paths.
//
// Kernels with rapidly decaying coefficients (the Gaussian at t = 1 spans
// hundreds of decades between a_1 and a_{N/2}) cannot be resolved in double
// arithmetic. Everything that has to see those terms is written against a
// generic `Real` and instantiated for both `double` and `Extended`.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <mutex>
#include <numbers>
#include <type_traits>

namespace torus {

using Extended = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

template <class Real>
inline constexpr bool is_extended_v = std::is_same_v<Real, Extended>;

/// RAII guard selecting the working precision (decimal digits) of `Extended`.
///
/// Boost 1.74 keeps the default precision in a process-wide static, so the
/// guard also holds a process-wide lock: extended sections are serialized.
/// Worker threads spawned inside a section must not open their own guard.
class ExtendedPrecision {
 public:
  explicit ExtendedPrecision(unsigned digits10);
  ~ExtendedPrecision();
  ExtendedPrecision(const ExtendedPrecision&) = delete;
  ExtendedPrecision& operator=(const ExtendedPrecision&) = delete;

  unsigned digits() const noexcept { return digits_; }

 private:
  std::unique_lock<std::recursive_mutex> lock_;
  unsigned digits_;
  unsigned previous_;
};

inline double to_double(double x) noexcept { return x; }
inline double to_double(const Extended& x) { return x.convert_to<double>(); }

template <class Real>
Real pi_as() {
  if constexpr (is_extended_v<Real>) {
    return boost::multiprecision::atan(Extended(1)) * 4;
  } else {
    return std::numbers::pi;
  }
}

/// Minimal complex type usable with `Extended` (std::complex<T> is only
/// specified for the built-in floating types).
template <class Real>
struct Cplx {
  Real re{0};
  Real im{0};

  friend Cplx operator+(const Cplx& a, const Cplx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cplx operator-(const Cplx& a, const Cplx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cplx operator*(const Cplx& a, const Cplx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cplx operator*(const Cplx& a, const Real& s) { return {a.re * s, a.im * s}; }
  Cplx& operator+=(const Cplx& b) {
    re += b.re;
    im += b.im;
    return *this;
  }
  Cplx conj() const { return {re, -im}; }
  Real norm2() const { return re * re + im * im; }
};

/// e(s) = exp(2*pi*i*s). The argument is first reduced to [-1/2, 1/2] so that
/// e(-s) is the exact conjugate of e(s) and integer shifts of s cost nothing.
template <class Real>
Cplx<Real> unit_phase(const Real& s, const Real& two_pi) {
  using std::cos;
  using std::round;
  using std::sin;
  const Real r = s - round(s);
  const Real angle = two_pi * r;
  return {cos(angle), sin(angle)};
}

inline Cplx<double> unit_phase(double s) {
  return unit_phase<double>(s, 2.0 * std::numbers::pi);
}

}  // namespace torus
