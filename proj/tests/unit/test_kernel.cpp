#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "torus/kernel.hpp"

using namespace torus;

namespace {

const double sqrt3 = std::sqrt(3.0);

// Tensor-product trapezoid rule for a_n of the periodized Gaussian. Both the
// kernel and the character factor over the axes, so the 2D rule is the
// product of two 1D rules.
double quadrature_coefficient(double t, const std::vector<double>& periods, Mode n, int samples) {
  std::complex<double> total = 1.0;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const double l = periods[i];
    std::complex<double> s = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double x = l * k / samples;
      double g = 0.0;
      for (int j = -8; j <= 8; ++j) g += std::exp(-t * (x - l * j) * (x - l * j));
      s += g * std::polar(1.0, -2 * oracle::pi * n[i] * x / l);
    }
    total *= s / static_cast<double>(samples);
  }
  return total.real();
}

}  // namespace

TEST_CASE("gaussian coefficients match the closed form") {
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 8);
  CHECK(k.coefficient({0, 0}) == doctest::Approx(std::sqrt(oracle::pi)).epsilon(1e-15));
  CHECK(k.coefficient({1, 0}) / k.coefficient({0, 0}) ==
        doctest::Approx(std::exp(-oracle::pi * oracle::pi)).epsilon(1e-14));
  CHECK(k.coefficient({1, 0}) / k.coefficient({0, 0}) == doctest::Approx(5.1723e-5).epsilon(1e-4));
}

TEST_CASE("gaussian coefficient on the triangular cell matches quadrature") {
  const std::vector<double> p{sqrt3, 1.0};
  const FourierKernel k = gaussian_kernel(4.0, Cell::triangular(), 8);
  const double q = quadrature_coefficient(4.0, p, {1, 1}, 2048);
  CHECK(std::abs(k.coefficient({1, 1}) - q) <= 1e-8 * q);
}

TEST_CASE("every stored gaussian coefficient matches quadrature") {
  for (double t : {0.5, 1.0, 4.0}) {
    const FourierKernel k = gaussian_kernel(t, Cell{1.0}, 4);
    for (const Mode& n : k.modes()) {
      const double q = quadrature_coefficient(t, {1.0}, n, 512);
      // Rounding in the 512-term quadrature sum floors the attainable error.
      CHECK(std::abs(k.coefficient(n) - q) <= 1e-8 * std::abs(q) + 1e-13);
    }
  }
}

TEST_CASE("gaussian rejects bad parameters") {
  CHECK_THROWS(gaussian_kernel(0.0, Cell{1.0}, 8));
  CHECK_THROWS(gaussian_kernel(-1.0, Cell{1.0}, 8));
  CHECK_THROWS(gaussian_kernel(1.0, Cell{1.0}, 0));
}

TEST_CASE("heat kernel") {
  const FourierKernel k = heat_kernel(1.0 / (4 * oracle::pi * oracle::pi), Cell{1.0, 1.0}, 8);
  CHECK(k.coefficient({0, 0}) == 0.0);
  CHECK(k.coefficient({1, 0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS(heat_kernel(0.0, Cell{1.0}, 8));

  // Poisson summation: sum_w exp(-4 pi^2 t |w|^2) e(w.x) - 1
  //   = |Q| (4 pi t)^{-d/2} sum_j exp(-|x - L j|^2 / (4t)) - 1.
  const double t = 0.05;
  const FourierKernel h = heat_kernel(t, Cell::triangular(), 32);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> p{sqrt3, 1.0};
  for (int i = 0; i < 10; ++i) {
    const double x[2] = {sqrt3 * u(rng), u(rng)};
    const double image = sqrt3 / (4 * oracle::pi * t) * oracle::gaussian_image_sum(1.0 / (4 * t), p, x) - 1.0;
    CHECK(std::abs(evaluate(h, x) - image) <= 1e-8);
  }
}

TEST_CASE("inverse laplacian kernel") {
  const FourierKernel k = inverse_laplacian_kernel(Cell{1.0, 1.0}, 8);
  CHECK(k.coefficient({0, 0}) == 0.0);
  CHECK(k.coefficient({1, 0}) == doctest::Approx(1.0 / (4 * oracle::pi * oracle::pi)).epsilon(1e-14));
  CHECK(k.coefficient({3, 4}) == doctest::Approx(1.0 / (100 * oracle::pi * oracle::pi)).epsilon(1e-14));
  CHECK(std::isinf(k.tail_bound()));
  CHECK_THROWS(inverse_laplacian_kernel(Cell{1.0}, 0));

  const FourierKernel tri = inverse_laplacian_kernel(Cell::triangular(), 16);
  const DecayReport r3 = check_decay_2d(tri, 3);
  const DecayReport r6 = check_decay_2d(tri, 6);
  CHECK_FALSE(r3.passed());
  CHECK_FALSE(r6.passed());
}

TEST_CASE("custom kernels") {
  auto constant = [](const Mode& n) { return n[0] == 0 && n[1] == 0 ? 1.0 : 0.0; };
  const FourierKernel c = custom_kernel(Cell{1.0}, constant, 4);
  const double x = 0.37;
  CHECK(evaluate(c, std::span<const double>(&x, 1)) == doctest::Approx(1.0));
  CHECK(c.tail_bound() == 0.0);

  CHECK_THROWS_WITH(custom_kernel(Cell{1.0}, [](const Mode& n) { return n[0] == 1 ? -1.0 : 1.0; }, 4),
                    doctest::Contains("negative Fourier coefficient"));
  CHECK_THROWS_WITH(custom_kernel(Cell{1.0}, [](const Mode&) { return NAN; }, 4),
                    doctest::Contains("non-finite"));

  const FourierKernel geo =
      custom_kernel(Cell{1.0}, [](const Mode& n) { return std::pow(2.0, -std::abs(n[0])); }, 8);
  const double zero = 0.0;
  CHECK(evaluate(geo, std::span<const double>(&zero, 1)) == doctest::Approx(2.9921875).epsilon(1e-15));
}

TEST_CASE("custom kernels are symmetrized") {
  const FourierKernel k = custom_kernel(Cell{1.0}, [](const Mode& n) { return n[0] > 0 ? 2.0 : 0.0; }, 3);
  CHECK(k.coefficient({1, 0}) == 1.0);
  CHECK(k.coefficient({-1, 0}) == 1.0);
}

TEST_CASE("table kernels") {
  const std::vector<TableEntry> entries{{{0, 0}, 1.0}, {{2, 0}, 0.5}};
  const FourierKernel k = table_kernel(Cell{1.0}, entries);
  CHECK(k.coefficient({2, 0}) == 0.5);
  CHECK(k.coefficient({-2, 0}) == 0.5);
  CHECK(k.coefficient({1, 0}) == 0.0);
  const std::vector<TableEntry> bad{{{1, 0}, -0.5}};
  CHECK_THROWS_WITH(table_kernel(Cell{1.0}, bad), doctest::Contains("negative Fourier coefficient"));
}

TEST_CASE("evaluate is even and matches the image sum") {
  const FourierKernel k = gaussian_kernel(4.0, Cell{1.0}, 32);
  const double x = 0.3, mx = -0.3;
  const double v = evaluate(k, std::span<const double>(&x, 1));
  CHECK(v == doctest::Approx(evaluate(k, std::span<const double>(&mx, 1))).epsilon(1e-15));
  double direct = 0.0;
  for (int j = -8; j <= 8; ++j) direct += std::exp(-4.0 * (0.3 - j) * (0.3 - j));
  CHECK(std::abs(v - direct) <= 1e-10);
}

TEST_CASE("poisson summation consistency") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double t : {0.5, 1.0, 4.0}) {
    for (const Cell& cell : {Cell{1.0}, Cell::triangular()}) {
      const FourierKernel k = gaussian_kernel(t, cell, 32);
      const std::vector<double> p = cell.periods();
      for (int i = 0; i < 100; ++i) {
        double x[2] = {p[0] * u(rng), 0.0};
        if (cell.dim() == 2) x[1] = p[1] * u(rng);
        const double image = oracle::gaussian_image_sum(t, p, x);
        CHECK(std::abs(evaluate(k, std::span<const double>(x, cell.dim())) - image) <=
              k.tail_bound() + 1e-10);
      }
    }
  }
}

TEST_CASE("coefficient invariants") {
  for (const FourierKernel& k : {gaussian_kernel(1.0, Cell::triangular(), 12), heat_kernel(0.1, Cell{2.0}, 12),
                                 inverse_laplacian_kernel(Cell{1.0, 1.0}, 6)}) {
    for (const Mode& n : k.modes()) {
      CHECK(k.coefficient(n) == k.coefficient({-n[0], -n[1]}));
      // Far Gaussian modes underflow in double; their logs stay finite.
      if (n != Mode{0, 0} || k.family() == KernelFamily::gaussian) {
        CHECK(k.coefficient(n) >= 0.0);
        CHECK(std::isfinite(k.log_coefficient(n)));
      }
    }
  }
}

TEST_CASE("monotone truncation") {
  for (double t : {0.05, 1.0}) {
    const FourierKernel small = gaussian_kernel(t, Cell{1.0}, 4);
    const FourierKernel big = gaussian_kernel(t, Cell{1.0}, 16);
    for (const Mode& n : small.modes()) CHECK(small.coefficient(n) == big.coefficient(n));
    CHECK(big.tail_bound() <= small.tail_bound());
    const FourierKernel cut = big.truncated(4);
    for (const Mode& n : small.modes()) CHECK(cut.coefficient(n) == small.coefficient(n));
    CHECK(cut.tail_bound() == doctest::Approx(small.tail_bound()));
  }
}

TEST_CASE("gaussian tail bound covers the omitted coefficients") {
  const double t = 0.05;
  const FourierKernel k = gaussian_kernel(t, Cell{1.0}, 6);
  double omitted = 0.0;
  for (int n = 7; n < 200; ++n) omitted += 2 * oracle::gaussian_coefficient(t, {1.0}, n);
  CHECK(k.tail_bound() >= omitted);
  CHECK(k.tail_bound() <= 2 * omitted);
}

TEST_CASE("kernel family names") {
  CHECK(kernel_family_from_string("gaussian") == KernelFamily::gaussian);
  CHECK(kernel_family_from_string("inv_laplacian") == KernelFamily::inverse_laplacian);
  CHECK(to_string(KernelFamily::heat) == "heat");
  CHECK_THROWS(kernel_family_from_string("lorentzian"));
}

TEST_CASE("check_decay_1d") {
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 64);
  const DecayReport r = check_decay_1d(k, 8);
  const double a8 = oracle::gaussian_coefficient(1.0, {1.0}, 8);
  // exp of a log near -630 carries about 1e-13 relative rounding.
  CHECK(r.epsilon / (2 * a8) >= 1.0 - 1e-12);
  CHECK(r.epsilon / (2 * a8) <= 1.0 + 1e-12);

  // k^2 a_k decreases for the Gaussian at t = 1, so the inner maximum sits at
  // m = k and every term equals 1.
  const FourierKernel k32 = gaussian_kernel(1.0, Cell{1.0}, 32);
  double inner = -INFINITY, c0 = -INFINITY;
  for (int j = 1; j <= 32; ++j) {
    const double lk = 2 * std::log(j) + oracle::gaussian_log_coefficient(1.0, {1.0}, j);
    inner = std::max(inner, -lk);
    c0 = std::max(c0, inner + lk);
  }
  CHECK(std::exp(c0) == doctest::Approx(1.0));
  CHECK(check_decay_1d(k32, 8).C0 == doctest::Approx(1.0));
  CHECK(check_decay_1d(k32, 8).passed());

  auto constant = [](const Mode& n) { return n[0] == 0 ? 1.0 : 0.0; };
  CHECK_THROWS_WITH(check_decay_1d(custom_kernel(Cell{1.0}, constant, 8), 4), doctest::Contains("n=1"));
  CHECK_THROWS(check_decay_1d(k32, 1));
  CHECK_THROWS(check_decay_1d(k32, 33));
}

TEST_CASE("check_decay_2d") {
  const FourierKernel k = gaussian_kernel(1.0, Cell::triangular(), 32);
  const std::vector<double> p{sqrt3, 1.0};
  const DecayReport r = check_decay_2d(k, 3);
  double eps = 0.0;
  for (int a = -10; a <= 10; ++a) {
    for (int b = -10; b <= 10; ++b) {
      if ((a == 0 && b == 0) || (a + b) % 2 != 0) continue;
      eps += oracle::gaussian_coefficient(1.0, p, 3 * a, 3 * b);
    }
  }
  CHECK(std::abs(r.epsilon - eps) <= 1e-12 * eps);

  // Only (L, 0) carries weight, and p + q is odd there.
  const FourierKernel odd = custom_kernel(
      Cell::triangular(),
      [](const Mode& n) { return (std::abs(n[0]) == 3 && n[1] == 0) || n == Mode{2, 3} || n == Mode{-2, -3} ? 1.0 : 0.0; },
      8);
  CHECK(check_decay_2d(odd, 3).epsilon == 0.0);

  CHECK_THROWS_WITH(check_decay_2d(k, 4), doctest::Contains("L must be divisible by 3"));
  CHECK_THROWS(check_decay_2d(gaussian_kernel(1.0, Cell::triangular(), 4), 6));
  CHECK_THROWS(check_decay_2d(gaussian_kernel(1.0, Cell{1.0}, 8), 3));
}
