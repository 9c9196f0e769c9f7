#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "torus/spectral.hpp"

using namespace torus;

namespace {

const double sqrt3 = std::sqrt(3.0);

FourierKernel constant_kernel(const Cell& cell) {
  return custom_kernel(cell, [](const Mode& n) { return n[0] == 0 && n[1] == 0 ? 1.0 : 0.0; }, 4);
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("structure factor values") {
  std::mt19937_64 rng(1);
  const Configuration r = random_configuration(13, Cell::triangular(), rng());
  const Cplx<double> b0 = structure_factor(r, {0, 0});
  CHECK(b0.re == 1.0);
  CHECK(b0.im == 0.0);

  const Configuration e8 = equidistant_1d(8);
  for (int n = -20; n <= 20; ++n) {
    const double b = std::sqrt(structure_factor(e8, {n, 0}).norm2());
    if (n % 8 == 0) {
      CHECK(b == doctest::Approx(1.0).epsilon(1e-15));
    } else {
      CHECK(b <= 1e-14);
    }
    CHECK(std::abs(b - std::abs(oracle::structure_factor(e8, n))) <= 1e-14);
  }

  for (int L : {3, 6}) {
    const Configuration t = triangular_lattice(L);
    for (int p = -2; p <= 2; ++p) {
      for (int q = -2; q <= 2; ++q) {
        const double b = std::sqrt(structure_factor(t, {p * L, q * L}).norm2());
        CHECK(b == doctest::Approx((p + q) % 2 == 0 ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("structure factor grid") {
  const Configuration one(Cell::triangular(), {0.4, 0.2});
  const StructureFactor g1 = structure_factor_grid(one, 5);
  for (const Cplx<double>& b : g1.values) CHECK(b.norm2() == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(2);
  for (const Cell& cell : {Cell{1.0}, Cell::triangular()}) {
    const Configuration c = random_configuration(32, cell, rng());
    const StructureFactor g = structure_factor_grid(c, 6);
    CHECK(g.N == 32);
    CHECK(g.at({0, 0}).re == 1.0);
    for (const Mode& n : g.modes()) {
      const Cplx<double> b = g.at(n), m = g.at({-n[0], -n[1]});
      CHECK(std::abs(b.re - m.re) <= 1e-15);
      CHECK(std::abs(b.im + m.im) <= 1e-15);
      CHECK(b.norm2() <= 1.0 + 1e-15);
      const Cplx<double> p = structure_factor(c, n);
      CHECK(p.re == b.re);
      CHECK(p.im == b.im);
      const oracle::cd o = oracle::structure_factor(c, n[0], n[1]);
      CHECK(std::abs(o - oracle::cd(b.re, b.im)) <= 1e-14);
    }
  }
}

TEST_CASE("direct energy") {
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 16);
  const Configuration single(Cell{1.0}, {0.3});
  CHECK(energy_direct(k, single) == doctest::Approx(k.value_at_origin()).epsilon(1e-15));

  std::mt19937_64 rng(3);
  const Configuration r = random_configuration(9, Cell::triangular(), rng());
  CHECK(energy_direct(constant_kernel(Cell::triangular()), r) == doctest::Approx(1.0).epsilon(1e-14));

  const Configuration c = random_configuration(16, Cell{1.0}, rng());
  const EnergyReport e = energy_report(k, c);
  CHECK(std::abs(e.direct_energy - (e.uniform_energy + e.gap)) <= 1e-8 * e.direct_energy);
  CHECK(std::abs(e.direct_energy - oracle::gaussian_direct_energy(1.0, c)) <= 1e-10 * e.direct_energy);
  CHECK(e.uniform_energy == k.coefficient({0, 0}));
  CHECK(e.mode_cap_used == 16);

  CHECK_THROWS(energy_direct(k, random_configuration(4, Cell::triangular(), 1)));
}

TEST_CASE("pair energy") {
  const FourierKernel k = gaussian_kernel(2.0, Cell{1.0}, 32);
  const Configuration two(Cell{1.0}, {0.1, 0.6});
  const double half = 0.5;
  CHECK(pair_energy(k, two) == doctest::Approx(evaluate(k, std::span(&half, 1))).epsilon(1e-14));
  CHECK_THROWS(pair_energy(k, Configuration(Cell{1.0}, {0.2})));

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Configuration c = random_configuration(3 + trial, Cell{1.0}, rng());
    const double N = static_cast<double>(c.size());
    const EnergyReport e = energy_report(k, c);
    CHECK(std::abs(e.direct_energy - ((N - 1) / N * e.pair_energy + k.value_at_origin() / N)) <= 1e-12);

    std::vector<double> x(c.coords().begin(), c.coords().end());
    std::shuffle(x.begin(), x.end(), rng);
    CHECK(pair_energy(k, Configuration(Cell{1.0}, x)) == doctest::Approx(e.pair_energy).epsilon(1e-14));
  }
}

TEST_CASE("equidistant and square-lattice gaps") {
  // N = 2 is still resolved in double: the spurious terms are ~1e-37.
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 32);
  const double eps2 = 2 * (oracle::gaussian_coefficient(1.0, {1.0}, 2) + oracle::gaussian_coefficient(1.0, {1.0}, 4));
  CHECK(std::abs(energy_gap_spectral(k, equidistant_1d(2)).gap - eps2) <= 1e-12 * eps2);

  // A broad kernel keeps every square-lattice gap far above rounding.
  const FourierKernel broad = gaussian_kernel(20.0, Cell{1.0}, 64);
  double previous = INFINITY;
  for (int K = 1; K <= 8; ++K) {
    double expected = 0.0;
    for (int m = 1; m * K <= 64; ++m) expected += 2 * oracle::gaussian_coefficient(20.0, {1.0}, m * K);
    const double gap = energy_gap_spectral(broad, square_lattice(K, Cell{1.0})).gap;
    CHECK(std::abs(gap - expected) <= 1e-12 * expected);
    CHECK(gap < previous);
    previous = gap;
  }
}

TEST_CASE("extended-precision gaps of the reference lattices") {
  const ExtendedPrecision guard(300);
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 32);
  const Extended g = gap_spectral(k, equidistant_1d<Extended>(4));
  // eps_4 = 2 (a_4 + a_8 + ...), as a logarithm.
  const double log_a4 = oracle::gaussian_log_coefficient(1.0, {1.0}, 4);
  const double log_eps = std::log(2.0) + log_a4 + std::log1p(std::exp(oracle::gaussian_log_coefficient(1.0, {1.0}, 8) - log_a4));
  CHECK(std::abs(to_double(log(g)) - log_eps) <= 1e-12);

  const FourierKernel k2 = gaussian_kernel(1.0, Cell::triangular(), 16);
  const Extended t = gap_spectral(k2, triangular_lattice<Extended>(3));
  // (p, q) = (+-1, +-1) dominates; (+-2, 0) and (0, +-2) follow.
  const std::vector<double> p{sqrt3, 1.0};
  const double a33 = oracle::gaussian_log_coefficient(1.0, p, 3, 3);
  double rest = 0.0;
  for (int a = -5; a <= 5; ++a) {
    for (int b = -5; b <= 5; ++b) {
      if ((a == 0 && b == 0) || (a + b) % 2 != 0 || 3 * std::abs(a) > 16 || 3 * std::abs(b) > 16) continue;
      rest += std::exp(oracle::gaussian_log_coefficient(1.0, p, 3 * a, 3 * b) - a33);
    }
  }
  CHECK(std::abs(to_double(log(t)) - (a33 + std::log(rest))) <= 1e-12);
}

TEST_CASE("gap invariants") {
  std::mt19937_64 rng(5);
  const FourierKernel k = gaussian_kernel(1.0, Cell::triangular(), 12);
  for (int trial = 0; trial < 10; ++trial) {
    const Configuration c = random_configuration(10, Cell::triangular(), rng());
    const double gap = energy_gap_spectral(k, c).gap;
    CHECK(gap >= 0.0);
    const double s[2] = {0.77 * trial, -0.31 * trial};
    CHECK(std::abs(energy_gap_spectral(k, translate(c, s)).gap - gap) <= 1e-12);
  }

  // Kernel supported strictly below K: the K x K lattice has gap 0.
  for (int K = 2; K <= 5; ++K) {
    const FourierKernel below = custom_kernel(
        Cell{1.0, 1.0}, [K](const Mode& n) { return std::max(std::abs(n[0]), std::abs(n[1])) < K ? 1.0 : 0.0; }, K);
    CHECK(energy_gap_spectral(below, square_lattice(K, Cell{1.0, 1.0})).gap <= 1e-28);
  }

  CHECK(energy_gap_spectral(constant_kernel(Cell{1.0}), equidistant_1d(3)).gap == 0.0);
  CHECK_THROWS(energy_gap_spectral(k, random_configuration(4, Cell::triangular(), 1), 13));
}

TEST_CASE("gap gradient") {
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 32);
  for (int N : {2, 5, 8, 12}) CHECK(sup_abs(gap_gradient(k, equidistant_1d(N))) <= 1e-10);

  CHECK(sup_abs(gap_gradient(constant_kernel(Cell{1.0}), equidistant_1d(5))) == 0.0);

  std::mt19937_64 rng(6);
  const double h = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    const Configuration c = random_configuration(8, Cell{1.0}, rng());
    const std::vector<double> g = gap_gradient(k, c);
    std::vector<double> x(c.coords().begin(), c.coords().end());
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (oracle::gaussian_gap(1.0, Configuration(Cell{1.0}, xp), 32) -
                         oracle::gaussian_gap(1.0, Configuration(Cell{1.0}, xm), 32)) /
                        (2 * h);
      err = std::max(err, std::abs(fd - g[i]));
    }
    CHECK(err <= 1e-6 * sup_abs(g));
  }
}

TEST_CASE("gap model derivatives") {
  std::mt19937_64 rng(7);
  const FourierKernel k = gaussian_kernel(1.0, Cell::triangular(), 8);
  for (std::optional<int> triplet : {std::optional<int>{}, std::optional<int>{3}}) {
    const Configuration c = random_configuration(18, Cell::triangular(), rng(), triplet);
    GapModel<double>::Options opt;
    opt.triplet = triplet;
    const GapModel<double> model(k, opt);
    const std::vector<double> x = c.generators();
    std::vector<double> grad(x.size()), hess;
    const double gap = model.hessian(x, grad, hess);
    CHECK(gap == doctest::Approx(energy_gap_spectral(k, c).gap).epsilon(1e-12));
    const std::vector<double> ref = gap_gradient(k, c);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(grad[i] == doctest::Approx(ref[i]).epsilon(1e-12).scale(1e-12));

    const std::size_t n = x.size();
    const double h = 1e-6;
    double err = 0.0, scale = 0.0, sym = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      auto xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      std::vector<double> gp(n), gm(n);
      model.gradient(xp, gp);
      model.gradient(xm, gm);
      for (std::size_t i = 0; i < n; ++i) {
        err = std::max(err, std::abs((gp[i] - gm[i]) / (2 * h) - hess[i * n + j]));
        scale = std::max(scale, std::abs(hess[i * n + j]));
        sym = std::max(sym, std::abs(hess[i * n + j] - hess[j * n + i]));
      }
    }
    CHECK(err <= 1e-6 * scale);
    CHECK(sym <= 1e-13 * scale);
  }
}

TEST_CASE("tempered and pruned gap models") {
  const FourierKernel k = gaussian_kernel(1.0, Cell{1.0}, 16);
  const Configuration c = random_configuration(6, Cell{1.0}, 9);
  const std::vector<double> x = c.generators();
  GapModel<double>::Options opt;
  opt.temper = 0.5;
  const GapModel<double> tempered(k, opt);
  // Weights a_max^{1/2} a_n^{1/2}; a_max = a_0 for the Gaussian.
  double expected = 0.0;
  const double a0 = oracle::gaussian_coefficient(1.0, {1.0}, 0);
  for (int n = -16; n <= 16; ++n) {
    if (n == 0) continue;
    expected += std::sqrt(a0 * oracle::gaussian_coefficient(1.0, {1.0}, n)) * std::norm(oracle::structure_factor(c, n));
  }
  CHECK(tempered.gap(x) == doctest::Approx(expected).epsilon(1e-12));

  GapModel<double>::Options pruned;
  pruned.min_log_coefficient = oracle::gaussian_log_coefficient(1.0, {1.0}, 2) - 1.0;
  const GapModel<double> small(k, pruned);
  CHECK(small.mode_count() == 2);
}
