#include "torus/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace torus {
namespace {

void require_triplet_parameter(int L) {
  if (L < 3 || L % 3 != 0) throw std::invalid_argument("L must be divisible by 3");
}

template <class Real>
double periodic_gap(const Real& a, const Real& b, const Real& period) {
  using std::abs;
  using std::round;
  const Real d = a - b;
  return to_double(abs(d - period * round(d / period)));
}

}  // namespace

template <class Real>
BasicConfiguration<Real>::BasicConfiguration(Cell cell, std::vector<Real> coords,
                                             std::optional<int> triplet)
    : cell_(std::move(cell)), coords_(std::move(coords)), triplet_(triplet) {
  const auto d = static_cast<std::size_t>(cell_.dim());
  if (coords_.empty() || coords_.size() % d != 0) {
    throw std::invalid_argument("coordinate count must be a positive multiple of the dimension");
  }
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    const int axis = static_cast<int>(i % d);
    coords_[i] = wrap_coordinate(coords_[i], cell_.period_as<Real>(axis));
  }
  if (triplet_) {
    require_triplet_parameter(*triplet_);
    const int L = *triplet_;
    if (cell_.dim() != 2) throw std::invalid_argument("triplet constraint requires a 2D cell");
    if (size() != static_cast<std::size_t>(2 * L * L)) {
      throw std::invalid_argument("triplet constraint requires N = 2L^2");
    }
    if (triplet_closure_error(*this) > 1e-9) {
      throw std::invalid_argument("replica blocks do not match the triplet shifts");
    }
  }
}

template <class Real>
std::size_t BasicConfiguration<Real>::generator_count() const noexcept {
  if (!triplet_) return size();
  return static_cast<std::size_t>(2 * *triplet_ * *triplet_ / 3);
}

template <class Real>
std::vector<Real> BasicConfiguration<Real>::generators() const {
  const auto n = generator_count() * static_cast<std::size_t>(dim());
  return {coords_.begin(), coords_.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::array<double, 2> triplet_shift_fraction(int copy, int L) {
  if (copy == 1) return {0.5 / L, 0.5 / L};
  if (copy == 2) return {1.0 / L, 0.0};
  return {0.0, 0.0};
}

template <class Real>
double triplet_closure_error(const BasicConfiguration<Real>& config) {
  if (!config.triplet()) return 0.0;
  const int L = *config.triplet();
  const std::size_t g = config.generator_count();
  const std::array<Real, 2> period{config.cell().template period_as<Real>(0),
                                   config.cell().template period_as<Real>(1)};
  double worst = 0.0;
  for (int copy = 1; copy <= 2; ++copy) {
    for (std::size_t k = 0; k < g; ++k) {
      for (int axis = 0; axis < 2; ++axis) {
        const int num = copy == 1 ? 1 : (axis == 0 ? 2 : 0);
        const Real expected =
            config.coord(k, axis) + period[static_cast<std::size_t>(axis)] * Real(num) / Real(2 * L);
        const Real& stored = config.coord(k + static_cast<std::size_t>(copy) * g, axis);
        worst = std::max(worst, periodic_gap(stored, expected, period[static_cast<std::size_t>(axis)]));
      }
    }
  }
  return worst;
}

template <class Real>
BasicConfiguration<Real> expand_triplet(std::span<const Real> free_coords, int L) {
  require_triplet_parameter(L);
  const auto g = static_cast<std::size_t>(2 * L * L / 3);
  if (free_coords.size() != 2 * g) throw std::invalid_argument("wrong generator count");
  const Cell cell = Cell::triangular();
  const std::array<Real, 2> period{cell.period_as<Real>(0), cell.period_as<Real>(1)};
  // Shifts as exact rationals of the periods: (1/(2L), 1/(2L)) and (1/L, 0).
  const std::array<std::array<Real, 2>, 3> shift{{
      {Real(0), Real(0)},
      {period[0] / Real(2 * L), period[1] / Real(2 * L)},
      {period[0] / Real(L), Real(0)},
  }};
  std::vector<Real> coords;
  coords.reserve(6 * g);
  for (const auto& s : shift) {
    for (std::size_t k = 0; k < g; ++k) {
      coords.push_back(wrap_coordinate(Real(free_coords[2 * k] + s[0]), period[0]));
      coords.push_back(wrap_coordinate(Real(free_coords[2 * k + 1] + s[1]), period[1]));
    }
  }
  return BasicConfiguration<Real>(cell, std::move(coords), L);
}

double periodic_distance(std::span<const double> x, std::span<const double> y, const Cell& cell) {
  const auto d = periodic_displacement(x, y, cell);
  return std::hypot(d[0], d[1]);
}

std::array<double, 2> periodic_displacement(std::span<const double> x, std::span<const double> y,
                                            const Cell& cell) {
  std::array<double, 2> out{0.0, 0.0};
  for (int i = 0; i < cell.dim(); ++i) {
    const double l = cell.period(i);
    const auto ui = static_cast<std::size_t>(i);
    double diff = std::fmod(x[ui] - y[ui], l);
    if (diff >= 0.5 * l) diff -= l;
    if (diff < -0.5 * l) diff += l;
    out[ui] = diff;
  }
  return out;
}

template <class Real>
BasicConfiguration<Real> equidistant_1d(int N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  std::vector<Real> coords;
  coords.reserve(static_cast<std::size_t>(N));
  for (int k = 1; k <= N; ++k) coords.push_back(Real(2 * k - N - 1) / Real(2 * N));
  return BasicConfiguration<Real>(Cell::unit(1), std::move(coords));
}

Configuration square_lattice(int K, const Cell& cell) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  std::vector<double> coords;
  if (cell.dim() == 1) {
    for (int a = 0; a < K; ++a) coords.push_back(cell.period(0) * a / K);
  } else {
    for (int a = 0; a < K; ++a) {
      for (int b = 0; b < K; ++b) {
        coords.push_back(cell.period(0) * a / K);
        coords.push_back(cell.period(1) * b / K);
      }
    }
  }
  return Configuration(cell, std::move(coords));
}

template <class Real>
BasicConfiguration<Real> triangular_lattice(int L) {
  require_triplet_parameter(L);
  const Cell cell = Cell::triangular();
  const Real lx = cell.period_as<Real>(0);
  const Real ly = cell.period_as<Real>(1);
  std::vector<Real> free;
  free.reserve(static_cast<std::size_t>(4 * L * L / 3));
  for (int k = 1; k <= 2 * L / 3; ++k) {
    for (int j = 1; j <= L; ++j) {
      free.push_back(lx * Real(3 * (2 * k - 1)) / Real(4 * L));
      free.push_back(ly * Real(4 * j + (k % 2 == 0 ? 2 : 0)) / Real(4 * L));
    }
  }
  return expand_triplet<Real>(free, L);
}

Configuration triangular_lattice_columns(int L) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  const double s3 = std::sqrt(3.0);
  std::vector<double> coords;
  for (int k = 1; k <= L; ++k) {
    for (int j = 1; j <= 2 * L; ++j) {
      const double x = j % 2 == 1 ? s3 * (k - 1) / L : s3 * (k - 0.5) / L;
      coords.push_back(x);
      coords.push_back((j - 1) / (2.0 * L));
    }
  }
  return Configuration(Cell::triangular(), std::move(coords));
}

Configuration random_configuration(std::size_t N, const Cell& cell, std::uint64_t seed,
                                   std::optional<int> triplet) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  std::mt19937_64 rng(seed);
  if (triplet) {
    require_triplet_parameter(*triplet);
    const int L = *triplet;
    if (N != static_cast<std::size_t>(2 * L * L)) {
      throw std::invalid_argument("triplet constraint requires N = 2L^2");
    }
    if (cell != Cell::triangular()) {
      throw std::invalid_argument("triplet constraint requires the (sqrt(3), 1) cell");
    }
    std::uniform_real_distribution<double> ux(0.0, cell.period(0));
    std::uniform_real_distribution<double> uy(0.0, cell.period(1));
    std::vector<double> free;
    for (std::size_t k = 0; k < N / 3; ++k) {
      free.push_back(ux(rng));
      free.push_back(uy(rng));
    }
    return expand_triplet<double>(free, L);
  }
  std::vector<double> coords;
  coords.reserve(N * static_cast<std::size_t>(cell.dim()));
  for (std::size_t k = 0; k < N; ++k) {
    for (int i = 0; i < cell.dim(); ++i) {
      std::uniform_real_distribution<double> u(0.0, cell.period(i));
      coords.push_back(u(rng));
    }
  }
  return Configuration(cell, std::move(coords));
}

Configuration translate(const Configuration& config, std::span<const double> shift) {
  std::vector<double> coords(config.coords().begin(), config.coords().end());
  const auto d = static_cast<std::size_t>(config.dim());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += shift[i % d];
  if (!config.triplet()) return Configuration(config.cell(), std::move(coords));
  // Re-expand so the replica blocks stay exact images of the generators.
  coords.resize(config.generator_count() * d);
  return expand_triplet<double>(coords, *config.triplet());
}

std::pair<Configuration, std::array<double, 2>> normalize_centroid(const Configuration& config) {
  const std::size_t g = config.generator_count();
  std::array<double, 2> shift{0.0, 0.0};
  for (int i = 0; i < config.dim(); ++i) {
    double mean = 0.0;
    for (std::size_t k = 0; k < g; ++k) mean += config.coord(k, i);
    mean /= static_cast<double>(g);
    shift[static_cast<std::size_t>(i)] = 0.5 * config.cell().period(i) - mean;
  }
  return {translate(config, std::span<const double>(shift.data(), static_cast<std::size_t>(config.dim()))),
          shift};
}

double min_separation(const Configuration& config) {
  const std::size_t n = config.size();
  if (n < 2) throw std::invalid_argument("min_separation requires N >= 2");
  const auto d = static_cast<std::size_t>(config.dim());
  const auto c = config.coords();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      best = std::min(best, periodic_distance(c.subspan(a * d, d), c.subspan(b * d, d), config.cell()));
    }
  }
  return best;
}

bool same_point_set(const Configuration& a, const Configuration& b, double tol) {
  if (a.size() != b.size() || a.cell() != b.cell()) return false;
  const auto d = static_cast<std::size_t>(a.dim());
  std::vector<bool> used(b.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      if (periodic_distance(a.coords().subspan(i * d, d), b.coords().subspan(j * d, d), a.cell()) <= tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

template class BasicConfiguration<double>;
template class BasicConfiguration<Extended>;
template double triplet_closure_error(const BasicConfiguration<double>&);
template double triplet_closure_error(const BasicConfiguration<Extended>&);
template BasicConfiguration<double> equidistant_1d<double>(int);
template BasicConfiguration<Extended> equidistant_1d<Extended>(int);
template BasicConfiguration<double> triangular_lattice<double>(int);
template BasicConfiguration<Extended> triangular_lattice<Extended>(int);
template BasicConfiguration<double> expand_triplet<double>(std::span<const double>, int);
template BasicConfiguration<Extended> expand_triplet<Extended>(std::span<const Extended>, int);

}  // namespace torus
