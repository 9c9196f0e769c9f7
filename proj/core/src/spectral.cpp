#include "torus/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace torus {
namespace {

void require_same_cell(const FourierKernel& kernel, const Cell& cell) {
  if (kernel.cell() != cell) throw std::invalid_argument("kernel and configuration cells differ");
}

int resolve_cap(const FourierKernel& kernel, int mode_cap) {
  if (mode_cap < 0) throw std::invalid_argument("mode_cap must be >= 0");
  if (mode_cap == 0) return kernel.mode_cap();
  if (mode_cap > kernel.mode_cap()) throw std::invalid_argument("mode_cap exceeds kernel storage");
  return mode_cap;
}

template <class Real>
std::array<Real, 2> periods_of(const Cell& cell) {
  return {cell.period_as<Real>(0), cell.dim() == 2 ? cell.period_as<Real>(1) : Real(1)};
}

template <class Real>
Cplx<Real> scaled(const Cplx<Real>& z, std::size_t N) {
  const Real n(static_cast<double>(N));
  return {z.re / n, z.im / n};
}

}  // namespace

template <class Real>
const Cplx<Real>& BasicStructureFactor<Real>::at(const Mode& n) const {
  const int side = 2 * mode_cap + 1;
  if (std::abs(n[0]) > mode_cap || std::abs(n[1]) > mode_cap || (dim == 1 && n[1] != 0)) {
    throw std::out_of_range("mode outside the structure factor box");
  }
  const int idx = dim == 1 ? n[0] + mode_cap : (n[0] + mode_cap) * side + (n[1] + mode_cap);
  return values[static_cast<std::size_t>(idx)];
}

template <class Real>
std::vector<Mode> BasicStructureFactor<Real>::modes() const {
  std::vector<Mode> out;
  for (int a = -mode_cap; a <= mode_cap; ++a) {
    if (dim == 1) {
      out.push_back({a, 0});
    } else {
      for (int b = -mode_cap; b <= mode_cap; ++b) out.push_back({a, b});
    }
  }
  return out;
}

template <class Real>
Cplx<Real> structure_factor(const BasicConfiguration<Real>& config, const Mode& n) {
  const auto period = periods_of<Real>(config.cell());
  const Real two_pi = 2 * pi_as<Real>();
  Cplx<Real> sum{Real(0), Real(0)};
  for (std::size_t k = 0; k < config.size(); ++k) {
    Cplx<Real> p = unit_phase(Real(n[0]) * (config.coord(k, 0) / period[0]), two_pi);
    if (config.dim() == 2) p = p * unit_phase(Real(n[1]) * (config.coord(k, 1) / period[1]), two_pi);
    sum += p;
  }
  return scaled(sum, config.size());
}

template <class Real>
BasicStructureFactor<Real> structure_factor_grid(const BasicConfiguration<Real>& config, int mode_cap) {
  if (mode_cap < 1) throw std::invalid_argument("mode_cap must be >= 1");
  const auto period = periods_of<Real>(config.cell());
  const Real two_pi = 2 * pi_as<Real>();
  const int M = mode_cap;
  const auto side = static_cast<std::size_t>(2 * M + 1);
  BasicStructureFactor<Real> sf;
  sf.dim = config.dim();
  sf.mode_cap = M;
  sf.N = config.size();
  sf.values.assign(config.dim() == 1 ? side : side * side, Cplx<Real>{Real(0), Real(0)});
  std::array<std::vector<Cplx<Real>>, 2> axis;
  for (std::size_t k = 0; k < config.size(); ++k) {
    for (int i = 0; i < config.dim(); ++i) {
      auto& row = axis[static_cast<std::size_t>(i)];
      row.resize(side);
      const Real u = config.coord(k, i) / period[static_cast<std::size_t>(i)];
      for (int m = -M; m <= M; ++m) row[static_cast<std::size_t>(m + M)] = unit_phase(Real(m) * u, two_pi);
    }
    if (config.dim() == 1) {
      for (std::size_t a = 0; a < side; ++a) sf.values[a] += axis[0][a];
    } else {
      for (std::size_t a = 0; a < side; ++a) {
        for (std::size_t b = 0; b < side; ++b) sf.values[a * side + b] += axis[0][a] * axis[1][b];
      }
    }
  }
  for (auto& v : sf.values) v = scaled(v, config.size());
  return sf;
}

EnergyReport energy_gap_spectral(const FourierKernel& kernel, const Configuration& config, int mode_cap) {
  require_same_cell(kernel, config.cell());
  const int cap = resolve_cap(kernel, mode_cap);
  EnergyReport r;
  r.mode_cap_used = cap;
  r.uniform_energy = kernel.coefficient({0, 0});
  r.gap = gap_spectral(kernel, config, cap);
  r.tail_bound = kernel.tail_bound();
  for (const Mode& n : kernel.modes()) {
    if (std::abs(n[0]) > cap || std::abs(n[1]) > cap) r.tail_bound += kernel.coefficient(n);
  }
  r.direct_energy = std::numeric_limits<double>::quiet_NaN();
  r.pair_energy = std::numeric_limits<double>::quiet_NaN();
  return r;
}

template <class Real>
Real gap_spectral(const FourierKernel& kernel, const BasicConfiguration<Real>& config, int mode_cap) {
  require_same_cell(kernel, config.cell());
  typename GapModel<Real>::Options opt;
  opt.mode_cap = resolve_cap(kernel, mode_cap);
  return GapModel<Real>(kernel, opt).gap(config.coords());
}

namespace {

// sum over ordered pairs m != k of f(x_m - x_k).
double off_diagonal_sum(const FourierKernel& kernel, const Configuration& config) {
  const auto d = static_cast<std::size_t>(config.dim());
  double sum = 0.0;
  std::array<double, 2> diff{0.0, 0.0};
  for (std::size_t m = 0; m < config.size(); ++m) {
    for (std::size_t k = m + 1; k < config.size(); ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        diff[i] = config.coord(m, static_cast<int>(i)) - config.coord(k, static_cast<int>(i));
      }
      sum += 2.0 * evaluate(kernel, std::span<const double>(diff.data(), d));
    }
  }
  return sum;
}

}  // namespace

double energy_direct(const FourierKernel& kernel, const Configuration& config) {
  require_same_cell(kernel, config.cell());
  const auto n = static_cast<double>(config.size());
  return (off_diagonal_sum(kernel, config) + n * kernel.value_at_origin()) / (n * n);
}

double pair_energy(const FourierKernel& kernel, const Configuration& config) {
  require_same_cell(kernel, config.cell());
  if (config.size() < 2) throw std::invalid_argument("pair energy requires N >= 2");
  const auto n = static_cast<double>(config.size());
  return off_diagonal_sum(kernel, config) / (n * (n - 1.0));
}

EnergyReport energy_report(const FourierKernel& kernel, const Configuration& config, int mode_cap) {
  EnergyReport r = energy_gap_spectral(kernel, config, mode_cap);
  const double off = off_diagonal_sum(kernel, config);
  const auto n = static_cast<double>(config.size());
  r.direct_energy = (off + n * kernel.value_at_origin()) / (n * n);
  if (config.size() >= 2) r.pair_energy = off / (n * (n - 1.0));
  return r;
}

std::vector<double> gap_gradient(const FourierKernel& kernel, const Configuration& config, int mode_cap) {
  require_same_cell(kernel, config.cell());
  GapModel<double>::Options opt;
  opt.mode_cap = resolve_cap(kernel, mode_cap);
  opt.triplet = config.triplet();
  const GapModel<double> model(kernel, opt);
  const std::vector<double> free = config.generators();
  std::vector<double> grad(free.size());
  model.gradient(free, grad);
  return grad;
}

// ---------------------------------------------------------------------------
// GapModel

template <class Real>
GapModel<Real>::GapModel(const FourierKernel& kernel, const Options& options)
    : dim_(kernel.dim()),
      period_(periods_of<Real>(kernel.cell())),
      two_pi_(2 * pi_as<Real>()),
      triplet_(options.triplet) {
  const int cap = resolve_cap(kernel, options.mode_cap);
  if (!(options.temper > 0.0 && options.temper <= 1.0)) throw std::invalid_argument("temper must lie in (0, 1]");
  if (triplet_) {
    if (dim_ != 2) throw std::invalid_argument("triplet constraint requires a 2D kernel");
    if (*triplet_ < 3 || *triplet_ % 3 != 0) throw std::invalid_argument("L must be divisible by 3");
  }
  for (const Mode& n : kernel.modes()) {
    if (std::abs(n[0]) > cap || std::abs(n[1]) > cap) continue;
    // Half space: n > 0 lexicographically; -n is folded in through the weight.
    if (n[0] < 0 || (n[0] == 0 && n[1] <= 0)) continue;
    const double lg = kernel.log_coefficient(n);
    if (lg == -std::numeric_limits<double>::infinity() || lg < options.min_log_coefficient) continue;
    Entry e{n, Real(0), {Real(0), Real(0)}, {Real(1), Real(0)}, Real(1)};
    if (options.temper == 1.0) {
      e.weight = 2 * kernel.coefficient_as<Real>(n);
    } else {
      using std::exp;
      const double top = kernel.max_nonzero_log_coefficient();
      e.weight = 2 * exp(Real(options.temper * lg + (1.0 - options.temper) * top));
    }
    if (e.weight == 0) continue;
    for (int i = 0; i < dim_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      e.theta[ui] = two_pi_ * Real(n[ui]) / period_[ui];
    }
    if (triplet_) {
      const int L = *triplet_;
      e.factor = Cplx<Real>{Real(1), Real(0)} + unit_phase(Real(n[0]) / Real(L), two_pi_) +
                 unit_phase(Real(n[0] + n[1]) / Real(2 * L), two_pi_);
      e.factor_norm2 = e.factor.norm2();
    }
    cap_ = std::max({cap_, std::abs(n[0]), std::abs(n[1])});
    entries_.push_back(std::move(e));
  }
}

template <class Real>
std::vector<Cplx<Real>> GapModel<Real>::phases(std::span<const Real> coords) const {
  const auto d = static_cast<std::size_t>(dim_);
  const auto width = static_cast<std::size_t>(cap_ + 1);
  const std::size_t points = coords.size() / d;
  std::vector<Cplx<Real>> table(points * d * width);
  for (std::size_t k = 0; k < points; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      const Real u = coords[k * d + i] / period_[i];
      Cplx<Real>* row = &table[(k * d + i) * width];
      row[0] = {Real(1), Real(0)};
      if constexpr (is_extended_v<Real>) {
        // Powers of e(u): the extra working digits absorb the linear error growth.
        if (width > 1) row[1] = unit_phase(u, two_pi_);
        for (std::size_t m = 2; m < width; ++m) row[m] = row[m - 1] * row[1];
      } else {
        for (std::size_t m = 1; m < width; ++m) row[m] = unit_phase(static_cast<double>(m) * u);
      }
    }
  }
  return table;
}

template <class Real>
Cplx<Real> GapModel<Real>::phase(const std::vector<Cplx<Real>>& table, std::size_t k, int axis, int m) const {
  const auto width = static_cast<std::size_t>(cap_ + 1);
  const auto& p = table[(k * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)) * width +
                        static_cast<std::size_t>(std::abs(m))];
  return m < 0 ? p.conj() : p;
}

template <class Real>
Cplx<Real> GapModel<Real>::point_phase(const std::vector<Cplx<Real>>& table, std::size_t k,
                                       const Mode& n) const {
  if (dim_ == 1) return phase(table, k, 0, n[0]);
  return phase(table, k, 0, n[0]) * phase(table, k, 1, n[1]);
}

template <class Real>
Real GapModel<Real>::gap(std::span<const Real> coords) const {
  const auto d = static_cast<std::size_t>(dim_);
  const std::size_t points = coords.size() / d;
  const Real N(static_cast<double>(total_points(points)));
  const auto table = phases(coords);
  Real sum(0);
  for (const Entry& e : entries_) {
    Cplx<Real> s{Real(0), Real(0)};
    for (std::size_t k = 0; k < points; ++k) s += point_phase(table, k, e.n);
    sum += e.weight * e.factor_norm2 * s.norm2();
  }
  return sum / (N * N);
}

template <class Real>
Real GapModel<Real>::gradient(std::span<const Real> coords, std::span<Real> grad) const {
  const auto d = static_cast<std::size_t>(dim_);
  const std::size_t points = coords.size() / d;
  const Real N(static_cast<double>(total_points(points)));
  const auto table = phases(coords);
  std::fill(grad.begin(), grad.end(), Real(0));
  std::vector<Cplx<Real>> e_k(points);
  Real sum(0);
  for (const Entry& e : entries_) {
    Cplx<Real> s{Real(0), Real(0)};
    for (std::size_t k = 0; k < points; ++k) {
      e_k[k] = point_phase(table, k, e.n);
      s += e_k[k];
    }
    const Real c = e.weight * e.factor_norm2;
    sum += c * s.norm2();
    // d|S|^2/dx_{k,i} = -2 theta_i Im(conj(S) e_k)
    for (std::size_t k = 0; k < points; ++k) {
      const Real im = s.re * e_k[k].im - s.im * e_k[k].re;
      for (std::size_t i = 0; i < d; ++i) grad[k * d + i] -= 2 * c * e.theta[i] * im;
    }
  }
  const Real n2 = N * N;
  for (auto& g : grad) g /= n2;
  return sum / n2;
}

template <class Real>
Real GapModel<Real>::hessian(std::span<const Real> coords, std::span<Real> grad, std::vector<Real>& hess) const {
  const auto d = static_cast<std::size_t>(dim_);
  const std::size_t points = coords.size() / d;
  const std::size_t dof = points * d;
  const Real N(static_cast<double>(total_points(points)));
  const auto table = phases(coords);
  std::fill(grad.begin(), grad.end(), Real(0));
  hess.assign(dof * dof, Real(0));
  std::vector<Cplx<Real>> e_k(points);
  Real sum(0);
  for (const Entry& e : entries_) {
    Cplx<Real> s{Real(0), Real(0)};
    for (std::size_t k = 0; k < points; ++k) {
      e_k[k] = point_phase(table, k, e.n);
      s += e_k[k];
    }
    const Real c = e.weight * e.factor_norm2;
    sum += c * s.norm2();
    for (std::size_t k = 0; k < points; ++k) {
      const Real im = s.re * e_k[k].im - s.im * e_k[k].re;
      for (std::size_t i = 0; i < d; ++i) grad[k * d + i] -= 2 * c * e.theta[i] * im;
    }
    // H_{(k,i),(l,j)} = 2 c theta_i theta_j [Re(conj(e_k) e_l) - delta_kl Re(conj(S) e_k)]
    for (std::size_t k = 0; k < points; ++k) {
      const Real self = s.re * e_k[k].re + s.im * e_k[k].im;
      for (std::size_t l = k; l < points; ++l) {
        Real w = e_k[k].re * e_k[l].re + e_k[k].im * e_k[l].im;
        if (l == k) w -= self;
        w *= 2 * c;
        for (std::size_t i = 0; i < d; ++i) {
          for (std::size_t j = 0; j < d; ++j) {
            const Real h = w * e.theta[i] * e.theta[j];
            hess[(k * d + i) * dof + (l * d + j)] += h;
            if (l != k) hess[(l * d + j) * dof + (k * d + i)] += h;
          }
        }
      }
    }
  }
  const Real n2 = N * N;
  for (auto& g : grad) g /= n2;
  for (auto& h : hess) h /= n2;
  return sum / n2;
}

template struct BasicStructureFactor<double>;
template struct BasicStructureFactor<Extended>;
template Cplx<double> structure_factor(const BasicConfiguration<double>&, const Mode&);
template Cplx<Extended> structure_factor(const BasicConfiguration<Extended>&, const Mode&);
template BasicStructureFactor<double> structure_factor_grid(const BasicConfiguration<double>&, int);
template BasicStructureFactor<Extended> structure_factor_grid(const BasicConfiguration<Extended>&, int);
template double gap_spectral(const FourierKernel&, const BasicConfiguration<double>&, int);
template Extended gap_spectral(const FourierKernel&, const BasicConfiguration<Extended>&, int);
template class GapModel<double>;
template class GapModel<Extended>;

}  // namespace torus
