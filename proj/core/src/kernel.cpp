#include "torus/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace torus {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_cap(int mode_cap) {
  if (mode_cap < 1) throw std::invalid_argument("mode_cap must be >= 1");
}

void require_width(double t) {
  if (!std::isfinite(t) || t <= 0.0) throw std::invalid_argument("t must be positive");
}

// Bound on sum_{|n| > M} exp(-c n^2) (both signs), using the ratio test on
// consecutive terms: exp(-c(n+1)^2) / exp(-c n^2) <= exp(-c (2M + 3)) for n > M.
double gaussian_axis_tail(double c, int M) {
  const double first = std::exp(-c * (M + 1.0) * (M + 1.0));
  const double denom = -std::expm1(-c * (2.0 * M + 3.0));
  return 2.0 * first / denom;
}

double gaussian_axis_inner(double c, int M) {
  double s = 1.0;
  for (int n = M; n >= 1; --n) s += 2.0 * std::exp(-c * n * static_cast<double>(n));
  return s;
}

// prefactor * sum over modes outside the box of prod_i exp(-c_i n_i^2).
double gaussian_tail(const Cell& cell, double prefactor, const std::array<double, 2>& c, int M) {
  if (cell.dim() == 1) return prefactor * gaussian_axis_tail(c[0], M);
  const double in1 = gaussian_axis_inner(c[0], M);
  const double in2 = gaussian_axis_inner(c[1], M);
  const double t1 = gaussian_axis_tail(c[0], M);
  const double t2 = gaussian_axis_tail(c[1], M);
  return prefactor * (in1 * t2 + t1 * in2 + t1 * t2);
}

double scaled_norm2(const Cell& cell, const Mode& n) {
  double s = 0.0;
  for (int i = 0; i < cell.dim(); ++i) {
    const double k = n[static_cast<std::size_t>(i)] / cell.period(i);
    s += k * k;
  }
  return s;
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::heat: return "heat";
    case KernelFamily::inverse_laplacian: return "inv_laplacian";
    case KernelFamily::table: return "table";
  }
  return "table";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "heat") return KernelFamily::heat;
  if (name == "inv_laplacian" || name == "inverse_laplacian") return KernelFamily::inverse_laplacian;
  if (name == "table") return KernelFamily::table;
  throw std::invalid_argument("unknown kernel type '" + name + "'");
}

FourierKernel::FourierKernel(Cell cell, int mode_cap, KernelFamily family)
    : cell_(std::move(cell)), mode_cap_(mode_cap), family_(family) {
  const auto n = static_cast<std::size_t>(box_size());
  coeffs_.assign(n, 0.0);
  log_coeffs_.assign(n, -kInf);
}

int FourierKernel::box_size() const noexcept {
  const int side = 2 * mode_cap_ + 1;
  return dim() == 1 ? side : side * side;
}

bool FourierKernel::in_box(const Mode& n) const noexcept {
  if (std::abs(n[0]) > mode_cap_) return false;
  if (dim() == 1) return n[1] == 0;
  return std::abs(n[1]) <= mode_cap_;
}

std::size_t FourierKernel::index(const Mode& n) const noexcept {
  const int side = 2 * mode_cap_ + 1;
  if (dim() == 1) return static_cast<std::size_t>(n[0] + mode_cap_);
  return static_cast<std::size_t>((n[0] + mode_cap_) * side + (n[1] + mode_cap_));
}

double FourierKernel::coefficient(const Mode& n) const noexcept {
  return in_box(n) ? coeffs_[index(n)] : 0.0;
}

double FourierKernel::log_coefficient(const Mode& n) const noexcept {
  return in_box(n) ? log_coeffs_[index(n)] : -kInf;
}

double FourierKernel::max_nonzero_log_coefficient() const noexcept {
  return *std::max_element(log_coeffs_.begin(), log_coeffs_.end());
}

std::vector<Mode> FourierKernel::modes() const {
  std::vector<Mode> out;
  out.reserve(static_cast<std::size_t>(box_size()));
  const int M = mode_cap_;
  if (dim() == 1) {
    for (int a = -M; a <= M; ++a) out.push_back({a, 0});
  } else {
    for (int a = -M; a <= M; ++a)
      for (int b = -M; b <= M; ++b) out.push_back({a, b});
  }
  return out;
}

void FourierKernel::finish() {
  sum_ = 0.0;
  for (double a : coeffs_) sum_ += a;
}

FourierKernel FourierKernel::truncated(int cap) const {
  if (cap < 1 || cap > mode_cap_) throw std::invalid_argument("truncation cap outside stored box");
  switch (family_) {
    case KernelFamily::gaussian: return gaussian_kernel(*t_, cell_, cap);
    case KernelFamily::heat: return heat_kernel(*t_, cell_, cap);
    case KernelFamily::inverse_laplacian: return inverse_laplacian_kernel(cell_, cap);
    case KernelFamily::table: break;
  }
  FourierKernel k = custom_kernel(cell_, rule_, cap);
  for (const Mode& n : modes()) {
    if (!k.in_box(n)) k.tail_bound_ += coefficient(n);
  }
  k.tail_bound_ += tail_bound_;
  return k;
}

FourierKernel gaussian_kernel(double t, const Cell& cell, int mode_cap) {
  require_width(t);
  require_cap(mode_cap);
  FourierKernel k(cell, mode_cap, KernelFamily::gaussian);
  k.t_ = t;
  const double d = cell.dim();
  const double log_pref = 0.5 * d * std::log(kPi / t) - std::log(cell.volume());
  for (const Mode& n : k.modes()) {
    const double lg = log_pref - kPi * kPi * scaled_norm2(cell, n) / t;
    k.log_coeffs_[k.index(n)] = lg;
    k.coeffs_[k.index(n)] = std::exp(lg);
  }
  const std::array<double, 2> c{kPi * kPi / (t * cell.period(0) * cell.period(0)),
                                cell.dim() == 2 ? kPi * kPi / (t * cell.period(1) * cell.period(1)) : 0.0};
  k.tail_bound_ = gaussian_tail(cell, std::exp(log_pref), c, mode_cap);
  k.rule_ = [t, cell](const Mode& n) {
    return std::pow(kPi / t, 0.5 * cell.dim()) / cell.volume() *
           std::exp(-kPi * kPi * scaled_norm2(cell, n) / t);
  };
  k.finish();
  return k;
}

FourierKernel heat_kernel(double t, const Cell& cell, int mode_cap) {
  require_width(t);
  require_cap(mode_cap);
  FourierKernel k(cell, mode_cap, KernelFamily::heat);
  k.t_ = t;
  for (const Mode& n : k.modes()) {
    if (n[0] == 0 && n[1] == 0) continue;
    const double lg = -4.0 * kPi * kPi * scaled_norm2(cell, n) * t;
    k.log_coeffs_[k.index(n)] = lg;
    k.coeffs_[k.index(n)] = std::exp(lg);
  }
  const std::array<double, 2> c{4.0 * kPi * kPi * t / (cell.period(0) * cell.period(0)),
                                cell.dim() == 2 ? 4.0 * kPi * kPi * t / (cell.period(1) * cell.period(1)) : 0.0};
  k.tail_bound_ = gaussian_tail(cell, 1.0, c, mode_cap);
  k.rule_ = [t, cell](const Mode& n) {
    if (n[0] == 0 && n[1] == 0) return 0.0;
    return std::exp(-4.0 * kPi * kPi * scaled_norm2(cell, n) * t);
  };
  k.finish();
  return k;
}

FourierKernel inverse_laplacian_kernel(const Cell& cell, int mode_cap) {
  require_cap(mode_cap);
  FourierKernel k(cell, mode_cap, KernelFamily::inverse_laplacian);
  for (const Mode& n : k.modes()) {
    if (n[0] == 0 && n[1] == 0) continue;
    const double a = 1.0 / (4.0 * kPi * kPi * scaled_norm2(cell, n));
    k.coeffs_[k.index(n)] = a;
    k.log_coeffs_[k.index(n)] = std::log(a);
  }
  if (cell.dim() == 1) {
    // sum_{n > M} 1/n^2 < 1/M, both signs.
    const double l = cell.period(0);
    k.tail_bound_ = 2.0 * l * l / (4.0 * kPi * kPi) / mode_cap;
  } else {
    k.tail_bound_ = kInf;
  }
  k.rule_ = [cell](const Mode& n) {
    if (n[0] == 0 && n[1] == 0) return 0.0;
    return 1.0 / (4.0 * kPi * kPi * scaled_norm2(cell, n));
  };
  k.finish();
  return k;
}

FourierKernel custom_kernel(const Cell& cell, const std::function<double(const Mode&)>& rule,
                            int mode_cap) {
  require_cap(mode_cap);
  if (!rule) throw std::invalid_argument("coefficient rule is empty");
  FourierKernel k(cell, mode_cap, KernelFamily::table);
  auto checked = [&rule](const Mode& n) {
    const double v = rule(n);
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite Fourier coefficient");
    if (v < 0.0) throw std::invalid_argument("negative Fourier coefficient");
    return v;
  };
  for (const Mode& n : k.modes()) {
    const Mode m = cell.dim() == 1 ? Mode{-n[0], 0} : Mode{-n[0], -n[1]};
    const double a = 0.5 * (checked(n) + checked(m));
    k.coeffs_[k.index(n)] = a;
    k.log_coeffs_[k.index(n)] = a > 0.0 ? std::log(a) : -kInf;
  }
  // Symmetrization can differ in the last bit between n and -n; copy the
  // lexicographically smaller one so a_n == a_{-n} exactly.
  for (const Mode& n : k.modes()) {
    const Mode m = cell.dim() == 1 ? Mode{-n[0], 0} : Mode{-n[0], -n[1]};
    if (m < n) {
      k.coeffs_[k.index(n)] = k.coeffs_[k.index(m)];
      k.log_coeffs_[k.index(n)] = k.log_coeffs_[k.index(m)];
    }
  }
  k.tail_bound_ = 0.0;
  k.rule_ = rule;
  k.finish();
  return k;
}

FourierKernel table_kernel(const Cell& cell, std::span<const TableEntry> entries,
                           std::optional<int> mode_cap) {
  std::map<Mode, double> table;
  int widest = 1;
  for (const auto& e : entries) {
    if (cell.dim() == 1 && e.mode[1] != 0) {
      throw std::invalid_argument("table entry has a second mode index for a 1D cell");
    }
    if (!std::isfinite(e.value)) throw std::invalid_argument("non-finite Fourier coefficient");
    if (e.value < 0.0) throw std::invalid_argument("negative Fourier coefficient");
    table[e.mode] = e.value;
    widest = std::max({widest, std::abs(e.mode[0]), std::abs(e.mode[1])});
  }
  const int cap = mode_cap.value_or(widest);
  auto rule = [table = std::move(table)](const Mode& n) {
    if (auto it = table.find(n); it != table.end()) return it->second;
    if (auto it = table.find(Mode{-n[0], -n[1]}); it != table.end()) return it->second;
    return 0.0;
  };
  return custom_kernel(cell, rule, cap);
}

double evaluate(const FourierKernel& kernel, std::span<const double> x) {
  const Cell& cell = kernel.cell();
  if (static_cast<int>(x.size()) < cell.dim()) throw std::invalid_argument("point dimension mismatch");
  const int M = kernel.mode_cap();
  // Per-axis phases e(n u_i) for n = 0..M; negative modes use the conjugate.
  std::array<std::vector<Cplx<double>>, 2> phase;
  for (int i = 0; i < cell.dim(); ++i) {
    const double u = x[static_cast<std::size_t>(i)] / cell.period(i);
    auto& row = phase[static_cast<std::size_t>(i)];
    row.resize(static_cast<std::size_t>(M) + 1);
    for (int n = 0; n <= M; ++n) row[static_cast<std::size_t>(n)] = unit_phase(n * u);
  }
  auto axis = [&](int i, int n) {
    const auto& p = phase[static_cast<std::size_t>(i)][static_cast<std::size_t>(std::abs(n))];
    return n < 0 ? p.conj() : p;
  };
  double sum = 0.0;
  if (cell.dim() == 1) {
    for (int a = -M; a <= M; ++a) {
      const double c = kernel.coefficient({a, 0});
      if (c != 0.0) sum += c * axis(0, a).re;
    }
  } else {
    for (int a = -M; a <= M; ++a) {
      const Cplx<double> pa = axis(0, a);
      for (int b = -M; b <= M; ++b) {
        const double c = kernel.coefficient({a, b});
        if (c != 0.0) sum += c * (pa * axis(1, b)).re;
      }
    }
  }
  return sum;
}

}  // namespace torus
