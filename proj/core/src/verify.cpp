#include "torus/verify.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "torus/certificates.hpp"
#include "torus/spectral.hpp"

namespace torus {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLn10 = std::log(10.0);

double log_sum_exp(const std::vector<double>& v) {
  double top = kNegInf;
  for (double x : v) top = std::max(top, x);
  if (top == kNegInf) return top;
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

double log_tail(const FourierKernel& kernel) {
  return kernel.tail_bound() > 0.0 ? std::log(kernel.tail_bound()) : kNegInf;
}

// log eps_N = log sum_{p != 0} a_{pN}, tail included.
double log_epsilon_1d(const FourierKernel& kernel, int N) {
  std::vector<double> terms{log_tail(kernel)};
  for (int p = 1; p * N <= kernel.mode_cap(); ++p) {
    terms.push_back(kernel.log_coefficient({p * N, 0}));
    terms.push_back(kernel.log_coefficient({-p * N, 0}));
  }
  return log_sum_exp(terms);
}

// log eps_L = log (1/2) sum [1 + (-1)^{p+q}] a_{pL,qL}, tail included.
double log_epsilon_2d(const FourierKernel& kernel, int L) {
  std::vector<double> terms{log_tail(kernel)};
  const int pmax = kernel.mode_cap() / L;
  for (int p = -pmax; p <= pmax; ++p) {
    for (int q = -pmax; q <= pmax; ++q) {
      if ((p == 0 && q == 0) || (p + q) % 2 != 0) continue;
      terms.push_back(kernel.log_coefficient({p * L, q * L}));
    }
  }
  return log_sum_exp(terms);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class Real>
double log10_abs(const Cplx<Real>& z) {
  using std::log10;
  const Real n2 = z.norm2();
  if (n2 <= 0) return kNegInf;
  if constexpr (is_extended_v<Real>) {
    return (boost::multiprecision::log10(n2) / 2).template convert_to<double>();
  } else {
    return 0.5 * log10(n2);
  }
}

template <class Real>
double max_log10_b(const BasicConfiguration<Real>& config, const std::vector<Mode>& modes) {
  double best = kNegInf;
  for (const Mode& n : modes) best = std::max(best, log10_abs(structure_factor(config, n)));
  return best;
}

}  // namespace

VerdictReport verify_theorem_1d(const FourierKernel& kernel, int N, const VerifyOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (kernel.dim() != 1) throw std::invalid_argument("verify-1d requires a 1D kernel");
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  VerdictReport r;
  r.dim = 1;
  r.size = N;
  r.points = static_cast<std::size_t>(N);
  r.tolerance = options.tolerance.value_or(1e-6);

  if (N >= 2) {
    try {
      r.decay = check_decay_1d(kernel, N, options.thresholds);
      if (!r.decay->passed()) {
        r.hypothesis_warning = true;
        r.warning = r.decay->passed_decay ? "decay ratio above threshold" : "decay constant C0 above threshold";
      }
    } catch (const std::exception& e) {
      r.hypothesis_warning = true;
      r.warning = e.what();
    }
  }

  r.minimization = minimize(kernel, N, Constraint::none, options.minimize);
  r.best_log10_gap = r.minimization.best_log10_gap;
  auto [aligned, defect] = canonicalize_translation(r.minimization.best, equidistant_1d(N));
  r.defect = std::move(defect);
  r.minimization.defect = r.defect;
  r.sup_defect = r.defect.sup_norm;
  r.recovered = r.sup_defect <= r.tolerance;

  const double log_eps = log_epsilon_1d(kernel, N);
  r.target_log10_gap = log_eps / kLn10;
  const double log_scale = 0.5 * (log_eps - std::log(static_cast<double>(N)) - kernel.log_coefficient({N / 2, 0}));
  if (r.sup_defect > 0.0) {
    r.log10_defect_ratio = (std::log(r.sup_defect) - log_scale) / kLn10;
    r.defect_ratio = std::pow(10.0, r.log10_defect_ratio);
  } else {
    r.log10_defect_ratio = kNegInf;
    r.defect_ratio = 0.0;
  }
  r.seconds = seconds_since(t0);
  return r;
}

VerdictReport verify_theorem_2d(const FourierKernel& kernel, int L, const VerifyOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (L < 3 || L % 3 != 0) throw std::invalid_argument("L must be divisible by 3");
  if (kernel.dim() != 2 || kernel.cell() != Cell::triangular()) {
    throw std::invalid_argument("verify-2d requires a kernel on the (sqrt(3), 1) cell");
  }
  VerdictReport r;
  r.dim = 2;
  r.size = L;
  r.points = static_cast<std::size_t>(2 * L * L);
  r.tolerance = options.tolerance.value_or(1e-4);

  try {
    r.decay = check_decay_2d(kernel, L, options.lambda, options.thresholds);
    if (!r.decay->passed()) {
      r.hypothesis_warning = true;
      r.warning = r.decay->passed_decay ? "decay ratio above threshold" : "non-positive coefficient in the decay box";
    }
  } catch (const std::exception& e) {
    r.hypothesis_warning = true;
    r.warning = e.what();
  }

  r.minimization = minimize(kernel, L, Constraint::triplet, options.minimize);
  r.best_log10_gap = r.minimization.best_log10_gap;
  auto [aligned, defect] = canonicalize_translation(r.minimization.best, triangular_lattice(L));
  r.defect = std::move(defect);
  r.minimization.defect = r.defect;
  r.sup_defect = r.defect.sup_norm;
  r.recovered = r.sup_defect <= r.tolerance;
  r.min_separation = min_separation(r.minimization.best);
  r.target_log10_gap = log_epsilon_2d(kernel, L) / kLn10;

  // |b_mn| over S_1 without the triplet-factor zeros against sqrt(gap / min a).
  std::vector<Mode> modes;
  double min_log_a = std::numeric_limits<double>::infinity();
  for (const Mode& n : s1_modes(L)) {
    if (is_exceptional(n[0], n[1], L)) {
      ++r.exceptional_modes;
      continue;
    }
    modes.push_back(n);
    min_log_a = std::min(min_log_a, kernel.log_coefficient(n));
  }
  r.s1_modes = modes.size();
  if (r.minimization.best_extended) {
    const ExtendedPrecision guard(r.minimization.precision_digits);
    r.log10_max_b_s1 = max_log10_b(*r.minimization.best_extended, modes);
  } else {
    r.log10_max_b_s1 = max_log10_b(r.minimization.best, modes);
  }
  r.log10_b_bound_s1 = 0.5 * (r.best_log10_gap - min_log_a / kLn10);
  r.b_bound_holds = r.log10_max_b_s1 <= r.log10_b_bound_s1 ||
                    std::pow(10.0, r.log10_max_b_s1) <= std::pow(10.0, r.log10_b_bound_s1) + 1e-12;
  r.seconds = seconds_since(t0);
  return r;
}

}  // namespace torus
