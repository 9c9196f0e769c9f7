#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "torus/kernel.hpp"

namespace torus {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum exp(v)) over the finite entries; -inf when there are none.
double log_sum_exp(const std::vector<double>& v) {
  double top = kNegInf;
  for (double x : v) top = std::max(top, x);
  if (top == kNegInf || top == std::numeric_limits<double>::infinity()) return top;
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

double exp_clamped(double lg) {
  if (lg > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(lg);
}

}  // namespace

DecayReport check_decay_1d(const FourierKernel& kernel, int N, const DecayThresholds& thresholds) {
  if (kernel.dim() != 1) throw std::invalid_argument("check_decay_1d requires a 1D kernel");
  const int M = kernel.mode_cap();
  if (N < 2 || N > M) throw std::invalid_argument("N must satisfy 2 <= N <= mode_cap");
  for (int k = 1; k <= M; ++k) {
    if (kernel.log_coefficient({k, 0}) == kNegInf) {
      throw std::domain_error("Fourier coefficient not positive at n=" + std::to_string(k));
    }
  }
  DecayReport r;
  r.dim = 1;
  r.size = N;
  // C0 = max_k [max_{m<=k} 1/(m^2 a_m)] k^2 a_k, in logs.
  double inner = kNegInf;
  double log_c0 = kNegInf;
  for (int k = 1; k <= M; ++k) {
    const double lk = 2.0 * std::log(static_cast<double>(k)) + kernel.log_coefficient({k, 0});
    inner = std::max(inner, -lk);
    log_c0 = std::max(log_c0, inner + lk);
  }
  r.C0 = exp_clamped(log_c0);

  std::vector<double> terms;
  for (int p = 1; p * N <= M; ++p) {
    const double lg = kernel.log_coefficient({p * N, 0});
    terms.push_back(lg);
    terms.push_back(lg);  // -pN
  }
  if (kernel.tail_bound() > 0.0) terms.push_back(std::log(kernel.tail_bound()));
  const double log_eps = log_sum_exp(terms);
  r.tail_bound = kernel.tail_bound();
  r.epsilon = exp_clamped(log_eps);
  const double log_ratio =
      2.0 * std::log(static_cast<double>(N)) + log_eps - kernel.log_coefficient({N / 2, 0});
  r.log10_ratio = log_ratio / std::log(10.0);
  r.ratio = exp_clamped(log_ratio);
  r.passed_decay = r.C0 <= thresholds.c0_max;
  r.passed_ratio = log_ratio < std::log(thresholds.ratio_max);
  return r;
}

DecayReport check_decay_2d(const FourierKernel& kernel, int L, double lambda,
                           const DecayThresholds& thresholds) {
  if (kernel.dim() != 2) throw std::invalid_argument("check_decay_2d requires a 2D kernel");
  if (L < 3 || L % 3 != 0) throw std::invalid_argument("L must be divisible by 3");
  const int M = kernel.mode_cap();
  const Mode anchor{2 * L / 3, L};
  if (!kernel.in_box(anchor)) throw std::invalid_argument("required mode (2L/3, L) outside mode box");
  DecayReport r;
  r.dim = 2;
  r.size = L;
  r.lambda = lambda;
  r.tail_bound = kernel.tail_bound();
  const double log_anchor = kernel.log_coefficient(anchor);

  // Only p + q even survives the factor [1 + (-1)^{p+q}] (which then equals 2,
  // cancelling the leading 1/2).
  std::vector<double> eps_terms;
  std::vector<double> tilde_terms;
  const int pmax = M / L;
  for (int p = -pmax; p <= pmax; ++p) {
    for (int q = -pmax; q <= pmax; ++q) {
      if ((p == 0 && q == 0) || (p + q) % 2 != 0) continue;
      const double lg = kernel.log_coefficient({p * L, q * L});
      if (lg == kNegInf) continue;
      eps_terms.push_back(lg);
      tilde_terms.push_back(lg + std::log(static_cast<double>(L) * L * (p * p + q * q)));
    }
  }
  const double log_eps = log_sum_exp(eps_terms);
  const double log_tilde = log_sum_exp(tilde_terms);
  r.epsilon = log_eps == kNegInf ? 0.0 : exp_clamped(log_eps);
  r.epsilon_tilde = log_tilde == kNegInf ? 0.0 : exp_clamped(log_tilde);

  double log_max = kNegInf;
  double log_min = std::numeric_limits<double>::infinity();
  for (int m = -2 * L / 3; m <= 2 * L / 3; ++m) {
    for (int n = -L; n <= L; ++n) {
      const double lg = kernel.log_coefficient({m, n});
      log_max = std::max(log_max, lg);
      if (m != 0 || n != 0) log_min = std::min(log_min, lg);
    }
  }
  r.C0 = exp_clamped(log_max - log_anchor);
  r.box_min_ratio = log_min == kNegInf ? 0.0 : exp_clamped(log_min - log_anchor);

  const double log_ratio = lambda * L + log_tilde - log_anchor;
  r.log10_ratio = log_ratio / std::log(10.0);
  r.ratio = log_tilde == kNegInf ? 0.0 : exp_clamped(log_ratio);
  r.passed_decay = log_anchor > kNegInf && log_min > kNegInf;
  const bool tail_ok = std::isfinite(r.tail_bound) &&
                       (r.tail_bound == 0.0 ||
                        std::log(r.tail_bound) <= std::log(thresholds.tail_fraction_max) + log_eps);
  r.passed_ratio = log_anchor > kNegInf && log_ratio < std::log(thresholds.ratio_max) && tail_ok;
  return r;
}

}  // namespace torus
