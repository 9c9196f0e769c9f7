#include "torus/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "torus/spectral.hpp"

namespace torus {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_triplet_L(int L) {
  if (L < 3 || L % 3 != 0) throw std::invalid_argument("L must be divisible by 3");
}

// Non-negative residue.
std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

nlohmann::ordered_json mode_json(const Mode& n) { return nlohmann::ordered_json::array({n[0], n[1]}); }

}  // namespace

nlohmann::ordered_json to_json(const CertificateBlock& block) {
  nlohmann::ordered_json j;
  j["name"] = block.name;
  j["values"] = block.values;
  j["threshold"] = block.threshold;
  j["passed"] = block.passed;
  return j;
}

double square_lattice_upper_bound(const FourierKernel& kernel, int K) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  const int M = kernel.mode_cap();
  if (K > M) throw std::invalid_argument("mode box too small for K");
  double sum = 0.0;
  const int pmax = M / K;
  for (int p = -pmax; p <= pmax; ++p) {
    if (kernel.dim() == 1) {
      if (p != 0) sum += kernel.coefficient({p * K, 0});
      continue;
    }
    for (int q = -pmax; q <= pmax; ++q) {
      if (p != 0 || q != 0) sum += kernel.coefficient({p * K, q * K});
    }
  }
  return sum + kernel.tail_bound();
}

double coefficient_bound(double gap, const FourierKernel& kernel, const Mode& mode) {
  if (!(gap >= 0.0)) throw std::invalid_argument("gap must be >= 0");
  const double lg = kernel.log_coefficient(mode);
  if (lg == kNegInf) throw std::domain_error("zero coefficient");
  if (gap == 0.0) return 0.0;
  return std::exp(0.5 * (std::log(gap) - lg));
}

std::vector<std::complex<double>> elementary_from_power_sums(std::span<const std::complex<double>> p) {
  const std::size_t K = p.size();
  std::vector<std::complex<double>> e(K + 1);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t m = 1; m <= k; ++m) {
      const double sign = m % 2 == 1 ? 1.0 : -1.0;
      s += sign * e[k - m] * p[m - 1];
    }
    e[k] = s / static_cast<double>(k);
  }
  return e;
}

NewtonReport newton_elementary(const Configuration& config, int K, const FourierKernel* kernel) {
  if (config.dim() != 1) throw std::invalid_argument("Newton diagnostics need a 1D configuration");
  const int N = static_cast<int>(config.size());
  if (K < 1 || 2 * K > N) throw std::invalid_argument("K must satisfy 1 <= K <= N/2");
  NewtonReport r;
  r.N = N;
  r.K = K;
  std::vector<std::complex<double>> p(static_cast<std::size_t>(K));
  for (int m = 1; m <= K; ++m) {
    const Cplx<double> b = structure_factor(config, {m, 0});
    r.b.emplace_back(b.re, b.im);
    p[static_cast<std::size_t>(m - 1)] = static_cast<double>(N) * r.b.back();
  }
  const auto e = elementary_from_power_sums(p);
  r.e.assign(e.begin() + 1, e.end());
  for (int k = 1; k <= K; ++k) {
    const double sign = k % 2 == 1 ? 1.0 : -1.0;
    const auto i = static_cast<std::size_t>(k - 1);
    const double d = std::abs(r.e[i] - sign * (static_cast<double>(N) / k) * r.b[i]);
    r.defects.push_back(d);
    r.max_defect = std::max(r.max_defect, d);
  }
  if (kernel) {
    const DecayReport decay = check_decay_1d(*kernel, N);
    r.C0 = decay.C0;
    for (int k = 1; k <= K; ++k) {
      const double lg = std::log(2.0 * decay.C0) + 2.0 * std::log(static_cast<double>(N)) +
                        std::log(decay.epsilon) - 2.0 * std::log(static_cast<double>(k)) -
                        kernel->log_coefficient({k, 0});
      r.bound_rhs.push_back(std::exp(lg));
    }
  }
  return r;
}

std::complex<double> triplet_factor(int m, int n, int L) {
  require_triplet_L(L);
  const double two_pi = 2.0 * std::numbers::pi;
  // Reduce the phases exactly in integers before going to floating point.
  const auto a = static_cast<double>(mod(m, L)) / L;
  const auto b = static_cast<double>(mod(static_cast<std::int64_t>(m) + n, 2 * static_cast<std::int64_t>(L))) /
                 (2.0 * L);
  return 1.0 + std::polar(1.0, two_pi * a) + std::polar(1.0, two_pi * b);
}

bool is_exceptional(int m, int n, int L) {
  require_triplet_L(L);
  // a = m/L, b = (m+n)/(2L); a = k/3 mod 1 iff 3m = kL mod 3L, b = k/3 mod 1
  // iff 3(m+n) = 2kL mod 6L.
  const std::int64_t LL = L;
  const std::int64_t ra = mod(3 * static_cast<std::int64_t>(m), 3 * LL);
  const std::int64_t rb = mod(3 * (static_cast<std::int64_t>(m) + n), 6 * LL);
  return (ra == LL && rb == 4 * LL) || (ra == 2 * LL && rb == 2 * LL);
}

std::vector<Mode> s1_modes(int L) {
  std::vector<Mode> out;
  for (int p = -L; p <= L; ++p) {
    for (int q = -L; q <= L; ++q) {
      if ((p == 0 && q == 0) || 3 * std::abs(p) > 2 * L || std::abs(q) > L) continue;
      out.push_back({p, q});
    }
  }
  return out;
}

DichotomyReport triplet_dichotomy_check(int L, const CertificateThresholds& thresholds) {
  require_triplet_L(L);
  DichotomyReport r;
  r.L = L;
  r.printed = {{2 * L / 3, 0}, {-2 * L / 3, 0}, {L / 3, L}, {L / 3, -L}, {-L / 3, L}, {-L / 3, -L}};
  r.min_nonzero = std::numeric_limits<double>::infinity();
  for (const Mode& n : s1_modes(L)) {
    ++r.modes;
    const double f = std::abs(triplet_factor(n[0], n[1], L));
    if (is_exceptional(n[0], n[1], L)) {
      r.exceptional.push_back(n);
      r.max_zero = std::max(r.max_zero, f);
    } else {
      r.min_nonzero = std::min(r.min_nonzero, f);
    }
  }
  auto sorted = [](std::vector<Mode> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  r.matches_printed = sorted(r.exceptional) == sorted(r.printed);
  r.passed = r.min_nonzero >= 1.0 / L && r.max_zero <= thresholds.factor_zero;
  return r;
}

BasisCheck orthonormality_check(int L) {
  require_triplet_L(L);
  const int K = 2 * L / 3;
  const auto size = static_cast<std::size_t>(K * L);
  const double scale = std::sqrt(3.0 / (2.0 * L * L));
  // Phase numerators are reduced mod 4L before scaling by i pi / (2L).
  auto entry = [&](int m, int n, int k, int j) {
    const std::int64_t num = 6LL * m * k + 4LL * n * j + static_cast<std::int64_t>(n) * (k % 2 == 0 ? 2 : 0);
    const double angle = std::numbers::pi * static_cast<double>(mod(num, 4LL * L)) / (2.0 * L);
    return std::polar(scale, angle);
  };
  std::vector<std::complex<double>> V(size * size);
  std::size_t row = 0;
  for (int m = 1; m <= K; ++m) {
    for (int n = 1; n <= L; ++n, ++row) {
      std::size_t col = 0;
      for (int k = 1; k <= K; ++k) {
        for (int j = 1; j <= L; ++j, ++col) V[row * size + col] = entry(m, n, k, j);
      }
    }
  }
  BasisCheck r;
  r.L = L;
  r.size = size;
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = a; b < size; ++b) {
      std::complex<double> g = 0.0;
      for (std::size_t c = 0; c < size; ++c) g += std::conj(V[a * size + c]) * V[b * size + c];
      if (a == b) {
        r.max_diag_error = std::max(r.max_diag_error, std::abs(g - 1.0));
      } else {
        r.max_offdiag = std::max(r.max_offdiag, std::abs(g));
      }
    }
  }
  return r;
}

QuadraticFormReport quadratic_form_check(int L) {
  if (L < 3) throw std::invalid_argument("L must be >= 3");
  QuadraticFormReport r;
  r.L = L;
  const std::int64_t LL = L;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  // 9a = 4((L - 3m)^2 + L^2), 3b = 2(L - 3m)(L - 2n), c = (L - 2n)^2 + L^2,
  // so 9(ac - b^2) = (9a) c - (3b)^2.
  for (std::int64_t m = 1; 3 * m <= 2 * LL; ++m) {
    for (std::int64_t n = 1; n <= LL; ++n) {
      const std::int64_t u = LL - 3 * m;
      const std::int64_t v = LL - 2 * n;
      const std::int64_t a9 = 4 * (u * u + LL * LL);
      const std::int64_t b3 = 2 * u * v;
      const std::int64_t c = v * v + LL * LL;
      const std::int64_t det9 = a9 * c - b3 * b3;
      if (det9 < best) {
        best = det9;
        r.argmin = {static_cast<int>(m), static_cast<int>(n)};
      }
    }
  }
  r.min_det = static_cast<double>(best) / 9.0;
  r.threshold = 26.0 * L * L / 9.0;
  r.passed = best >= 26 * LL * LL;
  return r;
}

SeparationReport separation_check(const Configuration& config, int L, double c) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  SeparationReport r;
  r.threshold = c / L;
  r.min_separation = config.size() < 2 ? std::numeric_limits<double>::infinity() : min_separation(config);
  r.passed = r.min_separation >= r.threshold;
  return r;
}

SoundnessReport coefficient_soundness(const FourierKernel& kernel, const Configuration& config, double slack) {
  SoundnessReport r;
  r.gap = energy_gap_spectral(kernel, config).gap;
  const StructureFactor sf = structure_factor_grid(config, kernel.mode_cap());
  r.max_excess = -std::numeric_limits<double>::infinity();
  for (const Mode& n : kernel.modes()) {
    if (n[0] == 0 && n[1] == 0) continue;
    if (kernel.log_coefficient(n) == kNegInf) continue;
    ++r.modes;
    const Cplx<double>& b = sf.at(n);
    const double excess = std::sqrt(b.norm2()) - coefficient_bound(r.gap, kernel, n);
    if (excess > r.max_excess) {
      r.max_excess = excess;
      r.worst = n;
    }
  }
  r.passed = r.modes == 0 || r.max_excess <= slack;
  return r;
}

CertificateBlock certify_orthonormality(int L, const CertificateThresholds& thresholds) {
  const BasisCheck c = orthonormality_check(L);
  CertificateBlock b{"orthonormality", {}, thresholds.orthonormality, false};
  b.values["L"] = L;
  b.values["size"] = c.size;
  b.values["max_offdiag"] = c.max_offdiag;
  b.values["max_diag_error"] = c.max_diag_error;
  b.passed = c.max_offdiag <= thresholds.orthonormality && c.max_diag_error <= thresholds.orthonormality;
  return b;
}

CertificateBlock certify_triplet_factor(int L, const CertificateThresholds& thresholds) {
  const DichotomyReport d = triplet_dichotomy_check(L, thresholds);
  CertificateBlock b{"triplet_factor", {}, 1.0 / L, d.passed};
  b.values["L"] = L;
  b.values["modes"] = d.modes;
  b.values["min_nonzero"] = d.min_nonzero;
  b.values["max_zero"] = d.max_zero;
  b.values["zero_tolerance"] = thresholds.factor_zero;
  auto& ex = b.values["exceptional"] = nlohmann::ordered_json::array();
  for (const Mode& n : d.exceptional) ex.push_back(mode_json(n));
  auto& pr = b.values["printed_exceptional"] = nlohmann::ordered_json::array();
  for (const Mode& n : d.printed) pr.push_back(mode_json(n));
  b.values["matches_printed"] = d.matches_printed;
  return b;
}

CertificateBlock certify_quadratic_form(int L) {
  const QuadraticFormReport q = quadratic_form_check(L);
  CertificateBlock b{"quadratic_form", {}, q.threshold, q.passed};
  b.values["L"] = L;
  b.values["min_det"] = q.min_det;
  b.values["argmin"] = mode_json(q.argmin);
  return b;
}

CertificateBlock certify_separation(const Configuration& config, int L, const CertificateThresholds& thresholds) {
  const SeparationReport s = separation_check(config, L, thresholds.separation_c);
  CertificateBlock b{"separation", {}, s.threshold, s.passed};
  b.values["L"] = L;
  b.values["c"] = thresholds.separation_c;
  b.values["points"] = config.size();
  b.values["min_separation"] = s.min_separation;
  return b;
}

CertificateBlock certify_newton(const Configuration& config, int K, const FourierKernel& kernel,
                                const CertificateThresholds& thresholds) {
  const NewtonReport r = newton_elementary(config, K, &kernel);
  CertificateBlock b{"newton_identities", {}, thresholds.newton_defect, r.max_defect <= thresholds.newton_defect};
  b.values["N"] = r.N;
  b.values["K"] = r.K;
  b.values["C0"] = r.C0;
  b.values["defects"] = r.defects;
  b.values["bound_rhs"] = r.bound_rhs;
  auto& e = b.values["e"] = nlohmann::ordered_json::array();
  for (const auto& z : r.e) e.push_back({z.real(), z.imag()});
  return b;
}

CertificateBlock certify_square_lattice_bound(const FourierKernel& kernel, int K) {
  const double bound = square_lattice_upper_bound(kernel, K);
  const double gap = energy_gap_spectral(kernel, square_lattice(K, kernel.cell())).gap;
  const double tol = 1e-12 * std::max(1.0, std::abs(bound)) + kernel.tail_bound();
  CertificateBlock b{"square_lattice_bound", {}, tol, std::abs(bound - gap) <= tol};
  b.values["K"] = K;
  b.values["bound"] = bound;
  b.values["lattice_gap"] = gap;
  return b;
}

CertificateBlock certify_coefficient_bound(const FourierKernel& kernel, const Configuration& config,
                                           const CertificateThresholds& thresholds) {
  const SoundnessReport s = coefficient_soundness(kernel, config, thresholds.coefficient_slack);
  CertificateBlock b{"coefficient_bound", {}, thresholds.coefficient_slack, s.passed};
  b.values["gap"] = s.gap;
  b.values["modes"] = s.modes;
  b.values["max_excess"] = s.max_excess;
  b.values["worst_mode"] = mode_json(s.worst);
  return b;
}

}  // namespace torus
