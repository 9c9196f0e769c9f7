#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "torus/configuration.hpp"
#include "torus/kernel.hpp"

namespace torus {

/// Pass/fail thresholds shared by every certificate.
struct CertificateThresholds {
  double orthonormality = 1e-12;
  double newton_defect = 1e-10;
  /// Additive slack in |b_n| <= sqrt(gap / a_n).
  double coefficient_slack = 1e-12;
  /// |factor| below this counts as a zero of the triplet factor.
  double factor_zero = 1e-12;
  /// Separation constant c in min_separation >= c / L.
  double separation_c = 0.20710678118654752;  // (sqrt(2) - 1) / 2
};

/// One certificate: the numbers it rests on, the threshold it is held to and
/// the verdict.
struct CertificateBlock {
  std::string name;
  nlohmann::ordered_json values;
  double threshold = 0.0;
  bool passed = false;
};

nlohmann::ordered_json to_json(const CertificateBlock& block);

/// sum_{n != 0} a_{Kn} over the stored box plus the kernel's tail bound: the
/// gap of the K^d square lattice. Throws std::invalid_argument for K < 1 and
/// when K exceeds the mode box.
double square_lattice_upper_bound(const FourierKernel& kernel, int K);

/// sqrt(gap / a_mode). Throws std::invalid_argument for a negative gap and
/// std::domain_error("zero coefficient") when a_mode vanishes.
double coefficient_bound(double gap, const FourierKernel& kernel, const Mode& mode);

/// e_0..e_K from power sums p_1..p_K through k e_k = sum_{m=1}^k (-1)^{m-1} e_{k-m} p_m.
std::vector<std::complex<double>> elementary_from_power_sums(std::span<const std::complex<double>> power_sums);

struct NewtonReport {
  int N = 0;
  int K = 0;
  /// b_1..b_K.
  std::vector<std::complex<double>> b;
  /// e_1..e_K.
  std::vector<std::complex<double>> e;
  /// |e_k - (-1)^{k-1} (N/k) b_k|.
  std::vector<double> defects;
  /// 2 C0 N^2 eps_N / (k^2 a_k); empty without a kernel.
  std::vector<double> bound_rhs;
  double C0 = 0.0;
  double max_defect = 0.0;
};

/// Elementary symmetric values of z_k = e(x_k / l) from the power sums N b_m.
/// With a kernel the right-hand side of the near-lattice bound is added, C0
/// and eps_N coming from check_decay_1d. Throws std::invalid_argument for a
/// 2D configuration and unless 1 <= K <= N/2.
NewtonReport newton_elementary(const Configuration& config, int K, const FourierKernel* kernel = nullptr);

/// 1 + e(m/L) + e((m+n)/(2L)). Throws unless L >= 3 and 3 | L.
std::complex<double> triplet_factor(int m, int n, int L);

/// S_1 = {(p, q) != 0 : max(3|p|/2, |q|) <= L}, lexicographic.
std::vector<Mode> s1_modes(int L);

/// Exact zero test of the triplet factor: 1 + e(a) + e(b) = 0 iff
/// {a, b} = {1/3, 2/3} mod 1.
bool is_exceptional(int m, int n, int L);

struct DichotomyReport {
  int L = 0;
  std::size_t modes = 0;
  /// Zeros found in S_1, in scan order.
  std::vector<Mode> exceptional;
  /// The set (+-2L/3, 0), (+-L/3, +-L).
  std::vector<Mode> printed;
  bool matches_printed = false;
  /// Smallest |factor| over the non-exceptional modes, and the largest over the
  /// exceptional ones.
  double min_nonzero = 0.0;
  double max_zero = 0.0;
  bool passed = false;
};

/// Exhaustive scan of S_1: every factor is either zero or at least 1/L.
DichotomyReport triplet_dichotomy_check(int L, const CertificateThresholds& thresholds = {});

struct BasisCheck {
  int L = 0;
  std::size_t size = 0;  ///< 2L^2/3
  double max_offdiag = 0.0;
  double max_diag_error = 0.0;
};

/// Gram matrix of the vectors
///   [V_mn]_{(k-1)L+j} = sqrt(3/(2L^2)) exp(i pi (6mk + 4nj + n[1+(-1)^k]) / (2L))
/// over (m, n), (k, j) in [1, 2L/3] x [1, L]. Throws unless 3 | L.
BasisCheck orthonormality_check(int L);

struct QuadraticFormReport {
  int L = 0;
  /// min over [1, 2L/3] x [1, L] of ac - b^2, with its argmin.
  double min_det = 0.0;
  Mode argmin{0, 0};
  double threshold = 0.0;  ///< 26 L^2 / 9
  bool passed = false;
};

/// a = 4(L/3 - m)^2 + 4L^2/9, b = 4(L/3 - m)(L/2 - n), c = 4(L/2 - n)^2 + L^2,
/// evaluated exactly in integers scaled by 9. Throws for L < 3.
QuadraticFormReport quadratic_form_check(int L);

struct SeparationReport {
  double min_separation = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// min_separation(config) >= c / L. A single point passes with separation +inf.
SeparationReport separation_check(const Configuration& config, int L,
                                  double c = CertificateThresholds{}.separation_c);

struct SoundnessReport {
  double gap = 0.0;
  std::size_t modes = 0;
  /// max over stored modes of |b_n| - sqrt(gap / a_n) (modes with a_n = 0 skipped).
  double max_excess = 0.0;
  Mode worst{0, 0};
  bool passed = false;
};

/// |b_n| <= sqrt(gap / a_n) + slack at every stored mode with a_n > 0, the gap
/// taken from energy_gap_spectral at the full box.
SoundnessReport coefficient_soundness(const FourierKernel& kernel, const Configuration& config,
                                      double slack = CertificateThresholds{}.coefficient_slack);

// JSON blocks.
CertificateBlock certify_orthonormality(int L, const CertificateThresholds& thresholds = {});
CertificateBlock certify_triplet_factor(int L, const CertificateThresholds& thresholds = {});
CertificateBlock certify_quadratic_form(int L);
CertificateBlock certify_separation(const Configuration& config, int L,
                                    const CertificateThresholds& thresholds = {});
CertificateBlock certify_newton(const Configuration& config, int K, const FourierKernel& kernel,
                                const CertificateThresholds& thresholds = {});
CertificateBlock certify_square_lattice_bound(const FourierKernel& kernel, int K);
CertificateBlock certify_coefficient_bound(const FourierKernel& kernel, const Configuration& config,
                                           const CertificateThresholds& thresholds = {});

}  // namespace torus
