#include "torus/minimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>

#include "linalg.hpp"
#include "torus/spectral.hpp"

namespace torus {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Problem {
  const FourierKernel* kernel = nullptr;
  Constraint constraint = Constraint::none;
  std::optional<int> triplet;
  std::size_t N = 0;
  int cap = 0;
  double grad_tol = 0.0;
  MinimizeOptions opt;
  std::array<double, 2> period{1.0, 1.0};
  int dim = 1;
};

template <class Real>
double sup_abs(std::span<const Real> v) {
  double s = 0.0;
  for (const Real& x : v) s = std::max(s, std::abs(to_double(x)));
  return s;
}

template <class Real>
void wrap_free(std::vector<Real>& x, const std::array<Real, 2>& period, int dim) {
  const auto d = static_cast<std::size_t>(dim);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = wrap_coordinate(x[i], period[i % d]);
}

double log10_of(double v) { return v > 0.0 ? std::log10(v) : kNegInf; }

double log10_of(const Extended& v) {
  if (v <= 0) return kNegInf;
  return boost::multiprecision::log10(v).convert_to<double>();
}

struct StartOutcome {
  StartRecord record;
  std::vector<double> coords;
  std::optional<std::vector<Extended>> coords_extended;
  std::vector<TracePoint> trace;
};

struct DescentState {
  std::vector<double> x;
  int iterations = 0;
  double gap = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
};

DescentState descend(const GapModel<double>& model, std::vector<double> x, const Problem& p, int start,
                     std::vector<TracePoint>* trace) {
  const MinimizeOptions& o = p.opt;
  std::vector<double> g(x.size()), trial(x.size());
  DescentState s;
  double f = model.gradient(x, g);
  double gs = sup_abs<double>(g);
  const double min_period = p.dim == 1 ? p.period[0] : std::min(p.period[0], p.period[1]);
  double alpha = 0.0;
  if (trace) trace->push_back({start, 0, 1, f, log10_of(f), gs});
  int it = 0;
  for (; it < o.max_iters; ++it) {
    if (gs <= p.grad_tol) break;
    if (alpha <= 0.0) alpha = o.step_init * min_period / gs;
    double g2 = 0.0;
    for (double v : g) g2 += v * v;
    bool accepted = false;
    double ft = f;
    for (int bt = 0; bt < 80; ++bt) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - alpha * g[i];
      wrap_free(trial, p.period, p.dim);
      ft = model.gap(trial);
      if (ft <= f - o.armijo_c * alpha * g2) {
        accepted = true;
        break;
      }
      alpha *= o.backtrack_factor;
    }
    // No decrease is resolvable in double arithmetic any more.
    if (!accepted) break;
    x.swap(trial);
    f = model.gradient(x, g);
    gs = sup_abs<double>(g);
    alpha *= 2.0;
    if (trace) trace->push_back({start, it + 1, 1, f, log10_of(f), gs});
  }
  s.iterations = it;
  s.gap = f;
  s.grad_norm = gs;
  s.converged = o.max_iters > 0 && gs <= p.grad_tol;
  s.x = std::move(x);
  return s;
}

struct NewtonState {
  std::vector<Extended> x;
  int iterations = 0;
  double grad_norm = 0.0;
  double last_step = std::numeric_limits<double>::infinity();
};

// Saddle-free Newton: the step is built from the eigen-decomposition of the
// Hessian with |lambda| in place of lambda, each component clipped to a trust
// length. Directions below the resolvable spectrum (translations) are left
// untouched. Stops once the step sup-norm drops to `stop_step`, when no
// decrease survives backtracking, or after `max_iters` steps.
NewtonState newton(const GapModel<Extended>& model, std::vector<Extended> x, const Problem& p,
                   unsigned digits, int max_iters, double stop_step, int start, int iter_offset,
                   std::vector<TracePoint>* trace) {
  const MinimizeOptions& o = p.opt;
  const std::size_t n = x.size();
  const std::array<Extended, 2> period{p.kernel->cell().period_as<Extended>(0),
                                       p.dim == 2 ? p.kernel->cell().period_as<Extended>(1) : Extended(1)};
  const double min_period = p.dim == 1 ? p.period[0] : std::min(p.period[0], p.period[1]);
  const Extended trust(0.25 * min_period / std::pow(static_cast<double>(p.N), 1.0 / p.dim));
  const Extended cutoff_scale = boost::multiprecision::pow(Extended(10), -static_cast<int>(digits) + 10);
  std::vector<Extended> g(n), hess, values, vectors, step(n), trial(n);
  NewtonState s;
  int it = 0;
  for (;; ++it) {
    const Extended f = model.hessian(x, g, hess);
    s.grad_norm = sup_abs<Extended>(g);
    if (trace) trace->push_back({start, iter_offset + it, 2, to_double(f), log10_of(f), s.grad_norm});
    if (it >= max_iters) break;
    symmetric_eigen(hess, n, values, vectors);
    Extended lam_max(0);
    for (const auto& v : values) lam_max = std::max(lam_max, Extended(abs(v)));
    const Extended cutoff = lam_max * cutoff_scale;
    std::fill(step.begin(), step.end(), Extended(0));
    for (std::size_t k = 0; k < n; ++k) {
      const Extended lam = abs(values[k]);
      if (lam <= cutoff) continue;
      Extended vg(0);
      for (std::size_t i = 0; i < n; ++i) vg += vectors[k * n + i] * g[i];
      Extended c = -vg / lam;
      if (c > trust) c = trust;
      if (c < -trust) c = -trust;
      for (std::size_t i = 0; i < n; ++i) step[i] += c * vectors[k * n + i];
    }
    s.last_step = sup_abs<Extended>(step);
    if (s.last_step <= stop_step) break;
    Extended slope(0);
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * step[i];
    Extended beta(1);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + beta * step[i];
      wrap_free(trial, period, p.dim);
      if (model.gap(trial) <= f + o.armijo_c * beta * slope) {
        accepted = true;
        break;
      }
      beta *= o.backtrack_factor;
    }
    if (!accepted) break;
    x.swap(trial);
  }
  s.iterations = it;
  s.x = std::move(x);
  return s;
}

void validate(const MinimizeOptions& o) {
  if (o.starts < 1) throw std::invalid_argument("starts must be >= 1");
  if (o.max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (o.newton_iters < 0) throw std::invalid_argument("newton_iters must be >= 0");
  if (!(o.grad_tol >= 0.0)) throw std::invalid_argument("grad_tol must be positive (0 selects the default)");
  if (!(o.step_init > 0.0)) throw std::invalid_argument("step_init must be positive");
  if (!(o.backtrack_factor > 0.0 && o.backtrack_factor < 1.0)) {
    throw std::invalid_argument("backtrack_factor must lie in (0, 1)");
  }
  if (!(o.armijo_c > 0.0 && o.armijo_c < 1.0)) throw std::invalid_argument("armijo_c must lie in (0, 1)");
  if (!(o.step_tol > 0.0)) throw std::invalid_argument("step_tol must be positive");
  if (o.threads < 0) throw std::invalid_argument("threads must be >= 0");
}

}  // namespace

std::string to_string(Polish polish) {
  switch (polish) {
    case Polish::automatic: return "auto";
    case Polish::on: return "on";
    case Polish::off: return "off";
  }
  return "auto";
}

Polish polish_from_string(const std::string& name) {
  if (name == "auto") return Polish::automatic;
  if (name == "on") return Polish::on;
  if (name == "off") return Polish::off;
  throw std::invalid_argument("polish must be auto, on or off");
}

std::vector<Mode> structural_modes(int dim, int size, Constraint constraint) {
  std::vector<Mode> out;
  if (dim == 1) {
    for (int n = 1; n <= size / 2; ++n) out.push_back({n, 0});
    return out;
  }
  if (constraint == Constraint::triplet) {
    const int L = size;
    for (int p = -(2 * L) / 3; p <= (2 * L) / 3; ++p) {
      for (int q = -L; q <= L; ++q) {
        if ((p != 0 || q != 0) && 3 * std::abs(p) <= 2 * L) out.push_back({p, q});
      }
    }
    return out;
  }
  const int r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(size))));
  for (int p = -r; p <= r; ++p) {
    for (int q = -r; q <= r; ++q) {
      if (p != 0 || q != 0) out.push_back({p, q});
    }
  }
  return out;
}

std::vector<Mode> first_shell_modes(int dim, int size, Constraint constraint) {
  if (dim == 1) return {{size, 0}};
  if (constraint == Constraint::triplet) return {{size, size}, {2 * size, 0}, {0, 2 * size}};
  return {};
}

namespace {

struct SpectrumSummary {
  double top = kNegInf;       // largest structural log-coefficient
  double bottom = kNegInf;    // smallest structural log-coefficient
  double shell = kNegInf;     // largest log-coefficient on the first dual shell
  bool has_structure = false;
  double decades() const { return has_structure ? (top - bottom) / std::log(10.0) : 0.0; }
};

SpectrumSummary summarize(const FourierKernel& kernel, int size, Constraint constraint) {
  SpectrumSummary s;
  double lo = std::numeric_limits<double>::infinity();
  for (const Mode& n : structural_modes(kernel.dim(), size, constraint)) {
    if (!kernel.in_box(n) || kernel.log_coefficient(n) == kNegInf) {
      throw std::invalid_argument("kernel has non-positive Fourier coefficients on the structural modes");
    }
    s.top = std::max(s.top, kernel.log_coefficient(n));
    lo = std::min(lo, kernel.log_coefficient(n));
    s.has_structure = true;
  }
  s.bottom = s.has_structure ? lo : kNegInf;
  for (const Mode& n : first_shell_modes(kernel.dim(), size, constraint)) {
    s.shell = std::max(s.shell, kernel.log_coefficient(n));
  }
  return s;
}

}  // namespace

unsigned newton_digits(const FourierKernel& kernel, int size, Constraint constraint) {
  const SpectrumSummary s = summarize(kernel, size, constraint);
  if (!s.has_structure) return 40;
  auto digits = static_cast<unsigned>(std::ceil(s.decades())) + 40;
  if (s.shell > kNegInf && s.shell < s.top) {
    // The gap of a converged configuration is of order exp(shell); resolving
    // it needs |b_n| accurate to sqrt(exp(shell - top)).
    const double half_span = 0.5 * (s.top - s.shell) / std::log(10.0);
    digits = std::max(digits, static_cast<unsigned>(std::ceil(half_span)) + 20);
  }
  return digits;
}

double log10_gap_extended(const FourierKernel& kernel, const ExtendedConfiguration& config, int mode_cap) {
  return log10_of(gap_spectral(kernel, config, mode_cap));
}

MinimizationResult minimize(const FourierKernel& kernel, int size, Constraint constraint,
                            const MinimizeOptions& options) {
  validate(options);
  if (size < 1) throw std::invalid_argument("N must be >= 1");
  Problem p;
  p.kernel = &kernel;
  p.constraint = constraint;
  p.opt = options;
  p.dim = kernel.dim();
  p.period = {kernel.cell().period(0), p.dim == 2 ? kernel.cell().period(1) : 1.0};
  if (constraint == Constraint::triplet) {
    if (kernel.dim() != 2 || kernel.cell() != Cell::triangular()) {
      throw std::invalid_argument("triplet constraint requires a kernel on the (sqrt(3), 1) cell");
    }
    if (size < 3 || size % 3 != 0) throw std::invalid_argument("L must be divisible by 3");
    p.triplet = size;
    p.N = static_cast<std::size_t>(2 * size * size);
  } else {
    p.N = static_cast<std::size_t>(size);
  }
  p.cap = options.mode_cap == 0 ? kernel.mode_cap() : options.mode_cap;
  if (p.cap < 1 || p.cap > kernel.mode_cap()) throw std::invalid_argument("mode_cap exceeds kernel storage");
  p.grad_tol = options.grad_tol > 0.0 ? options.grad_tol : 1e-10 * static_cast<double>(p.N);

  const SpectrumSummary spectrum = summarize(kernel, size, constraint);
  const double decades = spectrum.decades();
  bool polish = options.polish == Polish::on ||
                (options.polish == Polish::automatic && spectrum.has_structure && decades > 6.0);
  if (options.max_iters == 0) polish = false;
  const unsigned digits =
      options.precision_digits > 0 ? options.precision_digits : newton_digits(kernel, size, constraint);

  // Tempering ladder: gradient descent sees a spectrum compressed to about six
  // decades; the Newton stages then widen it by at most ten decades at a time
  // until the true coefficients are reached.
  std::vector<double> ladder{1.0};
  if (polish && decades > 6.0) {
    ladder.clear();
    const double step = 10.0 / decades;
    for (double s = 6.0 / decades; s < 1.0; s += step) ladder.push_back(s);
    ladder.push_back(1.0);
  }

  GapModel<double>::Options dopt;
  dopt.mode_cap = p.cap;
  dopt.triplet = p.triplet;
  const GapModel<double> model(kernel, dopt);
  dopt.temper = ladder.front();
  const GapModel<double> descent_model(kernel, dopt);

  // Working digits per stage grow with the temper: a stage with exponent s
  // only has to resolve s times the coefficient range.
  auto stage_digits = [&](double s) {
    return s >= 1.0 ? digits : 40u + static_cast<unsigned>(std::ceil(s * (digits - 40.0)));
  };
  // Stage resolution: the flattest directions carry about s * decades fewer
  // significant digits than the working precision. Every stage has to reach
  // it; leftover error in flat directions couples quadratically into the
  // stiff ones and stalls the next stage.
  auto stage_step = [&](double s, unsigned sd) {
    return std::pow(10.0, -std::max(13.0, static_cast<double>(sd) - s * decades - 10.0));
  };

  const auto starts = static_cast<std::size_t>(options.starts);
  unsigned workers = options.threads > 0 ? static_cast<unsigned>(options.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(starts));
  auto for_each_start = [&](const std::function<void(std::size_t)>& body) {
    if (workers <= 1) {
      for (std::size_t i = 0; i < starts; ++i) body(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < starts; i = next++) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  };

  std::vector<StartOutcome> outcomes(starts);
  std::vector<int> offsets(starts, 0);
  for_each_start([&](std::size_t i) {
    StartOutcome& out = outcomes[i];
    out.record.seed = options.seed + i;
    const Configuration start = random_configuration(p.N, kernel.cell(), out.record.seed, p.triplet);
    std::vector<TracePoint>* trace = options.record_trace ? &out.trace : nullptr;
    DescentState d = descend(descent_model, start.generators(), p, static_cast<int>(i), trace);
    out.record.iterations = d.iterations;
    out.record.grad_norm = d.grad_norm;
    out.record.converged = d.converged;
    out.coords = std::move(d.x);
    offsets[i] = d.iterations;
  });

  if (polish) {
    // Stage-major order: the working precision is process-wide, so every start
    // finishes a stage before the precision changes.
    std::vector<std::vector<Extended>> xs(starts);
    std::vector<double> last_step(starts, 0.0);
    const double top = kernel.max_nonzero_log_coefficient();
    for (std::size_t stage = 0; stage < ladder.size(); ++stage) {
      const double s = ladder[stage];
      const unsigned sd = stage_digits(s);
      ExtendedPrecision guard(sd);
      GapModel<Extended>::Options eopt;
      eopt.mode_cap = p.cap;
      eopt.triplet = p.triplet;
      eopt.temper = s;
      // Modes below the final stage's floor never reach the true objective, so
      // no tempered stage needs them either.
      eopt.min_log_coefficient =
          std::max(top - (sd + 5.0) * std::log(10.0) / s, top - (digits + 5.0) * std::log(10.0));
      const GapModel<Extended> model_s(kernel, eopt);
      for_each_start([&](std::size_t i) {
        std::vector<Extended> x(outcomes[i].coords.size());
        if (stage == 0) {
          for (std::size_t k = 0; k < x.size(); ++k) x[k] = Extended(outcomes[i].coords[k]);
        } else {
          // Copy assignment keeps the target's (current) precision; copy
          // construction or moves would keep the previous stage's.
          for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::as_const(xs[i][k]);
        }
        std::vector<TracePoint>* trace = options.record_trace ? &outcomes[i].trace : nullptr;
        NewtonState ns = newton(model_s, std::move(x), p, sd, options.newton_iters,
                                stage_step(s, sd), static_cast<int>(i), offsets[i], trace);
        outcomes[i].record.newton_iterations += ns.iterations;
        offsets[i] += ns.iterations + 1;
        last_step[i] = ns.last_step;
        xs[i] = std::move(ns.x);
      });
    }
    ExtendedPrecision guard(digits);
    GapModel<Extended>::Options eopt;
    eopt.mode_cap = p.cap;
    eopt.triplet = p.triplet;
    const GapModel<Extended> full(kernel, eopt);
    for_each_start([&](std::size_t i) {
      StartOutcome& out = outcomes[i];
      std::vector<Extended>& x = xs[i];
      std::vector<Extended> g(x.size());
      const Extended gap = full.gradient(x, g);
      out.record.grad_norm = sup_abs<Extended>(g);
      out.record.converged = out.record.grad_norm <= p.grad_tol && last_step[i] <= options.step_tol;
      out.record.log10_gap = log10_of(gap);
      for (std::size_t k = 0; k < x.size(); ++k) out.coords[k] = to_double(x[k]);
      out.coords_extended = std::move(x);
    });
  }
  for (std::size_t i = 0; i < starts; ++i) {
    StartOutcome& out = outcomes[i];
    // Re-evaluate in double on the rounded coordinates so best_gap is reproducible.
    wrap_free(out.coords, p.period, p.dim);
    out.record.gap = model.gap(out.coords);
    if (!polish) out.record.log10_gap = log10_of(out.record.gap);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < starts; ++i) {
    const auto& a = outcomes[i].record;
    const auto& b = outcomes[best].record;
    // log10 can round two distinct gaps together; the double gap breaks the tie.
    if (std::tie(a.log10_gap, a.gap, a.seed) < std::tie(b.log10_gap, b.gap, b.seed)) best = i;
  }

  MinimizationResult r{
      p.triplet ? expand_triplet<double>(outcomes[best].coords, *p.triplet)
                : Configuration(kernel.cell(), outcomes[best].coords),
      std::nullopt, 0.0, 0.0, best, {}, {}, std::nullopt, p.grad_tol, polish, polish ? digits : 0u};
  if (outcomes[best].coords_extended) {
    const ExtendedPrecision guard(digits);
    const auto& xe = *outcomes[best].coords_extended;
    r.best_extended = p.triplet ? expand_triplet<Extended>(xe, *p.triplet)
                                : ExtendedConfiguration(kernel.cell(), xe);
  }
  r.best_gap = outcomes[best].record.gap;
  r.best_log10_gap = outcomes[best].record.log10_gap;
  for (auto& o : outcomes) {
    r.per_start.push_back(o.record);
    r.trace.insert(r.trace.end(), o.trace.begin(), o.trace.end());
  }
  return r;
}

}  // namespace torus
