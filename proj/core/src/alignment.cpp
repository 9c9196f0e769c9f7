#include "torus/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "torus/assignment.hpp"

namespace torus {
namespace {

using Vec2 = std::array<double, 2>;

double wrap_centered(double x, double l) {
  double r = std::fmod(x, l);
  if (r >= 0.5 * l) r -= l;
  if (r < -0.5 * l) r += l;
  return r;
}

struct Circle {
  Vec2 c{0.0, 0.0};
  double r = 0.0;
  bool contains(const Vec2& p) const {
    return std::hypot(p[0] - c[0], p[1] - c[1]) <= r * (1.0 + 1e-12) + 1e-300;
  }
};

Circle from_two(const Vec2& a, const Vec2& b) {
  const Vec2 c{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
  return {c, 0.5 * std::hypot(a[0] - b[0], a[1] - b[1])};
}

Circle from_three(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double bx = b[0] - a[0], by = b[1] - a[1];
  const double cx = c[0] - a[0], cy = c[1] - a[1];
  const double d = 2.0 * (bx * cy - by * cx);
  if (std::abs(d) < 1e-300) {
    // Collinear: the widest pair spans the circle.
    Circle best = from_two(a, b);
    for (const Circle& o : {from_two(a, c), from_two(b, c)}) {
      if (o.r > best.r) best = o;
    }
    return best;
  }
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const Vec2 u{(cy * b2 - by * c2) / d, (bx * c2 - cx * b2) / d};
  return {{a[0] + u[0], a[1] + u[1]}, std::hypot(u[0], u[1])};
}

// Welzl's algorithm in its iterative form, on a fixed pseudo-random order.
Circle enclosing_circle(std::vector<Vec2> pts) {
  std::mt19937_64 rng(0x5eed);
  std::shuffle(pts.begin(), pts.end(), rng);
  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (c.contains(pts[i])) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (c.contains(pts[j])) continue;
      c = from_two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!c.contains(pts[k])) c = from_three(pts[i], pts[j], pts[k]);
      }
    }
  }
  return c;
}

std::pair<Configuration, DefectReport> align_1d(const Configuration& config,
                                                const Configuration& reference) {
  const std::size_t n = config.size();
  const double l = config.cell().period(0);
  auto sorted_order = [](const Configuration& c) {
    std::vector<std::size_t> idx(c.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return c.coord(a, 0) < c.coord(b, 0); });
    return idx;
  };
  const auto xs = sorted_order(config);
  const auto ts = sorted_order(reference);

  double best_sup = std::numeric_limits<double>::infinity();
  double best_shift = 0.0;
  std::size_t best_rot = 0;
  std::vector<double> d(n);
  for (std::size_t rot = 0; rot < n; ++rot) {
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = wrap_coordinate(reference.coord(ts[(i + rot) % n], 0) - config.coord(xs[i], 0), l);
    }
    std::sort(d.begin(), d.end());
    // Largest empty gap on the circle; the shortest covering arc is its complement.
    double gap = d[0] + l - d[n - 1];
    double start = d[0];
    for (std::size_t i = 1; i < n; ++i) {
      if (d[i] - d[i - 1] > gap) {
        gap = d[i] - d[i - 1];
        start = d[i];
      }
    }
    const double half = 0.5 * (l - gap);
    if (half < best_sup) {
      best_sup = half;
      best_shift = wrap_centered(start + half, l);
      best_rot = rot;
    }
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[xs[i]] = ts[(i + best_rot) % n];
  DefectReport report = defect_from(config, reference, {best_shift, 0.0}, std::move(perm));
  report.method = "rotation";
  const double s[1] = {best_shift};
  return {translate(config, s), std::move(report)};
}

std::pair<Configuration, DefectReport> align_2d(const Configuration& config,
                                                const Configuration& reference) {
  const std::size_t n = config.size();
  const Cell& cell = config.cell();
  const auto d = static_cast<std::size_t>(config.dim());
  const auto xc = config.coords();
  const auto tc = reference.coords();
  auto image = [&](std::size_t k, std::size_t j, const Vec2& s) {
    return Vec2{wrap_centered(xc[k * d] + s[0] - tc[j * d], cell.period(0)),
                wrap_centered(xc[k * d + 1] + s[1] - tc[j * d + 1], cell.period(1))};
  };

  std::vector<Vec2> candidates;
  for (std::size_t j = 0; j < n; ++j) candidates.push_back({tc[j * d] - xc[0], tc[j * d + 1] - xc[1]});
  constexpr std::size_t kFullScan = 64;
  constexpr std::size_t kScreened = 8;
  if (n > kFullScan) {
    // Keep the shifts with the smallest nearest-neighbour residual.
    std::vector<std::pair<double, std::size_t>> score;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      double total = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
          const Vec2 e = image(k, j, candidates[c]);
          nearest = std::min(nearest, e[0] * e[0] + e[1] * e[1]);
        }
        total += nearest;
      }
      score.emplace_back(total, c);
    }
    std::stable_sort(score.begin(), score.end());
    std::vector<Vec2> kept;
    for (std::size_t i = 0; i < kScreened; ++i) kept.push_back(candidates[score[i].second]);
    candidates = std::move(kept);
  }

  std::optional<DefectReport> best;
  std::vector<double> cost(n * n);
  for (Vec2 s : candidates) {
    std::vector<std::size_t> perm;
    std::string method;
    for (int round = 0; round < 20; ++round) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
          const Vec2 e = image(k, j, s);
          cost[k * n + j] = e[0] * e[0] + e[1] * e[1];
        }
      }
      Assignment a = match(cost, n);
      std::vector<Vec2> residual(n);
      for (std::size_t k = 0; k < n; ++k) residual[k] = image(k, a.column[k], s);
      const Circle circle = enclosing_circle(residual);
      s = {s[0] - circle.c[0], s[1] - circle.c[1]};
      const bool stable = a.column == perm;
      perm = std::move(a.column);
      method = a.method;
      if (stable && std::hypot(circle.c[0], circle.c[1]) <= 1e-15) break;
    }
    s = {wrap_centered(s[0], cell.period(0)), wrap_centered(s[1], cell.period(1))};
    DefectReport r = defect_from(config, reference, s, std::move(perm));
    r.method = method;
    if (!best || r.sup_norm < best->sup_norm) best = std::move(r);
  }
  const std::array<double, 2> shift = best->shift;
  return {translate(config, shift), std::move(*best)};
}

}  // namespace

DefectReport defect_from(const Configuration& config, const Configuration& reference,
                         const std::array<double, 2>& shift, std::vector<std::size_t> permutation) {
  const std::size_t n = config.size();
  const int dim = config.dim();
  const auto d = static_cast<std::size_t>(dim);
  if (permutation.size() != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<bool> seen(n, false);
  for (std::size_t j : permutation) {
    if (j >= n || seen[j]) throw std::invalid_argument("permutation is not a bijection");
    seen[j] = true;
  }
  DefectReport r;
  r.dim = dim;
  r.shift = shift;
  r.delta.resize(n * d);
  std::array<double, 2> mean{0.0, 0.0};
  double sumsq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double l = config.cell().period(static_cast<int>(i));
      const double e = wrap_centered(config.coord(k, static_cast<int>(i)) + shift[i] -
                                         reference.coord(permutation[k], static_cast<int>(i)),
                                     l);
      r.delta[k * d + i] = e;
      mean[i] += e / static_cast<double>(n);
      norm2 += e * e;
    }
    r.sup_norm = std::max(r.sup_norm, std::sqrt(norm2));
    sumsq += norm2;
  }
  r.l2_norm = std::sqrt(sumsq);
  for (std::size_t k = 0; k < n; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double e = r.delta[k * d + i] - mean[i];
      norm2 += e * e;
    }
    r.mean_gauge_sup = std::max(r.mean_gauge_sup, std::sqrt(norm2));
  }
  r.permutation = std::move(permutation);
  return r;
}

std::pair<Configuration, DefectReport> canonicalize_translation(const Configuration& config,
                                                                const Configuration& reference) {
  if (config.size() != reference.size()) throw std::invalid_argument("configuration sizes differ");
  if (config.cell() != reference.cell()) throw std::invalid_argument("configuration cells differ");
  return config.dim() == 1 ? align_1d(config, reference) : align_2d(config, reference);
}

}  // namespace torus
