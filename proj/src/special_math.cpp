#include "ordrisk/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ordrisk {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

void ToleranceConfig::validate() const {
  if (!(abs_tol > 0.0))
    throw std::invalid_argument("ToleranceConfig: abs_tol must be > 0");
  if (!(rel_tol >= 0.0))
    throw std::invalid_argument("ToleranceConfig: rel_tol must be >= 0");
  if (max_iter < 1)
    throw std::invalid_argument("ToleranceConfig: max_iter must be >= 1");
}

double logistic(double s) {
  // Branch on the sign so exp() only ever sees a non-positive argument.
  if (s >= 0.0) {
    const double e = std::exp(-s);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("logit: argument " + std::to_string(p) +
                                " outside the open interval (0, 1)");
  return std::log(p / (1.0 - p));
}

double log1p_exp(double s) {
  if (s > 0.0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_std_normal_cdf(double x) {
  if (x > -20.0) {
    // erfc stays comfortably above the underflow threshold here.
    return std::log(std_normal_cdf(x));
  }
  // Deep lower tail: asymptotic expansion of the Mills ratio,
  // Phi(x) ~ phi(x)/|x| * sum_k (-1)^k (2k-1)!!/x^(2k). Truncated where the
  // terms are ~1e-12 of the sum at the branch point, so both branches agree
  // there to ~1e-11 absolute in the log.
  const double x2 = x * x;
  const double x4 = x2 * x2;
  const double series = 1.0 - 1.0 / x2 + 3.0 / x4 - 15.0 / (x4 * x2) +
                        105.0 / (x4 * x4) - 945.0 / (x4 * x4 * x2);
  return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double log_std_normal_sf(double x) { return log_std_normal_cdf(-x); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("std_normal_quantile: argument " +
                                std::to_string(p) +
                                " outside the open interval (0, 1)");
  ToleranceConfig cfg;
  cfg.abs_tol = 1e-14;
  cfg.rel_tol = 1e-14;
  cfg.max_iter = 200;
  // Phi is strictly increasing and [-40, 40] covers every representable p.
  return find_root_monotone([p](double x) { return std_normal_cdf(x) - p; },
                            -40.0, 40.0, cfg)
      .x;
}

RootResult find_root_monotone(const std::function<double(double)>& f,
                              double lo, double hi, const ToleranceConfig& cfg) {
  cfg.validate();
  if (!(lo < hi))
    throw std::invalid_argument("find_root_monotone: empty bracket [" +
                                std::to_string(lo) + ", " + std::to_string(hi) +
                                "]");
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (std::abs(fa) <= cfg.abs_tol) return {a, fa, 0, true};
  if (std::abs(fb) <= cfg.abs_tol) return {b, fb, 0, true};
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument(
        "find_root_monotone: no sign change on [" + std::to_string(lo) + ", " +
        std::to_string(hi) + "] (f = " + std::to_string(fa) + ", " +
        std::to_string(fb) + ")");

  double x = a, fx = fa;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    // Secant proposal, safeguarded: fall back to bisection whenever the
    // proposal escapes the bracket or fails to shrink it meaningfully.
    const double mid = 0.5 * (a + b);
    double cand = mid;
    const double denom = fb - fa;
    if (denom != 0.0) {
      const double secant = a - fa * (b - a) / denom;
      const double margin = 0.01 * (b - a);
      if (secant > a + margin && secant < b - margin) cand = secant;
    }
    x = cand;
    fx = f(x);
    if (std::abs(fx) <= cfg.abs_tol) return {x, fx, it, true};
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    if (b - a <= cfg.rel_tol * std::abs(x) + cfg.abs_tol) return {x, fx, it, true};
  }
  throw std::runtime_error(
      "find_root_monotone: max_iter exceeded; best bracket [" +
      std::to_string(a) + ", " + std::to_string(b) + "]");
}

SimplexResult minimize_simplex(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const ToleranceConfig& cfg,
    const std::vector<double>& initial_steps) {
  cfg.validate();
  const std::size_t n = x0.size();
  if (n == 0)
    throw std::invalid_argument("minimize_simplex: empty starting point");
  if (!initial_steps.empty() && initial_steps.size() != n)
    throw std::invalid_argument(
        "minimize_simplex: initial_steps length does not match x0");

  int evals = 0;
  auto eval = [&](const std::vector<double>& v) {
    ++evals;
    return f(v);
  };

  // Vertices: x0 plus one offset per coordinate.
  std::vector<std::vector<double>> verts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = initial_steps.empty()
                            ? 0.05 * std::max(std::abs(x0[i]), 1.0)
                            : initial_steps[i];
    verts[i + 1][i] += (step != 0.0 ? step : 1e-3);
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(verts[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_order = [&] {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    sort_order();
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];

    // Convergence: simplex diameter, with the objective spread as a
    // secondary relative test.
    double diam = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        diam = std::max(diam, std::abs(verts[order[i]][k] - verts[best][k]));
    const double fspread = std::abs(fv[worst] - fv[best]);
    if (diam <= cfg.abs_tol ||
        fspread <= cfg.rel_tol * (std::abs(fv[best]) + cfg.abs_tol)) {
      return {verts[best], fv[best], it, evals, true};
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += verts[i][k];
    }
    for (std::size_t k = 0; k < n; ++k) centroid[k] /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> v(n);
      for (std::size_t k = 0; k < n; ++k)
        v[k] = centroid[k] + coef * (centroid[k] - verts[worst][k]);
      return v;
    };

    const std::vector<double> xr = blend(alpha);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const std::vector<double> xe = blend(gamma);
      const double fe = eval(xe);
      if (fe < fr) {
        verts[worst] = xe;
        fv[worst] = fe;
      } else {
        verts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      verts[worst] = xr;
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      const std::vector<double> xc = blend(outside ? rho : -rho);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fv[worst])) {
        verts[worst] = xc;
        fv[worst] = fc;
      } else {
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k)
            verts[i][k] = verts[best][k] + sigma * (verts[i][k] - verts[best][k]);
          fv[i] = eval(verts[i]);
        }
      }
    }
  }
  sort_order();
  return {verts[order[0]], fv[order[0]], it, evals, false};
}

// ---------------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------------

namespace {
std::uint64_t splitmix64_step(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace

Rng::Rng(std::uint64_t seed) : state_(seed) {
  // Warm the state so trivially related seeds decorrelate immediately.
  splitmix64_step(state_);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t mixed = splitmix64_step(s) ^ (0xA0761D6478BD642FULL * (stream + 1));
  return Rng(mixed);
}

std::uint64_t Rng::next_u64() { return splitmix64_step(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1] uniforms; 1-u keeps log() away from zero.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::uniform_below: n must be > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(indices[i - 1], indices[j]);
  }
}

}  // namespace ordrisk
