#include "ordrisk/risk_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ordrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Standardized two-class model: class 0 ~ N(0,1), class 1 ~ N(d,1), prior p.
// All interval computations are done in this scale; callers map back through
// x = mu0 + sigma * z.
struct ZModel {
  double d;
  double p;
};

ZModel standardize(const ProjectedGaussian& g) {
  return ZModel{(g.mu1_beta - g.mu0_beta) / g.sigma_beta, g.p};
}

// log P(za < Z <= zb) for standard normal Z; endpoints may be infinite.
// The better-conditioned side (CDF vs survival) is chosen so tail intervals
// do not cancel.
double log_interval_mass_std(double za, double zb) {
  if (!(za < zb)) return -kInf;
  if (std::isinf(za)) {
    return std::isinf(zb) ? 0.0 : log_std_normal_cdf(zb);
  }
  if (std::isinf(zb)) return log_std_normal_sf(za);
  if (za + zb > 0.0) {
    const double la = log_std_normal_sf(za);
    const double lb = log_std_normal_sf(zb);
    return la + std::log1p(-std::exp(lb - la));
  }
  const double la = log_std_normal_cdf(za);
  const double lb = log_std_normal_cdf(zb);
  return lb + std::log1p(-std::exp(la - lb));
}

double log_lr_z(const ZModel& m, double z) {
  return m.d * (2.0 * z - m.d) / 2.0;
}

// log interval odds log(nu) over (za, zb]. Narrow intervals switch to a
// midpoint expansion nu = LR(mid) * (1 + w^2 d (d - 2 mid) / 24 + O(w^4)),
// which is exact in the zero-width limit; this keeps the evaluation
// continuous (and accurate to ~1e-12) across interval collapse, where the
// direct mass ratio loses all precision.
double log_interval_odds_z(const ZModel& m, double za, double zb) {
  if (std::isfinite(za) && std::isfinite(zb)) {
    const double w = zb - za;
    const double mid = 0.5 * (za + zb);
    const double corr = 1.0 + w * w * m.d * (m.d - 2.0 * mid) / 24.0;
    if (w < 1e-4 && corr > 0.5) return log_lr_z(m, mid) + std::log(corr);
  }
  const double l1 = log_interval_mass_std(za - m.d, zb - m.d);
  const double l0 = log_interval_mass_std(za, zb);
  const double v = l1 - l0;
  if (std::isnan(v)) {
    // Both masses underflowed even in log scale (|z| beyond ~1e154); the
    // ratio limit is the likelihood ratio at the midpoint.
    const double mid = std::isinf(za) ? zb : (std::isinf(zb) ? za : 0.5 * (za + zb));
    return log_lr_z(m, mid);
  }
  return v;
}

double risk_from_log_odds(double p, double log_nu) {
  return logistic(logit(p) + log_nu);
}

double interval_risk_z(const ZModel& m, double za, double zb) {
  return risk_from_log_odds(m.p, log_interval_odds_z(m, za, zb));
}

double posterior_z(const ZModel& m, double z) {
  return risk_from_log_odds(m.p, log_lr_z(m, z));
}

double right_ray_risk_z(const ZModel& m, double z) {
  return interval_risk_z(m, z, kInf);
}

// z breakpoints -> score-scale Breakpoints, restoring strict monotonicity
// with a minimal gap when the solver drove intervals to collapse.
Breakpoints z_to_breakpoints(const ProjectedGaussian& g, std::vector<double> z) {
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double floor_gap = 1e-12 * std::max(1.0, std::fabs(z[i - 1]));
    z[i] = std::max(z[i], z[i - 1] + floor_gap);
  }
  Breakpoints b;
  b.tau.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    b.tau[i] = g.mu0_beta + g.sigma_beta * z[i];
  }
  for (std::size_t i = 1; i < b.tau.size(); ++i) {
    if (!(b.tau[i] > b.tau[i - 1])) {
      b.tau[i] = std::nextafter(b.tau[i - 1], kInf);
    }
  }
  b.validate();
  return b;
}

std::vector<double> z_cuts(const ProjectedGaussian& g, const Breakpoints& tau) {
  std::vector<double> z(tau.tau.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = (tau.tau[i] - g.mu0_beta) / g.sigma_beta;
  }
  return z;
}

double deviation_norm(const std::vector<double>& R, const std::vector<double>& r,
                      IrdNorm norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const double delta = R[i] - r[i];
    if (norm == IrdNorm::max_abs) {
      acc = std::max(acc, std::fabs(delta));
    } else {
      acc += delta * delta;
    }
  }
  if (norm == IrdNorm::euclidean) return std::sqrt(acc);
  return acc;
}

// Matches one group's risk target by a monotone root find over the right
// endpoint; prev may be -inf (first group). Requires the target to lie
// strictly inside the attainable range.
double match_one_group(const ZModel& m, double prev, double target,
                       const ToleranceConfig& cfg) {
  const auto f = [&](double t) { return interval_risk_z(m, prev, t) - target; };
  double lo, hi;
  if (std::isinf(prev)) {
    lo = std::min(0.0, m.d) - 2.0;
    double step = 2.0;
    int guard = 0;
    while (f(lo) >= 0.0 && guard++ < 200) {
      lo -= step;
      step *= 2.0;
    }
    hi = std::max(0.0, m.d) + 2.0;
  } else {
    lo = prev;  // zero-width limit, below target by precondition
    hi = std::max(prev, std::max(0.0, m.d)) + 2.0;
  }
  double step = 2.0;
  int guard = 0;
  while (f(hi) <= 0.0 && guard++ < 200) {
    hi += step;
    step *= 2.0;
  }
  ToleranceConfig root_cfg = cfg;
  root_cfg.abs_tol = std::min(cfg.abs_tol, 1e-13);
  root_cfg.rel_tol = std::min(cfg.rel_tol, 1e-13);
  root_cfg.max_iter = std::max(cfg.max_iter, 150);
  return find_root_monotone(f, lo, hi, root_cfg).x;
}

void check_masses(const std::vector<double>& masses, const char* op) {
  if (masses.empty()) {
    throw std::invalid_argument(std::string(op) + ": masses must be nonempty");
  }
  double s = 0.0;
  for (double mass : masses) {
    if (!(mass >= 0.0)) {
      throw std::invalid_argument(std::string(op) +
                                  ": masses must be nonnegative and finite");
    }
    s += mass;
  }
  if (std::fabs(s - 1.0) > 1e-9) {
    std::ostringstream os;
    os << op << ": masses must sum to 1 (got " << s << ")";
    throw std::invalid_argument(os.str());
  }
}

std::vector<double> cumulative_ray_values(const std::vector<double>& values,
                                          const std::vector<double>& masses,
                                          const char* op) {
  check_masses(masses, op);
  if (values.size() != masses.size()) {
    throw std::invalid_argument(std::string(op) +
                                ": values and masses must have equal length");
  }
  std::vector<double> q(values.size());
  double cum_mass = 0.0;
  double cum_weighted = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument(std::string(op) + ": values must be finite");
    }
    cum_mass += masses[i];
    cum_weighted += values[i] * masses[i];
    if (!(cum_mass > 0.0)) {
      std::ostringstream os;
      os << op << ": cumulative mass through interval " << (i + 1)
         << " is zero; the left-ray value is undefined";
      throw std::invalid_argument(os.str());
    }
    q[i] = cum_weighted / cum_mass;
  }
  return q;
}

}  // namespace

std::vector<double> interval_odds(const ProjectedGaussian& g,
                                  const Breakpoints& tau) {
  g.validate();
  tau.validate();
  const ZModel m = standardize(g);
  const std::vector<double> z = z_cuts(g, tau);
  const std::size_t T = z.size() + 1;
  std::vector<double> nu(T);
  for (std::size_t i = 0; i < T; ++i) {
    const double za = (i == 0) ? -kInf : z[i - 1];
    const double zb = (i + 1 == T) ? kInf : z[i];
    const double l0 = log_interval_mass_std(za, zb);
    if (!(l0 > std::log(1e-300))) {
      std::ostringstream os;
      os << "interval_odds: class-0 mass vanishes in interval " << (i + 1)
         << " = (" << (i == 0 ? -kInf : tau.tau[i - 1]) << ", "
         << (i + 1 == T ? kInf : tau.tau[i]) << "]";
      throw std::runtime_error(os.str());
    }
    nu[i] = std::exp(log_interval_odds_z(m, za, zb));
  }
  return nu;
}

std::vector<double> interval_masses(const ProjectedGaussian& g,
                                    const Breakpoints& tau) {
  g.validate();
  tau.validate();
  const std::vector<double> z = z_cuts(g, tau);
  const ZModel m = standardize(g);
  const std::size_t T = z.size() + 1;
  std::vector<double> mass(T);
  for (std::size_t i = 0; i < T; ++i) {
    const double za = (i == 0) ? -kInf : z[i - 1];
    const double zb = (i + 1 == T) ? kInf : z[i];
    const double m0 = std::exp(log_interval_mass_std(za, zb));
    const double m1 = std::exp(log_interval_mass_std(za - m.d, zb - m.d));
    mass[i] = g.p * m1 + (1.0 - g.p) * m0;
  }
  return mass;
}

std::vector<double> conditional_risk(const std::vector<double>& nu, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("conditional_risk: prior p must lie in (0, 1)");
  }
  std::vector<double> R(nu.size());
  const double odds_against = (1.0 - p) / p;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (std::isnan(nu[i]) || nu[i] < 0.0) {
      throw std::invalid_argument(
          "conditional_risk: interval odds must be nonnegative");
    }
    if (nu[i] == 0.0) {
      R[i] = 0.0;
    } else if (std::isinf(nu[i])) {
      R[i] = 1.0;
    } else {
      R[i] = 1.0 / (1.0 + odds_against / nu[i]);
    }
  }
  return R;
}

double ird(const std::vector<double>& R, const RiskSpec& spec) {
  spec.validate();
  if (R.size() != spec.r.size()) {
    throw std::invalid_argument(
        "ird: risk vector length does not match the target vector");
  }
  return deviation_norm(R, spec.r, spec.norm);
}

RiskAssessment assess_breakpoints(const ProjectedGaussian& g,
                                  const Breakpoints& tau,
                                  const RiskSpec& spec) {
  g.validate();
  tau.validate();
  spec.validate();
  if (tau.groups() != spec.groups()) {
    throw std::invalid_argument(
        "assess_breakpoints: breakpoint count does not match the target "
        "vector (need one fewer breakpoint than groups)");
  }
  const ZModel m = standardize(g);
  const std::vector<double> z = z_cuts(g, tau);
  const std::size_t T = spec.groups();
  RiskAssessment a;
  a.R.resize(T);
  a.nu.resize(T);
  for (std::size_t i = 0; i < T; ++i) {
    const double za = (i == 0) ? -kInf : z[i - 1];
    const double zb = (i + 1 == T) ? kInf : z[i];
    const double log_nu = log_interval_odds_z(m, za, zb);
    a.nu[i] = std::exp(log_nu);
    a.R[i] = risk_from_log_odds(m.p, log_nu);
  }
  a.ird = deviation_norm(a.R, spec.r, spec.norm);
  a.feasible = a.ird < spec.epsilon;
  return a;
}

BreakpointSolution solve_breakpoints(const ProjectedGaussian& g,
                                     const RiskSpec& spec,
                                     const ToleranceConfig& cfg) {
  g.validate();
  spec.validate();
  cfg.validate();
  if (!(spec.r.front() > 0.0) || !(spec.r.back() < 1.0)) {
    throw std::invalid_argument(
        "solve_breakpoints: degenerate targets r_1 = 0 or r_T = 1 have no "
        "finite breakpoints");
  }
  const ZModel m = standardize(g);
  if (!(m.d > 0.0)) {
    throw std::invalid_argument(
        "solve_breakpoints: projected separation must be positive; the score "
        "orientation contradicts the increasing risk targets");
  }
  const std::size_t T = spec.groups();

  // Pass 1: sequential exact matching. Under the strict monotone likelihood
  // ratio property each group's risk is strictly increasing in its right
  // endpoint, between the shrinking-interval posterior limit and the
  // right-ray risk; a target outside that open range is recorded and the
  // endpoint clamped toward the violated side.
  std::vector<double> z(T - 1);
  std::optional<InfeasibleStep> infeas;
  double prev = -kInf;
  for (std::size_t i = 0; i + 1 < T; ++i) {
    const double target = spec.r[i];
    const double lo_lim = std::isinf(prev) ? 0.0 : posterior_z(m, prev);
    const double hi_lim = right_ray_risk_z(m, prev);
    if (target <= lo_lim) {
      if (!infeas) infeas = InfeasibleStep{i + 1, target, lo_lim, hi_lim};
      z[i] = prev;
    } else if (target >= hi_lim) {
      if (!infeas) infeas = InfeasibleStep{i + 1, target, lo_lim, hi_lim};
      z[i] = (std::isinf(prev) ? std::max(m.d, 0.0) : prev) + 40.0;
    } else {
      z[i] = match_one_group(m, prev, target, cfg);
    }
    prev = z[i];
  }

  // Pass 2: deviation minimization over all breakpoints jointly, in
  // (first breakpoint, log interval gaps) coordinates so the search can
  // approach interval collapse smoothly. Euclidean deviations are minimized
  // through their square (same minimizer, smooth near zero).
  const IrdNorm min_norm =
      (spec.norm == IrdNorm::max_abs) ? IrdNorm::max_abs : IrdNorm::squared_euclidean;
  const auto z_from_u = [T](const std::vector<double>& u) {
    std::vector<double> zz(T - 1);
    zz[0] = u[0];
    for (std::size_t i = 1; i + 1 < T; ++i) zz[i] = zz[i - 1] + std::exp(u[i]);
    return zz;
  };
  const auto objective = [&](const std::vector<double>& u) -> double {
    const std::vector<double> zz = z_from_u(u);
    if (!std::isfinite(zz.back())) return 1e100;
    double acc = 0.0;
    for (std::size_t i = 0; i < T; ++i) {
      const double za = (i == 0) ? -kInf : zz[i - 1];
      const double zb = (i + 1 == T) ? kInf : zz[i];
      const double delta = interval_risk_z(m, za, zb) - spec.r[i];
      if (min_norm == IrdNorm::max_abs) {
        acc = std::max(acc, std::fabs(delta));
      } else {
        acc += delta * delta;
      }
    }
    return acc;
  };

  std::vector<double> u0(T - 1);
  u0[0] = z[0];
  for (std::size_t i = 1; i + 1 < T; ++i) {
    u0[i] = std::log(std::max(z[i] - z[i - 1], 1e-9));
  }
  const double j_seq = objective(u0);

  ToleranceConfig refine_cfg;
  refine_cfg.abs_tol = 1e-11;
  refine_cfg.rel_tol = 1e-15;
  refine_cfg.max_iter = std::max(240, 6 * cfg.max_iter) * static_cast<int>(T - 1);
  std::vector<double> steps(T - 1, 0.5);
  steps[0] = 0.25;
  SimplexResult stage1 = minimize_simplex(objective, u0, refine_cfg, steps);
  std::vector<double> polish_steps(T - 1);
  for (std::size_t i = 0; i < polish_steps.size(); ++i) polish_steps[i] = steps[i] * 0.02;
  ToleranceConfig polish_cfg = refine_cfg;
  polish_cfg.max_iter = refine_cfg.max_iter / 2;
  SimplexResult stage2 = minimize_simplex(objective, stage1.x, polish_cfg, polish_steps);
  const SimplexResult& best = (stage2.f < stage1.f) ? stage2 : stage1;

  BreakpointSolution out;
  out.sequential_infeasibility = infeas;
  std::vector<double> z_final = z;
  if (best.f < j_seq) {
    z_final = z_from_u(best.x);
    double move = 0.0;
    for (std::size_t i = 0; i + 1 < T; ++i) {
      move = std::max(move, std::fabs(z_final[i] - z[i]) /
                                std::max(1.0, std::fabs(z[i])));
    }
    out.refined = move > 1e-9;
  }
  out.tau = z_to_breakpoints(g, z_final);
  out.assessment = assess_breakpoints(g, out.tau, spec);
  return out;
}

FeasibilityReport feasibility_bounds(const ProjectedGaussian& g,
                                     const Breakpoints& tau,
                                     const RiskSpec& spec) {
  g.validate();
  tau.validate();
  spec.validate();
  if (tau.groups() != spec.groups()) {
    throw std::invalid_argument(
        "feasibility_bounds: breakpoint count does not match the target "
        "vector (need one fewer breakpoint than groups)");
  }
  FeasibilityReport rep;
  const double log_odds_against = std::log((1.0 - g.p) / g.p);
  for (std::size_t i = 2; i <= spec.groups(); ++i) {
    const double boundary = tau.tau[i - 2];
    const double ri = spec.r[i - 1];
    BoundaryCheck c;
    c.group = i;
    c.lhs = posterior_risk(g, boundary);
    c.rhs = ri;
    c.lr_lhs = likelihood_ratio(g, boundary);
    c.lr_rhs = (ri < 1.0) ? std::exp(log_odds_against + logit(ri)) : kInf;
    // Both forms are the same inequality; decide it once in log-odds scale.
    c.satisfied = (ri >= 1.0) ||
                  (log_likelihood_ratio(g, boundary) < log_odds_against + logit(ri));
    if (!c.satisfied && !rep.first_violation) rep.first_violation = i;
    rep.boundaries.push_back(c);
  }
  return rep;
}

double log_likelihood_ratio(const ProjectedGaussian& g, double x) {
  g.validate();
  if (!std::isfinite(x)) {
    throw std::invalid_argument("log_likelihood_ratio: x must be finite");
  }
  const double s2 = g.sigma_beta * g.sigma_beta;
  return (2.0 * x - g.mu0_beta - g.mu1_beta) * (g.mu1_beta - g.mu0_beta) /
         (2.0 * s2);
}

double likelihood_ratio(const ProjectedGaussian& g, double x) {
  return std::exp(log_likelihood_ratio(g, x));
}

double gamma_ratio(const ProjectedGaussian& g, double c, double x) {
  g.validate();
  if (!std::isfinite(x)) {
    throw std::invalid_argument("gamma_ratio: x must be finite");
  }
  if (!(c < x)) {
    throw std::invalid_argument("gamma_ratio: requires c < x");
  }
  const ZModel m = standardize(g);
  const double za = std::isinf(c) ? -kInf : (c - g.mu0_beta) / g.sigma_beta;
  const double zb = (x - g.mu0_beta) / g.sigma_beta;
  return std::exp(log_interval_odds_z(m, za, zb));
}

double posterior_risk(const ProjectedGaussian& g, double x) {
  g.validate();
  if (!std::isfinite(x)) {
    throw std::invalid_argument("posterior_risk: x must be finite");
  }
  return logistic(logit(g.p) + log_likelihood_ratio(g, x));
}

double right_ray_risk(const ProjectedGaussian& g, double x) {
  g.validate();
  if (!std::isfinite(x)) {
    throw std::invalid_argument("right_ray_risk: x must be finite");
  }
  const ZModel m = standardize(g);
  return right_ray_risk_z(m, (x - g.mu0_beta) / g.sigma_beta);
}

double left_ray_risk(double mu0, double sigma0, double mu1, double sigma1,
                     double p, double x) {
  if (!(sigma0 > 0.0) || !(sigma1 > 0.0)) {
    throw std::invalid_argument(
        "left_ray_risk: class standard deviations must be positive");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("left_ray_risk: prior p must lie in (0, 1)");
  }
  if (!std::isfinite(x)) {
    throw std::invalid_argument("left_ray_risk: x must be finite");
  }
  const double l1 = log_std_normal_cdf((x - mu1) / sigma1);
  const double l0 = log_std_normal_cdf((x - mu0) / sigma0);
  return logistic(logit(p) + l1 - l0);
}

std::vector<double> r_to_q(const std::vector<double>& r,
                           const std::vector<double>& masses) {
  return cumulative_ray_values(r, masses, "r_to_q");
}

std::vector<double> q_to_r(const std::vector<double>& q,
                           const std::vector<double>& masses) {
  check_masses(masses, "q_to_r");
  if (q.size() != masses.size()) {
    throw std::invalid_argument(
        "q_to_r: values and masses must have equal length");
  }
  std::vector<double> r(q.size());
  double prev_mass = 0.0;
  double prev_weighted = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!std::isfinite(q[i])) {
      throw std::invalid_argument("q_to_r: values must be finite");
    }
    if (!(masses[i] > 0.0)) {
      std::ostringstream os;
      os << "q_to_r: interval " << (i + 1)
         << " has zero mass; its interval risk cannot be recovered";
      throw std::invalid_argument(os.str());
    }
    const double cum_mass = prev_mass + masses[i];
    r[i] = (q[i] * cum_mass - prev_weighted) / masses[i];
    prev_weighted = q[i] * cum_mass;
    prev_mass = cum_mass;
  }
  return r;
}

std::vector<double> R_to_Q(const std::vector<double>& R,
                           const std::vector<double>& masses) {
  return cumulative_ray_values(R, masses, "R_to_Q");
}

}  // namespace ordrisk
