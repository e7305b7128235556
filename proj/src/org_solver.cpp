#include "ordrisk/org_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ordrisk/logistic.hpp"
#include "internal_parallel.hpp"

namespace ordrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Separations below this are treated as orientation failures; the breakpoint
// subproblem is ill-posed there and the surrogate steers the search back.
constexpr double kMinSeparation = 1e-8;
constexpr double kRhoSchedule[] = {1e6, 1e9, 1e12, 1e15};

// Full-precision evaluation of one coefficient vector.
struct CandidateEval {
  bool valid = false;
  double ll = -kInf;
  double pen = 0.0;
  double ird_value = kInf;
  double objective = -kInf;
  Breakpoints tau;
  RiskAssessment assessment;
  bool feasible = false;
  bool degenerate = false;
  int clazz = 2;  // 0: feasible nondegenerate, 1: feasible, 2: rest
};

// Class first; penalized objective within the feasible classes; deviation
// within the infeasible class. Strict, so equal candidates keep the earlier
// start (callers scan in index order).
bool better_candidate(const CandidateEval& a, const CandidateEval& b) {
  if (a.clazz != b.clazz) return a.clazz < b.clazz;
  if (a.clazz <= 1) return a.objective > b.objective;
  return a.ird_value < b.ird_value;
}

std::vector<std::vector<double>> make_starts(const Eigen::VectorXd& beta_lr,
                                             int n, std::uint64_t seed) {
  const Eigen::Index P = beta_lr.size();
  std::vector<double> scale(static_cast<std::size_t>(P));
  for (Eigen::Index j = 0; j < P; ++j) {
    scale[static_cast<std::size_t>(j)] = std::max(std::fabs(beta_lr[j]), 0.5);
  }
  const double ref_norm = std::max(beta_lr.norm(), 1.0);
  std::vector<std::vector<double>> starts(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    std::vector<double> x(static_cast<std::size_t>(P));
    if (k == 0) {
      for (Eigen::Index j = 0; j < P; ++j) x[static_cast<std::size_t>(j)] = beta_lr[j];
    } else {
      Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(k));
      if (k % 4 == 3) {
        // Fresh random direction at a log-uniform radius around the
        // likelihood scale, for basins far from the unconstrained fit.
        double norm2 = 0.0;
        for (auto& v : x) {
          v = rng.normal();
          norm2 += v * v;
        }
        const double radius =
            ref_norm * std::pow(10.0, -1.0 + 2.5 * rng.uniform());
        const double factor = radius / std::sqrt(std::max(norm2, 1e-300));
        for (auto& v : x) v *= factor;
      } else {
        // Perturbation of the unconstrained fit at cycled magnitudes.
        const double mags[] = {4.0, 0.25, 1.0};
        const double mag = mags[k % 3];
        for (Eigen::Index j = 0; j < P; ++j) {
          const std::size_t sj = static_cast<std::size_t>(j);
          x[sj] = beta_lr[j] + mag * scale[sj] * rng.normal();
        }
      }
    }
    starts[static_cast<std::size_t>(k)] = std::move(x);
  }
  return starts;
}

}  // namespace

void PenaltyConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument(
        "PenaltyConfig: gamma must be finite and nonnegative");
  }
}

void SolverConfig::validate() const {
  if (n_starts < 1) {
    throw std::invalid_argument("SolverConfig: n_starts must be at least 1");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("SolverConfig: epsilon must be positive");
  }
  if (!(min_gap >= 0.0)) {
    throw std::invalid_argument("SolverConfig: min_gap must be nonnegative");
  }
  if (!(infeasible_surrogate_scale > 0.0)) {
    throw std::invalid_argument(
        "SolverConfig: infeasible_surrogate_scale must be positive");
  }
  if (threads < 0) {
    throw std::invalid_argument("SolverConfig: threads must be nonnegative");
  }
  inner.validate();
  outer.validate();
}

double penalty(const Breakpoints& tau, const ProjectedGaussian& g) {
  tau.validate();
  g.validate();
  if (tau.groups() < 3) {
    throw std::invalid_argument(
        "penalty: needs at least three risk groups; fewer have no interior "
        "gap to protect");
  }
  const double sep = g.mu1_beta - g.mu0_beta;
  if (!(std::fabs(sep) > 0.0)) {
    throw std::invalid_argument(
        "penalty: projected class separation is zero; the gap ratio is "
        "undefined");
  }
  double max_gap = 0.0;
  for (std::size_t i = 1; i < tau.tau.size(); ++i) {
    max_gap = std::max(max_gap, tau.tau[i] - tau.tau[i - 1]);
  }
  const double ratio = max_gap / sep;
  return (ratio - 1.0) * (ratio - 1.0);
}

ConstraintCheck ird_constraint(const GaussianEstimates& est,
                               const Eigen::VectorXd& beta,
                               const RiskSpec& spec,
                               const ToleranceConfig& cfg,
                               CovarianceKind kind) {
  const ProjectedGaussian proj = project(est, beta, kind);
  BreakpointSolution sol = solve_breakpoints(proj, spec, cfg);
  return ConstraintCheck{std::move(sol.assessment), std::move(sol.tau),
                         sol.sequential_infeasibility};
}

OrgResult fit_org(const Dataset& data, const RiskSpec& spec,
                  const PenaltyConfig& pen, const SolverConfig& cfg) {
  data.validate();
  spec.validate();
  pen.validate();
  cfg.validate();

  const GaussianEstimates est = estimate_gaussian(data);
  const ToleranceConfig lr_cfg{1e-8, 1e-12, 200};
  const LogisticFit lr = fit_lr(data, lr_cfg);
  const Eigen::Index P = data.p();
  const std::size_t T = spec.groups();

  const auto as_vector = [P](const std::vector<double>& x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), P);
  };

  // Surrogate for points where the projection fails or is oriented against
  // the targets: above any interior value at the current constraint weight
  // and sloping back toward positive separation.
  const auto surrogate = [&](double d, double rho) {
    return (cfg.infeasible_surrogate_scale + rho) *
           (1.0 + std::max(0.0, kMinSeparation - d));
  };

  const auto make_merit = [&](double rho, ToleranceConfig inner_cfg) {
    return [&, rho, inner_cfg](const std::vector<double>& x) -> double {
      const Eigen::VectorXd beta = as_vector(x);
      ProjectedGaussian proj;
      try {
        proj = project(est, beta, cfg.covariance);
      } catch (const std::exception&) {
        return surrogate(0.0, rho);
      }
      const double d = proj.separation();
      if (d <= kMinSeparation) return surrogate(d, rho);
      BreakpointSolution sol;
      try {
        sol = solve_breakpoints(proj, spec, inner_cfg);
      } catch (const std::exception&) {
        return surrogate(d, rho);
      }
      const double pen_value = (T >= 3) ? penalty(sol.tau, proj) : 0.0;
      const double ll = lr_log_likelihood(data.features, data.labels, beta);
      const double h = std::max(0.0, sol.assessment.ird - 0.5 * cfg.epsilon);
      return -ll + pen.gamma * pen_value + rho * h * h;
    };
  };

  const auto evaluate = [&](const std::vector<double>& x) -> CandidateEval {
    CandidateEval e;
    const Eigen::VectorXd beta = as_vector(x);
    e.ll = lr_log_likelihood(data.features, data.labels, beta);
    try {
      const ProjectedGaussian proj = project(est, beta, cfg.covariance);
      if (proj.separation() <= kMinSeparation) return e;
      BreakpointSolution sol = solve_breakpoints(proj, spec, cfg.inner);
      e.tau = std::move(sol.tau);
      e.assessment = std::move(sol.assessment);
      e.ird_value = e.assessment.ird;
      e.pen = (T >= 3) ? penalty(e.tau, proj) : 0.0;
      e.objective = e.ll - pen.gamma * e.pen;
      e.feasible = e.ird_value < cfg.epsilon;
      e.degenerate = T >= 3 && (e.tau.min_gap() / proj.sigma_beta) < cfg.min_gap;
      e.clazz = e.feasible ? (e.degenerate ? 1 : 0) : 2;
      e.valid = true;
    } catch (const std::exception&) {
      e = CandidateEval{};
      e.ll = lr_log_likelihood(data.features, data.labels, beta);
    }
    return e;
  };

  // The search runs the breakpoint subproblem at a reduced budget; candidates
  // are always re-assessed at the configured full budget.
  ToleranceConfig search_inner = cfg.inner;
  search_inner.max_iter = std::min(cfg.inner.max_iter, 40);
  ToleranceConfig nm_cfg = cfg.outer;
  nm_cfg.max_iter = std::max(cfg.outer.max_iter, 40 * static_cast<int>(P));

  const int n = cfg.n_starts;
  std::vector<std::vector<double>> points = make_starts(lr.beta, n, cfg.seed);
  std::vector<double> coord_scale(static_cast<std::size_t>(P));
  for (Eigen::Index j = 0; j < P; ++j) {
    coord_scale[static_cast<std::size_t>(j)] = std::max(std::fabs(lr.beta[j]), 0.5);
  }

  OrgResult out;
  std::vector<CandidateEval> evals(static_cast<std::size_t>(n));
  const int n_rounds = static_cast<int>(std::size(kRhoSchedule));
  for (int round = 0; round < n_rounds; ++round) {
    const double rho = kRhoSchedule[round];
    out.rounds_used = round + 1;
    const double step_factor = (round == 0) ? 0.25 : 0.05;
    internal::parallel_for(n, cfg.threads, [&](int k) {
      const std::size_t sk = static_cast<std::size_t>(k);
      const auto merit = make_merit(rho, search_inner);
      std::vector<double> steps(coord_scale.size());
      for (std::size_t j = 0; j < steps.size(); ++j) {
        steps[j] = step_factor * coord_scale[j];
      }
      const SimplexResult res = minimize_simplex(merit, points[sk], nm_cfg, steps);
      points[sk] = res.x;
      evals[sk] = evaluate(points[sk]);
    });
    int best_k = 0;
    for (int k = 1; k < n; ++k) {
      if (better_candidate(evals[static_cast<std::size_t>(k)],
                           evals[static_cast<std::size_t>(best_k)])) {
        best_k = k;
      }
    }
    if (evals[static_cast<std::size_t>(best_k)].clazz == 0) break;
  }

  int best_k = 0;
  out.starts.resize(static_cast<std::size_t>(n));
  out.any_feasible = false;
  for (int k = 0; k < n; ++k) {
    const std::size_t sk = static_cast<std::size_t>(k);
    const CandidateEval& e = evals[sk];
    StartSummary& s = out.starts[sk];
    s.start_index = k;
    s.objective = e.objective;
    s.log_likelihood = e.ll;
    s.penalty_value = e.pen;
    s.ird_value = e.ird_value;
    s.feasible = e.feasible;
    s.degenerate = e.degenerate;
    if (e.feasible) out.any_feasible = true;
    if (k > 0 && better_candidate(e, evals[static_cast<std::size_t>(best_k)])) {
      best_k = k;
    }
  }

  const std::size_t sb = static_cast<std::size_t>(best_k);
  const CandidateEval& be = evals[sb];
  out.best.beta = as_vector(points[sb]);
  out.best.tau = be.tau;
  out.best.assessment = be.assessment;
  out.best.log_likelihood = be.ll;
  out.best.penalty_value = be.pen;
  out.best.objective = be.objective;
  out.best.feasible = be.feasible;
  out.best.degenerate = be.degenerate;
  out.best.start_index = best_k;
  return out;
}

std::vector<DegenerateDemoRow> degenerate_demo(double mu, double sigma,
                                               const std::vector<double>& t_grid) {
  if (!(mu > 0.0) || !(sigma > 0.0)) {
    throw std::invalid_argument(
        "degenerate_demo: mu and sigma must be positive");
  }
  if (t_grid.empty()) {
    throw std::invalid_argument("degenerate_demo: t grid must be nonempty");
  }
  double prev = 0.0;
  std::vector<DegenerateDemoRow> rows;
  rows.reserve(t_grid.size());
  for (const double t : t_grid) {
    if (!(t > prev)) {
      throw std::invalid_argument(
          "degenerate_demo: t grid must be positive and strictly increasing");
    }
    prev = t;
    DegenerateDemoRow row;
    row.t = t;
    // Class means are -mu and +mu with prior 1/2, partitioned at (-t, t);
    // the low-interval risk has the closed form below and the symmetric
    // middle interval carries risk exactly 1/2.
    row.risk_low = logistic(log_std_normal_cdf((-t - mu) / sigma) -
                            log_std_normal_cdf((-t + mu) / sigma));
    row.risk_mid = 0.5;
    row.risk_high = 1.0 - row.risk_low;
    // Deviation from (0, 1/2, 1): the middle term vanishes and the outer two
    // are equal, so it reduces to sqrt(2) * risk_low.
    row.ird_value = std::sqrt(2.0) * row.risk_low;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ordrisk
