#pragma once

// Interval odds, interval risks and their deviation from the target vector,
// breakpoint solving under the strict monotone likelihood ratio property,
// feasibility bounds, likelihood-ratio diagnostics, and the translations
// between interval risks and left-ray risks.

#include <optional>
#include <vector>

#include "ordrisk/data_model.hpp"
#include "ordrisk/special_math.hpp"

namespace ordrisk {

/// Actual interval risks of a (model, partition) pair measured against a
/// RiskSpec: R holds P(Y=1 | score in interval i), nu the interval odds, ird
/// the chosen norm of R - r, and feasible the comparison against epsilon.
struct RiskAssessment {
  std::vector<double> R;
  std::vector<double> nu;
  double ird = 0.0;
  bool feasible = false;
};

/// One feasibility-bound check at an interior boundary: the posterior-limit
/// form (lhs < rhs) and the equivalent likelihood-ratio form
/// (lr_lhs < lr_rhs) of the necessary condition for exact risk matching.
struct BoundaryCheck {
  std::size_t group = 0;  ///< group index i (boundary tau_{i-1}), 1-based
  double lhs = 0.0;       ///< posterior limit p*f1/f at tau_{i-1}
  double rhs = 0.0;       ///< r_i
  double lr_lhs = 0.0;    ///< likelihood ratio at tau_{i-1}
  double lr_rhs = 0.0;    ///< ((1-p)/p) * r_i/(1-r_i)
  bool satisfied = false;
};

struct FeasibilityReport {
  std::vector<BoundaryCheck> boundaries;
  std::optional<std::size_t> first_violation;  ///< group index, if any
};

/// Record of a failed exact-matching step: group `step` could not reach its
/// target because the attainable interval risks, given the previous
/// breakpoint, form the open interval (attainable_inf, attainable_sup) —
/// the infimum being the shrinking-interval posterior limit.
struct InfeasibleStep {
  std::size_t step = 0;  ///< 1-based group index
  double target = 0.0;
  double attainable_inf = 0.0;
  double attainable_sup = 0.0;
};

/// Output of solve_breakpoints: the breakpoints that minimize the interval
/// risk deviation, their assessment, and — when the exact sequential matching
/// pass could not reach some target — the infeasibility record explaining
/// which group failed and what was attainable.
struct BreakpointSolution {
  Breakpoints tau;
  RiskAssessment assessment;
  std::optional<InfeasibleStep> sequential_infeasibility;
  bool refined = false;  ///< minimization moved off the sequential solution
};

/// Interval odds nu_i: ratio of class-1 to class-0 probability mass over each
/// of the T intervals cut by tau. Tail intervals are evaluated through the
/// complementary CDF so deep-tail differences do not cancel. Throws
/// std::runtime_error naming the interval when the class-0 mass falls below
/// 1e-300.
std::vector<double> interval_odds(const ProjectedGaussian& g,
                                  const Breakpoints& tau);

/// Marginal probability mass of each interval, p*mass1 + (1-p)*mass0.
std::vector<double> interval_masses(const ProjectedGaussian& g,
                                    const Breakpoints& tau);

/// Converts interval odds to interval risks: R_i = 1/(1 + ((1-p)/p)/nu_i),
/// with nu_i = 0 mapping to 0 and nu_i = +inf mapping to 1.
std::vector<double> conditional_risk(const std::vector<double>& nu, double p);

/// Norm of R - r selected by spec.norm. Throws on length mismatch.
double ird(const std::vector<double>& R, const RiskSpec& spec);

/// Full assessment of a partition: risks, odds, IRD and the feasibility flag
/// (ird < spec.epsilon). Intervals whose standardized width collapses below
/// numerical resolution are evaluated by their shrinking-interval limit, the
/// posterior at the left endpoint, keeping the assessment continuous at
/// degenerate configurations.
RiskAssessment assess_breakpoints(const ProjectedGaussian& g,
                                  const Breakpoints& tau,
                                  const RiskSpec& spec);

/// Solves for the breakpoints of an equal-variance projected Gaussian pair
/// against the target risks. First pass: sequential exact matching — groups
/// 1..T-1 are matched by monotone root finding (interval risks are strictly
/// increasing in their right endpoint under SMLRP) and group T carries the
/// residual; any unreachable target is recorded with its attainable range.
/// Second pass: derivative-free minimization of the IRD over all breakpoints
/// jointly (log-gap parametrization, so configurations may approach interval
/// collapse), which coincides with the sequential solution whenever a
/// zero-IRD partition exists and otherwise spreads the residual optimally.
///
/// Throws std::invalid_argument when r_1 = 0 or r_T = 1 (degenerate targets
/// with infinite breakpoints) and when the projected separation is not
/// positive (score orientation contradicts increasing risk targets).
BreakpointSolution solve_breakpoints(const ProjectedGaussian& g,
                                     const RiskSpec& spec,
                                     const ToleranceConfig& cfg);

/// Necessary-condition check at every interior boundary, in both the
/// posterior-limit and likelihood-ratio forms (satisfied flags agree by
/// construction). Satisfaction is necessary but not sufficient for zero IRD.
FeasibilityReport feasibility_bounds(const ProjectedGaussian& g,
                                     const Breakpoints& tau,
                                     const RiskSpec& spec);

/// Class-conditional density ratio f1(x)/f0(x) and its logarithm.
double likelihood_ratio(const ProjectedGaussian& g, double x);
double log_likelihood_ratio(const ProjectedGaussian& g, double x);

/// CDF-difference ratio gamma(c, x) = (F1(x)-F1(c))/(F0(x)-F0(c)); c may be
/// -infinity, giving the left-ray ratio F1(x)/F0(x). Requires c < x.
double gamma_ratio(const ProjectedGaussian& g, double c, double x);

/// Pointwise posterior p*f1(x)/f(x) — the shrinking-interval limit of the
/// interval risk.
double posterior_risk(const ProjectedGaussian& g, double x);

/// Risk of the right ray (x, +inf).
double right_ray_risk(const ProjectedGaussian& g, double x);

/// Left-ray risk Q(x) = P(Y=1 | score <= x) for possibly heteroscedastic
/// class Gaussians; exists to exhibit the non-monotone threshold behaviour
/// that interval-based risk grouping avoids.
double left_ray_risk(double mu0, double sigma0, double mu1, double sigma1,
                     double p, double x);

/// Interval risks -> left-ray risks: q_i = sum_{j<=i} r_j m_j / sum_{j<=i} m_j.
/// Masses must be nonnegative and sum to 1; a zero cumulative mass is an
/// error.
std::vector<double> r_to_q(const std::vector<double>& r,
                           const std::vector<double>& masses);

/// Inverse of r_to_q; a zero interval mass makes the inversion impossible and
/// is an error.
std::vector<double> q_to_r(const std::vector<double>& q,
                           const std::vector<double>& masses);

/// Same cumulative translation applied to actual risks R.
std::vector<double> R_to_Q(const std::vector<double>& R,
                           const std::vector<double>& masses);

}  // namespace ordrisk
