#pragma once

// Empirical counterparts of the model quantities — holdout interval rates,
// class-conditional CDFs, synthetic score sampling — and repeated-holdout
// cross-validation of the unconstrained and risk-constrained fits.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ordrisk/data_model.hpp"
#include "ordrisk/org_solver.hpp"

namespace ordrisk {

/// Share of positives among the observations falling in each interval
/// (right-closed on breakpoints). A group with no observations has an
/// undefined rate (NaN, defined = false), not a zero.
struct EmpiricalRisks {
  std::vector<double> rate;
  std::vector<bool> defined;
  std::vector<std::size_t> count;
  std::vector<std::size_t> positives;
};

EmpiricalRisks empirical_interval_risk(const std::vector<double>& scores,
                                       const std::vector<int>& labels,
                                       const Breakpoints& tau);

/// Empirical class-conditional CDF |{j : s_j <= t, y_j = k}| / N_k. Requires
/// class k to be present.
double empirical_class_cdf(const std::vector<double>& scores,
                           const std::vector<int>& labels, int k, double t);

struct ScoreSample {
  std::vector<double> scores;
  std::vector<int> labels;
};

/// n iid draws from the two-class Gaussian score model: label 1 with
/// probability p, score from the labeled class component. Deterministic in
/// the seed.
ScoreSample simulate_gaussian_pair(const ProjectedGaussian& g, std::size_t n,
                                   std::uint64_t seed);

enum class FitMethod { lr, org };

struct CvConfig {
  double holdout = 0.1;  ///< test fraction per repeat
  int repeats = 500;
  std::uint64_t seed = 1;
  FitMethod method = FitMethod::lr;
  /// Used by the constrained method; also supplies the breakpoint tolerances,
  /// covariance convention and degeneracy floor for the unconstrained one.
  /// Its thread count is overridden to 1 inside repeats.
  SolverConfig solver{};
  /// Repeat-level parallelism; 0 means all available (capped). Results are
  /// independent of the thread count.
  int threads = 0;
  void validate() const;
};

struct CvRepeat {
  int repeat = 0;
  bool failed = false;
  std::string failure_reason;
  std::vector<double> rate;
  std::vector<bool> defined;
  std::vector<std::size_t> count;
  std::vector<std::size_t> positives;
  double ird_sq = 0.0;      ///< squared-euclidean deviation over defined groups
  double ird_euclid = 0.0;  ///< its square root
};

struct CvReport {
  std::vector<CvRepeat> repeats;
  std::vector<std::size_t> pooled_count;
  std::vector<std::size_t> pooled_positives;
  std::vector<double> pooled_rate;  ///< NaN where the pooled count is zero
  double pooled_ird_sq = 0.0;
  double pooled_ird_euclid = 0.0;
  double mean_ird_sq = 0.0;    ///< mean over non-failed repeats
  double mean_ird_euclid = 0.0;
  int n_failed = 0;
  int n_used = 0;
};

/// Repeated stratification-free holdout: each repeat draws a seeded
/// permutation, fits on the front, solves the breakpoints, and measures the
/// empirical interval rates on the back. A repeat fails — and is excluded
/// from the aggregates, with its reason recorded — when no two-class training
/// split can be drawn, the fitted breakpoints collapse below the degeneracy
/// floor, or the fit itself errors. Deterministic in the seed.
CvReport cross_validate(const Dataset& data, const RiskSpec& spec,
                        const PenaltyConfig& pen, const CvConfig& cfg);

}  // namespace ordrisk
