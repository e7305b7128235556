#pragma once

// Core data containers, Gaussian class-conditional estimation, and the
// one-dimensional score-scale projection used by the parametric interval-risk
// machinery.

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace ordrisk {

/// Observation matrix plus binary class labels. Rows are observations; one
/// column may be an all-ones intercept.
struct Dataset {
  Eigen::MatrixXd features;                // N x P
  Eigen::VectorXi labels;                  // entries in {0, 1}
  std::vector<std::string> feature_names;  // length P

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index p() const { return features.cols(); }
  Eigen::Index count_class(int k) const;

  /// Throws std::invalid_argument unless N >= 2, both classes are present,
  /// every entry is finite, and the shapes agree.
  void validate() const;
};

/// Norm applied to the risk-deviation vector R - r.
enum class IrdNorm { euclidean, squared_euclidean, max_abs };

IrdNorm parse_ird_norm(const std::string& name);
std::string to_string(IrdNorm norm);

/// Target risk levels with the feasibility tolerance and norm choice.
struct RiskSpec {
  std::vector<double> r;      ///< strictly increasing, inside [0, 1]
  double epsilon = 1e-7;      ///< feasibility tolerance on the IRD
  IrdNorm norm = IrdNorm::euclidean;

  std::size_t groups() const { return r.size(); }

  /// Throws std::invalid_argument unless 0 <= r1 < ... < rT <= 1, T >= 2 and
  /// epsilon > 0.
  void validate() const;
};

/// Class-conditional Gaussian estimates. Both covariance conventions are
/// carried: `sigma_pooled` is the within-class maximum-likelihood pooled
/// matrix (N0*S0 + N1*S1)/N, and `sigma_total` is the marginal covariance of
/// the whole sample with 1/(N-1) normalization. The pooled matrix is what the
/// model narrative writes down; the total matrix is what reproduces the
/// reference WDBC breakpoint and probability values, so projections default
/// to it (see README, "Covariance convention").
struct GaussianEstimates {
  Eigen::VectorXd mu0;          ///< class-0 feature means
  Eigen::VectorXd mu1;          ///< class-1 feature means
  Eigen::MatrixXd sigma_pooled; ///< pooled within-class ML covariance
  Eigen::MatrixXd sigma_total;  ///< marginal covariance, unbiased
  double p_hat = 0.0;           ///< class-1 prior N1/N
};

/// Which covariance matrix the score-scale projection uses.
enum class CovarianceKind { pooled_ml, total };

CovarianceKind parse_covariance_kind(const std::string& name);
std::string to_string(CovarianceKind kind);

/// One-dimensional Gaussians of the projected score beta'X given each class:
/// score | Y=k ~ N(mu_k_beta, sigma_beta^2).
struct ProjectedGaussian {
  double mu0_beta = 0.0;
  double mu1_beta = 0.0;
  double sigma_beta = 1.0;  ///< common standard deviation (> 0)
  double p = 0.5;           ///< class-1 prior

  /// Standardized class separation (mu1 - mu0) / sigma.
  double separation() const { return (mu1_beta - mu0_beta) / sigma_beta; }

  void validate() const;
};

/// Strictly increasing score-scale partition of the real line into T adjacent
/// right-closed intervals (tau_0 = -inf and tau_T = +inf are implicit).
struct Breakpoints {
  std::vector<double> tau;  ///< length T-1

  std::size_t groups() const { return tau.size() + 1; }

  /// Smallest gap between consecutive finite breakpoints; +inf when there is
  /// only one breakpoint.
  double min_gap() const;

  /// Throws std::invalid_argument unless tau is nonempty, finite and strictly
  /// increasing.
  void validate() const;
};

/// Class means, both covariance matrices and the class-1 prior from data.
/// Errors identify degenerate inputs: all-degenerate columns or collinear
/// feature columns make the pooled covariance singular.
GaussianEstimates estimate_gaussian(const Dataset& data);

/// Projects the estimates onto the direction beta:
/// (beta'mu0, beta'mu1, sqrt(beta'S beta), p_hat) with S selected by `kind`.
/// Throws std::invalid_argument when the projected variance vanishes (zero
/// beta, or beta inside the covariance null space such as a pure intercept
/// direction).
ProjectedGaussian project(const GaussianEstimates& est,
                          const Eigen::VectorXd& beta,
                          CovarianceKind kind = CovarianceKind::total);

}  // namespace ordrisk
