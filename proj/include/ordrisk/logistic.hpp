#pragma once

// Maximum-likelihood logistic regression: log-likelihood, gradient, Hessian,
// and a damped Newton fitter. The fitted coefficient vector is the reference
// point from which the risk-constrained estimator starts.

#include <Eigen/Dense>

#include "ordrisk/data_model.hpp"
#include "ordrisk/special_math.hpp"

namespace ordrisk {

struct LogisticFit {
  Eigen::VectorXd beta;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Set when the iterates indicate (quasi-)complete separation: the
  /// likelihood approaches 0 or the coefficients diverge. The returned beta
  /// is the last iterate and downstream use is the caller's decision.
  bool separation_warning = false;
};

/// Per-observation success probabilities logistic(X beta).
Eigen::VectorXd lr_predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

/// Bernoulli log-likelihood sum_i [ y_i eta_i - log(1 + e^{eta_i}) ],
/// evaluated without overflow for any eta.
double lr_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                         const Eigen::VectorXd& beta);

/// Score vector X' (y - mu).
Eigen::VectorXd lr_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                            const Eigen::VectorXd& beta);

/// Observed-information Hessian -X' W X with W = diag(mu (1 - mu)).
Eigen::MatrixXd lr_hessian(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

/// Newton iteration with step halving from beta = 0. Converged means the
/// max-abs gradient fell below cfg.abs_tol. A rank-deficient design is an
/// error; separation is a warning on the returned fit, not an error.
LogisticFit fit_lr(const Dataset& data, const ToleranceConfig& cfg);

}  // namespace ordrisk
