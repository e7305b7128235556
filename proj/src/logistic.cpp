#include "ordrisk/logistic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ordrisk {

Eigen::VectorXd lr_predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  if (X.cols() != beta.size()) {
    throw std::invalid_argument(
        "lr_predict: design width does not match coefficient length");
  }
  Eigen::VectorXd eta = X * beta;
  Eigen::VectorXd mu(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) mu[i] = logistic(eta[i]);
  return mu;
}

double lr_log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                         const Eigen::VectorXd& beta) {
  if (X.rows() != y.size()) {
    throw std::invalid_argument(
        "lr_log_likelihood: label length does not match the design");
  }
  if (X.cols() != beta.size()) {
    throw std::invalid_argument(
        "lr_log_likelihood: design width does not match coefficient length");
  }
  const Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += static_cast<double>(y[i]) * eta[i] - log1p_exp(eta[i]);
  }
  return ll;
}

Eigen::VectorXd lr_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                            const Eigen::VectorXd& beta) {
  if (X.rows() != y.size()) {
    throw std::invalid_argument(
        "lr_gradient: label length does not match the design");
  }
  const Eigen::VectorXd mu = lr_predict(X, beta);
  return X.transpose() * (y.cast<double>() - mu);
}

Eigen::MatrixXd lr_hessian(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd mu = lr_predict(X, beta);
  const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
  return -(X.transpose() * w.asDiagonal() * X);
}

LogisticFit fit_lr(const Dataset& data, const ToleranceConfig& cfg) {
  data.validate();
  cfg.validate();
  const Eigen::MatrixXd& X = data.features;
  const Eigen::VectorXi& y = data.labels;
  const Eigen::Index P = X.cols();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < P) {
    std::ostringstream os;
    os << "fit_lr: design matrix is rank deficient (rank " << qr.rank()
       << " of " << P << "); remove collinear feature columns";
    throw std::invalid_argument(os.str());
  }

  LogisticFit fit;
  fit.beta = Eigen::VectorXd::Zero(P);
  fit.log_likelihood = lr_log_likelihood(X, y, fit.beta);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    fit.iterations = it;
    const Eigen::VectorXd grad = lr_gradient(X, y, fit.beta);
    if (grad.cwiseAbs().maxCoeff() <= cfg.abs_tol) {
      fit.converged = true;
      break;
    }
    const Eigen::MatrixXd H = lr_hessian(X, fit.beta);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(-H);
    Eigen::VectorXd delta = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
      fit.separation_warning = true;
      break;
    }
    // Step halving keeps the likelihood nondecreasing even from poor starts.
    double step = 1.0;
    double ll_new = lr_log_likelihood(X, y, fit.beta + step * delta);
    while (ll_new < fit.log_likelihood && step > 1e-12) {
      step *= 0.5;
      ll_new = lr_log_likelihood(X, y, fit.beta + step * delta);
    }
    if (ll_new < fit.log_likelihood) {
      break;  // no ascent direction left; report the last iterate
    }
    fit.beta += step * delta;
    fit.log_likelihood = ll_new;
    if (fit.log_likelihood > -1e-8 || fit.beta.cwiseAbs().maxCoeff() > 1e8) {
      fit.separation_warning = true;
      break;
    }
  }
  return fit;
}

}  // namespace ordrisk
