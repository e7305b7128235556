#include "ordrisk/data_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ordrisk {

Eigen::Index Dataset::count_class(int k) const {
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] == k) ++c;
  return c;
}

void Dataset::validate() const {
  if (features.rows() < 2)
    throw std::invalid_argument("Dataset: need at least 2 observations");
  if (labels.size() != features.rows())
    throw std::invalid_argument("Dataset: labels length does not match rows");
  if (!feature_names.empty() &&
      static_cast<Eigen::Index>(feature_names.size()) != features.cols())
    throw std::invalid_argument(
        "Dataset: feature_names length does not match columns");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] != 0 && labels[i] != 1)
      throw std::invalid_argument("Dataset: labels must be 0 or 1 (row " +
                                  std::to_string(i) + ")");
  if (count_class(0) < 1 || count_class(1) < 1)
    throw std::invalid_argument("Dataset: both classes must be present");
  if (!features.allFinite())
    throw std::invalid_argument("Dataset: non-finite feature entries");
}

IrdNorm parse_ird_norm(const std::string& name) {
  if (name == "euclidean") return IrdNorm::euclidean;
  if (name == "squared_euclidean") return IrdNorm::squared_euclidean;
  if (name == "max_abs") return IrdNorm::max_abs;
  throw std::invalid_argument("parse_ird_norm: unknown norm '" + name + "'");
}

std::string to_string(IrdNorm norm) {
  switch (norm) {
    case IrdNorm::euclidean: return "euclidean";
    case IrdNorm::squared_euclidean: return "squared_euclidean";
    case IrdNorm::max_abs: return "max_abs";
  }
  return "unknown";
}

void RiskSpec::validate() const {
  if (r.size() < 2)
    throw std::invalid_argument("RiskSpec: need at least 2 risk levels");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("RiskSpec: epsilon must be > 0");
  if (!(r.front() >= 0.0) || !(r.back() <= 1.0))
    throw std::invalid_argument("RiskSpec: risk levels must lie in [0, 1]");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i - 1] < r[i]))
      throw std::invalid_argument(
          "RiskSpec: risk levels must be strictly increasing (position " +
          std::to_string(i) + ")");
}

CovarianceKind parse_covariance_kind(const std::string& name) {
  if (name == "pooled_ml" || name == "pooled") return CovarianceKind::pooled_ml;
  if (name == "total") return CovarianceKind::total;
  throw std::invalid_argument("parse_covariance_kind: unknown kind '" + name +
                              "'");
}

std::string to_string(CovarianceKind kind) {
  return kind == CovarianceKind::pooled_ml ? "pooled_ml" : "total";
}

void ProjectedGaussian::validate() const {
  if (!(sigma_beta > 0.0) || !std::isfinite(sigma_beta))
    throw std::invalid_argument("ProjectedGaussian: sigma_beta must be > 0");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("ProjectedGaussian: prior must be in (0, 1)");
  if (!std::isfinite(mu0_beta) || !std::isfinite(mu1_beta))
    throw std::invalid_argument("ProjectedGaussian: non-finite means");
}

double Breakpoints::min_gap() const {
  if (tau.size() < 2) return std::numeric_limits<double>::infinity();
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < tau.size(); ++i)
    g = std::min(g, tau[i] - tau[i - 1]);
  return g;
}

void Breakpoints::validate() const {
  if (tau.empty())
    throw std::invalid_argument("Breakpoints: need at least one breakpoint");
  for (double t : tau)
    if (!std::isfinite(t))
      throw std::invalid_argument("Breakpoints: entries must be finite");
  for (std::size_t i = 1; i < tau.size(); ++i)
    if (!(tau[i - 1] < tau[i]))
      throw std::invalid_argument(
          "Breakpoints: entries must be strictly increasing (position " +
          std::to_string(i) + ")");
}

GaussianEstimates estimate_gaussian(const Dataset& data) {
  data.validate();
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const Eigen::Index n1 = data.count_class(1);
  const Eigen::Index n0 = n - n1;
  if (n0 < 2 || n1 < 2)
    throw std::invalid_argument(
        "estimate_gaussian: each class needs at least 2 observations");

  GaussianEstimates est;
  est.mu0 = Eigen::VectorXd::Zero(p);
  est.mu1 = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.labels[i] == 1)
      est.mu1 += data.features.row(i).transpose();
    else
      est.mu0 += data.features.row(i).transpose();
  }
  est.mu0 /= static_cast<double>(n0);
  est.mu1 /= static_cast<double>(n1);
  est.p_hat = static_cast<double>(n1) / static_cast<double>(n);

  // Rows centered on their own class mean give the pooled scatter; rows
  // centered on the grand mean give the marginal scatter.
  Eigen::MatrixXd class_centered(n, p);
  const Eigen::VectorXd grand_mean = data.features.colwise().mean();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd& mu = data.labels[i] == 1 ? est.mu1 : est.mu0;
    class_centered.row(i) = data.features.row(i) - mu.transpose();
  }
  est.sigma_pooled =
      class_centered.transpose() * class_centered / static_cast<double>(n);
  const Eigen::MatrixXd total_centered =
      data.features.rowwise() - grand_mean.transpose();
  est.sigma_total = total_centered.transpose() * total_centered /
                    static_cast<double>(n - 1);

  // Singularity policy: columns that are constant over the whole sample (an
  // intercept) legitimately contribute zero variance; the estimate is only
  // rejected when the covariance restricted to the remaining columns is rank
  // deficient, and the offending columns are named via pivoted QR on the
  // class-centered rows.
  std::vector<Eigen::Index> varying;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double total_var = est.sigma_total(j, j);
    if (total_var > 1e-14 * std::max(1.0, grand_mean[j] * grand_mean[j]))
      varying.push_back(j);
  }
  if (varying.empty())
    throw std::invalid_argument(
        "estimate_gaussian: singular pooled covariance (every feature column "
        "is constant)");
  Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(varying.size()));
  for (std::size_t j = 0; j < varying.size(); ++j)
    sub.col(static_cast<Eigen::Index>(j)) = class_centered.col(varying[j]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  if (rank < static_cast<Eigen::Index>(varying.size())) {
    const auto perm = qr.colsPermutation().indices();
    std::string cols;
    for (Eigen::Index k = rank; k < perm.size(); ++k) {
      const Eigen::Index j = varying[static_cast<std::size_t>(perm[k])];
      if (!cols.empty()) cols += ", ";
      cols += data.feature_names.empty() ? std::to_string(j)
                                         : data.feature_names[j];
    }
    throw std::invalid_argument(
        "estimate_gaussian: singular pooled covariance; collinear columns: " +
        cols);
  }
  return est;
}

ProjectedGaussian project(const GaussianEstimates& est,
                          const Eigen::VectorXd& beta, CovarianceKind kind) {
  if (beta.size() != est.mu0.size())
    throw std::invalid_argument("project: beta length does not match estimates");
  const Eigen::MatrixXd& sigma =
      kind == CovarianceKind::pooled_ml ? est.sigma_pooled : est.sigma_total;
  const double var = beta.dot(sigma * beta);
  if (!(var > 0.0))
    throw std::invalid_argument(
        "project: degenerate projection, sigma(beta) = 0 (beta is zero or "
        "lies in the covariance null space)");
  ProjectedGaussian g;
  g.mu0_beta = beta.dot(est.mu0);
  g.mu1_beta = beta.dot(est.mu1);
  g.sigma_beta = std::sqrt(var);
  g.p = est.p_hat;
  g.validate();
  return g;
}

}  // namespace ordrisk
