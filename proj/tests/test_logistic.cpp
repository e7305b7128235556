#include <doctest.h>

#include <cmath>
#include <vector>

#include "ordrisk/logistic.hpp"
#include "ordrisk/special_math.hpp"
#include "oracles.hpp"

using namespace ordrisk;

namespace {

// Deterministic two-feature sample with overlapping classes, large enough for
// a stable interior maximum.
Dataset synthetic_data(int n = 400, std::uint64_t seed = 11) {
  Rng rng(seed);
  Dataset d;
  d.features.resize(n, 3);
  d.labels.resize(n);
  const double b0 = -0.4, b1 = 1.3, b2 = -0.8;
  for (int i = 0; i < n; ++i) {
    const double x1 = rng.normal();
    const double x2 = rng.normal() * 1.5 + 0.3;
    d.features(i, 0) = 1.0;
    d.features(i, 1) = x1;
    d.features(i, 2) = x2;
    const double eta = b0 + b1 * x1 + b2 * x2;
    d.labels[i] = rng.uniform() < logistic(eta) ? 1 : 0;
  }
  d.feature_names = {"intercept", "x1", "x2"};
  return d;
}

}  // namespace

TEST_CASE("predictions are probabilities and the likelihood matches them") {
  const Dataset d = synthetic_data(60);
  Eigen::VectorXd beta(3);
  beta << 0.2, -1.0, 0.5;
  const Eigen::VectorXd mu = lr_predict(d.features, beta);
  double ll = 0.0;
  for (int i = 0; i < d.n(); ++i) {
    CHECK(mu[i] > 0.0);
    CHECK(mu[i] < 1.0);
    ll += d.labels[i] == 1 ? std::log(mu[i]) : std::log1p(-mu[i]);
  }
  CHECK(lr_log_likelihood(d.features, d.labels, beta) ==
        doctest::Approx(ll).epsilon(1e-12));
  // Extreme linear predictors must not overflow the likelihood.
  Eigen::VectorXd wild(3);
  wild << 500.0, 300.0, -200.0;
  CHECK(std::isfinite(lr_log_likelihood(d.features, d.labels, wild)));
}

TEST_CASE("gradient matches finite differences of the likelihood") {
  const Dataset d = synthetic_data(80);
  Eigen::VectorXd beta(3);
  beta << -0.3, 0.7, 0.1;
  const Eigen::VectorXd g = lr_gradient(d.features, d.labels, beta);
  const Eigen::VectorXd fd = oracle::fd_gradient(
      [&](const Eigen::VectorXd& b) {
        return lr_log_likelihood(d.features, d.labels, b);
      },
      beta, 1e-6);
  for (int j = 0; j < 3; ++j) {
    CHECK(g[j] == doctest::Approx(fd[j]).epsilon(1e-6));
  }
}

TEST_CASE("hessian matches finite differences of the gradient") {
  const Dataset d = synthetic_data(80);
  Eigen::VectorXd beta(3);
  beta << 0.4, -0.2, 0.6;
  const Eigen::MatrixXd H = lr_hessian(d.features, beta);
  CHECK((H - H.transpose()).lpNorm<Eigen::Infinity>() < 1e-10);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd bp = beta, bm = beta;
    bp[j] += h;
    bm[j] -= h;
    const Eigen::VectorXd col =
        (lr_gradient(d.features, d.labels, bp) -
         lr_gradient(d.features, d.labels, bm)) /
        (2.0 * h);
    for (int i = 0; i < 3; ++i) {
      CHECK(H(i, j) == doctest::Approx(col[i]).epsilon(1e-5));
    }
  }
  // Negative semidefinite: no direction of positive curvature.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  CHECK(es.eigenvalues().maxCoeff() < 1e-10);
}

TEST_CASE("fitting lands on a stationary interior maximum") {
  const Dataset d = synthetic_data();
  const LogisticFit fit = fit_lr(d, {});
  CHECK(fit.converged);
  CHECK_FALSE(fit.separation_warning);
  CHECK(lr_gradient(d.features, d.labels, fit.beta)
            .lpNorm<Eigen::Infinity>() < 1e-8);
  // The fitted point beats scaled copies of itself.
  const double ll = fit.log_likelihood;
  CHECK(ll == doctest::Approx(lr_log_likelihood(d.features, d.labels,
                                                fit.beta)));
  CHECK(lr_log_likelihood(d.features, d.labels, 2.0 * fit.beta) < ll);
  CHECK(lr_log_likelihood(d.features, d.labels, 0.5 * fit.beta) < ll);
  // Coefficients land near the generating values at this sample size.
  CHECK(std::fabs(fit.beta[1] - 1.3) < 0.45);
  CHECK(std::fabs(fit.beta[2] + 0.8) < 0.3);
}

TEST_CASE("column rescaling moves coefficients inversely, likelihood fixed") {
  const Dataset d = synthetic_data(200, 5);
  Dataset scaled = d;
  scaled.features.col(2) *= 10.0;
  const LogisticFit a = fit_lr(d, {});
  const LogisticFit b = fit_lr(scaled, {});
  CHECK(a.log_likelihood == doctest::Approx(b.log_likelihood).epsilon(1e-9));
  CHECK(b.beta[2] == doctest::Approx(a.beta[2] / 10.0).epsilon(1e-6));
  CHECK(b.beta[1] == doctest::Approx(a.beta[1]).epsilon(1e-6));
}

TEST_CASE("rank-deficient designs are rejected with the column named") {
  Dataset d = synthetic_data(50);
  d.features.conservativeResize(50, 4);
  d.features.col(3) = d.features.col(1) + d.features.col(2);
  d.feature_names = {"intercept", "x1", "x2", "x1_plus_x2"};
  CHECK_THROWS_AS((void)fit_lr(d, {}), std::invalid_argument);
}

TEST_CASE("perfectly separated data raises the separation warning") {
  Dataset d;
  const int n = 40;
  d.features.resize(n, 2);
  d.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i - n / 2) * 0.25;
    d.features(i, 0) = 1.0;
    d.features(i, 1) = x;
    d.labels[i] = x > 0 ? 1 : 0;  // sign of x decides the class exactly
  }
  const LogisticFit fit = fit_lr(d, {});
  CHECK(fit.separation_warning);
  CHECK(fit.beta.allFinite());
}
