#include <doctest.h>

#include <cmath>
#include <vector>

#include "ordrisk/empirical.hpp"
#include "ordrisk/special_math.hpp"

using namespace ordrisk;

TEST_CASE("empirical interval rates honor the right-closed convention") {
  const std::vector<double> scores = {-1.0, 0.0, 0.5, 2.0};
  const std::vector<int> labels = {0, 1, 0, 1};
  Breakpoints tau;
  tau.tau = {0.0, 1.0};
  const EmpiricalRisks e = empirical_interval_risk(scores, labels, tau);
  REQUIRE(e.rate.size() == 3);
  // Score 0.0 sits in the FIRST group: intervals are (-inf,0], (0,1], (1,inf).
  CHECK(e.count[0] == 2);
  CHECK(e.count[1] == 1);
  CHECK(e.count[2] == 1);
  CHECK(e.positives[0] == 1);
  CHECK(e.rate[0] == 0.5);
  CHECK(e.rate[1] == 0.0);
  CHECK(e.rate[2] == 1.0);
  CHECK(e.defined[0]);
  CHECK(e.defined[1]);
  CHECK(e.defined[2]);
  CHECK(e.count[0] + e.count[1] + e.count[2] == scores.size());
}

TEST_CASE("empty groups are undefined rather than zero") {
  const std::vector<double> scores = {-5.0, -4.0};
  const std::vector<int> labels = {0, 1};
  Breakpoints tau;
  tau.tau = {0.0, 1.0};
  const EmpiricalRisks e = empirical_interval_risk(scores, labels, tau);
  CHECK(e.defined[0]);
  CHECK_FALSE(e.defined[1]);
  CHECK_FALSE(e.defined[2]);
  CHECK(std::isnan(e.rate[1]));
  CHECK(std::isnan(e.rate[2]));
  CHECK(e.count[1] == 0);
  CHECK_THROWS_AS(
      (void)empirical_interval_risk(scores, {0, 1, 1}, tau),
      std::invalid_argument);
}

TEST_CASE("empirical class CDF") {
  const std::vector<double> scores = {0.0, 1.0, 2.0, 3.0};
  const std::vector<int> labels = {0, 0, 1, 1};
  CHECK(empirical_class_cdf(scores, labels, 0, 0.5) == 0.5);
  CHECK(empirical_class_cdf(scores, labels, 0, 1.0) == 1.0);  // <= t counts
  CHECK(empirical_class_cdf(scores, labels, 1, 1.0) == 0.0);
  CHECK(empirical_class_cdf(scores, labels, 1, 2.5) == 0.5);
  CHECK_THROWS_AS((void)empirical_class_cdf(scores, labels, 2, 0.0),
                  std::invalid_argument);
}

TEST_CASE("empirical CDF converges to the model CDF") {
  // Glivenko-Cantelli at the 99.99% Kolmogorov band: sup |F_n - F| over a
  // grid stays below 1.63/sqrt(n) for this fixed seed.
  const ProjectedGaussian g{0.0, 1.0, 1.0, 0.4};
  const std::size_t n = 10000;
  const ScoreSample s = simulate_gaussian_pair(g, n, 99);
  std::size_t n0 = 0;
  for (int y : s.labels) n0 += y == 0 ? 1 : 0;
  const double band0 = 1.63 / std::sqrt(static_cast<double>(n0));
  double worst = 0.0;
  for (double t = -3.0; t <= 3.0; t += 0.05) {
    const double fn = empirical_class_cdf(s.scores, s.labels, 0, t);
    worst = std::max(worst, std::fabs(fn - std_normal_cdf(t)));
  }
  CHECK(worst < band0);
}

TEST_CASE("simulation is seed-deterministic with the right moments") {
  const ProjectedGaussian g{-1.0, 2.0, 1.5, 0.35};
  const ScoreSample a = simulate_gaussian_pair(g, 20000, 7);
  const ScoreSample b = simulate_gaussian_pair(g, 20000, 7);
  const ScoreSample c = simulate_gaussian_pair(g, 20000, 8);
  CHECK(a.scores == b.scores);
  CHECK(a.labels == b.labels);
  CHECK(a.scores != c.scores);

  double n1 = 0, sum1 = 0, sum0 = 0, sq0 = 0;
  for (std::size_t i = 0; i < a.scores.size(); ++i) {
    if (a.labels[i] == 1) {
      n1 += 1;
      sum1 += a.scores[i];
    } else {
      sum0 += a.scores[i];
      sq0 += a.scores[i] * a.scores[i];
    }
  }
  const double n0 = static_cast<double>(a.scores.size()) - n1;
  CHECK(n1 / a.scores.size() == doctest::Approx(0.35).epsilon(0.05));
  CHECK(sum1 / n1 == doctest::Approx(2.0).epsilon(0.03));
  CHECK(sum0 / n0 == doctest::Approx(-1.0).epsilon(0.05));
  const double var0 = sq0 / n0 - (sum0 / n0) * (sum0 / n0);
  CHECK(std::sqrt(var0) == doctest::Approx(1.5).epsilon(0.03));
}

namespace {

Dataset cv_dataset(int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  d.features.resize(n, 2);
  d.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const bool one = rng.uniform() < 0.4;
    d.features(i, 0) = 1.0;
    d.features(i, 1) = rng.normal() + (one ? 1.6 : 0.0);
    d.labels[i] = one ? 1 : 0;
  }
  d.feature_names = {"intercept", "x"};
  return d;
}

}  // namespace

TEST_CASE("repeated-holdout validation of the unconstrained fit") {
  const Dataset d = cv_dataset(400, 31);
  RiskSpec spec;
  spec.r = {0.1, 0.5, 0.9};
  spec.norm = IrdNorm::squared_euclidean;
  PenaltyConfig pen;
  CvConfig cfg;
  cfg.repeats = 40;
  cfg.holdout = 0.1;
  cfg.seed = 5;
  cfg.method = FitMethod::lr;
  const CvReport rep = cross_validate(d, spec, pen, cfg);

  CHECK(rep.n_used + rep.n_failed == cfg.repeats);
  CHECK(rep.n_used > 0);
  REQUIRE(rep.repeats.size() == static_cast<std::size_t>(cfg.repeats));

  // Every non-failed repeat distributes exactly the holdout across groups.
  const std::size_t n_test = 40;  // 0.1 * 400
  std::vector<std::size_t> pooled(spec.groups(), 0);
  std::vector<std::size_t> pooled_pos(spec.groups(), 0);
  for (const CvRepeat& r : rep.repeats) {
    if (r.failed) continue;
    std::size_t total = 0;
    for (std::size_t gi = 0; gi < spec.groups(); ++gi) {
      total += r.count[gi];
      pooled[gi] += r.count[gi];
      pooled_pos[gi] += r.positives[gi];
      if (r.defined[gi]) {
        CHECK(r.rate[gi] ==
              doctest::Approx(static_cast<double>(r.positives[gi]) /
                              r.count[gi]));
      } else {
        CHECK(r.count[gi] == 0);
      }
    }
    CHECK(total == n_test);
  }
  for (std::size_t gi = 0; gi < spec.groups(); ++gi) {
    CHECK(rep.pooled_count[gi] == pooled[gi]);
    CHECK(rep.pooled_positives[gi] == pooled_pos[gi]);
    if (pooled[gi] > 0) {
      CHECK(rep.pooled_rate[gi] ==
            doctest::Approx(static_cast<double>(pooled_pos[gi]) / pooled[gi]));
    }
  }
  CHECK(rep.pooled_ird_euclid ==
        doctest::Approx(std::sqrt(rep.pooled_ird_sq)).epsilon(1e-12));

  // Deterministic in the seed and in the thread count.
  const CvReport rep2 = cross_validate(d, spec, pen, cfg);
  CHECK(rep2.pooled_ird_sq == rep.pooled_ird_sq);
  CHECK(rep2.mean_ird_sq == rep.mean_ird_sq);
  CHECK(rep2.n_failed == rep.n_failed);
  CvConfig two = cfg;
  two.threads = 2;
  const CvReport rep3 = cross_validate(d, spec, pen, two);
  CHECK(rep3.pooled_ird_sq == rep.pooled_ird_sq);
  CHECK(rep3.mean_ird_sq == rep.mean_ird_sq);
}

TEST_CASE("repeated-holdout validation of the constrained fit") {
  const Dataset d = cv_dataset(220, 13);
  RiskSpec spec;
  spec.r = {0.1, 0.5, 0.9};
  spec.norm = IrdNorm::squared_euclidean;
  PenaltyConfig pen;
  CvConfig cfg;
  cfg.repeats = 3;
  cfg.holdout = 0.15;
  cfg.seed = 2;
  cfg.method = FitMethod::org;
  cfg.solver.n_starts = 4;
  cfg.solver.outer.max_iter = 150;
  const CvReport rep = cross_validate(d, spec, pen, cfg);
  CHECK(rep.n_used + rep.n_failed == cfg.repeats);
  CHECK(rep.repeats.size() == 3);
  for (const CvRepeat& r : rep.repeats) {
    if (!r.failed) {
      std::size_t total = 0;
      for (std::size_t c : r.count) total += c;
      CHECK(total == 33);  // round(0.15 * 220)
    } else {
      CHECK_FALSE(r.failure_reason.empty());
    }
  }
}

TEST_CASE("validation configuration errors") {
  const Dataset d = cv_dataset(50, 1);
  RiskSpec spec;
  spec.r = {0.2, 0.8};
  PenaltyConfig pen;
  CvConfig cfg;
  cfg.holdout = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = CvConfig{};
  cfg.holdout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = CvConfig{};
  cfg.repeats = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = CvConfig{};
  cfg.threads = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = CvConfig{};
  CHECK_THROWS_AS((void)cross_validate(Dataset{}, spec, pen, cfg),
                  std::invalid_argument);
}
