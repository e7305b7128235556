#include "ordrisk/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ordrisk/logistic.hpp"
#include "internal_parallel.hpp"

namespace ordrisk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_scored_labels(const std::vector<double>& scores,
                         const std::vector<int>& labels, const char* op) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument(std::string(op) +
                                ": scores and labels must have equal length");
  }
  if (scores.empty()) {
    throw std::invalid_argument(std::string(op) + ": scores must be nonempty");
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw std::invalid_argument(std::string(op) + ": scores must be finite");
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument(std::string(op) + ": labels must be 0 or 1");
    }
  }
}

// Group index of a score under right-closed intervals (tau_{i-1}, tau_i].
std::size_t group_of(const std::vector<double>& tau, double s) {
  return static_cast<std::size_t>(
      std::lower_bound(tau.begin(), tau.end(), s) - tau.begin());
}

struct SplitData {
  Dataset train;
  Eigen::MatrixXd test_X;
  std::vector<int> test_y;
};

SplitData materialize_split(const Dataset& data,
                            const std::vector<std::size_t>& order,
                            std::size_t n_train) {
  const Eigen::Index P = data.p();
  const std::size_t n_test = order.size() - n_train;
  SplitData s;
  s.train.features.resize(static_cast<Eigen::Index>(n_train), P);
  s.train.labels.resize(static_cast<Eigen::Index>(n_train));
  s.train.feature_names = data.feature_names;
  for (std::size_t i = 0; i < n_train; ++i) {
    s.train.features.row(static_cast<Eigen::Index>(i)) =
        data.features.row(static_cast<Eigen::Index>(order[i]));
    s.train.labels[static_cast<Eigen::Index>(i)] =
        data.labels[static_cast<Eigen::Index>(order[i])];
  }
  s.test_X.resize(static_cast<Eigen::Index>(n_test), P);
  s.test_y.resize(n_test);
  for (std::size_t i = 0; i < n_test; ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(order[n_train + i]);
    s.test_X.row(static_cast<Eigen::Index>(i)) = data.features.row(row);
    s.test_y[i] = data.labels[row];
  }
  return s;
}

}  // namespace

EmpiricalRisks empirical_interval_risk(const std::vector<double>& scores,
                                       const std::vector<int>& labels,
                                       const Breakpoints& tau) {
  check_scored_labels(scores, labels, "empirical_interval_risk");
  tau.validate();
  const std::size_t T = tau.groups();
  EmpiricalRisks out;
  out.count.assign(T, 0);
  out.positives.assign(T, 0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::size_t g = group_of(tau.tau, scores[i]);
    ++out.count[g];
    out.positives[g] += static_cast<std::size_t>(labels[i]);
  }
  out.rate.assign(T, kNaN);
  out.defined.assign(T, false);
  for (std::size_t g = 0; g < T; ++g) {
    if (out.count[g] > 0) {
      out.rate[g] = static_cast<double>(out.positives[g]) /
                    static_cast<double>(out.count[g]);
      out.defined[g] = true;
    }
  }
  return out;
}

double empirical_class_cdf(const std::vector<double>& scores,
                           const std::vector<int>& labels, int k, double t) {
  check_scored_labels(scores, labels, "empirical_class_cdf");
  if (k != 0 && k != 1) {
    throw std::invalid_argument("empirical_class_cdf: class must be 0 or 1");
  }
  std::size_t n_k = 0;
  std::size_t n_le = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != k) continue;
    ++n_k;
    if (scores[i] <= t) ++n_le;
  }
  if (n_k == 0) {
    throw std::invalid_argument(
        "empirical_class_cdf: requested class has no observations");
  }
  return static_cast<double>(n_le) / static_cast<double>(n_k);
}

ScoreSample simulate_gaussian_pair(const ProjectedGaussian& g, std::size_t n,
                                   std::uint64_t seed) {
  g.validate();
  if (n == 0) {
    throw std::invalid_argument("simulate_gaussian_pair: n must be positive");
  }
  Rng rng(seed);
  ScoreSample s;
  s.scores.resize(n);
  s.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = rng.uniform() < g.p ? 1 : 0;
    const double mean = label == 1 ? g.mu1_beta : g.mu0_beta;
    s.labels[i] = label;
    s.scores[i] = mean + g.sigma_beta * rng.normal();
  }
  return s;
}

void CvConfig::validate() const {
  if (!(holdout > 0.0 && holdout < 1.0)) {
    throw std::invalid_argument("CvConfig: holdout must lie in (0, 1)");
  }
  if (repeats < 1) {
    throw std::invalid_argument("CvConfig: repeats must be at least 1");
  }
  if (threads < 0) {
    throw std::invalid_argument("CvConfig: threads must be nonnegative");
  }
  solver.validate();
}

CvReport cross_validate(const Dataset& data, const RiskSpec& spec,
                        const PenaltyConfig& pen, const CvConfig& cfg) {
  data.validate();
  spec.validate();
  pen.validate();
  cfg.validate();
  const std::size_t N = static_cast<std::size_t>(data.n());
  const std::size_t T = spec.groups();
  std::size_t n_test = static_cast<std::size_t>(
      std::lround(cfg.holdout * static_cast<double>(N)));
  n_test = std::max<std::size_t>(1, std::min(n_test, N - 1));
  const std::size_t n_train = N - n_test;
  if (n_train < 4) {
    throw std::invalid_argument(
        "cross_validate: training split too small to estimate both classes");
  }

  const ToleranceConfig lr_cfg{1e-8, 1e-12, 200};
  SolverConfig org_cfg = cfg.solver;
  org_cfg.threads = 1;  // repeats are the parallel unit

  const auto run_one = [&](int r) -> CvRepeat {
    CvRepeat rec;
    rec.repeat = r;
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(r));
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    bool split_ok = false;
    for (int attempt = 0; attempt < 200 && !split_ok; ++attempt) {
      shuffle_indices(order, rng);
      std::size_t pos = 0;
      for (std::size_t i = 0; i < n_train; ++i) {
        pos += static_cast<std::size_t>(
            data.labels[static_cast<Eigen::Index>(order[i])]);
      }
      split_ok = pos >= 2 && (n_train - pos) >= 2;
    }
    if (!split_ok) {
      rec.failed = true;
      rec.failure_reason =
          "no training split with at least two observations per class";
      return rec;
    }
    try {
      const SplitData split = materialize_split(data, order, n_train);
      Eigen::VectorXd beta;
      Breakpoints tau;
      bool degenerate = false;
      if (cfg.method == FitMethod::lr) {
        const LogisticFit fit = fit_lr(split.train, lr_cfg);
        beta = fit.beta;
        const ProjectedGaussian proj =
            project(estimate_gaussian(split.train), beta, org_cfg.covariance);
        BreakpointSolution sol = solve_breakpoints(proj, spec, org_cfg.inner);
        tau = std::move(sol.tau);
        degenerate =
            T >= 3 && (tau.min_gap() / proj.sigma_beta) < org_cfg.min_gap;
      } else {
        SolverConfig rep_cfg = org_cfg;
        rep_cfg.seed =
            Rng::derive(cfg.seed, 0x9E3779B9u + static_cast<std::uint64_t>(r))
                .next_u64();
        const OrgResult res = fit_org(split.train, spec, pen, rep_cfg);
        beta = res.best.beta;
        tau = res.best.tau;
        degenerate = res.best.degenerate;
      }
      if (degenerate) {
        rec.failed = true;
        rec.failure_reason =
            "breakpoints collapsed below the degeneracy floor";
        return rec;
      }
      const Eigen::VectorXd s = split.test_X * beta;
      const std::vector<double> scores(s.data(), s.data() + s.size());
      const EmpiricalRisks emp =
          empirical_interval_risk(scores, split.test_y, tau);
      rec.rate = emp.rate;
      rec.defined = emp.defined;
      rec.count = emp.count;
      rec.positives = emp.positives;
      rec.ird_sq = 0.0;
      for (std::size_t g = 0; g < T; ++g) {
        if (!emp.defined[g]) continue;
        const double delta = emp.rate[g] - spec.r[g];
        rec.ird_sq += delta * delta;
      }
      rec.ird_euclid = std::sqrt(rec.ird_sq);
    } catch (const std::exception& e) {
      rec = CvRepeat{};
      rec.repeat = r;
      rec.failed = true;
      rec.failure_reason = e.what();
    }
    return rec;
  };

  CvReport report;
  report.repeats.resize(static_cast<std::size_t>(cfg.repeats));
  internal::parallel_for(cfg.repeats, cfg.threads, [&](int r) {
    report.repeats[static_cast<std::size_t>(r)] = run_one(r);
  });

  report.pooled_count.assign(T, 0);
  report.pooled_positives.assign(T, 0);
  double sum_sq = 0.0;
  double sum_euclid = 0.0;
  for (const CvRepeat& rec : report.repeats) {
    if (rec.failed) {
      ++report.n_failed;
      continue;
    }
    ++report.n_used;
    sum_sq += rec.ird_sq;
    sum_euclid += rec.ird_euclid;
    for (std::size_t g = 0; g < T; ++g) {
      report.pooled_count[g] += rec.count[g];
      report.pooled_positives[g] += rec.positives[g];
    }
  }
  report.mean_ird_sq = report.n_used > 0 ? sum_sq / report.n_used : kNaN;
  report.mean_ird_euclid =
      report.n_used > 0 ? sum_euclid / report.n_used : kNaN;
  report.pooled_rate.assign(T, kNaN);
  report.pooled_ird_sq = 0.0;
  for (std::size_t g = 0; g < T; ++g) {
    if (report.pooled_count[g] == 0) continue;
    report.pooled_rate[g] = static_cast<double>(report.pooled_positives[g]) /
                            static_cast<double>(report.pooled_count[g]);
    const double delta = report.pooled_rate[g] - spec.r[g];
    report.pooled_ird_sq += delta * delta;
  }
  report.pooled_ird_euclid = std::sqrt(report.pooled_ird_sq);
  return report;
}

}  // namespace ordrisk
