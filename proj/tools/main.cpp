// Command-line front end: fits, breakpoint solving, feasibility reports,
// cross-validation, figure data and synthetic sampling, with JSON + text +
// CSV artifacts written to an output directory. Outputs are deterministic in
// the seed: no timestamps, shortest round-trip number formatting.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ordrisk/csv_io.hpp"
#include "ordrisk/data_model.hpp"
#include "ordrisk/empirical.hpp"
#include "ordrisk/logistic.hpp"
#include "ordrisk/org_solver.hpp"
#include "ordrisk/risk_core.hpp"
#include "ordrisk/special_math.hpp"

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace ordrisk;

namespace {

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" +
                                  item + "' as a number");
    }
  }
  if (out.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty list");
  }
  return out;
}

// Options shared by the data-driven subcommands.
struct DataOpts {
  std::string input;
  std::string label_col = "diagnosis";
  std::string positive = "M";
  std::vector<std::string> features;  // "column" or "column:transform"
};

void add_data_opts(CLI::App* cmd, DataOpts& d, bool required = true) {
  auto* opt = cmd->add_option("--input", d.input, "input CSV file");
  if (required) opt->required();
  cmd->add_option("--label-col", d.label_col, "label column name");
  cmd->add_option("--positive", d.positive, "token marking the positive class");
  cmd->add_option("--features", d.features,
                  "feature column as name or name:transform (identity|log); "
                  "repeatable; default: the worst-block case-study set");
}

LoadedDataset load_from_opts(const DataOpts& d) {
  LoadConfig cfg;
  cfg.label_column = d.label_col;
  cfg.positive_token = d.positive;
  if (d.features.empty()) {
    cfg.features = wdbc_default_features();
  } else {
    for (const std::string& f : d.features) {
      const std::size_t colon = f.rfind(':');
      FeatureSpec spec;
      if (colon == std::string::npos) {
        spec.column = f;
      } else {
        spec.column = f.substr(0, colon);
        spec.transform = parse_transform(f.substr(colon + 1));
      }
      cfg.features.push_back(spec);
    }
  }
  return load_csv(d.input, cfg);
}

struct SpecOpts {
  std::string r = "0.1,0.5,0.9";
  double epsilon = 1e-7;
  std::string norm = "euclidean";
};

void add_spec_opts(CLI::App* cmd, SpecOpts& s) {
  cmd->add_option("--r", s.r, "target risk vector, comma separated");
  cmd->add_option("--epsilon", s.epsilon, "feasibility tolerance on the IRD");
  cmd->add_option("--norm", s.norm,
                  "IRD norm: euclidean|squared_euclidean|max_abs");
}

RiskSpec make_spec(const SpecOpts& s) {
  RiskSpec spec;
  spec.r = parse_double_list(s.r, "--r");
  spec.epsilon = s.epsilon;
  spec.norm = parse_ird_norm(s.norm);
  spec.validate();
  return spec;
}

struct ModelOpts {
  double mu0 = 0.0;
  double mu1 = 1.0;
  double sigma = 1.0;
  double p = 0.5;
  bool given = false;
};

void add_model_opts(CLI::App* cmd, ModelOpts& m) {
  cmd->add_option("--mu0", m.mu0, "class-0 score mean")->each([&m](const std::string&) {
    m.given = true;
  });
  cmd->add_option("--mu1", m.mu1, "class-1 score mean")->each([&m](const std::string&) {
    m.given = true;
  });
  cmd->add_option("--sigma", m.sigma, "common score standard deviation")
      ->each([&m](const std::string&) { m.given = true; });
  cmd->add_option("--p", m.p, "class-1 prior")->each([&m](const std::string&) {
    m.given = true;
  });
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << content;
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ordered_json json_spec(const RiskSpec& spec) {
  return ordered_json{{"r", spec.r},
                      {"epsilon", spec.epsilon},
                      {"norm", to_string(spec.norm)}};
}

ordered_json json_drops(const DropReport& d) {
  ordered_json cols = ordered_json::object();
  for (const auto& [name, count] : d.dropped_by_column) cols[name] = count;
  return ordered_json{{"rows_parsed", d.rows_parsed},
                      {"rows_kept", d.rows_kept},
                      {"rows_dropped", d.rows_dropped},
                      {"dropped_by_column", cols}};
}

ordered_json json_coefficients(const std::vector<std::string>& names,
                               const Eigen::VectorXd& beta) {
  ordered_json out = ordered_json::object();
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    out[names[static_cast<std::size_t>(j)]] = beta[j];
  }
  return out;
}

ordered_json json_assessment(const RiskAssessment& a) {
  return ordered_json{{"risks", a.R},
                      {"interval_odds", a.nu},
                      {"ird", a.ird},
                      {"feasible", a.feasible}};
}

ordered_json json_model(const ProjectedGaussian& g) {
  return ordered_json{{"mu0", g.mu0_beta},
                      {"mu1", g.mu1_beta},
                      {"sigma", g.sigma_beta},
                      {"p", g.p},
                      {"separation", g.separation()}};
}

ordered_json json_solution(const BreakpointSolution& sol) {
  ordered_json j{{"tau", sol.tau.tau},
                 {"assessment", json_assessment(sol.assessment)},
                 {"refined", sol.refined}};
  if (sol.sequential_infeasibility) {
    const InfeasibleStep& s = *sol.sequential_infeasibility;
    j["sequential_infeasibility"] = ordered_json{
        {"step", s.step},
        {"target", s.target},
        {"attainable_inf", s.attainable_inf},
        {"attainable_sup", s.attainable_sup}};
  } else {
    j["sequential_infeasibility"] = nullptr;
  }
  return j;
}

void append_group_table(std::ostringstream& os, const RiskSpec& spec,
                        const std::vector<double>& R,
                        const std::vector<double>& tau) {
  os << "  group    target      fitted      breakpoint\n";
  for (std::size_t i = 0; i < spec.r.size(); ++i) {
    os << "  " << (i + 1) << "        " << fixed6(spec.r[i]) << "    "
       << fixed6(R[i]) << "    ";
    os << (i < tau.size() ? fixed6(tau[i]) : std::string("+inf")) << "\n";
  }
}

void emit(const fs::path& out_dir, const ordered_json& result,
          const std::string& report, const std::string& format) {
  write_text_file(out_dir / "result.json", result.dump(2) + "\n");
  write_text_file(out_dir / "report.txt", report);
  if (format == "json") {
    std::cout << result.dump(2) << "\n";
  } else {
    std::cout << report;
  }
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

int run_fit_lr(const DataOpts& data_opts, const std::string& out_dir,
               const std::string& format) {
  const LoadedDataset loaded = load_from_opts(data_opts);
  const ToleranceConfig cfg{1e-8, 1e-12, 200};
  const LogisticFit fit = fit_lr(loaded.data, cfg);
  const GaussianEstimates est = estimate_gaussian(loaded.data);
  const ProjectedGaussian proj = project(est, fit.beta);

  ordered_json result{{"command", "fit-lr"},
                      {"input", data_opts.input},
                      {"load", json_drops(loaded.drops)},
                      {"coefficients",
                       json_coefficients(loaded.data.feature_names, fit.beta)},
                      {"log_likelihood", fit.log_likelihood},
                      {"converged", fit.converged},
                      {"iterations", fit.iterations},
                      {"separation_warning", fit.separation_warning},
                      {"projected_model", json_model(proj)}};

  std::ostringstream os;
  os << "maximum-likelihood logistic fit\n";
  os << "  input:           " << data_opts.input << " ("
     << loaded.drops.rows_kept << " rows kept, " << loaded.drops.rows_dropped
     << " dropped)\n";
  os << "  log-likelihood:  " << fixed6(fit.log_likelihood) << "\n";
  os << "  converged:       " << (fit.converged ? "yes" : "no") << " ("
     << fit.iterations << " iterations)\n";
  if (fit.separation_warning) os << "  warning: separation suspected\n";
  os << "  coefficients:\n";
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    os << "    " << loaded.data.feature_names[static_cast<std::size_t>(j)]
       << " = " << format_double(fit.beta[j]) << "\n";
  }
  os << "  projected scores: mu0 = " << fixed6(proj.mu0_beta)
     << ", mu1 = " << fixed6(proj.mu1_beta)
     << ", sigma = " << fixed6(proj.sigma_beta)
     << ", p = " << fixed6(proj.p) << "\n";

  const fs::path dir = prepare_out_dir(out_dir);
  std::ostringstream csv;
  csv << "feature,coefficient\n";
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    csv << loaded.data.feature_names[static_cast<std::size_t>(j)] << ","
        << format_double(fit.beta[j]) << "\n";
  }
  write_text_file(dir / "coefficients.csv", csv.str());
  emit(dir, result, os.str(), format);
  return 0;
}

ProjectedGaussian model_from_opts(const DataOpts& data_opts,
                                  const ModelOpts& model_opts,
                                  ordered_json* provenance) {
  if (!data_opts.input.empty()) {
    const LoadedDataset loaded = load_from_opts(data_opts);
    const ToleranceConfig cfg{1e-8, 1e-12, 200};
    const LogisticFit fit = fit_lr(loaded.data, cfg);
    const ProjectedGaussian proj =
        project(estimate_gaussian(loaded.data), fit.beta);
    if (provenance) {
      (*provenance)["input"] = data_opts.input;
      (*provenance)["load"] = json_drops(loaded.drops);
      (*provenance)["coefficients"] =
          json_coefficients(loaded.data.feature_names, fit.beta);
      (*provenance)["log_likelihood"] = fit.log_likelihood;
    }
    return proj;
  }
  if (!model_opts.given) {
    throw std::invalid_argument(
        "either --input or an explicit model (--mu0 --mu1 --sigma --p) is "
        "required");
  }
  ProjectedGaussian g;
  g.mu0_beta = model_opts.mu0;
  g.mu1_beta = model_opts.mu1;
  g.sigma_beta = model_opts.sigma;
  g.p = model_opts.p;
  g.validate();
  return g;
}

int run_breakpoints(const DataOpts& data_opts, const ModelOpts& model_opts,
                    const SpecOpts& spec_opts, const std::string& out_dir,
                    const std::string& format) {
  const RiskSpec spec = make_spec(spec_opts);
  ordered_json result{{"command", "breakpoints"}};
  const ProjectedGaussian proj = model_from_opts(data_opts, model_opts, &result);
  const ToleranceConfig cfg{};
  const BreakpointSolution sol = solve_breakpoints(proj, spec, cfg);

  result["spec"] = json_spec(spec);
  result["projected_model"] = json_model(proj);
  result["solution"] = json_solution(sol);

  std::ostringstream os;
  os << "breakpoint solution\n";
  os << "  model: mu0 = " << fixed6(proj.mu0_beta)
     << ", mu1 = " << fixed6(proj.mu1_beta)
     << ", sigma = " << fixed6(proj.sigma_beta) << ", p = " << fixed6(proj.p)
     << "\n";
  os << "  norm:  " << to_string(spec.norm)
     << ", epsilon = " << format_double(spec.epsilon) << "\n";
  append_group_table(os, spec, sol.assessment.R, sol.tau.tau);
  os << "  ird:       " << format_double(sol.assessment.ird) << "\n";
  os << "  feasible:  " << (sol.assessment.feasible ? "yes" : "no") << "\n";
  os << "  refined:   " << (sol.refined ? "yes" : "no") << "\n";
  if (sol.sequential_infeasibility) {
    const InfeasibleStep& s = *sol.sequential_infeasibility;
    os << "  exact matching failed at group " << s.step << ": target "
       << fixed6(s.target) << " outside attainable ("
       << fixed6(s.attainable_inf) << ", " << fixed6(s.attainable_sup)
       << ")\n";
  }

  const fs::path dir = prepare_out_dir(out_dir);
  std::ostringstream csv;
  csv << "group,target,fitted,breakpoint\n";
  for (std::size_t i = 0; i < spec.r.size(); ++i) {
    csv << (i + 1) << "," << format_double(spec.r[i]) << ","
        << format_double(sol.assessment.R[i]) << ",";
    if (i < sol.tau.tau.size()) csv << format_double(sol.tau.tau[i]);
    csv << "\n";
  }
  write_text_file(dir / "breakpoints.csv", csv.str());
  emit(dir, result, os.str(), format);
  return 0;
}

int run_feasibility(const DataOpts& data_opts, const ModelOpts& model_opts,
                    const SpecOpts& spec_opts, const std::string& tau_str,
                    const std::string& out_dir, const std::string& format) {
  const RiskSpec spec = make_spec(spec_opts);
  ordered_json result{{"command", "feasibility"}};
  const ProjectedGaussian proj = model_from_opts(data_opts, model_opts, &result);
  Breakpoints tau;
  tau.tau = parse_double_list(tau_str, "--tau");
  tau.validate();
  const FeasibilityReport rep = feasibility_bounds(proj, tau, spec);

  ordered_json checks = ordered_json::array();
  for (const BoundaryCheck& c : rep.boundaries) {
    checks.push_back(ordered_json{{"group", c.group},
                                  {"posterior_limit", c.lhs},
                                  {"target", c.rhs},
                                  {"likelihood_ratio", c.lr_lhs},
                                  {"likelihood_ratio_bound", c.lr_rhs},
                                  {"satisfied", c.satisfied}});
  }
  result["spec"] = json_spec(spec);
  result["projected_model"] = json_model(proj);
  result["tau"] = tau.tau;
  result["boundaries"] = checks;
  result["first_violation"] =
      rep.first_violation ? ordered_json(*rep.first_violation) : ordered_json(nullptr);

  std::ostringstream os;
  os << "feasibility bounds\n";
  os << "  boundary   posterior-limit   target      satisfied\n";
  for (const BoundaryCheck& c : rep.boundaries) {
    os << "  " << c.group << "          " << fixed6(c.lhs) << "          "
       << fixed6(c.rhs) << "    " << (c.satisfied ? "yes" : "NO") << "\n";
  }
  if (rep.first_violation) {
    os << "  first violation at group " << *rep.first_violation << "\n";
  } else {
    os << "  all necessary conditions hold\n";
  }
  emit(prepare_out_dir(out_dir), result, os.str(), format);
  return 0;
}

int run_fit_org(const DataOpts& data_opts, const SpecOpts& spec_opts,
                double gamma, int starts, std::uint64_t seed, double min_gap,
                int threads, const std::string& out_dir,
                const std::string& format) {
  const LoadedDataset loaded = load_from_opts(data_opts);
  const RiskSpec spec = make_spec(spec_opts);
  PenaltyConfig pen;
  pen.gamma = gamma;
  SolverConfig cfg;
  cfg.n_starts = starts;
  cfg.seed = seed;
  cfg.epsilon = spec.epsilon;
  cfg.min_gap = min_gap;
  cfg.threads = threads;
  const OrgResult res = fit_org(loaded.data, spec, pen, cfg);
  const OrgSolution& best = res.best;

  ordered_json result{
      {"command", "fit-org"},
      {"input", data_opts.input},
      {"load", json_drops(loaded.drops)},
      {"spec", json_spec(spec)},
      {"gamma", gamma},
      {"starts", starts},
      {"seed", seed},
      {"coefficients",
       json_coefficients(loaded.data.feature_names, best.beta)},
      {"log_likelihood", best.log_likelihood},
      {"penalty", best.penalty_value},
      {"objective", best.objective},
      {"tau", best.tau.tau},
      {"assessment", json_assessment(best.assessment)},
      {"feasible", best.feasible},
      {"degenerate", best.degenerate},
      {"any_feasible", res.any_feasible},
      {"rounds", res.rounds_used},
      {"best_start", best.start_index}};

  std::ostringstream os;
  os << "risk-constrained fit\n";
  os << "  input:           " << data_opts.input << " ("
     << loaded.drops.rows_kept << " rows kept, " << loaded.drops.rows_dropped
     << " dropped)\n";
  os << "  targets:         ";
  for (double r : spec.r) os << fixed6(r) << " ";
  os << " (norm: " << to_string(spec.norm)
     << ", epsilon = " << format_double(spec.epsilon) << ")\n";
  os << "  gamma = " << format_double(gamma) << ", starts = " << starts
     << ", seed = " << seed << "\n";
  os << "  log-likelihood:  " << fixed6(best.log_likelihood) << "\n";
  os << "  penalty:         " << format_double(best.penalty_value) << "\n";
  os << "  objective:       " << fixed6(best.objective) << "\n";
  os << "  coefficients:\n";
  for (Eigen::Index j = 0; j < best.beta.size(); ++j) {
    os << "    " << loaded.data.feature_names[static_cast<std::size_t>(j)]
       << " = " << format_double(best.beta[j]) << "\n";
  }
  append_group_table(os, spec, best.assessment.R, best.tau.tau);
  os << "  ird:        " << format_double(best.assessment.ird) << "\n";
  os << "  feasible:   " << (best.feasible ? "yes" : "no") << "\n";
  os << "  degenerate: " << (best.degenerate ? "yes" : "no") << "\n";
  os << "  rounds:     " << res.rounds_used << " (best start "
     << best.start_index << ")\n";

  const fs::path dir = prepare_out_dir(out_dir);
  std::ostringstream csv;
  csv << "start,objective,log_likelihood,penalty,ird,feasible,degenerate\n";
  for (const StartSummary& s : res.starts) {
    csv << s.start_index << "," << format_double(s.objective) << ","
        << format_double(s.log_likelihood) << ","
        << format_double(s.penalty_value) << "," << format_double(s.ird_value)
        << "," << (s.feasible ? 1 : 0) << "," << (s.degenerate ? 1 : 0)
        << "\n";
  }
  write_text_file(dir / "starts.csv", csv.str());
  emit(dir, result, os.str(), format);
  return 0;
}

int run_crossval(const DataOpts& data_opts, const SpecOpts& spec_opts,
                 const std::string& method, double gamma, int starts,
                 double holdout, int repeats, std::uint64_t seed, int threads,
                 const std::string& out_dir, const std::string& format) {
  const LoadedDataset loaded = load_from_opts(data_opts);
  const RiskSpec spec = make_spec(spec_opts);
  PenaltyConfig pen;
  pen.gamma = gamma;
  CvConfig cfg;
  cfg.holdout = holdout;
  cfg.repeats = repeats;
  cfg.seed = seed;
  cfg.threads = threads;
  if (method == "lr") {
    cfg.method = FitMethod::lr;
  } else if (method == "org") {
    cfg.method = FitMethod::org;
  } else {
    throw std::invalid_argument("--method must be lr or org");
  }
  cfg.solver.n_starts = starts;
  cfg.solver.epsilon = spec.epsilon;
  const CvReport rep = cross_validate(loaded.data, spec, pen, cfg);

  ordered_json pooled_rate = ordered_json::array();
  for (double v : rep.pooled_rate) {
    pooled_rate.push_back(std::isnan(v) ? ordered_json(nullptr) : ordered_json(v));
  }
  ordered_json result{{"command", "crossval"},
                      {"input", data_opts.input},
                      {"load", json_drops(loaded.drops)},
                      {"spec", json_spec(spec)},
                      {"method", method},
                      {"holdout", holdout},
                      {"repeats", repeats},
                      {"seed", seed},
                      {"pooled_count", rep.pooled_count},
                      {"pooled_positives", rep.pooled_positives},
                      {"pooled_rate", pooled_rate},
                      {"pooled_ird_sq", rep.pooled_ird_sq},
                      {"pooled_ird_euclid", rep.pooled_ird_euclid},
                      {"mean_ird_sq", rep.mean_ird_sq},
                      {"mean_ird_euclid", rep.mean_ird_euclid},
                      {"repeats_used", rep.n_used},
                      {"repeats_failed", rep.n_failed}};

  std::ostringstream os;
  os << "repeated holdout cross-validation (" << method << ")\n";
  os << "  input:    " << data_opts.input << " (" << loaded.drops.rows_kept
     << " rows kept)\n";
  os << "  repeats:  " << repeats << " x " << fixed6(holdout)
     << " holdout, seed " << seed << "\n";
  os << "  used/failed: " << rep.n_used << "/" << rep.n_failed << "\n";
  os << "  group   target     pooled-rate   pooled-n\n";
  for (std::size_t g = 0; g < spec.r.size(); ++g) {
    os << "  " << (g + 1) << "       " << fixed6(spec.r[g]) << "   ";
    os << (rep.pooled_count[g] > 0 ? fixed6(rep.pooled_rate[g])
                                   : std::string("undefined"));
    os << "      " << rep.pooled_count[g] << "\n";
  }
  os << "  pooled ird (squared):   " << format_double(rep.pooled_ird_sq) << "\n";
  os << "  pooled ird (euclidean): " << format_double(rep.pooled_ird_euclid)
     << "\n";
  os << "  mean ird (squared):     " << format_double(rep.mean_ird_sq) << "\n";

  const fs::path dir = prepare_out_dir(out_dir);
  std::ostringstream csv;
  csv << "repeat,failed,reason";
  for (std::size_t g = 0; g < spec.r.size(); ++g) {
    csv << ",count_" << (g + 1) << ",rate_" << (g + 1);
  }
  csv << ",ird_sq,ird_euclid\n";
  for (const CvRepeat& r : rep.repeats) {
    csv << r.repeat << "," << (r.failed ? 1 : 0) << ","
        << (r.failed ? r.failure_reason : "");
    for (std::size_t g = 0; g < spec.r.size(); ++g) {
      if (r.failed) {
        csv << ",,";
      } else {
        csv << "," << r.count[g] << ",";
        if (r.defined[g]) csv << format_double(r.rate[g]);
      }
    }
    if (r.failed) {
      csv << ",,\n";
    } else {
      csv << "," << format_double(r.ird_sq) << ","
          << format_double(r.ird_euclid) << "\n";
    }
  }
  write_text_file(dir / "repeats.csv", csv.str());
  emit(dir, result, os.str(), format);
  return 0;
}

int run_figure_data(double mu0, double mu1, double p,
                    const std::string& pairs_str, double grid_lo,
                    double grid_hi, double grid_step,
                    const std::string& out_dir, const std::string& format) {
  if (!(grid_step > 0.0) || !(grid_hi > grid_lo)) {
    throw std::invalid_argument("figure-data: invalid grid");
  }
  const fs::path dir = prepare_out_dir(out_dir);
  ordered_json curves = ordered_json::array();

  std::stringstream ss(pairs_str);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    const std::size_t colon = pair.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument(
          "figure-data: --pairs entries must look like sigma1:sigma0");
    }
    const double s1 = std::stod(pair.substr(0, colon));
    const double s0 = std::stod(pair.substr(colon + 1));
    std::ostringstream csv;
    csv << "x,q\n";
    std::ostringstream name;
    name << "q_curve_" << s1 << "_" << s0 << ".csv";
    for (double x = grid_lo; x <= grid_hi + 1e-12; x += grid_step) {
      csv << format_double(x) << ","
          << format_double(left_ray_risk(mu0, s0, mu1, s1, p, x)) << "\n";
    }
    write_text_file(dir / name.str(), csv.str());
    curves.push_back(ordered_json{{"sigma1", s1},
                                  {"sigma0", s0},
                                  {"file", name.str()}});
  }

  // Interval-collapse demonstration on the symmetric construction.
  std::vector<double> t_grid;
  for (int t = 1; t <= 8; ++t) t_grid.push_back(static_cast<double>(t));
  const auto demo = degenerate_demo(1.0, 1.0, t_grid);
  std::ostringstream demo_csv;
  demo_csv << "t,risk_low,risk_mid,risk_high,ird\n";
  for (const DegenerateDemoRow& row : demo) {
    demo_csv << format_double(row.t) << "," << format_double(row.risk_low)
             << "," << format_double(row.risk_mid) << ","
             << format_double(row.risk_high) << ","
             << format_double(row.ird_value) << "\n";
  }
  write_text_file(dir / "degenerate_demo.csv", demo_csv.str());

  ordered_json result{{"command", "figure-data"},
                      {"mu0", mu0},
                      {"mu1", mu1},
                      {"p", p},
                      {"grid", ordered_json{{"lo", grid_lo},
                                            {"hi", grid_hi},
                                            {"step", grid_step}}},
                      {"curves", curves},
                      {"degenerate_demo", "degenerate_demo.csv"}};
  std::ostringstream os;
  os << "figure data written: " << curves.size()
     << " left-ray risk curves and the interval-collapse table\n";
  emit(dir, result, os.str(), format);
  return 0;
}

int run_simulate(const ModelOpts& model_opts, std::size_t n, std::uint64_t seed,
                 const std::string& out_dir, const std::string& format) {
  ProjectedGaussian g;
  g.mu0_beta = model_opts.mu0;
  g.mu1_beta = model_opts.mu1;
  g.sigma_beta = model_opts.sigma;
  g.p = model_opts.p;
  g.validate();
  const ScoreSample s = simulate_gaussian_pair(g, n, seed);
  const fs::path dir = prepare_out_dir(out_dir);
  std::ostringstream csv;
  csv << "score,label\n";
  std::size_t positives = 0;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    csv << format_double(s.scores[i]) << "," << s.labels[i] << "\n";
    positives += static_cast<std::size_t>(s.labels[i]);
  }
  write_text_file(dir / "samples.csv", csv.str());
  ordered_json result{{"command", "simulate"},
                      {"model", json_model(g)},
                      {"n", n},
                      {"seed", seed},
                      {"positives", positives},
                      {"file", "samples.csv"}};
  std::ostringstream os;
  os << "simulated " << n << " scores (" << positives
     << " positive) into samples.csv\n";
  emit(dir, result, os.str(), format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-class risk models with interval risk matching: fitting, breakpoint "
      "solving, feasibility checks and cross-validation"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  std::string format = "text";
  app.add_option("--out-dir", out_dir, "directory for result files")
      ->capture_default_str();
  app.add_option("--format", format, "stdout format: text|json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  DataOpts lr_data;
  auto* cmd_lr = app.add_subcommand("fit-lr", "maximum-likelihood logistic fit");
  add_data_opts(cmd_lr, lr_data);

  DataOpts bp_data;
  ModelOpts bp_model;
  SpecOpts bp_spec;
  auto* cmd_bp = app.add_subcommand(
      "breakpoints", "solve score breakpoints against the target risks");
  add_data_opts(cmd_bp, bp_data, /*required=*/false);
  add_model_opts(cmd_bp, bp_model);
  add_spec_opts(cmd_bp, bp_spec);

  DataOpts fs_data;
  ModelOpts fs_model;
  SpecOpts fs_spec;
  std::string fs_tau;
  auto* cmd_fs = app.add_subcommand(
      "feasibility", "necessary-condition checks at given breakpoints");
  add_data_opts(cmd_fs, fs_data, /*required=*/false);
  add_model_opts(cmd_fs, fs_model);
  add_spec_opts(cmd_fs, fs_spec);
  cmd_fs->add_option("--tau", fs_tau, "breakpoints, comma separated")->required();

  DataOpts org_data;
  SpecOpts org_spec;
  double org_gamma = 10.0;
  int org_starts = 200;
  std::uint64_t org_seed = 1;
  double org_min_gap = 1e-4;
  int org_threads = 0;
  auto* cmd_org = app.add_subcommand("fit-org", "risk-constrained fit");
  add_data_opts(cmd_org, org_data);
  add_spec_opts(cmd_org, org_spec);
  cmd_org->add_option("--gamma", org_gamma, "gap-collapse penalty weight");
  cmd_org->add_option("--starts", org_starts, "number of optimizer starts");
  cmd_org->add_option("--seed", org_seed, "random seed");
  cmd_org->add_option("--min-gap", org_min_gap,
                      "standardized interior-gap degeneracy floor");
  cmd_org->add_option("--threads", org_threads, "worker threads (0 = auto)");

  DataOpts cv_data;
  SpecOpts cv_spec;
  std::string cv_method = "lr";
  double cv_gamma = 10.0;
  int cv_starts = 8;
  double cv_holdout = 0.1;
  int cv_repeats = 500;
  std::uint64_t cv_seed = 1;
  int cv_threads = 0;
  auto* cmd_cv = app.add_subcommand("crossval", "repeated holdout validation");
  add_data_opts(cmd_cv, cv_data);
  add_spec_opts(cmd_cv, cv_spec);
  cmd_cv->add_option("--method", cv_method, "lr|org");
  cmd_cv->add_option("--gamma", cv_gamma, "penalty weight (org)");
  cmd_cv->add_option("--starts", cv_starts, "optimizer starts per repeat (org)");
  cmd_cv->add_option("--holdout", cv_holdout, "test fraction per repeat");
  cmd_cv->add_option("--repeats", cv_repeats, "number of repeats");
  cmd_cv->add_option("--seed", cv_seed, "random seed");
  cmd_cv->add_option("--threads", cv_threads, "worker threads (0 = auto)");

  double fig_mu0 = -1.0, fig_mu1 = 1.0, fig_p = 0.2;
  std::string fig_pairs = "4:1,2:2,1:4";
  double fig_lo = -10.0, fig_hi = 10.0, fig_step = 0.05;
  auto* cmd_fig = app.add_subcommand(
      "figure-data", "left-ray risk curves and the interval-collapse table");
  cmd_fig->add_option("--mu0", fig_mu0, "class-0 mean");
  cmd_fig->add_option("--mu1", fig_mu1, "class-1 mean");
  cmd_fig->add_option("--p", fig_p, "class-1 prior");
  cmd_fig->add_option("--pairs", fig_pairs,
                      "sigma1:sigma0 pairs, comma separated");
  cmd_fig->add_option("--grid-lo", fig_lo, "grid start");
  cmd_fig->add_option("--grid-hi", fig_hi, "grid end");
  cmd_fig->add_option("--grid-step", fig_step, "grid step");

  ModelOpts sim_model;
  std::size_t sim_n = 1000;
  std::uint64_t sim_seed = 1;
  auto* cmd_sim =
      app.add_subcommand("simulate", "draw scores from the two-class model");
  add_model_opts(cmd_sim, sim_model);
  cmd_sim->add_option("--n", sim_n, "number of draws");
  cmd_sim->add_option("--seed", sim_seed, "random seed");

  // Let the global --out-dir/--format options appear after the subcommand.
  for (CLI::App* sub : app.get_subcommands(/*filter=*/nullptr)) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_lr->parsed()) return run_fit_lr(lr_data, out_dir, format);
    if (cmd_bp->parsed()) {
      return run_breakpoints(bp_data, bp_model, bp_spec, out_dir, format);
    }
    if (cmd_fs->parsed()) {
      return run_feasibility(fs_data, fs_model, fs_spec, fs_tau, out_dir, format);
    }
    if (cmd_org->parsed()) {
      return run_fit_org(org_data, org_spec, org_gamma, org_starts, org_seed,
                         org_min_gap, org_threads, out_dir, format);
    }
    if (cmd_cv->parsed()) {
      return run_crossval(cv_data, cv_spec, cv_method, cv_gamma, cv_starts,
                          cv_holdout, cv_repeats, cv_seed, cv_threads, out_dir,
                          format);
    }
    if (cmd_fig->parsed()) {
      return run_figure_data(fig_mu0, fig_mu1, fig_p, fig_pairs, fig_lo,
                             fig_hi, fig_step, out_dir, format);
    }
    if (cmd_sim->parsed()) {
      return run_simulate(sim_model, sim_n, sim_seed, out_dir, format);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
