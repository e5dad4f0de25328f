// binarygp command-line tool: simulate, fit, predict, emulate, benchmark.
//
// Every subcommand writes run_config.json next to its outputs. Passing that
// file back through --config reproduces the outputs byte for byte; flags given
// explicitly on the command line take precedence over the file.

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "binarygp/binarygp.hpp"

namespace {

using namespace binarygp;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kRunConfigVersion = 1;

/// Options that are echoed to run_config.json and can be replayed from it.
class ParamSet {
 public:
  explicit ParamSet(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, T& var,
                   const std::string& help) {
    CLI::Option* opt = app->add_option(flag, var, help)->capture_default_str();
    params_.push_back({key, opt, [&var] { return json(var); },
                       [&var](const json& j) { var = j.get<T>(); }});
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flag, const std::string& key, bool& var,
                    const std::string& help) {
    CLI::Option* opt = app->add_flag(flag, var, help);
    params_.push_back({key, opt, [&var] { return json(var); },
                       [&var](const json& j) { var = j.get<bool>(); }});
    return opt;
  }

  /// Fills every parameter not given on the command line from a config file.
  void apply_config(const std::string& path) {
    const json file = read_json(path);
    const json& cfg = file.contains("parameters") ? file.at("parameters") : file;
    if (file.contains("subcommand") && file.at("subcommand").get<std::string>() != subcommand_) {
      throw InputError("config '" + path + "' was written by '" +
                       file.at("subcommand").get<std::string>() + "', not '" + subcommand_ + "'");
    }
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      const auto p = std::find_if(params_.begin(), params_.end(),
                                  [&](const Param& q) { return q.key == it.key(); });
      if (p == params_.end()) throw InputError("config '" + path + "': unknown key '" + it.key() + "'");
      if (p->opt->count() > 0) continue;
      try {
        p->set(it.value());
      } catch (const json::exception&) {
        throw InputError("config '" + path + "': key '" + it.key() + "' has the wrong type");
      }
    }
  }

  json echo() const {
    json params = json::object();
    for (const auto& p : params_) params[p.key] = p.get();
    return {{"schema_version", kRunConfigVersion}, {"subcommand", subcommand_}, {"parameters", params}};
  }

 private:
  struct Param {
    std::string key;
    CLI::Option* opt;
    std::function<json()> get;
    std::function<void(const json&)> set;
  };
  std::string subcommand_;
  std::vector<Param> params_;
};

/// Settings that never change results and are therefore not echoed.
struct RunSettings {
  std::string config;
  std::string out_dir = "out";
  unsigned threads = 1;
};

void add_run_settings(CLI::App* app, RunSettings& run) {
  app->add_option("--config", run.config, "replay parameters from a JSON config");
  app->add_option("--out-dir", run.out_dir, "output directory")->capture_default_str();
  app->add_option("--threads", run.threads, "worker threads (results do not depend on it)")
      ->capture_default_str()
      ->check(CLI::Range(1u, 1024u));
}

std::string out_path(const RunSettings& run, const std::string& name) {
  return (std::filesystem::path(run.out_dir) / name).string();
}

void add_mh_options(CLI::App* app, ParamSet& ps, MHConfig& mh) {
  ps.add(app, "--mh-samples", "mh_samples", mh.n_samples, "retained MH draws");
  ps.add(app, "--mh-burnin", "mh_burnin", mh.burn_in, "MH burn-in sweeps");
  ps.add(app, "--mh-thin", "mh_thin", mh.thin, "MH thinning interval");
}

std::vector<std::string> quantile_headers(const std::vector<double>& levels) {
  std::vector<std::string> out;
  for (double q : levels) out.push_back("q" + fmt_double(q));
  return out;
}

// Column ranges used to map raw inputs onto [0, 1].
using Scaling = std::vector<std::pair<double, double>>;

MatrixXd apply_scaling(const Scaling& scaling, MatrixXd points) {
  if (scaling.empty()) return points;
  if (static_cast<Eigen::Index>(scaling.size()) != points.cols()) {
    throw InputError("points have " + std::to_string(points.cols()) + " columns, model has " +
                     std::to_string(scaling.size()));
  }
  for (Eigen::Index l = 0; l < points.cols(); ++l) {
    const auto [lo, hi] = scaling[static_cast<std::size_t>(l)];
    if (hi > lo) {
      points.col(l) = (points.col(l).array() - lo) / (hi - lo);
    } else {
      points.col(l).setZero();
    }
  }
  return points;
}

struct LoadedModel {
  FittedModel model;
  Scaling scaling;
};

LoadedModel load_model_file(const std::string& path) {
  const json j = read_json(path);
  LoadedModel out;
  out.model = model_from_json(j);
  if (j.contains("input_scaling")) out.scaling = j.at("input_scaling").get<Scaling>();
  return out;
}

MatrixXd load_points(const std::string& path, bool header, const LoadedModel& lm) {
  MatrixXd pts = csv::to_matrix(csv::read(path, header));
  if (pts.cols() != lm.model.inputs.d()) {
    throw InputError(path + ": points have " + std::to_string(pts.cols()) +
                     " columns but the model has " + std::to_string(lm.model.inputs.d()) +
                     " inputs");
  }
  return apply_scaling(lm.scaling, pts);
}

// simulate --------------------------------------------------------------------

struct SimulateArgs {
  std::string generator = "gp_model";
  Eigen::Index n = 200;
  Eigen::Index T = 20;
  std::uint64_t seed = 1;
  int grid_levels = 4;
  double kernel_power = 2.0;
};

int cmd_simulate(const SimulateArgs& a, const RunSettings& run, const json& echo) {
  const Generator gen = generator_from_string(a.generator);
  TruthSpec truth;
  SimulatedPanel data;
  switch (gen) {
    case Generator::GPModel:
      truth = default_gp_truth(a.seed);
      truth.grid_levels = a.grid_levels;
      truth.kernel.power = a.kernel_power;
      data = gen_gp_panel(truth, a.n, a.T);
      break;
    case Generator::Friedman:
      truth.generator = gen;
      truth.seed = a.seed;
      data = gen_friedman_panel(a.n, a.T, a.seed);
      break;
    case Generator::Custom1D:
      truth.generator = gen;
      truth.seed = a.seed;
      data = gen_demo_1d(a.n, a.seed);
      break;
  }
  write_text(out_path(run, "inputs.csv"), matrix_csv(data.inputs.sites));
  write_text(out_path(run, "panel.csv"), matrix_csv(data.panel.y));
  write_text(out_path(run, "true_p.csv"), matrix_csv(data.true_p));
  write_json(out_path(run, "truth.json"), to_json(truth));
  write_json(out_path(run, "run_config.json"), echo);
  return kExitOk;
}

// fit -------------------------------------------------------------------------

struct FitArgs {
  std::string inputs;
  std::string panel;
  bool header = false;
  int order_r = 1;
  int order_l = 0;
  double kernel_power = 2.0;
  bool standardize = false;
  int max_outer = 50;
  std::uint64_t seed = 1;
};

int cmd_fit(const FitArgs& a, const RunSettings& run, const json& echo) {
  auto [inputs, panel] = load_panel(a.inputs, a.panel, a.header);
  Scaling scaling;
  if (a.standardize) scaling = standardize(inputs);
  KernelSpec kernel;
  kernel.power = a.kernel_power;
  kernel.lengthscales = VectorXd::Ones(inputs.d());
  FitOptions opts;
  opts.max_outer = a.max_outer;
  const FittedModel model = fit(inputs, panel, ModelOrder{a.order_r, a.order_l}, kernel, opts);

  json mj = to_json(model);
  if (!scaling.empty()) mj["input_scaling"] = scaling;
  write_json(out_path(run, "model.json"), mj);
  const CoefReport report = coef_report(model);
  write_text(out_path(run, "coefficients.csv"), coef_report_csv(report));
  write_json(out_path(run, "coefficients.json"), to_json(report));
  write_json(out_path(run, "convergence.json"), mj.at("report"));
  write_json(out_path(run, "run_config.json"), echo);
  if (!report.singular_columns.empty()) {
    logger().warn("information matrix is singular; standard errors are NaN");
  }
  if (!model.report.converged) {
    std::cerr << "warning: estimation did not converge; results written but flagged\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

// predict ---------------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string points;
  std::string history;
  bool header = false;
  int time = -1;
  std::vector<double> quantiles{0.025, 0.5, 0.975};
  MHConfig mh;
  std::uint64_t seed = 1;
};

int cmd_predict(PredictArgs a, const RunSettings& run, const json& echo) {
  const LoadedModel lm = load_model_file(a.model);
  const MatrixXd pts = load_points(a.points, a.header, lm);
  std::optional<Eigen::MatrixXi> hist;
  if (!a.history.empty()) {
    hist = load_binary_panel(a.history, a.header).y;
    if (hist->rows() != pts.rows()) {
      throw InputError(a.history + ": " + std::to_string(hist->rows()) + " history rows for " +
                       std::to_string(pts.rows()) + " points");
    }
  }
  const Eigen::Index s = hist ? hist->cols() : (a.time >= 0 ? a.time : lm.model.panel.T() - 1);
  a.mh.seed = a.seed;
  const PredictionCache cache(lm.model);
  const MHSamples samples = mh_sample_probs(cache, a.mh);

  std::vector<std::string> header{"point", "time", "mean", "variance"};
  for (const auto& h : quantile_headers(a.quantiles)) header.push_back(h);
  std::string csv;
  for (std::size_t c = 0; c < header.size(); ++c) csv += (c ? "," : "") + header[c];
  csv += "\n";
  json rows = json::array();
  for (Eigen::Index k = 0; k < pts.rows(); ++k) {
    std::vector<int> history(static_cast<std::size_t>(s), 0);
    if (hist) {
      for (Eigen::Index t = 0; t < s; ++t) history[static_cast<std::size_t>(t)] = (*hist)(k, t);
    }
    const PredictiveSummary sum = predict_at(cache, samples, pts.row(k).transpose(), history, a.mh,
                                             a.quantiles);
    csv += std::to_string(k + 1) + "," + std::to_string(s + 1) + "," + fmt_double(sum.mean) + "," +
           fmt_double(sum.variance);
    json q = json::object();
    for (const auto& [level, value] : sum.quantiles) {
      csv += "," + fmt_double(value);
      q[fmt_double(level)] = value;
    }
    csv += "\n";
    rows.push_back({{"point", k + 1}, {"time", s + 1}, {"mean", sum.mean},
                    {"variance", sum.variance}, {"quantiles", q}});
  }
  const json diag{{"acceptance_rate", samples.diagnostics.acceptance_rate},
                  {"max_split_rhat", samples.diagnostics.max_split_rhat},
                  {"n_samples", a.mh.n_samples}, {"burn_in", a.mh.burn_in},
                  {"thin", a.mh.thin}, {"seed", a.mh.seed}};
  write_text(out_path(run, "predictions.csv"), csv);
  write_json(out_path(run, "predictions.json"), {{"predictions", rows}, {"diagnostics", diag}});
  write_json(out_path(run, "run_config.json"), echo);
  return kExitOk;
}

// emulate ---------------------------------------------------------------------

struct EmulateArgs {
  std::string model;
  std::string points;
  bool header = false;
  Eigen::Index steps = 0;
  std::vector<double> quantiles{0.025, 0.5, 0.975};
  MHConfig mh;
  std::uint64_t seed = 1;
  bool write_paths = false;
};

int cmd_emulate(EmulateArgs a, const RunSettings& run, const json& echo) {
  const LoadedModel lm = load_model_file(a.model);
  const MatrixXd pts = load_points(a.points, a.header, lm);
  const Eigen::Index steps = a.steps > 0 ? a.steps : lm.model.panel.T();
  a.mh.seed = a.seed;
  const PredictionCache cache(lm.model);
  const MHSamples samples = mh_sample_probs(cache, a.mh);

  std::vector<std::string> header{"t", "median_p", "median_y", "mean_p"};
  for (const auto& h : quantile_headers(a.quantiles)) header.push_back(h);
  for (Eigen::Index k = 0; k < pts.rows(); ++k) {
    const Emulation em =
        emulate_series(cache, samples, pts.row(k).transpose(), steps, a.mh, a.quantiles, run.threads);
    MatrixXd table(steps, 4 + em.bands.cols());
    for (Eigen::Index t = 0; t < steps; ++t) {
      table(t, 0) = static_cast<double>(t + 1);
      table(t, 1) = em.median_p[t];
      table(t, 2) = em.median_y[t];
      table(t, 3) = em.mean_p[t];
      table.row(t).tail(em.bands.cols()) = em.bands.row(t);
    }
    const std::string id = std::to_string(k + 1);
    write_text(out_path(run, "emulation_" + id + ".csv"), matrix_csv(table, header));
    if (a.write_paths) {
      write_text(out_path(run, "p_paths_" + id + ".csv"), matrix_csv(em.p_paths));
      write_text(out_path(run, "y_paths_" + id + ".csv"), matrix_csv(em.y_paths));
    }
  }
  write_json(out_path(run, "diagnostics.json"),
             {{"acceptance_rate", samples.diagnostics.acceptance_rate},
              {"max_split_rhat", samples.diagnostics.max_split_rhat}});
  write_json(out_path(run, "run_config.json"), echo);
  return kExitOk;
}

// benchmark -------------------------------------------------------------------

struct BenchmarkArgs {
  std::string study;
  int replicates = 10;
  Eigen::Index n = 200;
  Eigen::Index T = 20;
  Eigen::Index n_test = 20;
  std::uint64_t seed = 1;
  int order_r = 1;
  int order_l = 0;
  double kernel_power = 2.0;
  MHConfig mh;
  int glm_paths = 1000;
  int folds = 10;
};

json describe(std::vector<double> v) {
  std::vector<double> finite;
  for (double x : v) {
    if (std::isfinite(x)) finite.push_back(x);
  }
  if (finite.empty()) return {{"n", 0}};
  const Eigen::Map<const VectorXd> m(finite.data(), static_cast<Eigen::Index>(finite.size()));
  const double mean = m.mean();
  const double sd = finite.size() > 1
                        ? std::sqrt((m.array() - mean).square().sum() / (finite.size() - 1.0))
                        : 0.0;
  return {{"n", finite.size()}, {"mean", mean}, {"sd", sd}, {"median", median(finite)},
          {"min", m.minCoeff()}, {"max", m.maxCoeff()}};
}

int cmd_benchmark(const BenchmarkArgs& a, const RunSettings& run, const json& echo) {
  StudyConfig cfg;
  cfg.replicates = a.replicates;
  cfg.n = a.n;
  cfg.T = a.T;
  cfg.n_test = a.n_test;
  cfg.seed = a.seed;
  cfg.order = ModelOrder{a.order_r, a.order_l};
  cfg.kernel_power = a.kernel_power;
  cfg.mh = a.mh;
  cfg.glm_paths = a.glm_paths;
  cfg.folds = a.folds;
  cfg.threads = run.threads;

  // Tidy rows (unit, metric, value) in a fixed order.
  std::string csv = "study,unit,metric,value\n";
  std::map<std::string, std::vector<double>> by_metric;
  std::vector<std::string> metric_order;
  auto emit = [&](const std::string& unit, const std::string& metric, double value) {
    csv += a.study + "," + unit + "," + metric + "," + fmt_double(value) + "\n";
    if (!by_metric.count(metric)) metric_order.push_back(metric);
    by_metric[metric].push_back(value);
  };
  json extra = json::object();

  if (a.study == "table1" || a.study == "table3") {
    cfg.predict = a.study == "table3";
    int converged = 0;
    for (const auto& r : run_gp_study(cfg)) {
      const std::string unit = std::to_string(r.replicate + 1);
      for (std::size_t k = 0; k < r.names.size(); ++k) {
        emit(unit, r.names[k], r.coefficients[static_cast<Eigen::Index>(k)]);
      }
      emit(unit, "sigma2", r.cov.sigma2);
      for (Eigen::Index l = 0; l < r.cov.theta.size(); ++l) {
        emit(unit, "theta_" + std::to_string(l + 1), r.cov.theta[l]);
      }
      if (cfg.predict) {
        emit(unit, "rmspe", r.rmspe);
        emit(unit, "mh_acceptance", r.diagnostics.acceptance_rate);
      }
      converged += r.converged ? 1 : 0;
    }
    extra["converged_replicates"] = converged;
  } else if (a.study == "friedman") {
    int wins = 0;
    for (const auto& r : run_friedman_study(cfg)) {
      const std::string unit = std::to_string(r.replicate + 1);
      emit(unit, "rmspe_gp", r.gp);
      emit(unit, "rmspe_glm", r.glm);
      emit(unit, "rmspe_glm_ts", r.glm_ts);
      wins += (r.gp < r.glm && r.gp < r.glm_ts) ? 1 : 0;
    }
    extra["gp_best_replicates"] = wins;
  } else if (a.study == "cv-scores") {
    const ScoreReport rep = run_cv_study(cfg);
    json flagged = json::array();
    for (const auto& f : rep.folds) {
      for (const auto& method : rep.methods) {
        for (const auto& score : score_names()) {
          emit(std::to_string(f.fold + 1), method + "_" + score, score_value(f.scores.at(method), score));
        }
      }
      if (f.single_class) flagged.push_back(f.fold + 1);
    }
    extra["single_class_folds"] = flagged;
  } else {
    throw InputError("unknown study '" + a.study + "' (table1, table3, friedman, cv-scores)");
  }

  json metrics = json::object();
  for (const auto& m : metric_order) metrics[m] = describe(by_metric[m]);
  write_text(out_path(run, "results.csv"), csv);
  write_json(out_path(run, "summary.json"), {{"study", a.study}, {"metrics", metrics}, {"flags", extra}});
  write_json(out_path(run, "run_config.json"), echo);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process models for binary time series"};
  app.require_subcommand(1);

  RunSettings run;

  SimulateArgs sim;
  ParamSet sim_ps("simulate");
  auto* sim_cmd = app.add_subcommand("simulate", "simulate a panel (inputs, panel, true p)");
  sim_ps.add(sim_cmd, "--generator", "generator", sim.generator, "gp_model, friedman or demo_1d")
      ->check(CLI::IsMember({"gp_model", "friedman", "demo_1d"}));
  sim_ps.add(sim_cmd, "--n", "n", sim.n, "number of sites");
  sim_ps.add(sim_cmd, "--T", "T", sim.T, "number of time steps");
  sim_ps.add(sim_cmd, "--seed", "seed", sim.seed, "master seed");
  sim_ps.add(sim_cmd, "--grid-levels", "grid_levels", sim.grid_levels, "grid levels per input (gp_model)");
  sim_ps.add(sim_cmd, "--kernel-power", "kernel_power", sim.kernel_power, "kernel power (gp_model)");
  add_run_settings(sim_cmd, run);

  FitArgs fa;
  ParamSet fit_ps("fit");
  auto* fit_cmd = app.add_subcommand("fit", "estimate coefficients and covariance parameters");
  fit_ps.add(fit_cmd, "--inputs", "inputs", fa.inputs, "CSV of input sites (n x d)");
  fit_ps.add(fit_cmd, "--panel", "panel", fa.panel, "CSV of binary responses (n x T)");
  fit_ps.flag(fit_cmd, "--header", "header", fa.header, "CSV files have a header row");
  fit_ps.add(fit_cmd, "--order-r", "order_r", fa.order_r, "autoregressive order R");
  fit_ps.add(fit_cmd, "--order-l", "order_l", fa.order_l, "interaction order L");
  fit_ps.add(fit_cmd, "--kernel-power", "kernel_power", fa.kernel_power, "power-exponential power in (0, 2]");
  fit_ps.flag(fit_cmd, "--standardize", "standardize", fa.standardize, "rescale inputs to [0, 1]");
  fit_ps.add(fit_cmd, "--max-outer", "max_outer", fa.max_outer, "maximum outer iterations");
  fit_ps.add(fit_cmd, "--seed", "seed", fa.seed, "master seed (estimation is deterministic)");
  add_run_settings(fit_cmd, run);

  PredictArgs pa;
  ParamSet pred_ps("predict");
  auto* pred_cmd = app.add_subcommand("predict", "predictive distribution at new inputs");
  pred_ps.add(pred_cmd, "--model", "model", pa.model, "model.json from fit");
  pred_ps.add(pred_cmd, "--points", "points", pa.points, "CSV of query points");
  pred_ps.add(pred_cmd, "--history", "history", pa.history,
              "CSV of binary histories, one row per point; its width sets the time");
  pred_ps.flag(pred_cmd, "--header", "header", pa.header, "CSV files have a header row");
  pred_ps.add(pred_cmd, "--time", "time", pa.time,
              "0-based time index when no history is given (lags 0); default last training time");
  pred_ps.add(pred_cmd, "--quantiles", "quantiles", pa.quantiles, "quantile levels")->delimiter(',');
  pred_ps.add(pred_cmd, "--seed", "seed", pa.seed, "master seed");
  add_mh_options(pred_cmd, pred_ps, pa.mh);
  add_run_settings(pred_cmd, run);

  EmulateArgs ea;
  ParamSet emu_ps("emulate");
  auto* emu_cmd = app.add_subcommand("emulate", "emulate new binary series at new inputs");
  emu_ps.add(emu_cmd, "--model", "model", ea.model, "model.json from fit");
  emu_ps.add(emu_cmd, "--points", "points", ea.points, "CSV of query points");
  emu_ps.flag(emu_cmd, "--header", "header", ea.header, "CSV files have a header row");
  emu_ps.add(emu_cmd, "--steps", "steps", ea.steps, "series length (default: training T)");
  emu_ps.add(emu_cmd, "--quantiles", "quantiles", ea.quantiles, "band quantile levels")->delimiter(',');
  emu_ps.add(emu_cmd, "--seed", "seed", ea.seed, "master seed");
  emu_ps.flag(emu_cmd, "--write-paths", "write_paths", ea.write_paths, "also write every sampled path");
  add_mh_options(emu_cmd, emu_ps, ea.mh);
  add_run_settings(emu_cmd, run);

  BenchmarkArgs ba;
  ParamSet bench_ps("benchmark");
  auto* bench_cmd = app.add_subcommand("benchmark", "run a replicated simulation study");
  bench_ps.add(bench_cmd, "study", "study", ba.study, "table1, table3, friedman or cv-scores");
  bench_ps.add(bench_cmd, "--replicates", "replicates", ba.replicates, "number of replicates");
  bench_ps.add(bench_cmd, "--n", "n", ba.n, "training sites");
  bench_ps.add(bench_cmd, "--T", "T", ba.T, "time steps");
  bench_ps.add(bench_cmd, "--n-test", "n_test", ba.n_test, "held-out sites");
  bench_ps.add(bench_cmd, "--seed", "seed", ba.seed, "master seed");
  bench_ps.add(bench_cmd, "--order-r", "order_r", ba.order_r, "autoregressive order R (friedman)");
  bench_ps.add(bench_cmd, "--order-l", "order_l", ba.order_l, "interaction order L (friedman)");
  bench_ps.add(bench_cmd, "--kernel-power", "kernel_power", ba.kernel_power, "kernel power");
  bench_ps.add(bench_cmd, "--glm-paths", "glm_paths", ba.glm_paths, "simulated paths for glm_ts");
  bench_ps.add(bench_cmd, "--folds", "folds", ba.folds, "cross-validation folds (cv-scores)");
  add_mh_options(bench_cmd, bench_ps, ba.mh);
  add_run_settings(bench_cmd, run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    auto dispatch = [&](ParamSet& ps, auto&& body) {
      if (!run.config.empty()) ps.apply_config(run.config);
      return body(ps.echo());
    };
    if (*sim_cmd) return dispatch(sim_ps, [&](const json& e) { return cmd_simulate(sim, run, e); });
    if (*fit_cmd) {
      return dispatch(fit_ps, [&](const json& e) {
        if (fa.inputs.empty() || fa.panel.empty()) throw InputError("fit needs --inputs and --panel");
        return cmd_fit(fa, run, e);
      });
    }
    if (*pred_cmd) {
      return dispatch(pred_ps, [&](const json& e) {
        if (pa.model.empty() || pa.points.empty()) throw InputError("predict needs --model and --points");
        return cmd_predict(pa, run, e);
      });
    }
    if (*emu_cmd) {
      return dispatch(emu_ps, [&](const json& e) {
        if (ea.model.empty() || ea.points.empty()) throw InputError("emulate needs --model and --points");
        return cmd_emulate(ea, run, e);
      });
    }
    if (*bench_cmd) {
      return dispatch(bench_ps, [&](const json& e) {
        if (ba.study.empty()) throw InputError("benchmark needs a study name");
        return cmd_benchmark(ba, run, e);
      });
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
