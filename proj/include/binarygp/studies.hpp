#ifndef BINARYGP_STUDIES_HPP
#define BINARYGP_STUDIES_HPP

// Replicated simulation studies: coefficient recovery and prediction error on
// data from the GP model, the Friedman comparison against logistic
// baselines, and cross-validated scoring rules.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "binarygp/estimation.hpp"
#include "binarygp/metrics.hpp"
#include "binarygp/prediction.hpp"
#include "binarygp/rng.hpp"
#include "binarygp/simgen.hpp"

namespace binarygp {

struct StudyConfig {
  int replicates = 10;
  Eigen::Index n = 200;
  Eigen::Index T = 20;
  Eigen::Index n_test = 20;
  std::uint64_t seed = 1;
  ModelOrder order{1, 0};
  double kernel_power = 2.0;
  MHConfig mh;
  int glm_paths = 1000;
  int folds = 10;
  bool predict = true;  // GP-model study: also emulate the test sites
  unsigned threads = 1;

  void validate() const {
    if (replicates < 1) throw InputError("replicates must be >= 1");
    if (n < 2 || T < 1) throw InputError("study needs n >= 2 and T >= 1");
    if (n_test < 0) throw InputError("n_test must be >= 0");
    mh.validate();
  }
};

/// Seed of replicate r; every random choice inside the replicate derives
/// from it, so replicates can run in any order.
inline std::uint64_t replicate_seed(std::uint64_t master, int r) {
  return derive_seed(master, static_cast<std::uint64_t>(r));
}

inline KernelSpec study_kernel(double power, Eigen::Index d) {
  KernelSpec k;
  k.power = power;
  k.lengthscales = VectorXd::Ones(d);
  return k;
}

struct GpReplicate {
  int replicate = 0;
  std::uint64_t seed = 0;
  VectorXd coefficients;
  std::vector<std::string> names;
  CovParams cov;
  bool converged = false;
  double rmspe = 0.0;  // NaN when prediction is skipped
  MHDiagnostics diagnostics;
};

/// One replicate of the GP-model study: n training and n_test held-out sites
/// share one simulated panel; the held-out series are emulated.
inline GpReplicate run_gp_replicate(const StudyConfig& cfg, int r) {
  GpReplicate out;
  out.replicate = r;
  out.seed = replicate_seed(cfg.seed, r);
  TruthSpec truth = default_gp_truth(out.seed);
  truth.kernel.power = cfg.kernel_power;
  const SimulatedPanel all = gen_gp_panel(truth, cfg.n + cfg.n_test, cfg.T);
  const SimulatedPanel train = all.slice(0, cfg.n);
  const FittedModel model = fit(train.inputs, train.panel, truth.order,
                                study_kernel(cfg.kernel_power, train.inputs.d()));
  out.coefficients = model.coefficients.values;
  out.names = model.coefficients.names();
  out.cov = model.cov;
  out.converged = model.report.converged;
  out.rmspe = std::numeric_limits<double>::quiet_NaN();
  if (cfg.predict && cfg.n_test > 0) {
    const SimulatedPanel test = all.slice(cfg.n, cfg.n_test);
    MHConfig mh = cfg.mh;
    mh.seed = derive_seed(out.seed, 1);
    const PredictionCache cache(model);
    const MHSamples samples = mh_sample_probs(cache, mh);
    out.diagnostics = samples.diagnostics;
    out.rmspe = rmspe(test.true_p, predict_gp(cache, samples, test.inputs.sites, cfg.T, mh));
  }
  return out;
}

inline std::vector<GpReplicate> run_gp_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<GpReplicate> out(static_cast<std::size_t>(cfg.replicates));
  parallel_for(out.size(), cfg.threads,
               [&](std::size_t r) { out[r] = run_gp_replicate(cfg, static_cast<int>(r)); });
  return out;
}

struct FriedmanReplicate {
  int replicate = 0;
  std::uint64_t seed = 0;
  double gp = 0.0;
  double glm = 0.0;
  double glm_ts = 0.0;
  bool converged = false;
};

/// One Friedman replicate: RMSPE of the GP emulator and both logistic
/// baselines on n_test held-out sites.
inline FriedmanReplicate run_friedman_replicate(const StudyConfig& cfg, int r) {
  if (cfg.n_test < 1) throw InputError("the Friedman study needs n_test >= 1");
  FriedmanReplicate out;
  out.replicate = r;
  out.seed = replicate_seed(cfg.seed, r);
  const SimulatedPanel all = gen_friedman_panel(cfg.n + cfg.n_test, cfg.T, out.seed);
  const SimulatedPanel train = all.slice(0, cfg.n);
  const SimulatedPanel test = all.slice(cfg.n, cfg.n_test);

  const FittedModel model =
      fit(train.inputs, train.panel, cfg.order, study_kernel(cfg.kernel_power, 5));
  out.converged = model.report.converged;
  MHConfig mh = cfg.mh;
  mh.seed = derive_seed(out.seed, 1);
  const PredictionCache cache(model);
  const MHSamples samples = mh_sample_probs(cache, mh);
  out.gp = rmspe(test.true_p, predict_gp(cache, samples, test.inputs.sites, cfg.T, mh));

  const std::uint64_t glm_seed = derive_seed(out.seed, 2);
  const GlmModel glm = fit_glm(train.inputs, train.panel, cfg.order, Baseline::Glm);
  out.glm = rmspe(test.true_p, predict_glm(glm, test.inputs.sites, cfg.T, cfg.glm_paths, glm_seed));
  const GlmModel ts = fit_glm(train.inputs, train.panel, cfg.order, Baseline::GlmTs);
  out.glm_ts = rmspe(test.true_p, predict_glm(ts, test.inputs.sites, cfg.T, cfg.glm_paths, glm_seed));
  return out;
}

inline std::vector<FriedmanReplicate> run_friedman_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<FriedmanReplicate> out(static_cast<std::size_t>(cfg.replicates));
  parallel_for(out.size(), cfg.threads,
               [&](std::size_t r) { out[r] = run_friedman_replicate(cfg, static_cast<int>(r)); });
  return out;
}

/// Cross-validated scores on one simulated GP-model panel of n sites.
inline ScoreReport run_cv_study(const StudyConfig& cfg) {
  cfg.validate();
  const std::uint64_t seed = replicate_seed(cfg.seed, 0);
  TruthSpec truth = default_gp_truth(seed);
  truth.kernel.power = cfg.kernel_power;
  const SimulatedPanel data = gen_gp_panel(truth, cfg.n, cfg.T);
  CvOptions cv;
  cv.folds = cfg.folds;
  cv.seed = derive_seed(seed, 1);
  cv.glm_paths = cfg.glm_paths;
  cv.threads = cfg.threads;
  MHConfig mh = cfg.mh;
  mh.seed = derive_seed(seed, 2);
  return cross_validate(data.inputs, data.panel, truth.order,
                        study_kernel(cfg.kernel_power, data.inputs.d()), {}, mh, cv);
}

}  // namespace binarygp

#endif  // BINARYGP_STUDIES_HPP
