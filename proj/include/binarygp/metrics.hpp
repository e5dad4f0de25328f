#ifndef BINARYGP_METRICS_HPP
#define BINARYGP_METRICS_HPP

// Evaluation: RMSPE against true probabilities, proper scoring rules,
// logistic-regression baselines and site-wise cross-validation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "binarygp/common.hpp"
#include "binarygp/estimation.hpp"
#include "binarygp/panel.hpp"
#include "binarygp/prediction.hpp"
#include "binarygp/rng.hpp"

namespace binarygp {

/// sqrt(mean((p - p_hat)^2)) over every (site, time) cell.
inline double rmspe(const MatrixXd& true_p, const MatrixXd& pred_p) {
  if (true_p.rows() != pred_p.rows() || true_p.cols() != pred_p.cols()) {
    throw InputError("rmspe: shape mismatch (" + std::to_string(true_p.rows()) + "x" +
                     std::to_string(true_p.cols()) + " vs " + std::to_string(pred_p.rows()) +
                     "x" + std::to_string(pred_p.cols()) + ")");
  }
  if (true_p.size() == 0) throw InputError("rmspe: empty panels");
  return std::sqrt((true_p - pred_p).squaredNorm() / static_cast<double>(true_p.size()));
}

/// Positively oriented scores: larger is better for all four.
struct ScoreEntry {
  double brier = 0.0;
  double spherical = 0.0;
  double logarithmic = 0.0;
  double zero_one = 0.0;
};

inline const std::vector<std::string>& score_names() {
  static const std::vector<std::string> names{"brier", "spherical", "logarithmic", "zero_one"};
  return names;
}

inline double score_value(const ScoreEntry& e, const std::string& name) {
  if (name == "brier") return e.brier;
  if (name == "spherical") return e.spherical;
  if (name == "logarithmic") return e.logarithmic;
  if (name == "zero_one") return e.zero_one;
  throw InputError("unknown score '" + name + "'");
}

/// Scores of forecasts p_hat for outcomes y. The zero-one rule predicts 1 when
/// p_hat > threshold. Probabilities are clamped before taking logs.
inline ScoreEntry proper_scores(const std::vector<int>& y, const std::vector<double>& p_hat,
                                double threshold = 0.5) {
  if (y.size() != p_hat.size()) throw InputError("proper_scores: size mismatch");
  if (y.empty()) throw InputError("proper_scores: no observations");
  ScoreEntry s;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double p = p_hat[k];
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("proper_scores: forecast outside [0, 1]");
    const double yk = y[k];
    const double pc = clamp_prob(p);
    s.brier -= (yk - p) * (yk - p);
    s.logarithmic += yk * std::log(pc) + (1.0 - yk) * std::log(1.0 - pc);
    s.spherical += (yk * p + (1.0 - yk) * (1.0 - p)) / std::sqrt(p * p + (1.0 - p) * (1.0 - p));
    s.zero_one += ((p > threshold ? 1 : 0) == y[k]) ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(y.size());
  s.brier /= n;
  s.logarithmic /= n;
  s.spherical /= n;
  s.zero_one /= n;
  return s;
}

struct LogisticFit {
  VectorXd beta;
  int iterations = 0;
  bool converged = false;
  bool ridge = false;
};

/// Maximum-likelihood logistic regression by iteratively reweighted least
/// squares. When the weighted normal equations become singular or the
/// iterates diverge (separation), the fit restarts with a 1e-6 ridge penalty.
inline LogisticFit logistic_regression(const MatrixXd& X, const VectorXd& y, double tol = 1e-10,
                                       int max_iter = 100) {
  if (X.rows() != y.size()) throw InputError("logistic_regression: size mismatch");
  auto run = [&](double ridge) {
    LogisticFit out;
    out.ridge = ridge > 0.0;
    out.beta = VectorXd::Zero(X.cols());
    for (int it = 0; it < max_iter; ++it) {
      ++out.iterations;
      const VectorXd eta = X * out.beta;
      const VectorXd p = eta.unaryExpr([](double v) { return logistic(v); });
      const VectorXd w = p.array() * (1.0 - p.array());
      MatrixXd H = X.transpose() * w.asDiagonal() * X;
      H.diagonal().array() += ridge;
      const VectorXd g = X.transpose() * (y - p) - ridge * out.beta;
      Eigen::LDLT<MatrixXd> ldlt(H);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
          ldlt.vectorD().minCoeff() <= 1e-12 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
        return out;
      }
      const VectorXd step = ldlt.solve(g);
      if (!step.allFinite()) return out;
      out.beta += step;
      if (out.beta.cwiseAbs().maxCoeff() > 50.0) return out;
      if (step.cwiseAbs().maxCoeff() < tol) {
        out.converged = true;
        return out;
      }
    }
    return out;
  };
  LogisticFit res = run(0.0);
  if (!res.converged) {
    logger().warn("logistic regression did not converge (possible separation); "
                  "refitting with ridge penalty 1e-6");
    res = run(1e-6);
  }
  return res;
}

enum class Baseline { Glm, GlmTs };

inline std::string to_string(Baseline b) { return b == Baseline::Glm ? "glm" : "glm_ts"; }

/// Logistic regression without random effects. glm uses the mean
/// alpha_0 + x' alpha; glm_ts uses the full autoregressive mean.
struct GlmModel {
  Baseline kind = Baseline::Glm;
  ModelOrder order;
  VectorXd beta;
  bool converged = false;
};

inline GlmModel fit_glm(const InputDesign& inputs, const BinaryPanel& panel,
                        const ModelOrder& order, Baseline kind) {
  GlmModel model;
  model.kind = kind;
  model.order = kind == Baseline::Glm ? ModelOrder{0, 0} : order;
  const DesignMatrix dm = build_design(inputs, panel, model.order);
  const LogisticFit lf = logistic_regression(dm.X, dm.y);
  model.beta = lf.beta;
  model.converged = lf.converged;
  return model;
}

/// Predicted probabilities at new sites for T_out steps. Lagged responses at
/// a new site are unknown, so n_paths series are simulated (stream
/// derive_seed(seed, j + 1) for path j, lags before t = 0 equal to 0) and the
/// pointwise mean of p, the squared-error optimal point prediction, is
/// returned.
inline MatrixXd predict_glm(const GlmModel& model, const MatrixXd& sites, Eigen::Index T_out,
                            int n_paths, std::uint64_t seed) {
  const int max_lag = model.order.max_lag();
  MatrixXd out(sites.rows(), T_out);
  for (Eigen::Index i = 0; i < sites.rows(); ++i) {
    const VectorXd x = sites.row(i).transpose();
    if (max_lag == 0) {
      out.row(i).setConstant(logistic(design_row(model.order, x, {}).dot(model.beta)));
      continue;
    }
    MatrixXd paths(n_paths, T_out);
    for (int j = 0; j < n_paths; ++j) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j) + 1));
      std::vector<int> lags(max_lag, 0);
      for (Eigen::Index t = 0; t < T_out; ++t) {
        const double p = logistic(design_row(model.order, x, lags).dot(model.beta));
        paths(j, t) = p;
        std::rotate(lags.rbegin(), lags.rbegin() + 1, lags.rend());
        lags[0] = bernoulli(rng, p);
      }
    }
    out.row(i) = paths.colwise().mean();
  }
  return out;
}

/// Pointwise mean of the emulated probabilities of the GP model at new sites.
inline MatrixXd predict_gp(const PredictionCache& cache, const MHSamples& samples,
                           const MatrixXd& sites, Eigen::Index T_out, const MHConfig& cfg,
                           unsigned threads = 1) {
  MatrixXd out(sites.rows(), T_out);
  for (Eigen::Index i = 0; i < sites.rows(); ++i) {
    const auto em = emulate_series(cache, samples, sites.row(i).transpose(), T_out, cfg, {}, threads);
    out.row(i) = em.mean_p.transpose();
  }
  return out;
}

struct FoldScores {
  int fold = 0;
  std::vector<Eigen::Index> held_out;
  bool single_class = false;
  std::map<std::string, ScoreEntry> scores;  // by method
};

struct ScoreReport {
  std::vector<std::string> methods;
  std::vector<FoldScores> folds;
  std::map<std::string, ScoreEntry> medians;  // over folds
};

struct CvOptions {
  int folds = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"gp", "glm", "glm_ts"};
  int glm_paths = 1000;
  unsigned threads = 1;
};

/// Site-wise fold assignment: a seeded permutation dealt round-robin.
inline std::vector<std::vector<Eigen::Index>> site_folds(Eigen::Index n, int folds,
                                                         std::uint64_t seed) {
  if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
  if (n < folds) {
    throw InputError("cannot split " + std::to_string(n) + " sites into " +
                     std::to_string(folds) + " folds");
  }
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<Eigen::Index>> out(folds);
  for (Eigen::Index k = 0; k < n; ++k) out[k % folds].push_back(perm[k]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

inline std::pair<InputDesign, BinaryPanel> subset_sites(const InputDesign& inputs,
                                                        const BinaryPanel& panel,
                                                        const std::vector<Eigen::Index>& rows) {
  InputDesign in;
  in.names = inputs.names;
  in.sites.resize(static_cast<Eigen::Index>(rows.size()), inputs.d());
  BinaryPanel out;
  out.y.resize(static_cast<Eigen::Index>(rows.size()), panel.T());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    in.sites.row(static_cast<Eigen::Index>(k)) = inputs.sites.row(rows[k]);
    out.y.row(static_cast<Eigen::Index>(k)) = panel.y.row(rows[k]);
  }
  return {in, out};
}

/// Cross-validated scores. Each fold holds out whole sites; their full series
/// are predicted from a model fitted to the remaining sites. Folds run
/// concurrently; each fold uses the MH stream derive_seed(mh.seed, fold + 1).
inline ScoreReport cross_validate(const InputDesign& inputs, const BinaryPanel& panel,
                                  const ModelOrder& order, const KernelSpec& kernel,
                                  const FitOptions& fit_opts, const MHConfig& mh,
                                  const CvOptions& cv) {
  for (const auto& m : cv.methods) {
    if (m != "gp" && m != "glm" && m != "glm_ts") {
      throw InputError("unknown method '" + m + "' (gp, glm, glm_ts)");
    }
  }
  const auto folds = site_folds(inputs.n(), cv.folds, cv.seed);
  ScoreReport report;
  report.methods = cv.methods;
  report.folds.resize(folds.size());
  parallel_for(folds.size(), cv.threads, [&](std::size_t f) {
    std::vector<char> held(static_cast<std::size_t>(inputs.n()), 0);
    for (auto i : folds[f]) held[static_cast<std::size_t>(i)] = 1;
    std::vector<Eigen::Index> train;
    for (Eigen::Index i = 0; i < inputs.n(); ++i) {
      if (!held[static_cast<std::size_t>(i)]) train.push_back(i);
    }
    const auto [tr_in, tr_panel] = subset_sites(inputs, panel, train);
    const auto [te_in, te_panel] = subset_sites(inputs, panel, folds[f]);

    FoldScores fs;
    fs.fold = static_cast<int>(f);
    fs.held_out = folds[f];
    std::vector<int> y;
    for (Eigen::Index i = 0; i < te_panel.n(); ++i) {
      for (Eigen::Index t = 0; t < te_panel.T(); ++t) y.push_back(te_panel.y(i, t));
    }
    const int ones = std::accumulate(y.begin(), y.end(), 0);
    fs.single_class = ones == 0 || ones == static_cast<int>(y.size());
    if (fs.single_class) logger().warn("fold {} holds out a single response class", f + 1);

    MHConfig fold_mh = mh;
    fold_mh.seed = derive_seed(mh.seed, f + 1);
    for (const auto& method : cv.methods) {
      MatrixXd pred;
      if (method == "gp") {
        const FittedModel model = fit(tr_in, tr_panel, order, kernel, fit_opts);
        const PredictionCache cache(model);
        const MHSamples samples = mh_sample_probs(cache, fold_mh);
        pred = predict_gp(cache, samples, te_in.sites, panel.T(), fold_mh);
      } else {
        const Baseline kind = method == "glm" ? Baseline::Glm : Baseline::GlmTs;
        const GlmModel gm = fit_glm(tr_in, tr_panel, order, kind);
        pred = predict_glm(gm, te_in.sites, panel.T(), cv.glm_paths, fold_mh.seed);
      }
      std::vector<double> p;
      for (Eigen::Index i = 0; i < pred.rows(); ++i) {
        for (Eigen::Index t = 0; t < pred.cols(); ++t) p.push_back(pred(i, t));
      }
      fs.scores[method] = proper_scores(y, p);
    }
    report.folds[f] = std::move(fs);
  });

  for (const auto& method : cv.methods) {
    auto column = [&](auto member) {
      std::vector<double> v;
      for (const auto& fs : report.folds) v.push_back(fs.scores.at(method).*member);
      return median(v);
    };
    ScoreEntry m;
    m.brier = column(&ScoreEntry::brier);
    m.spherical = column(&ScoreEntry::spherical);
    m.logarithmic = column(&ScoreEntry::logarithmic);
    m.zero_one = column(&ScoreEntry::zero_one);
    report.medians[method] = m;
  }
  return report;
}

}  // namespace binarygp

#endif  // BINARYGP_METRICS_HPP
