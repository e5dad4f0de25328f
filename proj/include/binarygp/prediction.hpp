#ifndef BINARYGP_PREDICTION_HPP
#define BINARYGP_PREDICTION_HPP

// Predictive distributions at untried inputs.
//
// Given the latent probabilities p_s at the training sites, p_s(xnew) is
// logit-normal with
//   m = mu(xnew) + r' R^{-1} (logit p_s - mu_s),  v = sigma^2 (1 - r' R^{-1} r).
// Given binary data only, p | Y is sampled with a single-component
// Metropolis-Hastings chain whose proposal for each component is its prior
// full conditional, so the acceptance ratio is the Bernoulli likelihood ratio.
//
// Z_t is independent across time steps, so the law of p_s(xnew) depends on
// the other time steps only through the lagged responses in mu(xnew).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "binarygp/common.hpp"
#include "binarygp/estimation.hpp"
#include "binarygp/kernel.hpp"
#include "binarygp/logitnormal.hpp"
#include "binarygp/panel.hpp"
#include "binarygp/rng.hpp"

namespace binarygp {

struct ConditionalLaw {
  double m = 0.0;
  double v = 0.0;
};

struct MHConfig {
  int n_samples = 1000;
  int burn_in = 500;
  int thin = 2;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_samples < 1) throw InputError("MH n_samples must be >= 1");
    if (burn_in < 0) throw InputError("MH burn_in must be >= 0");
    if (thin < 1) throw InputError("MH thin must be >= 1");
  }
};

struct MHDiagnostics {
  double acceptance_rate = 0.0;
  // Largest split-R-hat (chain halves treated as two chains) over components.
  double max_split_rhat = 1.0;
};

/// Retained draws of the training-site logits, one row per draw, columns in
/// design-row order.
struct MHSamples {
  MatrixXd logits;
  MHDiagnostics diagnostics;

  Eigen::Index size() const { return logits.rows(); }
  MatrixXd probabilities() const {
    return logits.unaryExpr([](double v) { return logistic(v); });
  }
};

struct PredictiveSummary {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (level, value)
  int n_mc = 0;
  std::uint64_t seed = 0;
  MHDiagnostics diagnostics;
};

/// Weights of a new site on the training sites.
struct SiteProjection {
  VectorXd weights;             // R^{-1} r
  double residual = 1.0;        // 1 - r' R^{-1} r, clamped at 0
  std::optional<Eigen::Index> coincident;  // training site equal to xnew
};

/// Per-model quantities shared by every query: the Cholesky factor of R,
/// its inverse Q, and the prior mean of every training design row.
class PredictionCache {
 public:
  explicit PredictionCache(const FittedModel& model)
      : coefficients_(model.coefficients.values),
        cov_(model.cov),
        kernel_(model.kernel),
        order_(model.order),
        sites_(model.inputs.sites),
        panel_(model.panel),
        design_(training_design(model)),
        fitted_logits_(model.state.p.unaryExpr([](double p) { return logit(clamp_prob(p)); })) {
    kernel_.lengthscales = cov_.theta;
    chol_.compute(regularized_corr_matrix(kernel_, sites_));
    if (chol_.info() != Eigen::Success) {
      throw NumericalError("prediction: correlation matrix is not positive definite");
    }
    precision_ = chol_.solve(MatrixXd::Identity(sites_.rows(), sites_.rows()));
    precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
    prior_mean_ = design_.X * coefficients_;
  }

  const DesignMatrix& design() const { return design_; }
  const MatrixXd& precision() const { return precision_; }
  const VectorXd& prior_mean() const { return prior_mean_; }
  const VectorXd& fitted_logits() const { return fitted_logits_; }
  const CovParams& cov() const { return cov_; }
  const ModelOrder& order() const { return order_; }
  const MatrixXd& sites() const { return sites_; }
  const BinaryPanel& panel() const { return panel_; }
  Eigen::Index n_sites() const { return sites_.rows(); }

  /// Block index of absolute time s (0-based), if s is a response time.
  std::optional<Eigen::Index> block_of(Eigen::Index s) const {
    const Eigen::Index b = s - design_.first_time;
    if (b < 0 || b >= design_.n_blocks) return std::nullopt;
    return b;
  }

  /// Mean function at xnew; lags[k] = y_{s-1-k}, missing lags are 0.
  double mean_at(const VectorXd& xnew, std::vector<int> lags) const {
    lags.resize(order_.max_lag(), 0);
    return design_row(order_, xnew, lags).dot(coefficients_);
  }

  /// Mean function of every training site at absolute time s < T.
  VectorXd training_mean(Eigen::Index s) const {
    if (auto b = block_of(s)) return prior_mean_.segment(*b * n_sites(), n_sites());
    if (s < 0 || s >= panel_.T()) throw InputError("training_mean: time outside the panel");
    VectorXd mu(n_sites());
    for (Eigen::Index i = 0; i < n_sites(); ++i) {
      mu[i] = mean_at(sites_.row(i), site_lags(panel_, i, s, order_.max_lag()));
    }
    return mu;
  }

  SiteProjection project(const VectorXd& xnew) const {
    SiteProjection proj;
    for (Eigen::Index i = 0; i < n_sites(); ++i) {
      if (sites_.row(i).transpose() == xnew) {
        proj.coincident = i;
        break;
      }
    }
    const VectorXd r = cross_corr(kernel_, sites_, xnew);
    proj.weights = chol_.solve(r);
    const double resid = 1.0 - r.dot(proj.weights);
    proj.residual = resid < 0.0 ? 0.0 : resid;
    if (proj.coincident) proj.residual = 0.0;
    return proj;
  }

  /// Lemma-style conditional law given the logits of the training sites at
  /// the prediction time and their prior means.
  ConditionalLaw law(const SiteProjection& proj, double mean_new,
                     const Eigen::Ref<const VectorXd>& logits_s,
                     const Eigen::Ref<const VectorXd>& mu_s) const {
    ConditionalLaw out;
    if (proj.coincident) {
      const auto i = *proj.coincident;
      out.m = mean_new + (logits_s[i] - mu_s[i]);
      out.v = 0.0;
      return out;
    }
    out.m = mean_new + proj.weights.dot(logits_s - mu_s);
    out.v = cov_.sigma2 * proj.residual;
    return out;
  }

  /// Law of p(xnew) with no training information at that time step.
  ConditionalLaw prior_law(double mean_new) const { return {mean_new, cov_.sigma2}; }

 private:
  VectorXd coefficients_;
  CovParams cov_;
  KernelSpec kernel_;
  ModelOrder order_;
  MatrixXd sites_;
  BinaryPanel panel_;
  DesignMatrix design_;
  VectorXd fitted_logits_;
  Eigen::LLT<MatrixXd> chol_;
  MatrixXd precision_;
  VectorXd prior_mean_;
};

/// Conditional law of p_s(xnew) given the training probabilities p_s at
/// absolute time s (0-based, s < T) and the response history at xnew
/// (history[k] = y_k(xnew), oldest first; lags beyond it are 0).
inline ConditionalLaw conditional_law(const PredictionCache& cache, const VectorXd& xnew,
                               const std::vector<int>& history, const VectorXd& p_s,
                               Eigen::Index s) {
  if (p_s.size() != cache.n_sites()) throw InputError("conditional_law: p_s has wrong length");
  for (Eigen::Index i = 0; i < p_s.size(); ++i) {
    if (!(p_s[i] > 0.0 && p_s[i] < 1.0)) {
      throw InputError("conditional_law: p_s[" + std::to_string(i + 1) +
                       "] is not strictly inside (0, 1); clamp probabilities upstream");
    }
  }
  std::vector<int> lags(history.rbegin(), history.rend());
  const double mean_new = cache.mean_at(xnew, lags);
  const VectorXd logits = p_s.unaryExpr([](double p) { return logit(p); });
  return cache.law(cache.project(xnew), mean_new, logits, cache.training_mean(s));
}

inline ConditionalLaw conditional_law(const FittedModel& model, const VectorXd& xnew,
                               const std::vector<int>& history, const VectorXd& p_s,
                               Eigen::Index s) {
  return conditional_law(PredictionCache(model), xnew, history, p_s, s);
}

/// MMSPE predictor and its variance given the law: (kappa(m, v), tau(m, v)).
inline std::pair<double, double> mmspe_given_p(const ConditionalLaw& law) {
  const auto [m1, m2] = logitnormal_raw_moments(law.m, law.v);
  return {m1, std::max(0.0, m2 - m1 * m1)};
}

namespace prediction_detail {

inline double split_rhat(const Eigen::Ref<const VectorXd>& draws) {
  const Eigen::Index half = draws.size() / 2;
  if (half < 2) return 1.0;
  const VectorXd a = draws.head(half);
  const VectorXd b = draws.segment(half, half);
  auto var = [](const VectorXd& x) {
    return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
  };
  const double within = 0.5 * (var(a) + var(b));
  if (!(within > 0.0)) return 1.0;
  const double mean_a = a.mean();
  const double mean_b = b.mean();
  const double grand = 0.5 * (mean_a + mean_b);
  const double nh = static_cast<double>(half);
  const double between = nh * ((mean_a - grand) * (mean_a - grand) +
                               (mean_b - grand) * (mean_b - grand));
  const double var_plus = (nh - 1.0) / nh * within + between / nh;
  return std::sqrt(var_plus / within);
}

}  // namespace prediction_detail

/// Single-component MH draws of the training logits given Y. The chain starts
/// at the fitted logits; each sweep updates every component once, block by
/// block. Draws from sweep burn_in + thin * (j + 1) are retained.
inline MHSamples mh_sample_probs(const PredictionCache& cache, const MHConfig& cfg) {
  cfg.validate();
  const DesignMatrix& dm = cache.design();
  const Eigen::Index n = dm.n_sites;
  const MatrixXd& q = cache.precision();
  const VectorXd& mu = cache.prior_mean();
  const double sigma2 = cache.cov().sigma2;
  const VectorXd cond_sd = (sigma2 / q.diagonal().array()).sqrt();

  VectorXd state = cache.fitted_logits();
  VectorXd resid = state - mu;
  Rng rng(derive_seed(cfg.seed, 0));
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;

  MHSamples out;
  out.logits.resize(cfg.n_samples, dm.N());
  const long total_sweeps = static_cast<long>(cfg.burn_in) +
                            static_cast<long>(cfg.thin) * cfg.n_samples;
  int kept = 0;
  for (long sweep = 1; sweep <= total_sweeps; ++sweep) {
    for (Eigen::Index b = 0; b < dm.n_blocks; ++b) {
      auto e = resid.segment(b * n, n);
      for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index row = b * n + k;
        const double qkk = q(k, k);
        const double off = q.col(k).dot(e) - qkk * e[k];
        const double cond_mean = mu[row] - off / qkk;
        const double proposal = cond_mean + cond_sd[k] * standard_normal(rng);
        const double p_new = logistic(proposal);
        const double p_old = logistic(state[row]);
        const double ratio = dm.y[row] == 1.0 ? p_new / p_old : (1.0 - p_new) / (1.0 - p_old);
        ++proposed;
        if (uniform01(rng) < ratio) {
          state[row] = proposal;
          e[k] = proposal - mu[row];
          ++accepted;
        }
      }
    }
    if (sweep > cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0) {
      out.logits.row(kept++) = state.transpose();
    }
  }
  out.diagnostics.acceptance_rate =
      proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  double worst = 1.0;
  const MatrixXd probs = out.probabilities();
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    const double r = prediction_detail::split_rhat(probs.col(c));
    if (std::isfinite(r)) worst = std::max(worst, r);
  }
  out.diagnostics.max_split_rhat = worst;
  return out;
}

inline MHSamples mh_sample_probs(const FittedModel& model, const MHConfig& cfg) {
  return mh_sample_probs(PredictionCache(model), cfg);
}

/// Predictive summary of p_s(xnew) given Y, s = history.size(). Mean is the
/// average of kappa over draws; variance is the average tau plus the sample
/// variance of kappa; quantiles are sample quantiles of one logit-normal draw
/// per MH draw (stream derive_seed(seed, j + 1) for draw j).
inline PredictiveSummary predict_at(const PredictionCache& cache, const MHSamples& samples,
                             const VectorXd& xnew, const std::vector<int>& history,
                             const MHConfig& cfg, const std::vector<double>& levels) {
  for (double q : levels) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("quantile levels must lie in (0, 1)");
  }
  const auto s = static_cast<Eigen::Index>(history.size());
  const std::vector<int> lags(history.rbegin(), history.rend());
  const double mean_new = cache.mean_at(xnew, lags);
  const auto block = cache.block_of(s);
  const SiteProjection proj = cache.project(xnew);
  const Eigen::Index n = cache.n_sites();

  const Eigen::Index J = samples.size();
  std::vector<double> kappas(J);
  std::vector<double> taus(J);
  std::vector<double> draws(J);
  for (Eigen::Index j = 0; j < J; ++j) {
    ConditionalLaw law = cache.prior_law(mean_new);
    if (block) {
      const auto start = *block * n;
      law = cache.law(proj, mean_new, samples.logits.row(j).segment(start, n).transpose(),
                      cache.prior_mean().segment(start, n));
    }
    const auto [k, t] = mmspe_given_p(law);
    kappas[j] = k;
    taus[j] = t;
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(j) + 1));
    draws[j] = logitnormal_sample(law.m, law.v, rng);
  }
  PredictiveSummary out;
  double kbar = 0.0;
  double tbar = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) {
    kbar += kappas[j];
    tbar += taus[j];
  }
  kbar /= static_cast<double>(J);
  tbar /= static_cast<double>(J);
  double kvar = 0.0;
  if (J > 1) {
    for (double k : kappas) kvar += (k - kbar) * (k - kbar);
    kvar /= static_cast<double>(J - 1);
  }
  out.mean = kbar;
  out.variance = tbar + kvar;
  for (double q : levels) out.quantiles.emplace_back(q, sample_quantile(draws, q));
  out.n_mc = static_cast<int>(J);
  out.seed = cfg.seed;
  out.diagnostics = samples.diagnostics;
  return out;
}

inline PredictiveSummary predict_at(const FittedModel& model, const VectorXd& xnew,
                             const std::vector<int>& history, const MHConfig& cfg,
                             const std::vector<double>& levels = {0.025, 0.5, 0.975}) {
  const PredictionCache cache(model);
  const MHSamples samples = mh_sample_probs(cache, cfg);
  return predict_at(cache, samples, xnew, history, cfg, levels);
}

struct Emulation {
  MatrixXd p_paths;        // J x T_out
  Eigen::MatrixXi y_paths; // J x T_out
  VectorXd median_p;
  VectorXd median_y;
  VectorXd mean_p;
  std::vector<double> levels;
  MatrixXd bands;          // T_out x levels.size()
};

/// Emulates a new series at xnew. Path j pairs MH draw j with its own stream
/// derive_seed(seed, j + 1): for t = 0..T_out-1 it draws p_t(xnew) from the
/// conditional logit-normal (the prior law when t is not a training response
/// time) and y_t ~ Bernoulli(p_t). Lags before t = 0 are 0.
inline Emulation emulate_series(const PredictionCache& cache, const MHSamples& samples,
                         const VectorXd& xnew, Eigen::Index T_out,
                         const MHConfig& cfg, const std::vector<double>& levels = {},
                         unsigned threads = 1) {
  if (T_out < 1) throw InputError("emulate_series: T_out must be >= 1");
  for (double q : levels) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("quantile levels must lie in (0, 1)");
  }
  const Eigen::Index J = samples.size();
  const Eigen::Index n = cache.n_sites();
  const int max_lag = cache.order().max_lag();
  const SiteProjection proj = cache.project(xnew);

  Emulation out;
  out.p_paths.resize(J, T_out);
  out.y_paths.resize(J, T_out);
  parallel_for(static_cast<std::size_t>(J), threads, [&](std::size_t jj) {
    const auto j = static_cast<Eigen::Index>(jj);
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(j) + 1));
    std::vector<int> lags(max_lag, 0);
    for (Eigen::Index t = 0; t < T_out; ++t) {
      const double mean_new = cache.mean_at(xnew, lags);
      ConditionalLaw law = cache.prior_law(mean_new);
      if (auto block = cache.block_of(t)) {
        const auto start = *block * n;
        law = cache.law(proj, mean_new, samples.logits.row(j).segment(start, n).transpose(),
                        cache.prior_mean().segment(start, n));
      }
      const double p = logitnormal_sample(law.m, law.v, rng);
      const int y = bernoulli(rng, p);
      out.p_paths(j, t) = p;
      out.y_paths(j, t) = y;
      if (max_lag > 0) {
        std::rotate(lags.rbegin(), lags.rbegin() + 1, lags.rend());
        lags[0] = y;
      }
    }
  });

  out.levels = levels;
  out.median_p.resize(T_out);
  out.median_y.resize(T_out);
  out.mean_p.resize(T_out);
  out.bands.resize(T_out, static_cast<Eigen::Index>(levels.size()));
  for (Eigen::Index t = 0; t < T_out; ++t) {
    std::vector<double> ps(out.p_paths.col(t).data(), out.p_paths.col(t).data() + J);
    std::vector<double> ys(J);
    for (Eigen::Index j = 0; j < J; ++j) ys[j] = out.y_paths(j, t);
    out.median_p[t] = median(ps);
    out.median_y[t] = median(ys);
    out.mean_p[t] = out.p_paths.col(t).mean();
    for (std::size_t q = 0; q < levels.size(); ++q) {
      out.bands(t, static_cast<Eigen::Index>(q)) = sample_quantile(ps, levels[q]);
    }
  }
  return out;
}

inline Emulation emulate_series(const FittedModel& model, const VectorXd& xnew,
                         Eigen::Index T_out, const MHConfig& cfg,
                         const std::vector<double>& levels = {}, unsigned threads = 1) {
  const PredictionCache cache(model);
  const MHSamples samples = mh_sample_probs(cache, cfg);
  return emulate_series(cache, samples, xnew, T_out, cfg, levels, threads);
}

/// Bootstrap predictive draws y^(j) ~ Bernoulli(p^(j)).
inline std::vector<int> bootstrap_binary(const std::vector<double>& p_samples, Rng& rng) {
  std::vector<int> y;
  y.reserve(p_samples.size());
  for (double p : p_samples) y.push_back(bernoulli(rng, p));
  return y;
}

}  // namespace binarygp

#endif  // BINARYGP_PREDICTION_HPP
