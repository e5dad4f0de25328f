#ifndef BINARYGP_ESTIMATION_HPP
#define BINARYGP_ESTIMATION_HPP

// Penalized quasi-partial-likelihood estimation of the binary time-series GP.
//
// With rows ordered time-major, V(omega) = W^{-1} + sigma^2 (R_theta per time
// step) is block diagonal: one n x n block per effective time step. Every
// product with V^{-1} and log|V| are accumulated from per-block Cholesky
// factors; the N x N matrix is never formed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "binarygp/common.hpp"
#include "binarygp/kernel.hpp"
#include "binarygp/optimize.hpp"
#include "binarygp/panel.hpp"

namespace binarygp {

/// Mean-function coefficients. `values` is in design-column order:
/// (alpha_0, phi_1..phi_R, alpha_1..alpha_d, gamma_1, ..., gamma_L).
struct Coefficients {
  VectorXd values;
  ModelOrder order;
  Eigen::Index d = 0;

  double alpha0() const { return values[0]; }
  VectorXd phi() const { return values.segment(1, order.ar); }
  VectorXd alpha() const { return values.segment(1 + order.ar, d); }
  VectorXd gamma(int lag) const {
    return values.segment(1 + order.ar + d + (lag - 1) * d, d);
  }
  std::vector<std::string> names() const { return coefficient_names(order, d); }
};

/// GP variance sigma^2 and per-dimension lengthscales theta.
struct CovParams {
  double sigma2 = 1.0;
  VectorXd theta;

  void validate() const {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
      throw InputError("sigma2 must be positive and finite");
    }
    if (theta.size() == 0 || (theta.array() <= 0.0).any() || !theta.allFinite()) {
      throw InputError("theta entries must be positive and finite");
    }
  }

  VectorXd log_params() const {
    VectorXd x(theta.size() + 1);
    x[0] = std::log(sigma2);
    x.tail(theta.size()) = theta.array().log();
    return x;
  }

  static CovParams from_log(const VectorXd& x) {
    CovParams c;
    c.sigma2 = std::exp(x[0]);
    c.theta = x.tail(x.size() - 1).array().exp();
    return c;
  }
};

/// Fitted conditional means and IWLS working quantities, one entry per
/// design row.
struct FitState {
  VectorXd p;
  VectorXd eta_tilde;
  VectorXd z;
  VectorXd w;
};

struct ConvergenceReport {
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double delta_beta = 0.0;
  double delta_log_omega = 0.0;
  double reml_value = 0.0;
  double score_norm = 0.0;
  bool separation = false;
  // REML objective at the accepted point of each outer iteration.
  std::vector<double> reml_trace;
};

struct FittedModel {
  Coefficients coefficients;
  CovParams cov;
  KernelSpec kernel;  // lengthscales equal cov.theta
  ModelOrder order;
  FitState state;
  InputDesign inputs;
  BinaryPanel panel;
  ConvergenceReport report;
};

struct FitOptions {
  double inner_tol = 1e-6;
  int max_inner = 100;
  double outer_tol = 1e-4;
  int max_outer = 50;
  double log_theta_min = -6.0;
  double log_theta_max = 6.0;
  double log_sigma2_min = -12.0;
  double log_sigma2_max = 8.0;
  int restarts = 3;
  SimplexOptions simplex;
  // When set, omega is held fixed and only the IWLS loop runs.
  std::optional<CovParams> fixed_cov;
};

/// eta~ = log(p / (1 - p)) + (y - p) / (p (1 - p)), p clamped.
inline VectorXd working_response(const VectorXd& y, const VectorXd& p) {
  if (y.size() != p.size()) throw InputError("working_response: size mismatch");
  VectorXd eta(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double pk = clamp_prob(p[k]);
    eta[k] = logit(pk) + (y[k] - pk) / (pk * (1.0 - pk));
  }
  return eta;
}

inline VectorXd weights_from_probs(const VectorXd& p) {
  return p.unaryExpr([](double v) {
    const double c = clamp_prob(v);
    return c * (1.0 - c);
  });
}

/// Per-time-block Cholesky factors of V_t = diag(1 / w_t) + sigma^2 R.
class BlockSystem {
 public:
  BlockSystem(const DesignMatrix& dm, const VectorXd& w, double sigma2,
              const MatrixXd& corr)
      : n_(dm.n_sites), blocks_(dm.n_blocks) {
    factors_.reserve(blocks_);
    for (Eigen::Index b = 0; b < blocks_; ++b) {
      MatrixXd v = sigma2 * corr;
      v.diagonal() += w.segment(b * n_, n_).cwiseInverse();
      factors_.emplace_back(v);
      if (factors_.back().info() != Eigen::Success) {
        ok_ = false;
        return;
      }
      log_det_ += 2.0 * factors_.back().matrixLLT().diagonal().array().log().sum();
    }
  }

  bool ok() const { return ok_; }
  double log_det() const { return log_det_; }

  /// V^{-1} a, block by block; a has N rows.
  MatrixXd solve(const MatrixXd& a) const {
    MatrixXd out(a.rows(), a.cols());
    for (Eigen::Index b = 0; b < blocks_; ++b) {
      out.middleRows(b * n_, n_) = factors_[b].solve(a.middleRows(b * n_, n_));
    }
    return out;
  }

 private:
  Eigen::Index n_;
  Eigen::Index blocks_;
  std::vector<Eigen::LLT<MatrixXd>> factors_;
  double log_det_ = 0.0;
  bool ok_ = true;
};

/// Columns of a symmetric PSD matrix that are linearly dependent on others.
inline std::vector<Eigen::Index> deficient_columns(const MatrixXd& gram) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(gram);
  qr.setThreshold(1e-10);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = qr.rank(); k < gram.cols(); ++k) {
    cols.push_back(qr.colsPermutation().indices()[k]);
  }
  std::sort(cols.begin(), cols.end());
  return cols;
}

inline std::string describe_columns(const std::vector<Eigen::Index>& cols,
                                    const std::vector<std::string>& names) {
  std::string out;
  for (auto c : cols) {
    if (!out.empty()) out += ", ";
    out += c < static_cast<Eigen::Index>(names.size()) ? names[c] : std::to_string(c + 1);
  }
  return out;
}

struct IwlsResult {
  VectorXd beta;
  VectorXd z;
};

/// One IWLS update: beta solves (X'V^{-1}X) beta = X'V^{-1} eta~ and
/// Z = sigma^2 (R per block) V^{-1} (eta~ - X beta). `corr` should already
/// carry the nugget.
inline IwlsResult iwls_step(const DesignMatrix& dm, const VectorXd& eta_tilde,
                            const VectorXd& w, const CovParams& cov, const MatrixXd& corr,
                            const std::vector<std::string>& names = {}) {
  BlockSystem sys(dm, w, cov.sigma2, corr);
  if (!sys.ok()) throw NumericalError("iwls_step: V(omega) block is not positive definite");
  const MatrixXd vinv_x = sys.solve(dm.X);
  const MatrixXd gram = dm.X.transpose() * vinv_x;
  const auto bad = deficient_columns(gram);
  if (!bad.empty()) {
    throw NumericalError("iwls_step: X'V^{-1}X is singular; deficient column(s): " +
                         describe_columns(bad, names));
  }
  IwlsResult out;
  out.beta = gram.ldlt().solve(vinv_x.transpose() * eta_tilde);
  const VectorXd resid = sys.solve(eta_tilde - dm.X * out.beta);
  out.z.resize(dm.N());
  for (Eigen::Index b = 0; b < dm.n_blocks; ++b) {
    out.z.segment(b * dm.n_sites, dm.n_sites) =
        cov.sigma2 * corr * resid.segment(b * dm.n_sites, dm.n_sites);
  }
  return out;
}

/// REML negative log-likelihood
///   (N-m)/2 log 2pi - 1/2 log|X'X| + 1/2 log|V| + 1/2 log|X'V^{-1}X|
///   + 1/2 eta~' Pi eta~,
/// Pi = V^{-1} - V^{-1}X(X'V^{-1}X)^{-1}X'V^{-1}. Returns +inf when V or
/// X'V^{-1}X cannot be factorized.
inline double reml_negloglik(const CovParams& cov, const DesignMatrix& dm,
                             const VectorXd& eta_tilde, const VectorXd& w,
                             const KernelSpec& kernel, const InputDesign& inputs) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  KernelSpec spec = kernel;
  spec.lengthscales = cov.theta;
  const MatrixXd corr = regularized_corr_matrix(spec, inputs.sites);

  // Stream over time blocks with one reused factorization workspace.
  const Eigen::Index n = dm.n_sites;
  const Eigen::Index m = dm.m();
  MatrixXd gram = MatrixXd::Zero(m, m);
  VectorXd xt_vinv_eta = VectorXd::Zero(m);
  double eta_vinv_eta = 0.0;
  double log_det_v = 0.0;
  MatrixXd block(n, n);
  MatrixXd rhs(n, m + 1);
  Eigen::LLT<MatrixXd> llt(n);
  for (Eigen::Index b = 0; b < dm.n_blocks; ++b) {
    block = cov.sigma2 * corr;
    block.diagonal() += w.segment(b * n, n).cwiseInverse();
    llt.compute(block);
    if (llt.info() != Eigen::Success) return inf;
    log_det_v += 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    rhs.leftCols(m) = dm.X.middleRows(b * n, n);
    rhs.col(m) = eta_tilde.segment(b * n, n);
    llt.matrixL().solveInPlace(rhs);  // rhs <- L^{-1} [X_t, eta_t]
    gram.noalias() += rhs.leftCols(m).transpose() * rhs.leftCols(m);
    xt_vinv_eta.noalias() += rhs.leftCols(m).transpose() * rhs.col(m);
    eta_vinv_eta += rhs.col(m).squaredNorm();
  }
  Eigen::LLT<MatrixXd> gram_llt(gram);
  if (gram_llt.info() != Eigen::Success) return inf;
  const double quad = eta_vinv_eta - xt_vinv_eta.dot(gram_llt.solve(xt_vinv_eta));

  Eigen::LLT<MatrixXd> xtx_llt(dm.X.transpose() * dm.X);
  if (xtx_llt.info() != Eigen::Success) return inf;
  const double log_det_xtx = 2.0 * xtx_llt.matrixLLT().diagonal().array().log().sum();
  const double log_det_gram = 2.0 * gram_llt.matrixLLT().diagonal().array().log().sum();

  const double n_minus_m = static_cast<double>(dm.N() - m);
  return 0.5 * n_minus_m * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_xtx +
         0.5 * log_det_v + 0.5 * log_det_gram + 0.5 * quad;
}

/// Score X'(y - p) of the PQPL function in the max norm.
inline double score_norm(const DesignMatrix& dm, const VectorXd& p) {
  return (dm.X.transpose() * (dm.y - p)).cwiseAbs().maxCoeff();
}

namespace estimation_detail {

struct InnerResult {
  VectorXd beta;
  FitState state;
  int iterations = 0;
};

inline InnerResult run_inner(const DesignMatrix& dm, const CovParams& cov,
                             const MatrixXd& corr, FitState state,
                             const FitOptions& opts,
                             const std::vector<std::string>& names) {
  InnerResult out;
  for (int it = 0; it < opts.max_inner; ++it) {
    ++out.iterations;
    state.w = weights_from_probs(state.p);
    auto step = iwls_step(dm, state.eta_tilde, state.w, cov, corr, names);
    const VectorXd linear = dm.X * step.beta + step.z;
    state.p = linear.unaryExpr([](double v) { return clamp_prob(logistic(v)); });
    state.z = std::move(step.z);
    out.beta = std::move(step.beta);
    const VectorXd eta_new = working_response(dm.y, state.p);
    const double delta = (eta_new - state.eta_tilde).cwiseAbs().maxCoeff();
    state.eta_tilde = eta_new;
    if (delta < opts.inner_tol) break;
  }
  state.w = weights_from_probs(state.p);
  out.state = std::move(state);
  return out;
}

}  // namespace estimation_detail

/// Minimizes the REML objective over log omega with W and eta~ held fixed,
/// from `restarts` deterministic starting points. Returns the best point and
/// the per-iteration best-value trace of the winning run.
inline SimplexResult minimize_reml(const CovParams& start, const DesignMatrix& dm,
                                   const VectorXd& eta_tilde, const VectorXd& w,
                                   const KernelSpec& kernel, const InputDesign& inputs,
                                   const FitOptions& opts) {
  const Eigen::Index d = inputs.d();
  BoxBounds box;
  box.lower.resize(d + 1);
  box.upper.resize(d + 1);
  box.lower[0] = opts.log_sigma2_min;
  box.upper[0] = opts.log_sigma2_max;
  box.lower.tail(d).setConstant(opts.log_theta_min);
  box.upper.tail(d).setConstant(opts.log_theta_max);

  auto objective = [&](const VectorXd& x) {
    return reml_negloglik(CovParams::from_log(x), dm, eta_tilde, w, kernel, inputs);
  };
  const VectorXd x0 = box.project(start.log_params());
  std::vector<VectorXd> starts{x0};
  VectorXd origin = box.project(VectorXd::Zero(d + 1));
  VectorXd shifted = x0;
  shifted[0] -= 0.5;
  shifted.tail(d).array() += 1.0;
  for (const VectorXd& cand : {origin, box.project(shifted)}) {
    if (static_cast<int>(starts.size()) >= opts.restarts) break;
    const bool dup = std::any_of(starts.begin(), starts.end(), [&](const VectorXd& s) {
      return (s - cand).cwiseAbs().maxCoeff() < 1e-12;
    });
    starts.push_back(dup ? box.project(cand.array() + 0.25) : cand);
  }
  SimplexResult best;
  for (const auto& s : starts) {
    auto res = minimize_in_box(objective, s, box, opts.simplex);
    if (res.value < best.value) best = std::move(res);
  }
  return best;
}

/// Fits (beta, omega): IWLS inner loop to convergence of eta~, then REML
/// minimization over omega, repeated until beta and log omega stop moving.
/// Non-convergence is reported in the returned model, not thrown.
inline FittedModel fit(const InputDesign& inputs, const BinaryPanel& panel,
                       const ModelOrder& order, const KernelSpec& kernel,
                       const FitOptions& opts = {}) {
  const DesignMatrix dm = build_design(inputs, panel, order);
  KernelSpec spec = kernel;
  if (spec.lengthscales.size() != inputs.d()) spec.lengthscales = VectorXd::Ones(inputs.d());
  spec.validate();
  duplicate_sites(inputs.sites);
  const auto names = coefficient_names(order, inputs.d());

  FittedModel model;
  model.order = order;
  model.inputs = inputs;
  model.panel = panel;
  const double ybar = dm.y.mean();
  model.report.separation = ybar == 0.0 || ybar == 1.0;
  if (model.report.separation) {
    logger().warn("all responses are identical; estimates are driven by probability clamping");
  }

  CovParams cov;
  if (opts.fixed_cov) {
    cov = *opts.fixed_cov;
  } else {
    cov.sigma2 = 1.0;
    cov.theta = VectorXd::Ones(inputs.d());
  }
  cov.validate();

  FitState state;
  state.p = (dm.y.array() + 0.5) / 2.0;
  state.eta_tilde = working_response(dm.y, state.p);
  state.z = VectorXd::Zero(dm.N());
  VectorXd beta = VectorXd::Zero(dm.m());

  auto& rep = model.report;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    ++rep.outer_iterations;
    spec.lengthscales = cov.theta;
    const MatrixXd corr = regularized_corr_matrix(spec, inputs.sites);
    auto inner = estimation_detail::run_inner(dm, cov, corr, state, opts, names);
    rep.inner_iterations += inner.iterations;
    rep.delta_beta = (inner.beta - beta).cwiseAbs().maxCoeff();
    beta = inner.beta;
    state = std::move(inner.state);

    if (opts.fixed_cov) {
      rep.delta_log_omega = 0.0;
      rep.converged = rep.delta_beta < opts.outer_tol;
    } else {
      const auto res = minimize_reml(cov, dm, state.eta_tilde, state.w, spec, inputs, opts);
      const CovParams next = CovParams::from_log(res.x);
      rep.delta_log_omega = (res.x - cov.log_params()).cwiseAbs().maxCoeff();
      rep.reml_trace.push_back(res.value);
      cov = next;
      rep.converged = rep.delta_beta < opts.outer_tol && rep.delta_log_omega < opts.outer_tol;
    }
    logger().debug("outer {}: |dbeta| {:.3e} |dlog omega| {:.3e} sigma2 {:.4f}", outer + 1,
                   rep.delta_beta, rep.delta_log_omega, cov.sigma2);
    if (rep.converged) break;
  }
  if (!rep.converged) {
    logger().warn("estimation did not converge after {} outer iterations", rep.outer_iterations);
  }

  // Re-solve the inner loop at the final omega so (beta, Z, p) are consistent.
  spec.lengthscales = cov.theta;
  const MatrixXd corr = regularized_corr_matrix(spec, inputs.sites);
  auto inner = estimation_detail::run_inner(dm, cov, corr, state, opts, names);
  rep.inner_iterations += inner.iterations;
  state = std::move(inner.state);
  beta = inner.beta;
  rep.reml_value = reml_negloglik(cov, dm, state.eta_tilde, state.w, spec, inputs);
  rep.score_norm = score_norm(dm, state.p);

  model.coefficients.values = beta;
  model.coefficients.order = order;
  model.coefficients.d = inputs.d();
  model.cov = cov;
  model.kernel = spec;
  model.state = std::move(state);
  return model;
}

/// Model with given parameters instead of estimated ones; the state holds the
/// prior means p = logistic(X beta) with Z = 0. Used for simulation truths and
/// for prediction with known parameters.
inline FittedModel assemble_model(const InputDesign& inputs, const BinaryPanel& panel,
                                  const ModelOrder& order, const VectorXd& coefficients,
                                  const CovParams& cov, const KernelSpec& kernel) {
  const DesignMatrix dm = build_design(inputs, panel, order);
  if (coefficients.size() != dm.m()) {
    throw InputError("assemble_model: expected " + std::to_string(dm.m()) +
                     " coefficients, got " + std::to_string(coefficients.size()));
  }
  cov.validate();
  FittedModel model;
  model.coefficients.values = coefficients;
  model.coefficients.order = order;
  model.coefficients.d = inputs.d();
  model.cov = cov;
  model.kernel = kernel;
  model.kernel.lengthscales = cov.theta;
  model.kernel.validate();
  model.order = order;
  model.inputs = inputs;
  model.panel = panel;
  const VectorXd linear = dm.X * coefficients;
  model.state.p = linear.unaryExpr([](double v) { return clamp_prob(logistic(v)); });
  model.state.z = VectorXd::Zero(dm.N());
  model.state.w = weights_from_probs(model.state.p);
  model.state.eta_tilde = working_response(dm.y, model.state.p);
  model.report.converged = true;
  return model;
}

/// Design matrix of a fitted model's training data.
inline DesignMatrix training_design(const FittedModel& model) {
  return build_design(model.inputs, model.panel, model.order);
}

}  // namespace binarygp

#endif  // BINARYGP_ESTIMATION_HPP
