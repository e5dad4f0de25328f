#ifndef BINARYGP_LOGITNORMAL_HPP
#define BINARYGP_LOGITNORMAL_HPP

// Moments, quantiles and draws of P = logistic(X), X ~ Normal(m, v).
//
// Moments are computed by quadrature over X:
//   * v <= kHermiteMaxVariance: Gauss-Hermite with kHermiteNodes nodes,
//     x = m + sqrt(2v) t. The integrand logistic(m + sqrt(2v) t) has poles at
//     distance pi / sqrt(2v) from the real axis, so the rule degrades as v grows.
//   * larger v: trapezoid rule in x over m +/- 12 sqrt(v). Its error is set by
//     the poles of the logistic at x = +/- i pi, independent of v, and decays
//     like exp(-2 pi^2 / h) in the step h.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "binarygp/common.hpp"
#include "binarygp/rng.hpp"

namespace binarygp {

struct LogitNormal {
  double m = 0.0;
  double v = 0.0;
};

namespace logitnormal_detail {

inline constexpr int kHermiteNodes = 64;
inline constexpr double kHermiteMaxVariance = 2.0;
inline constexpr int kTrapezoidMinNodes = 512;
inline constexpr double kTrapezoidMaxStep = 0.25;
inline constexpr double kTrapezoidHalfWidth = 12.0;

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;  // normalized to sum to 1 against N(0, 1/2)
};

/// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the physicists'
/// Hermite recurrence, weights sqrt(pi) * (first eigenvector component)^2.
/// Returned weights are divided by sqrt(pi).
inline Rule hermite_rule(int order) {
  MatrixXd jacobi = MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(jacobi);
  Rule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int k = 0; k < order; ++k) {
    rule.nodes[k] = eig.eigenvalues()[k];
    const double c = eig.eigenvectors()(0, k);
    rule.weights[k] = c * c;
  }
  return rule;
}

inline const Rule& default_hermite_rule() {
  static const Rule rule = hermite_rule(kHermiteNodes);
  return rule;
}

/// (E[P], E[P^2]) by the Gauss-Hermite rule.
inline std::pair<double, double> hermite_moments(double m, double v, const Rule& rule) {
  const double scale = std::sqrt(2.0 * v);
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double p = logistic(m + scale * rule.nodes[k]);
    m1 += rule.weights[k] * p;
    m2 += rule.weights[k] * p * p;
  }
  return {m1, m2};
}

/// (E[P], E[P^2]) by the trapezoid rule on the normal scale. `min_nodes`
/// overrides the node floor (used by convergence checks).
inline std::pair<double, double> trapezoid_moments(double m, double v,
                                                   int min_nodes = kTrapezoidMinNodes) {
  const double sd = std::sqrt(v);
  const double width = 2.0 * kTrapezoidHalfWidth * sd;
  const int intervals = std::max(
      min_nodes - 1, static_cast<int>(std::ceil(width / kTrapezoidMaxStep)));
  const double h = width / intervals;
  double mass = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double z = -kTrapezoidHalfWidth + k * (h / sd);
    const double w = (k == 0 || k == intervals ? 0.5 : 1.0) * std::exp(-0.5 * z * z);
    const double p = logistic(m + sd * z);
    mass += w;
    m1 += w * p;
    m2 += w * p * p;
  }
  return {m1 / mass, m2 / mass};
}

}  // namespace logitnormal_detail

/// (E[P], E[P^2]) under the default quadrature policy.
inline std::pair<double, double> logitnormal_raw_moments(double m, double v) {
  if (v < 0.0) throw InputError("logit-normal variance must be nonnegative");
  if (v == 0.0) {
    const double p = logistic(m);
    return {p, p * p};
  }
  if (v <= logitnormal_detail::kHermiteMaxVariance) {
    return logitnormal_detail::hermite_moments(m, v, logitnormal_detail::default_hermite_rule());
  }
  return logitnormal_detail::trapezoid_moments(m, v);
}

/// kappa(m, v) = E[logistic(X)], X ~ N(m, v).
inline double kappa(double m, double v) { return logitnormal_raw_moments(m, v).first; }

/// Second raw moment E[logistic(X)^2].
inline double kappa2(double m, double v) { return logitnormal_raw_moments(m, v).second; }

/// tau(m, v) = Var[logistic(X)].
inline double tau(double m, double v) {
  const auto [m1, m2] = logitnormal_raw_moments(m, v);
  return std::max(0.0, m2 - m1 * m1);
}

inline double standard_normal_quantile(double q) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), q);
}

inline double standard_normal_cdf(double z) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), z);
}

/// q-th quantile logistic(m + z_q sqrt(v)).
inline double logitnormal_quantile(double m, double v, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw InputError("quantile level must lie in (0, 1), got " + std::to_string(q));
  }
  if (v < 0.0) throw InputError("logit-normal variance must be nonnegative");
  if (v == 0.0) return logistic(m);
  return logistic(m + standard_normal_quantile(q) * std::sqrt(v));
}

inline double logitnormal_sample(double m, double v, Rng& rng) {
  const double z = standard_normal(rng);
  return logistic(m + std::sqrt(std::max(v, 0.0)) * z);
}

inline double kappa(const LogitNormal& law) { return kappa(law.m, law.v); }
inline double tau(const LogitNormal& law) { return tau(law.m, law.v); }

}  // namespace binarygp

#endif  // BINARYGP_LOGITNORMAL_HPP
