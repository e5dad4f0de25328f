#ifndef BINARYGP_SIMGEN_HPP
#define BINARYGP_SIMGEN_HPP

// Synthetic panels: the GP binary time-series model itself, a modified
// Friedman function with a lag-one term, and a one-dimensional demo curve.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "binarygp/common.hpp"
#include "binarygp/estimation.hpp"
#include "binarygp/kernel.hpp"
#include "binarygp/panel.hpp"
#include "binarygp/rng.hpp"

namespace binarygp {

enum class Generator { GPModel, Friedman, Custom1D };

inline std::string to_string(Generator g) {
  switch (g) {
    case Generator::GPModel:
      return "gp_model";
    case Generator::Friedman:
      return "friedman";
    case Generator::Custom1D:
      return "demo_1d";
  }
  return "unknown";
}

inline Generator generator_from_string(const std::string& s) {
  if (s == "gp_model") return Generator::GPModel;
  if (s == "friedman") return Generator::Friedman;
  if (s == "demo_1d") return Generator::Custom1D;
  throw InputError("unknown generator '" + s + "' (gp_model, friedman, demo_1d)");
}

/// Data-generating truth. coefficients/cov/kernel/order are used by the
/// GP-model generator only.
struct TruthSpec {
  Generator generator = Generator::GPModel;
  Coefficients coefficients;
  CovParams cov;
  KernelSpec kernel;
  ModelOrder order;
  int grid_levels = 4;
  std::uint64_t seed = 1;
};

/// Truth of the five-dimensional estimation study: alpha_0 = 0.5,
/// alpha = (-3, 2, -2, 1, 0.5), phi_1 = 0.8, sigma^2 = 1,
/// theta = (0.5, 1, 1.5, 2, 2.5), power 2, sites drawn from a 4^5 grid.
inline TruthSpec default_gp_truth(std::uint64_t seed = 1) {
  TruthSpec spec;
  spec.generator = Generator::GPModel;
  spec.order = ModelOrder{1, 0};
  spec.coefficients.order = spec.order;
  spec.coefficients.d = 5;
  spec.coefficients.values.resize(7);
  spec.coefficients.values << 0.5, 0.8, -3.0, 2.0, -2.0, 1.0, 0.5;
  spec.cov.sigma2 = 1.0;
  spec.cov.theta.resize(5);
  spec.cov.theta << 0.5, 1.0, 1.5, 2.0, 2.5;
  spec.kernel.power = 2.0;
  spec.kernel.lengthscales = spec.cov.theta;
  spec.grid_levels = 4;
  spec.seed = seed;
  return spec;
}

struct SimulatedPanel {
  InputDesign inputs;
  BinaryPanel panel;
  MatrixXd true_p;  // n x T

  /// Rows [first, first + count) as a separate panel.
  SimulatedPanel slice(Eigen::Index first, Eigen::Index count) const {
    SimulatedPanel out;
    out.inputs.sites = inputs.sites.middleRows(first, count);
    out.inputs.names = inputs.names;
    out.panel.y = panel.y.middleRows(first, count);
    out.true_p = true_p.middleRows(first, count);
    return out;
  }
};

/// n distinct points of the regular grid {0, 1/(g-1), ..., 1}^d, sampled
/// without replacement.
inline MatrixXd sample_grid(Eigen::Index n, Eigen::Index d, int levels, Rng& rng) {
  if (levels < 2) throw InputError("grid needs at least 2 levels per dimension");
  const double total = std::pow(static_cast<double>(levels), static_cast<double>(d));
  if (static_cast<double>(n) > total) {
    throw InputError("cannot draw " + std::to_string(n) + " distinct sites from a " +
                     std::to_string(levels) + "^" + std::to_string(d) + " grid");
  }
  const auto count = static_cast<std::uint64_t>(total);
  std::vector<std::uint64_t> cells(count);
  std::iota(cells.begin(), cells.end(), 0);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::uniform_int_distribution<std::uint64_t> pick(k, count - 1);
    std::swap(cells[k], cells[pick(rng)]);
  }
  MatrixXd sites(n, d);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::uint64_t c = cells[k];
    for (Eigen::Index l = 0; l < d; ++l) {
      sites(k, l) = static_cast<double>(c % levels) / (levels - 1);
      c /= levels;
    }
  }
  return sites;
}

/// Simulates the GP model on the given sites: Z_t ~ N(0, sigma^2 R_theta)
/// independently per t, logit p_it from the mean function with pre-sample
/// lags equal to 0, y_it ~ Bernoulli(p_it).
inline SimulatedPanel simulate_gp_on_sites(const TruthSpec& spec, const MatrixXd& sites,
                                           Eigen::Index T, Rng& rng) {
  const Eigen::Index n = sites.rows();
  const Eigen::Index d = sites.cols();
  if (spec.coefficients.values.size() != spec.order.n_coefficients(d)) {
    throw InputError("truth coefficients do not match order and dimension");
  }
  KernelSpec kernel = spec.kernel;
  kernel.lengthscales = spec.cov.theta;
  Eigen::LLT<MatrixXd> chol;
  const bool has_gp = spec.cov.sigma2 > 0.0;
  if (has_gp) {
    chol.compute(regularized_corr_matrix(kernel, sites));
    if (chol.info() != Eigen::Success) throw NumericalError("truth correlation not PD");
  }
  const double sd = std::sqrt(std::max(spec.cov.sigma2, 0.0));

  SimulatedPanel out;
  out.inputs.sites = sites;
  out.panel.y.resize(n, T);
  out.true_p.resize(n, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    VectorXd z = VectorXd::Zero(n);
    if (has_gp) {
      VectorXd e(n);
      for (Eigen::Index i = 0; i < n; ++i) e[i] = standard_normal(rng);
      z = chol.matrixL() * e;
      z *= sd;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto lags = site_lags(out.panel, i, t, spec.order.max_lag());
      const double eta =
          design_row(spec.order, sites.row(i), lags).dot(spec.coefficients.values) + z[i];
      const double p = logistic(eta);
      out.true_p(i, t) = p;
      out.panel.y(i, t) = bernoulli(rng, p);
    }
  }
  return out;
}

/// GP-model panel on n grid sites.
inline SimulatedPanel gen_gp_panel(const TruthSpec& spec, Eigen::Index n, Eigen::Index T) {
  if (n < 1 || T < 1) throw InputError("gen_gp_panel: n and T must be positive");
  Rng rng(spec.seed);
  const MatrixXd sites = sample_grid(n, spec.coefficients.d, spec.grid_levels, rng);
  return simulate_gp_on_sites(spec, sites, T, rng);
}

/// logit p_t(x) = y_{t-1}(x) + [10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5] / 3 - 5.
inline double friedman_logit(const Eigen::Ref<const VectorXd>& x, int y_prev) {
  const double f = 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) +
                   20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] + 5.0 * x[4];
  return y_prev + f / 3.0 - 5.0;
}

/// Friedman panel: inputs uniform on [0, 1]^5, y_0 = 0 for every site.
inline SimulatedPanel gen_friedman_panel(Eigen::Index n, Eigen::Index T, std::uint64_t seed) {
  if (n < 1 || T < 1) throw InputError("gen_friedman_panel: n and T must be positive");
  Rng rng(seed);
  SimulatedPanel out;
  out.inputs.sites.resize(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < 5; ++l) out.inputs.sites(i, l) = uniform01(rng);
  }
  out.panel.y.resize(n, T);
  out.true_p.resize(n, T);
  for (Eigen::Index i = 0; i < n; ++i) {
    int prev = 0;
    for (Eigen::Index t = 0; t < T; ++t) {
      const double p = logistic(friedman_logit(out.inputs.sites.row(i).transpose(), prev));
      out.true_p(i, t) = p;
      prev = bernoulli(rng, p);
      out.panel.y(i, t) = prev;
    }
  }
  return out;
}

/// p(x) = 0.4 exp(-1.2 x) cos(3.5 pi x) + 0.4.
inline double demo_curve(double x) {
  return 0.4 * std::exp(-1.2 * x) * std::cos(3.5 * std::numbers::pi * x) + 0.4;
}

/// n evenly spaced sites on [0, 1] with one Bernoulli draw each.
inline SimulatedPanel gen_demo_1d(Eigen::Index n_sites, std::uint64_t seed) {
  if (n_sites < 2) throw InputError("gen_demo_1d needs at least 2 sites");
  Rng rng(seed);
  SimulatedPanel out;
  out.inputs.sites.resize(n_sites, 1);
  out.panel.y.resize(n_sites, 1);
  out.true_p.resize(n_sites, 1);
  for (Eigen::Index i = 0; i < n_sites; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n_sites - 1);
    out.inputs.sites(i, 0) = x;
    out.true_p(i, 0) = demo_curve(x);
    out.panel.y(i, 0) = bernoulli(rng, out.true_p(i, 0));
  }
  return out;
}

}  // namespace binarygp

#endif  // BINARYGP_SIMGEN_HPP
