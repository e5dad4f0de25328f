#ifndef BINARYGP_KERNEL_HPP
#define BINARYGP_KERNEL_HPP

#include <cmath>
#include <utility>
#include <vector>
#include <string>

#include "binarygp/common.hpp"

namespace binarygp {

/// Correlation families understood by the kernel module. New families (for
/// instance an orthogonal correlation derived from the power exponential) are
/// added here and dispatched in kernel_eval.
enum class KernelFamily { PowerExponential };

inline std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::PowerExponential:
      return "power_exponential";
  }
  return "unknown";
}

inline KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "power_exponential" || name == "pe") {
    return KernelFamily::PowerExponential;
  }
  throw InputError("unknown kernel family '" + name +
                   "' (supported: power_exponential)");
}

/// Diagonal regularization added to every correlation matrix before it is
/// factorized.
inline constexpr double kNugget = 1e-8;

struct KernelSpec {
  KernelFamily family = KernelFamily::PowerExponential;
  double power = 2.0;
  VectorXd lengthscales;

  Eigen::Index dim() const { return lengthscales.size(); }

  void validate() const {
    if (!(power > 0.0 && power <= 2.0)) {
      throw InputError("kernel power must lie in (0, 2], got " +
                       std::to_string(power));
    }
    if (lengthscales.size() == 0) {
      throw InputError("kernel needs at least one lengthscale");
    }
    for (Eigen::Index l = 0; l < lengthscales.size(); ++l) {
      if (!(lengthscales[l] > 0.0) || !std::isfinite(lengthscales[l])) {
        throw InputError("kernel lengthscale theta_" + std::to_string(l + 1) +
                         " must be positive and finite");
      }
    }
  }
};

/// R(xi, xj) = exp{-sum_l |xi_l - xj_l|^p / theta_l}.
template <typename A, typename B>
double kernel_eval(const KernelSpec& spec, const Eigen::MatrixBase<A>& xi,
                   const Eigen::MatrixBase<B>& xj) {
  if (xi.size() != spec.dim() || xj.size() != spec.dim()) {
    throw InputError("kernel_eval: point dimension " + std::to_string(xi.size()) +
                     "/" + std::to_string(xj.size()) +
                     " does not match kernel dimension " +
                     std::to_string(spec.dim()));
  }
  switch (spec.family) {
    case KernelFamily::PowerExponential: {
      double s = 0.0;
      for (Eigen::Index l = 0; l < spec.dim(); ++l) {
        if (!(spec.lengthscales[l] > 0.0)) {
          throw InputError("kernel lengthscales must be positive");
        }
        const double diff = std::abs(xi[l] - xj[l]);
        const double term = spec.power == 2.0 ? diff * diff : std::pow(diff, spec.power);
        s += term / spec.lengthscales[l];
      }
      return std::exp(-s);
    }
  }
  throw InputError("unsupported kernel family");
}

/// Pairwise correlation matrix of the rows of `sites` (n x d). No nugget.
inline MatrixXd corr_matrix(const KernelSpec& spec, const MatrixXd& sites) {
  spec.validate();
  if (sites.cols() != spec.dim()) {
    throw InputError("corr_matrix: design has " + std::to_string(sites.cols()) +
                     " columns but kernel has " + std::to_string(spec.dim()) +
                     " lengthscales");
  }
  const Eigen::Index n = sites.rows();
  MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel_eval(spec, sites.row(i), sites.row(j));
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

/// Correlation matrix with the nugget on the diagonal, ready to factorize.
inline MatrixXd regularized_corr_matrix(const KernelSpec& spec, const MatrixXd& sites) {
  MatrixXd r = corr_matrix(spec, sites);
  r.diagonal().array() += kNugget;
  return r;
}

/// r(xnew) = (R(xnew, x_1), ..., R(xnew, x_n)).
template <typename A>
VectorXd cross_corr(const KernelSpec& spec, const MatrixXd& sites,
                    const Eigen::MatrixBase<A>& xnew) {
  if (xnew.size() != sites.cols()) {
    throw InputError("cross_corr: new point has dimension " +
                     std::to_string(xnew.size()) + ", design has " +
                     std::to_string(sites.cols()));
  }
  VectorXd r(sites.rows());
  for (Eigen::Index i = 0; i < sites.rows(); ++i) {
    r[i] = kernel_eval(spec, xnew, sites.row(i));
  }
  return r;
}

/// Index pairs (i, j), i < j, of sites that coincide exactly. Such designs are
/// allowed but make R_theta singular up to the nugget.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> duplicate_sites(
    const MatrixXd& sites) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> dups;
  for (Eigen::Index i = 0; i < sites.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < sites.rows(); ++j) {
      if (sites.row(i) == sites.row(j)) dups.emplace_back(i, j);
    }
  }
  if (!dups.empty()) {
    logger().warn("{} duplicated input site pair(s); correlation matrix is "
                  "near-singular (first: rows {} and {})",
                  dups.size(), dups.front().first + 1, dups.front().second + 1);
  }
  return dups;
}

}  // namespace binarygp

#endif  // BINARYGP_KERNEL_HPP
