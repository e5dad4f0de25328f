#ifndef BINARYGP_INFERENCE_HPP
#define BINARYGP_INFERENCE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "binarygp/common.hpp"
#include "binarygp/estimation.hpp"
#include "binarygp/panel.hpp"

namespace binarygp {

/// Lambda_N = (1/N) sum_it X_it X_it' p_it (1 - p_it).
inline MatrixXd information_matrix(const MatrixXd& X, const VectorXd& p) {
  if (X.rows() != p.size()) throw InputError("information_matrix: size mismatch");
  const VectorXd w = p.array() * (1.0 - p.array());
  MatrixXd info = X.transpose() * w.asDiagonal() * X;
  info /= static_cast<double>(X.rows());
  return 0.5 * (info + info.transpose());
}

inline MatrixXd information_matrix(const FittedModel& model) {
  return information_matrix(training_design(model).X, model.state.p);
}

/// Two-sided p value against the standard normal.
inline double two_sided_p_value(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

struct CoefRow {
  std::string name;
  double estimate = 0.0;
  double std_dev = 0.0;
  double z_score = 0.0;
  double p_value = 1.0;
};

struct CoefReport {
  std::vector<CoefRow> rows;
  // Non-empty when N * Lambda_N is singular; std_dev, z_score and p_value are
  // then NaN for every row.
  std::vector<std::string> singular_columns;
};

/// Rows from estimates and the information matrix: std_dev is the square root
/// of the diagonal of (N Lambda_N)^{-1}.
inline CoefReport coef_report(const VectorXd& estimates, const MatrixXd& info,
                              Eigen::Index N, const std::vector<std::string>& names) {
  CoefReport report;
  const MatrixXd total = static_cast<double>(N) * info;
  const auto bad = deficient_columns(total);
  for (auto c : bad) report.singular_columns.push_back(names.at(c));
  MatrixXd cov;
  if (bad.empty()) cov = total.ldlt().solve(MatrixXd::Identity(total.rows(), total.cols()));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index k = 0; k < estimates.size(); ++k) {
    CoefRow row;
    row.name = names.at(k);
    row.estimate = estimates[k];
    if (!bad.empty()) {
      row.std_dev = row.z_score = row.p_value = nan;
    } else {
      row.std_dev = std::sqrt(std::max(cov(k, k), 0.0));
      row.z_score = row.std_dev > 0.0 ? row.estimate / row.std_dev : 0.0;
      row.p_value = row.estimate == 0.0 ? 1.0 : two_sided_p_value(row.z_score);
    }
    report.rows.push_back(row);
  }
  return report;
}

inline CoefReport coef_report(const FittedModel& model) {
  const DesignMatrix dm = training_design(model);
  return coef_report(model.coefficients.values, information_matrix(dm.X, model.state.p),
                     dm.N(), model.coefficients.names());
}

}  // namespace binarygp

#endif  // BINARYGP_INFERENCE_HPP
