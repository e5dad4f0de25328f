#ifndef BINARYGP_PANEL_HPP
#define BINARYGP_PANEL_HPP

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "binarygp/common.hpp"

namespace binarygp {

/// n input sites in d dimensions, one site per row.
struct InputDesign {
  MatrixXd sites;
  std::vector<std::string> names;

  Eigen::Index n() const { return sites.rows(); }
  Eigen::Index d() const { return sites.cols(); }

  void validate() const {
    if (n() < 1 || d() < 1) throw InputError("input design must be at least 1 x 1");
    for (Eigen::Index i = 0; i < n(); ++i) {
      for (Eigen::Index l = 0; l < d(); ++l) {
        if (!std::isfinite(sites(i, l))) {
          throw InputError("input design: non-finite value at row " +
                           std::to_string(i + 1) + ", column " + std::to_string(l + 1));
        }
      }
    }
  }
};

/// n x T responses, y(i, t) in {0, 1}.
struct BinaryPanel {
  Eigen::MatrixXi y;

  Eigen::Index n() const { return y.rows(); }
  Eigen::Index T() const { return y.cols(); }

  void validate() const {
    if (n() < 1 || T() < 1) throw InputError("binary panel must be at least 1 x 1");
    for (Eigen::Index i = 0; i < n(); ++i) {
      for (Eigen::Index t = 0; t < T(); ++t) {
        if (y(i, t) != 0 && y(i, t) != 1) {
          throw InputError("binary panel: value " + std::to_string(y(i, t)) +
                           " at row " + std::to_string(i + 1) + ", column " +
                           std::to_string(t + 1) + " is not 0 or 1");
        }
      }
    }
  }
};

/// AR order R and input-by-lag interaction order L.
struct ModelOrder {
  int ar = 0;
  int interaction = 0;

  int max_lag() const { return std::max(ar, interaction); }

  Eigen::Index n_coefficients(Eigen::Index d) const {
    return 1 + ar + d + d * interaction;
  }

  void validate(Eigen::Index T) const {
    if (ar < 0 || interaction < 0) throw InputError("model order must be nonnegative");
    if (T == 1 && max_lag() > 0) {
      throw InputError("a single time step admits only R = L = 0");
    }
    if (max_lag() >= T) {
      throw InputError("model order max(R, L) = " + std::to_string(max_lag()) +
                       " must be smaller than T = " + std::to_string(T));
    }
  }
};

/// Coefficient names in design-column order.
inline std::vector<std::string> coefficient_names(const ModelOrder& order,
                                                  Eigen::Index d) {
  std::vector<std::string> names;
  names.emplace_back("alpha_0");
  for (int r = 1; r <= order.ar; ++r) names.push_back("phi_" + std::to_string(r));
  for (Eigen::Index l = 1; l <= d; ++l) names.push_back("alpha_" + std::to_string(l));
  for (int lag = 1; lag <= order.interaction; ++lag) {
    for (Eigen::Index l = 1; l <= d; ++l) {
      names.push_back("gamma_" + std::to_string(lag) + "_" + std::to_string(l));
    }
  }
  return names;
}

/// One model-matrix row (1, y_{t-1..t-R}, x', x'y_{t-1}, ..., x'y_{t-L}).
/// lags[k] holds y_{t-1-k}; it must have at least max(R, L) entries.
template <typename X>
VectorXd design_row(const ModelOrder& order, const Eigen::MatrixBase<X>& x,
                    const std::vector<int>& lags) {
  const Eigen::Index d = x.size();
  VectorXd row(order.n_coefficients(d));
  Eigen::Index c = 0;
  row[c++] = 1.0;
  for (int r = 0; r < order.ar; ++r) row[c++] = lags.at(r);
  for (Eigen::Index l = 0; l < d; ++l) row[c++] = x[l];
  for (int lag = 0; lag < order.interaction; ++lag) {
    for (Eigen::Index l = 0; l < d; ++l) row[c++] = x[l] * lags.at(lag);
  }
  return row;
}

/// Model matrix over the effective response times. Row (b * n + i) belongs to
/// site i at time first_time + b (0-based); the first max(R, L) time steps are
/// only used as lagged regressors.
struct DesignMatrix {
  MatrixXd X;
  VectorXd y;
  Eigen::Index n_sites = 0;
  Eigen::Index first_time = 0;
  Eigen::Index n_blocks = 0;

  Eigen::Index N() const { return X.rows(); }
  Eigen::Index m() const { return X.cols(); }
  Eigen::Index row(Eigen::Index block, Eigen::Index site) const {
    return block * n_sites + site;
  }
};

/// Lags y_{t-1}, ..., y_{t-k} of site i (t 0-based); lags before the series
/// start are 0.
inline std::vector<int> site_lags(const BinaryPanel& panel, Eigen::Index i,
                                  Eigen::Index t, int k) {
  std::vector<int> lags(k, 0);
  for (int j = 0; j < k; ++j) {
    const Eigen::Index s = t - 1 - j;
    if (s >= 0) lags[j] = panel.y(i, s);
  }
  return lags;
}

inline DesignMatrix build_design(const InputDesign& inputs, const BinaryPanel& panel,
                                 const ModelOrder& order) {
  inputs.validate();
  panel.validate();
  if (inputs.n() != panel.n()) {
    throw InputError("inputs have " + std::to_string(inputs.n()) +
                     " rows but panel has " + std::to_string(panel.n()));
  }
  order.validate(panel.T());
  const Eigen::Index n = inputs.n();
  DesignMatrix dm;
  dm.n_sites = n;
  dm.first_time = order.max_lag();
  dm.n_blocks = panel.T() - dm.first_time;
  dm.X.resize(n * dm.n_blocks, order.n_coefficients(inputs.d()));
  dm.y.resize(n * dm.n_blocks);
  for (Eigen::Index b = 0; b < dm.n_blocks; ++b) {
    const Eigen::Index t = dm.first_time + b;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto lags = site_lags(panel, i, t, order.max_lag());
      dm.X.row(dm.row(b, i)) = design_row(order, inputs.sites.row(i), lags).transpose();
      dm.y[dm.row(b, i)] = panel.y(i, t);
    }
  }
  return dm;
}

/// Rescales every input column to [0, 1]; constant columns map to 0.
/// Returns the (min, max) of each original column.
inline std::vector<std::pair<double, double>> standardize(InputDesign& inputs) {
  std::vector<std::pair<double, double>> ranges;
  for (Eigen::Index l = 0; l < inputs.d(); ++l) {
    const double lo = inputs.sites.col(l).minCoeff();
    const double hi = inputs.sites.col(l).maxCoeff();
    ranges.emplace_back(lo, hi);
    if (hi > lo) {
      inputs.sites.col(l) = (inputs.sites.col(l).array() - lo) / (hi - lo);
    } else {
      inputs.sites.col(l).setZero();
    }
  }
  return ranges;
}

namespace csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  // 1-based file line of each data row, for error messages.
  std::vector<std::size_t> lines;
};

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r\"");
    const auto e = cell.find_last_not_of(" \t\r\"");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline Table read(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  Table table;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells = split_line(line);
    if (has_header && table.header.empty() && table.rows.empty()) {
      table.header = std::move(cells);
      continue;
    }
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const auto& s = cells[c];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw InputError(path + ": cannot parse '" + s + "' at row " +
                         std::to_string(lineno) + ", column " + std::to_string(c + 1));
      }
      values.push_back(v);
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw InputError(path + ": row " + std::to_string(lineno) + " has " +
                       std::to_string(values.size()) + " columns, expected " +
                       std::to_string(width));
    }
    table.rows.push_back(std::move(values));
    table.lines.push_back(lineno);
  }
  if (table.rows.empty()) throw InputError(path + ": no data rows");
  return table;
}

inline MatrixXd to_matrix(const Table& t) {
  MatrixXd m(t.rows.size(), t.rows.front().size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.rows[i].size(); ++j) m(i, j) = t.rows[i][j];
  }
  return m;
}

}  // namespace csv

inline InputDesign load_inputs(const std::string& path, bool has_header) {
  const auto table = csv::read(path, has_header);
  InputDesign inputs;
  inputs.sites = csv::to_matrix(table);
  inputs.names = table.header;
  return inputs;
}

inline BinaryPanel load_binary_panel(const std::string& path, bool has_header) {
  const auto table = csv::read(path, has_header);
  BinaryPanel panel;
  panel.y.resize(table.rows.size(), table.rows.front().size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t t = 0; t < table.rows[i].size(); ++t) {
      const double v = table.rows[i][t];
      if (v != 0.0 && v != 1.0) {
        std::ostringstream msg;
        msg << path << ": value " << v << " at row " << table.lines[i] << ", column "
            << t + 1 << " is not 0 or 1";
        throw InputError(msg.str());
      }
      panel.y(i, t) = static_cast<int>(v);
    }
  }
  return panel;
}

/// Loads and cross-validates an (inputs, panel) pair of CSV files.
inline std::pair<InputDesign, BinaryPanel> load_panel(const std::string& inputs_path,
                                                      const std::string& panel_path,
                                                      bool has_header = false) {
  auto inputs = load_inputs(inputs_path, has_header);
  auto panel = load_binary_panel(panel_path, has_header);
  if (inputs.n() != panel.n()) {
    throw InputError("shape mismatch: '" + inputs_path + "' has " +
                     std::to_string(inputs.n()) + " rows but '" + panel_path +
                     "' has " + std::to_string(panel.n()));
  }
  inputs.validate();
  panel.validate();
  return {std::move(inputs), std::move(panel)};
}

}  // namespace binarygp

#endif  // BINARYGP_PANEL_HPP
