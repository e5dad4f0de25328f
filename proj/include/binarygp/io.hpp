#ifndef BINARYGP_IO_HPP
#define BINARYGP_IO_HPP

// JSON model artifacts and CSV tables. Doubles are written in shortest
// round-trip form so reloading reproduces every bit.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "binarygp/common.hpp"
#include "binarygp/estimation.hpp"
#include "binarygp/inference.hpp"
#include "binarygp/kernel.hpp"
#include "binarygp/panel.hpp"
#include "binarygp/simgen.hpp"

namespace binarygp {

using json = nlohmann::ordered_json;

inline constexpr int kModelSchemaVersion = 1;

namespace io_detail {

inline json vec_to_json(const VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline VectorXd vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename M>
json mat_to_json(const M& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename M>
M mat_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  M m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j.at(i).size()) != cols) throw InputError("ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = j.at(i).at(c).template get<typename M::Scalar>();
    }
  }
  return m;
}

}  // namespace io_detail

inline json to_json(const ModelOrder& o) { return {{"ar", o.ar}, {"interaction", o.interaction}}; }

inline ModelOrder order_from_json(const json& j) {
  return {j.at("ar").get<int>(), j.at("interaction").get<int>()};
}

inline json to_json(const CovParams& c) {
  return {{"sigma2", c.sigma2}, {"theta", io_detail::vec_to_json(c.theta)}};
}

inline CovParams cov_from_json(const json& j) {
  CovParams c;
  c.sigma2 = j.at("sigma2").get<double>();
  c.theta = io_detail::vec_from_json(j.at("theta"));
  return c;
}

inline json to_json(const KernelSpec& k) {
  return {{"family", to_string(k.family)}, {"power", k.power},
          {"lengthscales", io_detail::vec_to_json(k.lengthscales)}};
}

inline KernelSpec kernel_from_json(const json& j) {
  KernelSpec k;
  k.family = kernel_family_from_string(j.at("family").get<std::string>());
  k.power = j.at("power").get<double>();
  k.lengthscales = io_detail::vec_from_json(j.at("lengthscales"));
  return k;
}

inline json to_json(const FittedModel& m) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["order"] = to_json(m.order);
  j["coefficients"] = json::object();
  j["coefficients"]["names"] = m.coefficients.names();
  j["coefficients"]["values"] = io_detail::vec_to_json(m.coefficients.values);
  j["cov"] = to_json(m.cov);
  j["kernel"] = to_json(m.kernel);
  j["inputs"] = {{"names", m.inputs.names}, {"sites", io_detail::mat_to_json(m.inputs.sites)}};
  j["panel"] = io_detail::mat_to_json(m.panel.y);
  j["state"] = {{"p", io_detail::vec_to_json(m.state.p)},
                {"eta_tilde", io_detail::vec_to_json(m.state.eta_tilde)},
                {"z", io_detail::vec_to_json(m.state.z)},
                {"w", io_detail::vec_to_json(m.state.w)}};
  const auto& r = m.report;
  j["report"] = {{"converged", r.converged},
                 {"outer_iterations", r.outer_iterations},
                 {"inner_iterations", r.inner_iterations},
                 {"delta_beta", r.delta_beta},
                 {"delta_log_omega", r.delta_log_omega},
                 {"reml_value", r.reml_value},
                 {"score_norm", r.score_norm},
                 {"separation", r.separation},
                 {"reml_trace", r.reml_trace}};
  return j;
}

inline FittedModel model_from_json(const json& j) {
  if (!j.contains("schema_version")) throw InputError("model file has no schema_version");
  const int version = j.at("schema_version").get<int>();
  if (version != kModelSchemaVersion) {
    throw InputError("model schema version " + std::to_string(version) +
                     " is not supported by this build (expected " +
                     std::to_string(kModelSchemaVersion) + ")");
  }
  try {
    FittedModel m;
    m.order = order_from_json(j.at("order"));
    m.inputs.names = j.at("inputs").at("names").get<std::vector<std::string>>();
    m.inputs.sites = io_detail::mat_from_json<MatrixXd>(j.at("inputs").at("sites"));
    m.panel.y = io_detail::mat_from_json<Eigen::MatrixXi>(j.at("panel"));
    m.coefficients.values = io_detail::vec_from_json(j.at("coefficients").at("values"));
    m.coefficients.order = m.order;
    m.coefficients.d = m.inputs.d();
    m.cov = cov_from_json(j.at("cov"));
    m.kernel = kernel_from_json(j.at("kernel"));
    const auto& s = j.at("state");
    m.state.p = io_detail::vec_from_json(s.at("p"));
    m.state.eta_tilde = io_detail::vec_from_json(s.at("eta_tilde"));
    m.state.z = io_detail::vec_from_json(s.at("z"));
    m.state.w = io_detail::vec_from_json(s.at("w"));
    const auto& r = j.at("report");
    m.report.converged = r.at("converged").get<bool>();
    m.report.outer_iterations = r.at("outer_iterations").get<int>();
    m.report.inner_iterations = r.at("inner_iterations").get<int>();
    m.report.delta_beta = r.at("delta_beta").get<double>();
    m.report.delta_log_omega = r.at("delta_log_omega").get<double>();
    m.report.reml_value = r.at("reml_value").get<double>();
    m.report.score_norm = r.at("score_norm").get<double>();
    m.report.separation = r.at("separation").get<bool>();
    m.report.reml_trace = r.at("reml_trace").get<std::vector<double>>();

    const DesignMatrix dm = build_design(m.inputs, m.panel, m.order);
    if (m.coefficients.values.size() != dm.m() || m.state.p.size() != dm.N() ||
        m.cov.theta.size() != m.inputs.d()) {
      throw InputError("model file is internally inconsistent (dimension mismatch)");
    }
    m.cov.validate();
    m.kernel.validate();
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline void save_model(const std::string& path, const FittedModel& m) { write_json(path, to_json(m)); }

inline FittedModel load_model(const std::string& path) { return model_from_json(read_json(path)); }

/// Formats a double in shortest round-trip form; NaN as "NaN".
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "NaN";
  return fmt::format("{}", v);
}

/// CSV with an optional header row.
template <typename M>
std::string matrix_csv(const M& m, const std::vector<std::string>& header = {}) {
  std::string out;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += "\n";
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ",";
      if constexpr (std::is_floating_point_v<typename M::Scalar>) {
        out += fmt_double(m(i, c));
      } else {
        out += std::to_string(m(i, c));
      }
    }
    out += "\n";
  }
  return out;
}

inline std::string coef_report_csv(const CoefReport& r) {
  std::string out = "name,Value,Standard deviation,Z score,p value\n";
  for (const auto& row : r.rows) {
    out += row.name + "," + fmt_double(row.estimate) + "," + fmt_double(row.std_dev) + "," +
           fmt_double(row.z_score) + "," + fmt_double(row.p_value) + "\n";
  }
  return out;
}

inline json to_json(const CoefReport& r) {
  json rows = json::array();
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  for (const auto& row : r.rows) {
    rows.push_back({{"name", row.name},
                    {"Value", row.estimate},
                    {"Standard deviation", num(row.std_dev)},
                    {"Z score", num(row.z_score)},
                    {"p value", num(row.p_value)}});
  }
  return {{"coefficients", rows}, {"singular_columns", r.singular_columns}};
}

inline json to_json(const TruthSpec& t) {
  json j{{"generator", to_string(t.generator)}, {"seed", t.seed}};
  if (t.generator == Generator::GPModel) {
    j["order"] = to_json(t.order);
    j["coefficients"] = {{"names", t.coefficients.names()},
                         {"values", io_detail::vec_to_json(t.coefficients.values)}};
    j["cov"] = to_json(t.cov);
    j["kernel_power"] = t.kernel.power;
    j["grid_levels"] = t.grid_levels;
  }
  return j;
}

}  // namespace binarygp

#endif  // BINARYGP_IO_HPP
