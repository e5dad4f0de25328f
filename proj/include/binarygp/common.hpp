#ifndef BINARYGP_COMMON_HPP
#define BINARYGP_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace binarygp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raised for malformed user input (bad CSV, invalid shapes, out-of-range
/// parameters). The CLI maps it to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a linear system that must be solvable is not.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probabilities entering a logit are kept inside [kProbFloor, 1 - kProbFloor].
inline constexpr double kProbFloor = 1e-6;

inline double logistic(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double clamp_prob(double p) {
  return std::min(std::max(p, kProbFloor), 1.0 - kProbFloor);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7).
inline double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("sample_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double median(std::vector<double> values) { return sample_quantile(std::move(values), 0.5); }

/// Library logger writing to stderr; level taken from BINARYGP_LOG
/// (trace, debug, info, warn, error, off). Defaults to warn.
inline spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = std::make_shared<spdlog::logger>(
        "binarygp", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    const char* env = std::getenv("BINARYGP_LOG");
    l->set_level(env != nullptr ? spdlog::level::from_str(env)
                                : spdlog::level::warn);
    return l;
  }();
  return *log;
}

}  // namespace binarygp

#endif  // BINARYGP_COMMON_HPP
