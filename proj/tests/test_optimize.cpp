#include <gtest/gtest.h>

#include "binarygp/optimize.hpp"

using namespace binarygp;

namespace {
BoxBounds box(double lo, double hi, Eigen::Index d) {
  return {VectorXd::Constant(d, lo), VectorXd::Constant(d, hi)};
}
}  // namespace

TEST(MinimizeInBox, FindsInteriorMinimumOfQuadratic) {
  const VectorXd target = (VectorXd(2) << 0.3, -1.2).finished();
  auto f = [&](const VectorXd& x) { return (x - target).squaredNorm() + 2.0; };
  SimplexOptions opts;
  opts.size_tol = 1e-7;
  const auto res = minimize_in_box(f, VectorXd::Zero(2), box(-5, 5, 2), opts);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.x[0], 0.3, 1e-5);
  EXPECT_NEAR(res.x[1], -1.2, 1e-5);
  EXPECT_NEAR(res.value, 2.0, 1e-9);
}

TEST(MinimizeInBox, NeverEvaluatesOutsideTheBoxAndStopsAtTheWall) {
  bool outside = false;
  auto f = [&](const VectorXd& x) {
    if ((x.array() < -1.0).any() || (x.array() > 1.0).any()) outside = true;
    return -x.sum();  // pushes toward the upper corner
  };
  const auto res = minimize_in_box(f, VectorXd::Zero(3), box(-1, 1, 3));
  EXPECT_FALSE(outside);
  EXPECT_NEAR(res.x.minCoeff(), 1.0, 1e-3);
}

TEST(MinimizeInBox, InfeasibleRegionsAreAvoided) {
  auto f = [](const VectorXd& x) {
    if (x[0] < 0.0) return std::numeric_limits<double>::infinity();
    return (x[0] - 0.5) * (x[0] - 0.5);
  };
  const auto res = minimize_in_box(f, VectorXd::Constant(1, 2.0), box(-3, 3, 1));
  EXPECT_NEAR(res.x[0], 0.5, 1e-3);
  EXPECT_TRUE(std::isfinite(res.value));
}

TEST(MinimizeInBox, TraceIsNonIncreasing) {
  auto f = [](const VectorXd& x) { return std::pow(x[0] - 1, 2) + 10 * std::pow(x[1] - x[0] * x[0], 2); };
  const auto res = minimize_in_box(f, VectorXd::Zero(2), box(-4, 4, 2));
  for (std::size_t k = 1; k < res.best_trace.size(); ++k) {
    EXPECT_LE(res.best_trace[k], res.best_trace[k - 1] + 1e-12);
  }
}
