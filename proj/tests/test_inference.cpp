#include <gtest/gtest.h>

#include "binarygp/binarygp.hpp"

using namespace binarygp;

TEST(InformationMatrix, MatchesExplicitSum) {
  Rng rng(2);
  MatrixXd X(25, 3);
  VectorXd p(25);
  for (Eigen::Index i = 0; i < 25; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = uniform01(rng);
    X(i, 2) = uniform01(rng) > 0.5 ? 1.0 : 0.0;
    p[i] = 0.05 + 0.9 * uniform01(rng);
  }
  MatrixXd expected = MatrixXd::Zero(3, 3);
  for (Eigen::Index i = 0; i < 25; ++i) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) expected(a, b) += X(i, a) * X(i, b) * p[i] * (1 - p[i]);
    }
  }
  expected /= 25.0;
  EXPECT_TRUE(information_matrix(X, p).isApprox(expected, 1e-13));
}

TEST(CoefReport, StatisticsFollowFromTheInverseInformation) {
  const MatrixXd info = (MatrixXd(2, 2) << 0.2, 0.05, 0.05, 0.1).finished();
  const VectorXd est = (VectorXd(2) << 0.8, -0.1).finished();
  const auto rep = coef_report(est, info, 100, {"a", "b"});
  const MatrixXd cov = (100.0 * info).inverse();
  ASSERT_EQ(rep.rows.size(), 2u);
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(rep.rows[k].std_dev, std::sqrt(cov(k, k)), 1e-14);
    EXPECT_NEAR(rep.rows[k].z_score, est[k] / std::sqrt(cov(k, k)), 1e-12);
    EXPECT_NEAR(rep.rows[k].p_value, std::erfc(std::abs(rep.rows[k].z_score) / std::sqrt(2.0)), 1e-15);
  }
  EXPECT_TRUE(rep.singular_columns.empty());
}

TEST(CoefReport, PValuesDecreaseInAbsoluteZ) {
  double prev = 1.0;
  for (double z = 0.0; z < 8.0; z += 0.25) {
    const double p = two_sided_p_value(z);
    EXPECT_LE(p, prev);
    EXPECT_GE(p, 0.0);
    EXPECT_DOUBLE_EQ(p, two_sided_p_value(-z));
    prev = p;
  }
  EXPECT_DOUBLE_EQ(two_sided_p_value(0.0), 1.0);
  EXPECT_NEAR(two_sided_p_value(1.959963984540054), 0.05, 1e-12);
}

TEST(CoefReport, SingularInformationGivesNaNAndNamesColumns) {
  MatrixXd info = MatrixXd::Zero(3, 3);
  info(0, 0) = 1.0;
  info(1, 1) = 1.0;
  info(1, 2) = info(2, 1) = 1.0;
  info(2, 2) = 1.0;
  const auto rep = coef_report(VectorXd::Ones(3), info, 10, {"a", "b", "c"});
  EXPECT_FALSE(rep.singular_columns.empty());
  for (const auto& r : rep.rows) EXPECT_TRUE(std::isnan(r.std_dev));
}

TEST(CoefReport, ZeroEstimateHasUnitPValue) {
  const auto rep = coef_report(VectorXd::Zero(1), MatrixXd::Identity(1, 1), 5, {"a"});
  EXPECT_DOUBLE_EQ(rep.rows[0].p_value, 1.0);
  EXPECT_DOUBLE_EQ(rep.rows[0].z_score, 0.0);
}

TEST(CoefReport, FromFittedModelUsesTrainingDesign) {
  TruthSpec truth = default_gp_truth(6);
  const auto data = gen_gp_panel(truth, 30, 5);
  CovParams cov;
  cov.sigma2 = 0.5;
  cov.theta = VectorXd::Ones(5);
  const auto model = assemble_model(data.inputs, data.panel, truth.order,
                                    truth.coefficients.values, cov, truth.kernel);
  const auto rep = coef_report(model);
  ASSERT_EQ(rep.rows.size(), 7u);
  EXPECT_EQ(rep.rows[1].name, "phi_1");
  for (const auto& r : rep.rows) {
    EXPECT_GT(r.std_dev, 0.0);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}
