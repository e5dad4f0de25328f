#include <gtest/gtest.h>

#include "binarygp/kernel.hpp"
#include "binarygp/rng.hpp"

using namespace binarygp;

namespace {

KernelSpec pe(VectorXd theta, double power = 2.0) {
  KernelSpec k;
  k.power = power;
  k.lengthscales = std::move(theta);
  return k;
}

MatrixXd random_sites(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXd s(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < d; ++l) s(i, l) = uniform01(rng);
  }
  return s;
}

}  // namespace

TEST(KernelEval, MatchesClosedForm) {
  const auto k = pe((VectorXd(2) << 0.5, 2.0).finished(), 1.5);
  const VectorXd a = (VectorXd(2) << 0.1, 0.9).finished();
  const VectorXd b = (VectorXd(2) << 0.4, 0.2).finished();
  const double expected = std::exp(-(std::pow(0.3, 1.5) / 0.5 + std::pow(0.7, 1.5) / 2.0));
  EXPECT_NEAR(kernel_eval(k, a, b), expected, 1e-15);
  EXPECT_DOUBLE_EQ(kernel_eval(k, a, a), 1.0);
}

TEST(KernelEval, RejectsBadSpecs) {
  const VectorXd a = VectorXd::Zero(2);
  EXPECT_THROW(kernel_eval(pe(VectorXd::Ones(3)), a, a), InputError);
  EXPECT_THROW(pe(VectorXd::Ones(2), 2.5).validate(), InputError);
  EXPECT_THROW(pe(VectorXd::Ones(2), 0.0).validate(), InputError);
  EXPECT_THROW(pe((VectorXd(2) << 1.0, -1.0).finished()).validate(), InputError);
  EXPECT_THROW(kernel_family_from_string("matern"), InputError);
  EXPECT_EQ(kernel_family_from_string("pe"), KernelFamily::PowerExponential);
}

TEST(CorrMatrix, SymmetricUnitDiagonalPositiveDefinite) {
  const MatrixXd sites = random_sites(30, 3, 1);
  for (double p : {0.5, 1.0, 1.9, 2.0}) {
    const auto k = pe((VectorXd(3) << 0.3, 1.0, 4.0).finished(), p);
    const MatrixXd r = corr_matrix(k, sites);
    EXPECT_TRUE(r.isApprox(r.transpose(), 0.0));
    EXPECT_TRUE(r.diagonal().isOnes());
    EXPECT_GE(r.minCoeff(), 0.0);
    EXPECT_LE(r.maxCoeff(), 1.0);
    Eigen::LLT<MatrixXd> llt(regularized_corr_matrix(k, sites));
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(CorrMatrix, LengthscaleMonotonicity) {
  const MatrixXd sites = random_sites(8, 2, 2);
  const MatrixXd small = corr_matrix(pe(VectorXd::Constant(2, 0.2)), sites);
  const MatrixXd large = corr_matrix(pe(VectorXd::Constant(2, 2.0)), sites);
  EXPECT_TRUE(((large - small).array() >= 0.0).all());
}

TEST(CorrMatrix, DuplicatedSitesStillFactorizeWithNugget) {
  MatrixXd sites = random_sites(5, 2, 3);
  sites.row(4) = sites.row(1);
  EXPECT_EQ(duplicate_sites(sites).size(), 1u);
  Eigen::LLT<MatrixXd> llt(regularized_corr_matrix(pe(VectorXd::Ones(2)), sites));
  EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(CrossCorr, AgreesWithCorrMatrixColumns) {
  const MatrixXd sites = random_sites(6, 4, 4);
  const auto k = pe((VectorXd(4) << 0.5, 1, 1.5, 2).finished());
  const MatrixXd r = corr_matrix(k, sites);
  const VectorXd c = cross_corr(k, sites, sites.row(3).transpose());
  EXPECT_TRUE(c.isApprox(r.col(3), 1e-15));
  EXPECT_THROW(cross_corr(k, sites, VectorXd::Zero(3)), InputError);
}
