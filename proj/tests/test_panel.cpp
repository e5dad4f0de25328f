#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "binarygp/panel.hpp"

using namespace binarygp;

namespace {

std::string write_tmp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("binarygp_panel_" + name);
  std::ofstream(path) << text;
  return path.string();
}

InputDesign two_sites() {
  InputDesign in;
  in.sites = (MatrixXd(2, 2) << 0.1, 0.2, 0.7, 0.4).finished();
  return in;
}

BinaryPanel panel_2x4() {
  BinaryPanel p;
  p.y = (Eigen::MatrixXi(2, 4) << 1, 0, 1, 1, 0, 0, 1, 0).finished();
  return p;
}

}  // namespace

TEST(ModelOrder, CoefficientCountAndNames) {
  const ModelOrder o{2, 1};
  EXPECT_EQ(o.n_coefficients(3), 1 + 2 + 3 + 3);
  const auto names = coefficient_names(o, 2);
  const std::vector<std::string> expected{"alpha_0", "phi_1",     "phi_2",
                                          "alpha_1", "alpha_2",   "gamma_1_1",
                                          "gamma_1_2"};
  EXPECT_EQ(names, expected);
}

TEST(ModelOrder, RejectsOrdersTheSeriesCannotSupport) {
  EXPECT_THROW((ModelOrder{1, 0}.validate(1)), InputError);
  EXPECT_THROW((ModelOrder{3, 0}.validate(3)), InputError);
  EXPECT_THROW((ModelOrder{-1, 0}.validate(5)), InputError);
  EXPECT_NO_THROW((ModelOrder{0, 0}.validate(1)));
  EXPECT_NO_THROW((ModelOrder{2, 2}.validate(3)));
}

TEST(BuildDesign, TimeMajorRowsAgainstHandBuiltOracle) {
  const ModelOrder o{2, 1};
  const auto dm = build_design(two_sites(), panel_2x4(), o);
  EXPECT_EQ(dm.first_time, 2);
  EXPECT_EQ(dm.n_blocks, 2);
  EXPECT_EQ(dm.N(), 4);
  // Site 1 at t = 3 (0-based 3): lags y2 = 1, y1 = 0.
  const Eigen::RowVectorXd expected =
      (Eigen::RowVectorXd(7) << 1, 1, 0, 0.1, 0.2, 0.1 * 1, 0.2 * 1).finished();
  EXPECT_TRUE(dm.X.row(dm.row(1, 0)).isApprox(expected));
  EXPECT_EQ(dm.y[dm.row(1, 0)], 1.0);
  // Site 2 at t = 2: lags y1 = 0, y0 = 0.
  const Eigen::RowVectorXd expected2 =
      (Eigen::RowVectorXd(7) << 1, 0, 0, 0.7, 0.4, 0, 0).finished();
  EXPECT_TRUE(dm.X.row(dm.row(0, 1)).isApprox(expected2));
  EXPECT_EQ(dm.y[dm.row(0, 1)], 1.0);
}

TEST(BuildDesign, SingleTimeStepIsPlainRegression) {
  BinaryPanel p;
  p.y = (Eigen::MatrixXi(2, 1) << 1, 0).finished();
  const auto dm = build_design(two_sites(), p, ModelOrder{0, 0});
  EXPECT_EQ(dm.N(), 2);
  EXPECT_EQ(dm.m(), 3);
  EXPECT_THROW(build_design(two_sites(), p, ModelOrder{1, 0}), InputError);
}

TEST(SiteLags, PreSampleLagsAreZero) {
  const auto p = panel_2x4();
  EXPECT_EQ(site_lags(p, 0, 0, 2), (std::vector<int>{0, 0}));
  EXPECT_EQ(site_lags(p, 0, 1, 2), (std::vector<int>{1, 0}));
  EXPECT_EQ(site_lags(p, 0, 3, 3), (std::vector<int>{1, 0, 1}));
}

TEST(Standardize, MapsColumnsOntoUnitInterval) {
  InputDesign in;
  in.sites = (MatrixXd(3, 2) << 2, 5, 4, 5, 3, 5).finished();
  const auto ranges = standardize(in);
  EXPECT_DOUBLE_EQ(in.sites(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(in.sites(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(in.sites(2, 0), 0.5);
  EXPECT_TRUE(in.sites.col(1).isZero());
  EXPECT_EQ(ranges[0], std::make_pair(2.0, 4.0));
}

TEST(Csv, LoadsPanelsWithAndWithoutHeader) {
  const auto xi = write_tmp("x.csv", "a,b\n0.1,0.2\n0.3,0.4\n");
  const auto yi = write_tmp("y.csv", "t1,t2\n1,0\n0,1\n");
  const auto [inputs, panel] = load_panel(xi, yi, true);
  EXPECT_EQ(inputs.names, (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(inputs.sites(1, 0), 0.3);
  EXPECT_EQ(panel.y(1, 1), 1);
}

TEST(Csv, ErrorsNameTheOffendingCell) {
  const auto bad = write_tmp("bad.csv", "0.1,0.2\n0.3,abc\n");
  try {
    load_inputs(bad, false);
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'abc'"), std::string::npos);
    EXPECT_NE(msg.find("row 2, column 2"), std::string::npos);
  }
  const auto two = write_tmp("two.csv", "1,0\n2,1\n");
  try {
    load_binary_panel(two, false);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column 1"), std::string::npos);
  }
  const auto ragged = write_tmp("ragged.csv", "1,0\n1\n");
  EXPECT_THROW(load_binary_panel(ragged, false), InputError);
  EXPECT_THROW(load_inputs("/nonexistent/file.csv", false), InputError);
}

TEST(Csv, ShapeMismatchBetweenFiles) {
  const auto xi = write_tmp("x3.csv", "0.1\n0.2\n0.3\n");
  const auto yi = write_tmp("y2.csv", "1,0\n0,1\n");
  EXPECT_THROW(load_panel(xi, yi), InputError);
}
