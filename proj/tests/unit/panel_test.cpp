#include "carefree/panel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace carefree {
namespace {

EProcessPanel single_row(const std::vector<double>& row) {
  ValueGrid grid(1, row.size());
  for (std::size_t t = 0; t < row.size(); ++t) grid.at(0, t) = row[t];
  return EProcessPanel(grid, TruthLabels::all_null(1));
}

std::vector<double> row_of(const MonotonePanel& panel, std::size_t k) {
  const auto r = panel.values().row(k);
  return {r.begin(), r.end()};
}

TEST(RunningMax, CumulativeMaximum) {
  EXPECT_EQ(row_of(running_max(single_row({1, 3, 2, 5, 1})), 0),
            (std::vector<double>{1, 3, 3, 5, 5}));
}

TEST(RunningMax, ConstantAndNondecreasingRowsUnchanged) {
  EXPECT_EQ(row_of(running_max(single_row({2, 2, 2})), 0), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(row_of(running_max(single_row({0, 1, 1, 4})), 0), (std::vector<double>{0, 1, 1, 4}));
}

TEST(RunningMax, RowsNondecreasingAndDominating) {
  std::mt19937_64 rng(9);
  std::exponential_distribution<double> draw(0.5);
  ValueGrid grid(5, 40);
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t t = 0; t < 40; ++t) grid.at(k, t) = draw(rng);
  const EProcessPanel panel(grid, TruthLabels::all_null(5));
  const RunningMaxPanel maxima = running_max(panel);
  for (std::size_t k = 0; k < 5; ++k) {
    double best = 0.0;
    for (std::size_t t = 0; t < 40; ++t) {
      best = std::max(best, panel.at(k, t));
      EXPECT_EQ(maxima.at(k, t), best);
      EXPECT_GE(maxima.at(k, t), panel.at(k, t));
    }
  }
}

TEST(Panels, ValidateShapeAndValues) {
  EXPECT_THROW(EProcessPanel(ValueGrid(2, 3, -1.0), TruthLabels::all_null(2)),
               std::invalid_argument);
  EXPECT_THROW(EProcessPanel(ValueGrid(2, 3, 1.0), TruthLabels::all_null(3)),
               std::invalid_argument);
  EXPECT_THROW(EProcessPanel(ValueGrid(0, 3), TruthLabels::all_null(0)), std::invalid_argument);
  ValueGrid decreasing(1, 2);
  decreasing.at(0, 0) = 2.0;
  decreasing.at(0, 1) = 1.0;
  EXPECT_THROW(RunningMaxPanel(decreasing, TruthLabels::all_null(1)), std::invalid_argument);
}

TEST(GaussianLR, ZeroObservationsDecayExponentially) {
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(1, 50);
  const EProcessPanel panel = gaussian_lr_eprocess(zeros, {0.0, 0.1}, TruthLabels::all_null(1));
  EXPECT_EQ(panel.at(0, 0), 1.0);
  for (std::size_t t = 1; t <= 50; ++t) {
    EXPECT_NEAR(panel.at(0, t), std::exp(-0.005 * static_cast<double>(t)), 1e-14);
  }
}

TEST(GaussianLR, MidpointObservationIsNeutral) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(1, 1, 0.05);
  EXPECT_NEAR(gaussian_lr_eprocess(x, {0.0, 0.1}, TruthLabels::all_null(1)).at(0, 1), 1.0, 1e-15);
}

TEST(GaussianLR, ObservationAtAlternativeMean) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(1, 1, 0.1);
  EXPECT_NEAR(gaussian_lr_eprocess(x, {0.0, 0.1}, TruthLabels::all_null(1)).at(0, 1),
              std::exp(0.005), 1e-15);
}

TEST(GaussianLR, MatchesDensityRatioOracle) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.2, 1.5);
  const GaussianLRConfig cfg{-0.3, 0.4};
  Eigen::MatrixXd x(3, 60);
  for (Eigen::Index k = 0; k < 3; ++k)
    for (Eigen::Index t = 0; t < 60; ++t) x(k, t) = normal(rng);
  const EProcessPanel panel = gaussian_lr_eprocess(x, cfg, TruthLabels::all_null(3));
  for (Eigen::Index k = 0; k < 3; ++k) {
    std::vector<double> prefix;
    for (Eigen::Index t = 0; t < 60; ++t) {
      prefix.push_back(x(k, t));
      const double expected = test::gaussian_density_ratio(prefix, cfg.mu0, cfg.mu1);
      EXPECT_NEAR(panel.at(static_cast<std::size_t>(k), static_cast<std::size_t>(t + 1)) / expected,
                  1.0, 1e-10);
    }
  }
}

TEST(GaussianLR, RejectsDegenerateConfigAndNonFiniteData) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 2);
  EXPECT_THROW(gaussian_lr_eprocess(x, {0.1, 0.1}, TruthLabels::all_null(1)),
               std::invalid_argument);
  Eigen::MatrixXd bad = x;
  bad(0, 1) = std::nan("");
  EXPECT_THROW(gaussian_lr_eprocess(bad, {0.0, 0.1}, TruthLabels::all_null(1)),
               std::invalid_argument);
}

// Under the null, E[E_t] = 1 for every t.
TEST(GaussianLR, NullMeanIsOneWithinFiveStandardErrors) {
  constexpr Eigen::Index kPaths = 20000;
  constexpr Eigen::Index kSteps = 50;
  std::mt19937_64 rng(33);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(kPaths, kSteps);
  for (Eigen::Index t = 0; t < kSteps; ++t)
    for (Eigen::Index k = 0; k < kPaths; ++k) x(k, t) = normal(rng);
  const EProcessPanel panel =
      gaussian_lr_eprocess(x, {0.0, 0.1}, TruthLabels::all_null(kPaths));
  for (const std::size_t t : {1UL, 10UL, 25UL, 50UL}) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(kPaths); ++k) {
      sum += panel.at(k, t);
      sum_sq += panel.at(k, t) * panel.at(k, t);
    }
    const double n = static_cast<double>(kPaths);
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    EXPECT_LE(std::abs(mean - 1.0), 5.0 * se) << "t=" << t;
  }
}

}  // namespace
}  // namespace carefree
