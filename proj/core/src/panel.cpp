#include "carefree/panel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace carefree {
namespace {

void check_shape(const ValueGrid& values, const TruthLabels& truth) {
  if (values.rows() == 0 || values.cols() == 0) {
    throw std::invalid_argument("panel needs at least one hypothesis and one time point");
  }
  if (values.rows() != truth.size()) {
    throw std::invalid_argument("truth labels cover " + std::to_string(truth.size()) +
                                " hypotheses, panel has " + std::to_string(values.rows()));
  }
  for (const double v : values.data()) {
    if (std::isnan(v) || v < 0.0) {
      throw std::invalid_argument("panel entries must be nonnegative numbers");
    }
  }
}

}  // namespace

ValueGrid::ValueGrid(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

std::vector<double> ValueGrid::column(std::size_t c) const {
  std::vector<double> out(rows_);
  copy_column(c, out);
  return out;
}

void ValueGrid::copy_column(std::size_t c, std::span<double> out) const {
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
}

EProcessPanel::EProcessPanel(ValueGrid values, TruthLabels truth)
    : values_(std::move(values)), truth_(std::move(truth)) {
  check_shape(values_, truth_);
}

MonotonePanel::MonotonePanel(ValueGrid values, TruthLabels truth)
    : values_(std::move(values)), truth_(std::move(truth)) {
  check_shape(values_, truth_);
  for (std::size_t k = 0; k < values_.rows(); ++k) {
    const auto row = values_.row(k);
    if (std::adjacent_find(row.begin(), row.end(), std::greater<>{}) != row.end()) {
      throw std::invalid_argument("row " + std::to_string(k) + " decreases in time");
    }
  }
}

RunningMaxPanel running_max(const EProcessPanel& panel) {
  ValueGrid maxima = panel.values();
  for (std::size_t k = 0; k < maxima.rows(); ++k) {
    auto row = maxima.row(k);
    for (std::size_t t = 1; t < row.size(); ++t) row[t] = std::max(row[t], row[t - 1]);
  }
  return RunningMaxPanel(std::move(maxima), panel.truth());
}

EProcessPanel gaussian_lr_eprocess(const Eigen::MatrixXd& observations,
                                   const GaussianLRConfig& cfg, TruthLabels truth) {
  if (cfg.mu1 == cfg.mu0) throw std::invalid_argument("mu1 must differ from mu0");
  if (!observations.allFinite()) throw std::invalid_argument("observations must be finite");

  const auto hypotheses = static_cast<std::size_t>(observations.rows());
  const auto steps = static_cast<std::size_t>(observations.cols());
  const double slope = cfg.mu1 - cfg.mu0;
  const double offset = 0.5 * (cfg.mu1 * cfg.mu1 - cfg.mu0 * cfg.mu0);

  ValueGrid values(hypotheses, steps + 1);
  for (std::size_t k = 0; k < hypotheses; ++k) {
    auto row = values.row(k);
    double log_lr = 0.0;
    row[0] = 1.0;
    for (std::size_t t = 0; t < steps; ++t) {
      log_lr += slope * observations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) -
                offset;
      row[t + 1] = std::exp(log_lr);
    }
  }
  return EProcessPanel(std::move(values), std::move(truth));
}

}  // namespace carefree
