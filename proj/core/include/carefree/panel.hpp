#pragma once

// K x (T+1) grids of e-process values (row k holds E^k at times 0..T) and the
// transforms between them.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "carefree/testing.hpp"

namespace carefree {

/// Dense row-major matrix of doubles.
class ValueGrid {
 public:
  ValueGrid() = default;
  ValueGrid(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const;
  void copy_column(std::size_t c, std::span<double> out) const;

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const ValueGrid&, const ValueGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Raw e-process values with ground-truth labels. Entries are nonnegative,
/// column 0 holds the initial values, horizon() == cols() - 1.
class EProcessPanel {
 public:
  EProcessPanel(ValueGrid values, TruthLabels truth);

  std::size_t hypotheses() const noexcept { return values_.rows(); }
  std::size_t horizon() const noexcept { return values_.cols() - 1; }
  double at(std::size_t k, std::size_t t) const { return values_.at(k, t); }
  const ValueGrid& values() const noexcept { return values_; }
  const TruthLabels& truth() const noexcept { return truth_; }

 private:
  ValueGrid values_;
  TruthLabels truth_;
};

/// Panel whose rows are nondecreasing in time: running maxima, or adjusted
/// running maxima. The constructor checks monotonicity.
class MonotonePanel {
 public:
  MonotonePanel(ValueGrid values, TruthLabels truth);

  std::size_t hypotheses() const noexcept { return values_.rows(); }
  std::size_t horizon() const noexcept { return values_.cols() - 1; }
  double at(std::size_t k, std::size_t t) const { return values_.at(k, t); }
  const ValueGrid& values() const noexcept { return values_; }
  const TruthLabels& truth() const noexcept { return truth_; }

 private:
  ValueGrid values_;
  TruthLabels truth_;
};

/// M^k_t = max_{s <= t} E^k_s.
class RunningMaxPanel : public MonotonePanel {
 public:
  using MonotonePanel::MonotonePanel;
};

/// A(M^k_t) for some adjuster A.
class AdjustedPanel : public MonotonePanel {
 public:
  using MonotonePanel::MonotonePanel;
};

/// Rowwise cumulative maximum, time 0 included.
RunningMaxPanel running_max(const EProcessPanel& panel);

/// Unit-variance Gaussian means for the likelihood-ratio e-process.
struct GaussianLRConfig {
  double mu0 = 0.0;
  double mu1 = 0.1;
};

/// E^k_t = exp( sum_{i<=t} [(mu1 - mu0) X^k_i - (mu1^2 - mu0^2)/2] ), E^k_0 = 1.
/// `observations` is K x T; the log-likelihood ratio is accumulated in log
/// space and exponentiated per cell. Throws std::invalid_argument when
/// mu1 == mu0, an observation is non-finite, or the truth labels do not
/// match K.
EProcessPanel gaussian_lr_eprocess(const Eigen::MatrixXd& observations,
                                   const GaussianLRConfig& cfg, TruthLabels truth);

}  // namespace carefree
