#pragma once

// Multiple-testing decision rules on e-values: e-BH, a brute-force e-BH
// oracle, weighted-average merging, and the realized FDP / power of a
// rejection set. Hypotheses are indexed 0..K-1 throughout.

#include <cstddef>
#include <span>
#include <vector>

namespace carefree {

class EProcessPanel;

/// Nonnegative e-values for K >= 1 hypotheses. +inf is allowed (it sorts above
/// every finite value); NaN and negative entries are rejected on construction.
class EVector {
 public:
  explicit EVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Hypotheses rejected by one evaluation of a procedure. Indices are unique
/// and kept in ascending order; k_star() is their count.
class RejectionSet {
 public:
  RejectionSet() = default;
  explicit RejectionSet(std::vector<std::size_t> indices);

  std::size_t k_star() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

  bool contains(std::size_t index) const;
  bool is_subset_of(const RejectionSet& other) const;

  friend bool operator==(const RejectionSet&, const RejectionSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// Ground truth: which hypotheses are true nulls.
class TruthLabels {
 public:
  explicit TruthLabels(std::vector<bool> is_null);

  /// K hypotheses, the first k0 of them null.
  static TruthLabels leading_nulls(std::size_t k, std::size_t k0);
  static TruthLabels all_null(std::size_t k) { return leading_nulls(k, k); }

  std::size_t size() const noexcept { return is_null_.size(); }
  std::size_t k0() const noexcept { return k0_; }
  bool is_null(std::size_t index) const { return is_null_.at(index); }

  friend bool operator==(const TruthLabels&, const TruthLabels&) = default;

 private:
  std::vector<bool> is_null_;
  std::size_t k0_ = 0;
};

/// Throws std::invalid_argument unless alpha lies in (0, 1).
void require_level(double alpha);

/// The e-BH cut for the k-th largest of K e-values: K / (alpha * k).
double ebh_threshold(std::size_t k_total, std::size_t k, double alpha);

/// e-BH: rejects the k* largest e-values, where k* is the largest k whose k-th
/// largest value is >= K / (alpha k). Equal values are ranked by ascending
/// index. Throws std::invalid_argument for alpha outside (0, 1).
RejectionSet ebh(const EVector& e, double alpha);

/// Same rule on a raw span, validated like EVector.
RejectionSet ebh(std::span<const double> e, double alpha);

/// Reference e-BH that never sorts: for each k from K down to 1 it counts the
/// values clearing the k-th cut, then picks winners by repeated argmax.
/// Quadratic; meant for cross-checking ebh().
RejectionSet ebh_bruteforce(const EVector& e, double alpha);

/// e-BH on stopped e-processes: S_k is row k of the panel read at
/// stop_times[k]. Throws std::invalid_argument for a stop time past the
/// horizon or a size mismatch.
RejectionSet ebh_stopped(const EProcessPanel& panel, std::span<const std::size_t> stop_times,
                         double alpha);

/// Weighted arithmetic mean sum_k w_k e_k + (1 - sum_k w_k), with the slack
/// mass placed on the trivial e-value 1. Weights must be nonnegative and sum
/// to at most 1 (up to 1e-12).
double merge_average(const EVector& e, std::span<const double> weights);

/// Uniform weights 1/K.
double merge_average(const EVector& e);

/// Realized false discovery proportion |R ∩ nulls| / max(|R|, 1).
double fdp(const RejectionSet& rejections, const TruthLabels& truth);

/// Proportion of false hypotheses rejected, |R ∩ non-nulls| / max(K - K0, 1).
/// Zero when every hypothesis is null.
double power(const RejectionSet& rejections, const TruthLabels& truth);

}  // namespace carefree
