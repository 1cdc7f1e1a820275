#include "carefree/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "carefree/panel.hpp"

namespace carefree {
namespace {

void validate_evalues(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("e-value vector must hold at least one entry");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) {
      throw std::invalid_argument("e-value " + std::to_string(i) + " is NaN");
    }
    if (values[i] < 0.0) {
      throw std::invalid_argument("e-value " + std::to_string(i) + " is negative");
    }
  }
}

void check_indices(const RejectionSet& rejections, const TruthLabels& truth) {
  if (!rejections.empty() && rejections.indices().back() >= truth.size()) {
    throw std::invalid_argument("rejection index out of range for the truth labels");
  }
}

}  // namespace

EVector::EVector(std::vector<double> values) : values_(std::move(values)) {
  validate_evalues(values_);
}

RejectionSet::RejectionSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("rejection set holds a duplicate index");
  }
}

bool RejectionSet::contains(std::size_t index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool RejectionSet::is_subset_of(const RejectionSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

TruthLabels::TruthLabels(std::vector<bool> is_null)
    : is_null_(std::move(is_null)),
      k0_(static_cast<std::size_t>(std::count(is_null_.begin(), is_null_.end(), true))) {}

TruthLabels TruthLabels::leading_nulls(std::size_t k, std::size_t k0) {
  if (k0 > k) throw std::invalid_argument("more nulls than hypotheses");
  std::vector<bool> flags(k, false);
  std::fill_n(flags.begin(), k0, true);
  return TruthLabels(std::move(flags));
}

void require_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("significance level must lie in (0, 1), got " +
                                std::to_string(alpha));
  }
}

double ebh_threshold(std::size_t k_total, std::size_t k, double alpha) {
  return static_cast<double>(k_total) / (alpha * static_cast<double>(k));
}

RejectionSet ebh(const EVector& e, double alpha) {
  require_level(alpha);
  const auto values = e.values();
  const std::size_t total = values.size();

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  std::size_t k_star = 0;
  for (std::size_t k = total; k >= 1; --k) {
    if (values[order[k - 1]] >= ebh_threshold(total, k, alpha)) {
      k_star = k;
      break;
    }
  }
  order.resize(k_star);
  return RejectionSet(std::move(order));
}

RejectionSet ebh(std::span<const double> e, double alpha) {
  return ebh(EVector(std::vector<double>(e.begin(), e.end())), alpha);
}

RejectionSet ebh_bruteforce(const EVector& e, double alpha) {
  require_level(alpha);
  const auto values = e.values();
  const std::size_t total = values.size();

  // The k-th largest value clears a cut iff at least k values clear it.
  std::size_t k_star = 0;
  for (std::size_t k = total; k >= 1 && k_star == 0; --k) {
    const double cut = ebh_threshold(total, k, alpha);
    const auto clearing = static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [cut](double v) { return v >= cut; }));
    if (clearing >= k) k_star = k;
  }

  std::vector<bool> taken(total, false);
  std::vector<std::size_t> chosen;
  for (std::size_t pick = 0; pick < k_star; ++pick) {
    std::size_t best = total;
    for (std::size_t i = 0; i < total; ++i) {
      if (taken[i]) continue;
      if (best == total || values[i] > values[best]) best = i;
    }
    taken[best] = true;
    chosen.push_back(best);
  }
  return RejectionSet(std::move(chosen));
}

RejectionSet ebh_stopped(const EProcessPanel& panel, std::span<const std::size_t> stop_times,
                         double alpha) {
  if (stop_times.size() != panel.hypotheses()) {
    throw std::invalid_argument("need exactly one stop time per hypothesis");
  }
  std::vector<double> stopped(panel.hypotheses());
  for (std::size_t k = 0; k < stopped.size(); ++k) {
    if (stop_times[k] > panel.horizon()) {
      throw std::invalid_argument("stop time " + std::to_string(stop_times[k]) +
                                  " exceeds the panel horizon " +
                                  std::to_string(panel.horizon()));
    }
    stopped[k] = panel.at(k, stop_times[k]);
  }
  return ebh(EVector(std::move(stopped)), alpha);
}

double merge_average(const EVector& e, std::span<const double> weights) {
  if (weights.size() != e.size()) {
    throw std::invalid_argument("need exactly one weight per e-value");
  }
  double mass = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    mass += w;
  }
  if (mass > 1.0 + 1e-12) throw std::invalid_argument("weights sum to more than 1");

  double merged = std::max(0.0, 1.0 - mass);
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (weights[k] > 0.0) merged += weights[k] * e[k];  // skip 0 * inf
  }
  return merged;
}

double merge_average(const EVector& e) {
  const std::vector<double> uniform(e.size(), 1.0 / static_cast<double>(e.size()));
  return merge_average(e, uniform);
}

double fdp(const RejectionSet& rejections, const TruthLabels& truth) {
  check_indices(rejections, truth);
  if (rejections.empty()) return 0.0;
  const auto false_discoveries = std::count_if(
      rejections.indices().begin(), rejections.indices().end(),
      [&](std::size_t i) { return truth.is_null(i); });
  return static_cast<double>(false_discoveries) / static_cast<double>(rejections.k_star());
}

double power(const RejectionSet& rejections, const TruthLabels& truth) {
  check_indices(rejections, truth);
  const std::size_t alternatives = truth.size() - truth.k0();
  if (alternatives == 0) return 0.0;
  const auto true_discoveries = std::count_if(
      rejections.indices().begin(), rejections.indices().end(),
      [&](std::size_t i) { return !truth.is_null(i); });
  return static_cast<double>(true_discoveries) / static_cast<double>(alternatives);
}

}  // namespace carefree
