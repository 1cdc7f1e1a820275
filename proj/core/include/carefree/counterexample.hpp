#pragma once

// Two dependent null e-processes E^k_t = X0 * prod_{s<=t} e^k_s on which e-BH
// over running maxima exceeds its nominal FDR level. The start is
// (0, 0) with probability 1 - 2 alpha and (1/(2 alpha), 1/(2 alpha)) with
// probability 2 alpha; increments are (1/2, 1/2), (2, 1/2) or (1/2, 2), each
// with probability 1/3.

#include <cstddef>
#include <cstdint>

#include "carefree/adjuster.hpp"
#include "carefree/panel.hpp"
#include "carefree/rng.hpp"

namespace carefree {

struct CounterexampleConfig {
  double alpha = 0.05;
  std::size_t horizon = 1000;
  std::uint64_t reps = 1'000'000;
  std::uint64_t seed = kDefaultSeed;

  /// Throws std::invalid_argument unless alpha in (0, 1/2), horizon >= 1, reps >= 1.
  void validate() const;
};

/// Event frequency over `reps` replications with SE sqrt(p (1 - p) / reps).
struct ViolationEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  std::uint64_t events = 0;
  std::uint64_t reps = 0;
  std::size_t horizon = 0;
  double alpha = 0.0;
};

ViolationEstimate make_estimate(std::uint64_t events, const CounterexampleConfig& cfg);

/// One draw of the two-process panel (K = 2, both null) over times 0..horizon.
/// Throws std::invalid_argument unless alpha in (0, 1/2).
EProcessPanel counterexample_panel(double alpha, std::size_t horizon, Rng& rng);

/// M1 >= 2/alpha, or M2 >= 2/alpha, or both >= 1/alpha.
bool counterexample_rejection_event(double max1, double max2, double alpha);

/// The same event read from the final column of a K = 2 panel. Throws
/// std::invalid_argument for any other K.
bool counterexample_rejection_event(const RunningMaxPanel& maxima, double alpha);

/// Equal-weight average of the two maxima is >= 1/alpha.
bool averaged_rejection_event(double max1, double max2, double alpha);

struct CounterexampleSummary {
  ViolationEstimate fdr;   ///< running-max e-BH rejects anything
  ViolationEstimate fwer;  ///< averaged running maxima reject
  /// Replications where the e-BH event fired but the averaged one did not.
  std::uint64_t domination_violations = 0;
};

/// Both estimates from one pass over shared replications. Replication r uses
/// make_stream(cfg.seed, r), so the result does not depend on `threads`
/// (0 = resolve_threads default).
CounterexampleSummary run_counterexample(const CounterexampleConfig& cfg, unsigned threads = 0);

ViolationEstimate estimate_fdr_violation(const CounterexampleConfig& cfg, unsigned threads = 0);
ViolationEstimate estimate_fwer_violation(const CounterexampleConfig& cfg, unsigned threads = 0);

/// FDR of e-BH applied to A(M^1_T), A(M^2_T). With both hypotheses null this
/// is the probability of any rejection.
ViolationEstimate estimate_adjusted_fdr(const CounterexampleConfig& cfg, const Adjuster& adj,
                                        unsigned threads = 0);

/// Exact probability of the running-max e-BH event by enumerating all 3^T
/// increment paths after the nonzero start. Throws std::invalid_argument for
/// horizon > kMaxExhaustiveHorizon.
inline constexpr std::size_t kMaxExhaustiveHorizon = 12;
double exhaustive_event_probability(double alpha, std::size_t horizon);

}  // namespace carefree
