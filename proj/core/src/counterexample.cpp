#include "carefree/counterexample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "carefree/parallel.hpp"
#include "carefree/testing.hpp"

namespace carefree {
namespace {

constexpr std::uint64_t kRepsPerBlock = 4096;

struct Increment {
  double first;
  double second;
};
constexpr std::array<Increment, 3> kIncrements{{{0.5, 0.5}, {2.0, 0.5}, {0.5, 2.0}}};

void require_half_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("counterexample needs alpha in (0, 1/2), got " +
                                std::to_string(alpha));
  }
}

// Draw order matches counterexample_panel: start, then one index per step.
class PathSampler {
 public:
  explicit PathSampler(double alpha) : start_(2.0 * alpha), start_value_(1.0 / (2.0 * alpha)) {}

  double draw_start(Rng& rng) { return start_(rng) ? start_value_ : 0.0; }
  const Increment& draw_step(Rng& rng) { return kIncrements[static_cast<std::size_t>(step_(rng))]; }

 private:
  std::bernoulli_distribution start_;
  std::uniform_int_distribution<int> step_{0, 2};
  double start_value_;
};

struct Tally {
  std::uint64_t fdr = 0;
  std::uint64_t fwer = 0;
  std::uint64_t domination_violations = 0;
};

template <class PerBlock>
std::vector<Tally> run_blocks(const CounterexampleConfig& cfg, unsigned threads, PerBlock&& body) {
  const std::uint64_t blocks = (cfg.reps + kRepsPerBlock - 1) / kRepsPerBlock;
  std::vector<Tally> tallies(blocks);
  parallel_for_blocks(blocks, resolve_threads(threads), [&](std::size_t b) {
    const std::uint64_t first = b * kRepsPerBlock;
    const std::uint64_t last = std::min(cfg.reps, first + kRepsPerBlock);
    body(first, last, tallies[b]);
  });
  return tallies;
}

}  // namespace

void CounterexampleConfig::validate() const {
  require_half_level(alpha);
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
}

ViolationEstimate make_estimate(std::uint64_t events, const CounterexampleConfig& cfg) {
  ViolationEstimate est;
  est.events = events;
  est.reps = cfg.reps;
  est.horizon = cfg.horizon;
  est.alpha = cfg.alpha;
  const double n = static_cast<double>(cfg.reps);
  est.probability = static_cast<double>(events) / n;
  est.standard_error = std::sqrt(est.probability * (1.0 - est.probability) / n);
  return est;
}

EProcessPanel counterexample_panel(double alpha, std::size_t horizon, Rng& rng) {
  require_half_level(alpha);
  PathSampler sampler(alpha);
  ValueGrid values(2, horizon + 1);
  const double start = sampler.draw_start(rng);
  values.at(0, 0) = start;
  values.at(1, 0) = start;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Increment& step = sampler.draw_step(rng);
    values.at(0, t) = values.at(0, t - 1) * step.first;
    values.at(1, t) = values.at(1, t - 1) * step.second;
  }
  return EProcessPanel(std::move(values), TruthLabels::all_null(2));
}

bool counterexample_rejection_event(double max1, double max2, double alpha) {
  const double single = 2.0 / alpha;
  const double both = 1.0 / alpha;
  return max1 >= single || max2 >= single || (max1 >= both && max2 >= both);
}

bool counterexample_rejection_event(const RunningMaxPanel& maxima, double alpha) {
  if (maxima.hypotheses() != 2) {
    throw std::invalid_argument("counterexample event is defined for exactly two processes");
  }
  const std::size_t last = maxima.horizon();
  return counterexample_rejection_event(maxima.at(0, last), maxima.at(1, last), alpha);
}

bool averaged_rejection_event(double max1, double max2, double alpha) {
  return 0.5 * max1 + 0.5 * max2 >= 1.0 / alpha;
}

CounterexampleSummary run_counterexample(const CounterexampleConfig& cfg, unsigned threads) {
  cfg.validate();
  const auto tallies = run_blocks(cfg, threads, [&](std::uint64_t first, std::uint64_t last,
                                                    Tally& tally) {
    PathSampler sampler(cfg.alpha);
    for (std::uint64_t rep = first; rep < last; ++rep) {
      Rng rng = make_stream(cfg.seed, rep);
      double value1 = sampler.draw_start(rng);
      if (value1 == 0.0) continue;  // zero is absorbing
      double value2 = value1;
      double max1 = value1;
      double max2 = value2;
      bool fdr = counterexample_rejection_event(max1, max2, cfg.alpha);
      bool fwer = averaged_rejection_event(max1, max2, cfg.alpha);
      for (std::size_t t = 1; t <= cfg.horizon && !(fdr && fwer); ++t) {
        const Increment& step = sampler.draw_step(rng);
        value1 *= step.first;
        value2 *= step.second;
        max1 = std::max(max1, value1);
        max2 = std::max(max2, value2);
        // maxima never shrink, so a fired event stays fired
        fdr = fdr || counterexample_rejection_event(max1, max2, cfg.alpha);
        fwer = fwer || averaged_rejection_event(max1, max2, cfg.alpha);
      }
      tally.fdr += fdr ? 1 : 0;
      tally.fwer += fwer ? 1 : 0;
      tally.domination_violations += (fdr && !fwer) ? 1 : 0;
    }
  });

  Tally total;
  for (const Tally& t : tallies) {
    total.fdr += t.fdr;
    total.fwer += t.fwer;
    total.domination_violations += t.domination_violations;
  }
  return {make_estimate(total.fdr, cfg), make_estimate(total.fwer, cfg),
          total.domination_violations};
}

ViolationEstimate estimate_fdr_violation(const CounterexampleConfig& cfg, unsigned threads) {
  return run_counterexample(cfg, threads).fdr;
}

ViolationEstimate estimate_fwer_violation(const CounterexampleConfig& cfg, unsigned threads) {
  return run_counterexample(cfg, threads).fwer;
}

ViolationEstimate estimate_adjusted_fdr(const CounterexampleConfig& cfg, const Adjuster& adj,
                                        unsigned threads) {
  cfg.validate();
  const auto tallies = run_blocks(cfg, threads, [&](std::uint64_t first, std::uint64_t last,
                                                    Tally& tally) {
    PathSampler sampler(cfg.alpha);
    std::array<double, 2> adjusted{};
    for (std::uint64_t rep = first; rep < last; ++rep) {
      Rng rng = make_stream(cfg.seed, rep);
      double value1 = sampler.draw_start(rng);
      if (value1 == 0.0) continue;
      double value2 = value1;
      double max1 = value1;
      double max2 = value2;
      for (std::size_t t = 1; t <= cfg.horizon; ++t) {
        const Increment& step = sampler.draw_step(rng);
        value1 *= step.first;
        value2 *= step.second;
        max1 = std::max(max1, value1);
        max2 = std::max(max2, value2);
      }
      adjusted = {adj(max1), adj(max2)};
      if (!ebh(std::span<const double>(adjusted), cfg.alpha).empty()) ++tally.fdr;
    }
  });
  const std::uint64_t events = std::accumulate(
      tallies.begin(), tallies.end(), std::uint64_t{0},
      [](std::uint64_t acc, const Tally& t) { return acc + t.fdr; });
  return make_estimate(events, cfg);
}

double exhaustive_event_probability(double alpha, std::size_t horizon) {
  require_half_level(alpha);
  if (horizon > kMaxExhaustiveHorizon) {
    throw std::invalid_argument("exhaustive enumeration supports horizon <= " +
                                std::to_string(kMaxExhaustiveHorizon));
  }
  const double start = 1.0 / (2.0 * alpha);

  // Count paths whose final running maxima trigger the event.
  std::uint64_t hits = 0;
  std::uint64_t paths = 1;
  for (std::size_t t = 0; t < horizon; ++t) paths *= 3;
  for (std::uint64_t code = 0; code < paths; ++code) {
    double value1 = start;
    double value2 = start;
    double max1 = start;
    double max2 = start;
    std::uint64_t digits = code;
    for (std::size_t t = 0; t < horizon; ++t) {
      const Increment& step = kIncrements[digits % 3];
      digits /= 3;
      value1 *= step.first;
      value2 *= step.second;
      max1 = std::max(max1, value1);
      max2 = std::max(max2, value2);
    }
    if (counterexample_rejection_event(max1, max2, alpha)) ++hits;
  }
  return 2.0 * alpha * static_cast<double>(hits) / static_cast<double>(paths);
}

}  // namespace carefree
