#pragma once

// Simulation harness comparing e-BH on raw e-processes, on running maxima,
// and on adjusted running maxima, for K correlated Gaussian likelihood-ratio
// e-processes observed over T steps and averaged over M replications.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "carefree/rng.hpp"
#include "carefree/testing.hpp"

namespace carefree {

enum class Method { standard, runmax, adjusted_a1, adjusted_a2 };

inline constexpr std::array<Method, 4> kAllMethods{Method::standard, Method::runmax,
                                                   Method::adjusted_a1, Method::adjusted_a2};

/// "standard", "runmax", "adjusted_A1", "adjusted_A2".
std::string_view method_name(Method method);
Method parse_method(std::string_view name);
/// Comma-separated list; duplicates rejected.
std::vector<Method> parse_methods(std::string_view list);

struct SimulationConfig {
  std::size_t hypotheses = 200;
  std::size_t horizon = 2000;
  std::size_t reps = 10000;
  double alpha = 0.05;
  double pi0 = 0.5;
  double mu1 = 0.1;
  std::uint64_t corr_seed = kDefaultSeed;
  std::uint64_t data_seed = kDefaultSeed + 1;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  /// Evaluate every `stride`-th step; 0 picks 1 for horizon <= 500, else 10.
  std::size_t stride = 0;

  void validate() const;
  /// ceil(pi0 * K); the first null_count() hypotheses are the true nulls.
  std::size_t null_count() const;
  TruthLabels truth() const;
  std::size_t effective_stride() const;
  /// 0, stride, 2 stride, ... and always the horizon itself.
  std::vector<std::size_t> evaluation_times() const;
};

/// Symmetric positive-definite correlation matrix with its Cholesky factor.
class CorrelationMatrix {
 public:
  /// Throws std::invalid_argument unless `matrix` is square, symmetric, has a
  /// unit diagonal and factorizes.
  explicit CorrelationMatrix(Eigen::MatrixXd matrix);

  static CorrelationMatrix identity(std::size_t k);

  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Eigen::MatrixXd& lower() const noexcept { return lower_; }
  /// Ridge that had to be added before the factorization succeeded.
  double ridge() const noexcept { return ridge_; }

 private:
  CorrelationMatrix(Eigen::MatrixXd matrix, Eigen::MatrixXd lower, double ridge);
  friend CorrelationMatrix generate_correlation(std::size_t k, std::uint64_t corr_seed);

  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd lower_;
  double ridge_ = 0.0;
};

/// G G^T for a K x K standard normal G, scaled to unit diagonal. If the
/// Cholesky factorization fails, a ridge of 1e-8 (x10 per retry, up to 1e-4)
/// is added to the diagonal before rescaling; beyond that std::runtime_error.
CorrelationMatrix generate_correlation(std::size_t k, std::uint64_t corr_seed);

/// K x T observations for replication `rep_index`: T independent draws of
/// N(mean, corr) with mean 0 on null rows and mu1 on the others.
Eigen::MatrixXd sample_replication(const SimulationConfig& cfg, const CorrelationMatrix& corr,
                                   std::uint64_t rep_index);

struct MethodSeries {
  Method method = Method::standard;
  std::vector<double> fdr;
  std::vector<double> fdr_se;
  std::vector<double> supfdr;
  /// Standard error of fdr at the time attaining supfdr.
  std::vector<double> supfdr_se;
  std::vector<double> power;
};

/// Pathwise checks over every replication and evaluated time. Each *_violations
/// counter must stay 0: inclusion standard ⊆ runmax and adjusted ⊆ runmax, and
/// rejection sets of runmax / adjusted methods never losing an index.
struct PathwiseAudit {
  std::uint64_t evaluations = 0;
  std::uint64_t standard_outside_runmax = 0;
  std::uint64_t adjusted_outside_runmax = 0;
  std::uint64_t runmax_shrinks = 0;
  std::uint64_t adjusted_shrinks = 0;

  bool clean() const noexcept {
    return standard_outside_runmax == 0 && adjusted_outside_runmax == 0 &&
           runmax_shrinks == 0 && adjusted_shrinks == 0;
  }
};

struct MetricSeries {
  std::vector<std::size_t> times;
  std::vector<MethodSeries> methods;
  /// FDR of e-BH on running maxima at the horizon, reported even when runmax
  /// is not among the selected methods.
  double final_fdr_of_maxima = 0.0;
  double final_fdr_of_maxima_se = 0.0;
  PathwiseAudit audit;

  /// Throws std::out_of_range when `method` was not simulated.
  const MethodSeries& series(Method method) const;
};

/// Replication r draws from make_stream(cfg.data_seed, r); sums are reduced per
/// fixed block of replications in block order, so the output is bitwise
/// independent of `threads` (0 = resolve_threads default).
MetricSeries run_simulation(const SimulationConfig& cfg, const CorrelationMatrix& corr,
                            unsigned threads = 0);
MetricSeries run_simulation(const SimulationConfig& cfg, unsigned threads = 0);

struct VilleEstimate {
  /// Fraction of null paths with max_{t <= T} E_t >= 1/alpha.
  double frequency = 0.0;
  /// Replication-level standard error (rows within a replication are dependent).
  double standard_error = 0.0;
  std::uint64_t null_paths = 0;
};

VilleEstimate ville_check(const SimulationConfig& cfg, const CorrelationMatrix& corr,
                          unsigned threads = 0);

/// `time,method,metric,value` with metric in {fdr, supfdr, power}.
void write_metrics_csv(const MetricSeries& series, std::ostream& out);

}  // namespace carefree
