#include "carefree/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "carefree/adjuster.hpp"
#include "carefree/panel.hpp"
#include "carefree/parallel.hpp"

namespace carefree {
namespace {

constexpr std::size_t kRepsPerBlock = 64;
constexpr std::size_t kSlots = kAllMethods.size();

std::size_t slot(Method method) { return static_cast<std::size_t>(method); }

std::optional<Eigen::MatrixXd> try_cholesky(const Eigen::MatrixXd& matrix) {
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd lower = llt.matrixL();
  if (!lower.allFinite()) return std::nullopt;
  return lower;
}

Eigen::MatrixXd unit_diagonal(const Eigen::MatrixXd& cov) {
  const Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd corr = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  corr = (0.5 * (corr + corr.transpose())).eval();
  corr.diagonal().setOnes();
  return corr;
}

// Per-block sums indexed [slot][time].
struct BlockSums {
  std::array<std::vector<double>, kSlots> fdp;
  std::array<std::vector<double>, kSlots> fdp_sq;
  std::array<std::vector<std::uint64_t>, kSlots> true_discoveries;
  PathwiseAudit audit;

  explicit BlockSums(std::size_t times) {
    for (std::size_t s = 0; s < kSlots; ++s) {
      fdp[s].assign(times, 0.0);
      fdp_sq[s].assign(times, 0.0);
      true_discoveries[s].assign(times, 0);
    }
  }
};

double standard_error(double sum, double sum_sq, std::size_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) /
                                       static_cast<double>(n - 1));
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::standard: return "standard";
    case Method::runmax: return "runmax";
    case Method::adjusted_a1: return "adjusted_A1";
    case Method::adjusted_a2: return "adjusted_A2";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (expected standard, runmax, adjusted_A1, adjusted_A2)");
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> methods;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto token = list.substr(0, comma);
    const Method m = parse_method(token);
    if (std::find(methods.begin(), methods.end(), m) != methods.end()) {
      throw std::invalid_argument("method '" + std::string(token) + "' listed twice");
    }
    methods.push_back(m);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (methods.empty()) throw std::invalid_argument("at least one method is required");
  return methods;
}

void SimulationConfig::validate() const {
  if (hypotheses < 1) throw std::invalid_argument("K must be at least 1");
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  require_level(alpha);
  if (!(pi0 > 0.0 && pi0 <= 1.0)) throw std::invalid_argument("pi0 must lie in (0, 1]");
  if (!std::isfinite(mu1) || mu1 == 0.0) throw std::invalid_argument("mu1 must be finite and nonzero");
  if (methods.empty()) throw std::invalid_argument("at least one method is required");
}

std::size_t SimulationConfig::null_count() const {
  const double raw = pi0 * static_cast<double>(hypotheses);
  // 1e-9 keeps 0.3 * 10 = 3.0000000000000004 from rounding up to 4
  const auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::min(count, hypotheses);
}

TruthLabels SimulationConfig::truth() const {
  return TruthLabels::leading_nulls(hypotheses, null_count());
}

std::size_t SimulationConfig::effective_stride() const {
  if (stride > 0) return stride;
  return horizon <= 500 ? 1 : 10;
}

std::vector<std::size_t> SimulationConfig::evaluation_times() const {
  std::vector<std::size_t> times;
  const std::size_t step = effective_stride();
  for (std::size_t t = 0; t <= horizon; t += step) times.push_back(t);
  if (times.back() != horizon) times.push_back(horizon);
  return times;
}

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument("correlation matrix must be square and non-empty");
  }
  if (!matrix_.isApprox(matrix_.transpose(), 1e-12)) {
    throw std::invalid_argument("correlation matrix must be symmetric");
  }
  if (!matrix_.diagonal().isOnes(1e-12)) {
    throw std::invalid_argument("correlation matrix must have a unit diagonal");
  }
  auto lower = try_cholesky(matrix_);
  if (!lower) throw std::invalid_argument("correlation matrix is not positive definite");
  lower_ = std::move(*lower);
}

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd matrix, Eigen::MatrixXd lower, double ridge)
    : matrix_(std::move(matrix)), lower_(std::move(lower)), ridge_(ridge) {}

CorrelationMatrix CorrelationMatrix::identity(std::size_t k) {
  const auto n = static_cast<Eigen::Index>(k);
  return CorrelationMatrix(Eigen::MatrixXd::Identity(n, n));
}

CorrelationMatrix generate_correlation(std::size_t k, std::uint64_t corr_seed) {
  if (k < 1) throw std::invalid_argument("K must be at least 1");
  const auto n = static_cast<Eigen::Index>(k);
  Rng rng(corr_seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd gaussian(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) gaussian(i, j) = normal(rng);
  }
  const Eigen::MatrixXd base = unit_diagonal(gaussian * gaussian.transpose());

  double ridge = 0.0;
  for (;;) {
    Eigen::MatrixXd corr = base;
    if (ridge > 0.0) {
      corr.diagonal().array() += ridge;
      corr = unit_diagonal(corr);
    }
    if (auto lower = try_cholesky(corr)) {
      return CorrelationMatrix(std::move(corr), std::move(*lower), ridge);
    }
    ridge = ridge == 0.0 ? 1e-8 : ridge * 10.0;
    if (ridge > 1e-4 * (1.0 + 1e-9)) {
      throw std::runtime_error("correlation matrix failed to factorize even with ridge 1e-4");
    }
  }
}

Eigen::MatrixXd sample_replication(const SimulationConfig& cfg, const CorrelationMatrix& corr,
                                   std::uint64_t rep_index) {
  if (corr.size() != cfg.hypotheses) {
    throw std::invalid_argument("correlation matrix size does not match K");
  }
  const auto k = static_cast<Eigen::Index>(cfg.hypotheses);
  const auto t = static_cast<Eigen::Index>(cfg.horizon);
  Rng rng = make_stream(cfg.data_seed, rep_index);
  std::normal_distribution<double> normal;

  Eigen::MatrixXd noise(k, t);
  for (Eigen::Index col = 0; col < t; ++col) {
    for (Eigen::Index row = 0; row < k; ++row) noise(row, col) = normal(rng);
  }
  Eigen::MatrixXd observations = corr.lower().triangularView<Eigen::Lower>() * noise;

  const auto nulls = static_cast<Eigen::Index>(cfg.null_count());
  if (nulls < k) observations.bottomRows(k - nulls).array() += cfg.mu1;
  return observations;
}

const MethodSeries& MetricSeries::series(Method method) const {
  for (const auto& s : methods) {
    if (s.method == method) return s;
  }
  throw std::out_of_range("method " + std::string(method_name(method)) + " was not simulated");
}

MetricSeries run_simulation(const SimulationConfig& cfg, const CorrelationMatrix& corr,
                            unsigned threads) {
  cfg.validate();
  const TruthLabels truth = cfg.truth();
  const std::vector<std::size_t> times = cfg.evaluation_times();
  const std::size_t n_times = times.size();
  const GaussianLRConfig lr{0.0, cfg.mu1};

  std::array<bool, kSlots> active{};
  for (const Method m : cfg.methods) active[slot(m)] = true;
  active[slot(Method::runmax)] = true;  // needed for audits and the final FDR-of-maxima

  const Adjuster a1 = Adjuster::a1();
  const Adjuster a2 = Adjuster::a2();

  const std::size_t n_blocks = (cfg.reps + kRepsPerBlock - 1) / kRepsPerBlock;
  std::vector<BlockSums> blocks(n_blocks, BlockSums(n_times));

  parallel_for_blocks(n_blocks, resolve_threads(threads), [&](std::size_t b) {
    BlockSums& sums = blocks[b];
    std::vector<double> column(cfg.hypotheses);
    std::array<RejectionSet, kSlots> current;
    std::array<RejectionSet, kSlots> previous;

    const std::size_t first = b * kRepsPerBlock;
    const std::size_t last = std::min(cfg.reps, first + kRepsPerBlock);
    for (std::size_t rep = first; rep < last; ++rep) {
      const Eigen::MatrixXd observations = sample_replication(cfg, corr, rep);
      const EProcessPanel panel = gaussian_lr_eprocess(observations, lr, truth);
      const RunningMaxPanel maxima = running_max(panel);
      std::optional<AdjustedPanel> adjusted1;
      std::optional<AdjustedPanel> adjusted2;
      if (active[slot(Method::adjusted_a1)]) adjusted1.emplace(adjust(maxima, a1));
      if (active[slot(Method::adjusted_a2)]) adjusted2.emplace(adjust(maxima, a2));

      for (std::size_t j = 0; j < n_times; ++j) {
        const std::size_t t = times[j];
        const auto evaluate = [&](const ValueGrid& grid) {
          grid.copy_column(t, column);
          return ebh(std::span<const double>(column), cfg.alpha);
        };
        if (active[slot(Method::standard)]) current[slot(Method::standard)] = evaluate(panel.values());
        current[slot(Method::runmax)] = evaluate(maxima.values());
        if (adjusted1) current[slot(Method::adjusted_a1)] = evaluate(adjusted1->values());
        if (adjusted2) current[slot(Method::adjusted_a2)] = evaluate(adjusted2->values());

        const RejectionSet& runmax_set = current[slot(Method::runmax)];
        ++sums.audit.evaluations;
        if (active[slot(Method::standard)] &&
            !current[slot(Method::standard)].is_subset_of(runmax_set)) {
          ++sums.audit.standard_outside_runmax;
        }
        for (const Method m : {Method::adjusted_a1, Method::adjusted_a2}) {
          if (!active[slot(m)]) continue;
          if (!current[slot(m)].is_subset_of(runmax_set)) ++sums.audit.adjusted_outside_runmax;
          if (j > 0 && !previous[slot(m)].is_subset_of(current[slot(m)])) ++sums.audit.adjusted_shrinks;
        }
        if (j > 0 && !previous[slot(Method::runmax)].is_subset_of(runmax_set)) {
          ++sums.audit.runmax_shrinks;
        }

        for (std::size_t s = 0; s < kSlots; ++s) {
          if (!active[s]) continue;
          const double proportion = fdp(current[s], truth);
          sums.fdp[s][j] += proportion;
          sums.fdp_sq[s][j] += proportion * proportion;
          sums.true_discoveries[s][j] += static_cast<std::uint64_t>(std::count_if(
              current[s].indices().begin(), current[s].indices().end(),
              [&](std::size_t i) { return !truth.is_null(i); }));
        }
        std::swap(previous, current);
      }
    }
  });

  // Reduce in block order so the sums do not depend on scheduling.
  BlockSums total(n_times);
  for (const BlockSums& block : blocks) {
    for (std::size_t s = 0; s < kSlots; ++s) {
      for (std::size_t j = 0; j < n_times; ++j) {
        total.fdp[s][j] += block.fdp[s][j];
        total.fdp_sq[s][j] += block.fdp_sq[s][j];
        total.true_discoveries[s][j] += block.true_discoveries[s][j];
      }
    }
    total.audit.evaluations += block.audit.evaluations;
    total.audit.standard_outside_runmax += block.audit.standard_outside_runmax;
    total.audit.adjusted_outside_runmax += block.audit.adjusted_outside_runmax;
    total.audit.runmax_shrinks += block.audit.runmax_shrinks;
    total.audit.adjusted_shrinks += block.audit.adjusted_shrinks;
  }

  const auto reps = static_cast<double>(cfg.reps);
  const std::size_t alternatives = cfg.hypotheses - truth.k0();
  MetricSeries result;
  result.times = times;
  result.audit = total.audit;
  for (const Method m : cfg.methods) {
    const std::size_t s = slot(m);
    MethodSeries series;
    series.method = m;
    series.fdr.resize(n_times);
    series.fdr_se.resize(n_times);
    series.supfdr.resize(n_times);
    series.supfdr_se.resize(n_times);
    series.power.resize(n_times);
    for (std::size_t j = 0; j < n_times; ++j) {
      series.fdr[j] = total.fdp[s][j] / reps;
      series.fdr_se[j] = standard_error(total.fdp[s][j], total.fdp_sq[s][j], cfg.reps);
      if (j == 0 || series.fdr[j] > series.supfdr[j - 1]) {
        series.supfdr[j] = series.fdr[j];
        series.supfdr_se[j] = series.fdr_se[j];
      } else {
        series.supfdr[j] = series.supfdr[j - 1];
        series.supfdr_se[j] = series.supfdr_se[j - 1];
      }
      series.power[j] = alternatives == 0
                            ? 0.0
                            : static_cast<double>(total.true_discoveries[s][j]) /
                                  (reps * static_cast<double>(alternatives));
    }
    result.methods.push_back(std::move(series));
  }
  const std::size_t runmax = slot(Method::runmax);
  result.final_fdr_of_maxima = total.fdp[runmax].back() / reps;
  result.final_fdr_of_maxima_se =
      standard_error(total.fdp[runmax].back(), total.fdp_sq[runmax].back(), cfg.reps);
  return result;
}

MetricSeries run_simulation(const SimulationConfig& cfg, unsigned threads) {
  cfg.validate();
  return run_simulation(cfg, generate_correlation(cfg.hypotheses, cfg.corr_seed), threads);
}

VilleEstimate ville_check(const SimulationConfig& cfg, const CorrelationMatrix& corr,
                          unsigned threads) {
  cfg.validate();
  const std::size_t nulls = cfg.null_count();
  const TruthLabels truth = cfg.truth();
  const GaussianLRConfig lr{0.0, cfg.mu1};
  const double bar = 1.0 / cfg.alpha;

  std::vector<double> fraction(cfg.reps, 0.0);
  std::vector<std::uint64_t> crossings(cfg.reps, 0);
  parallel_for_blocks(cfg.reps, resolve_threads(threads), [&](std::size_t rep) {
    const EProcessPanel panel =
        gaussian_lr_eprocess(sample_replication(cfg, corr, rep), lr, truth);
    std::uint64_t crossed = 0;
    for (std::size_t k = 0; k < nulls; ++k) {
      const auto row = panel.values().row(k);
      if (*std::max_element(row.begin(), row.end()) >= bar) ++crossed;
    }
    crossings[rep] = crossed;
    fraction[rep] = static_cast<double>(crossed) / static_cast<double>(nulls);
  });

  VilleEstimate est;
  est.null_paths = static_cast<std::uint64_t>(cfg.reps) * nulls;
  std::uint64_t total = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    total += crossings[rep];
    sum += fraction[rep];
    sum_sq += fraction[rep] * fraction[rep];
  }
  est.frequency = static_cast<double>(total) / static_cast<double>(est.null_paths);
  est.standard_error = standard_error(sum, sum_sq, cfg.reps);
  return est;
}

void write_metrics_csv(const MetricSeries& series, std::ostream& out) {
  out << "time,method,metric,value\n";
  for (std::size_t j = 0; j < series.times.size(); ++j) {
    for (const MethodSeries& m : series.methods) {
      const auto name = method_name(m.method);
      out << fmt::format("{},{},fdr,{}\n", series.times[j], name, m.fdr[j]);
      out << fmt::format("{},{},supfdr,{}\n", series.times[j], name, m.supfdr[j]);
      out << fmt::format("{},{},power,{}\n", series.times[j], name, m.power[j]);
    }
  }
}

}  // namespace carefree
