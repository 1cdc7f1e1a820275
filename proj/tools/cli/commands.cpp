#include "cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "carefree/adjuster.hpp"
#include "carefree/counterexample.hpp"
#include "carefree/experiment.hpp"
#include "carefree/panel_io.hpp"
#include "carefree/parallel.hpp"
#include "carefree/testing.hpp"

namespace carefree::cli {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

/// Flag values that parse but violate a precondition; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CounterexampleOptions {
  double alpha = 0.05;
  std::size_t horizon = 1000;
  std::uint64_t reps = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
  bool with_adjusted = false;
  std::string out;
  std::string dump_panel;
  std::uint64_t dump_rep = 0;
};

struct SimulateOptions {
  SimulationConfig config;
  std::string methods = "standard,runmax,adjusted_A1,adjusted_A2";
  unsigned threads = 0;
  std::string out = "metrics.csv";
  bool dry_run = false;
};

struct CheckAdjusterOptions {
  std::string adjuster;
  double tolerance = 1e-6;
};

struct EbhOptions {
  std::string input = "-";
  double alpha = 0.05;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  return file;
}

void write_text(const std::string& path, const std::string& text) {
  auto file = open_output(path);
  file << text;
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

std::string manifest_path(const std::string& data_path) { return data_path + ".manifest.json"; }

/// Deterministic part of the manifest plus a "runtime" block (duration,
/// threads) that naturally varies between runs.
Json make_manifest(const std::string& subcommand, Json config, std::vector<std::string> argv,
                   std::vector<std::string> outputs, double seconds, unsigned threads) {
  Json manifest;
  manifest["subcommand"] = subcommand;
  manifest["config"] = std::move(config);
  manifest["argv"] = std::move(argv);
  manifest["outputs"] = std::move(outputs);
  manifest["runtime"] = {{"wall_clock_seconds", seconds}, {"threads", threads}};
  return manifest;
}

Json estimate_json(const ViolationEstimate& est) {
  return {{"estimate", est.probability}, {"se", est.standard_error}, {"events", est.events}};
}

int cmd_counterexample(const CounterexampleOptions& opt, std::ostream& out) {
  if (!(opt.alpha > 0.0 && opt.alpha < 0.5)) {
    throw UsageError("--alpha must lie in (0, 0.5)");
  }
  if (opt.horizon < 1) throw UsageError("--horizon must be at least 1");
  if (opt.reps < 1) throw UsageError("--reps must be at least 1");

  const auto started = Clock::now();
  const CounterexampleConfig cfg{opt.alpha, opt.horizon, opt.reps, opt.seed};
  const CounterexampleSummary summary = run_counterexample(cfg, opt.threads);

  Json result;
  result["alpha"] = cfg.alpha;
  result["horizon"] = cfg.horizon;
  result["reps"] = cfg.reps;
  result["seed"] = cfg.seed;
  result["fdr_estimate"] = summary.fdr.probability;
  result["fdr_se"] = summary.fdr.standard_error;
  result["fwer_estimate"] = summary.fwer.probability;
  result["fwer_se"] = summary.fwer.standard_error;
  if (cfg.horizon <= kMaxExhaustiveHorizon) {
    result["exhaustive_oracle"] = exhaustive_event_probability(cfg.alpha, cfg.horizon);
  }
  result["fdr_over_alpha"] = summary.fdr.probability / cfg.alpha;
  if (opt.with_adjusted) {
    result["adjusted"] = {
        {"A1", estimate_json(estimate_adjusted_fdr(cfg, Adjuster::a1(), opt.threads))},
        {"A2", estimate_json(estimate_adjusted_fdr(cfg, Adjuster::a2(), opt.threads))}};
  }
  const std::string text = result.dump(2) + "\n";
  out << text;

  std::vector<std::string> outputs;
  if (!opt.dump_panel.empty()) {
    Rng rng = make_stream(cfg.seed, opt.dump_rep);
    const EProcessPanel panel = counterexample_panel(cfg.alpha, cfg.horizon, rng);
    std::filesystem::path truth_path(opt.dump_panel);
    truth_path.replace_extension(".truth.csv");
    auto panel_file = open_output(opt.dump_panel);
    write_panel_csv(panel, panel_file);
    auto truth_file = open_output(truth_path.string());
    write_truth_csv(panel.truth(), truth_file);
    outputs.push_back(opt.dump_panel);
    outputs.push_back(truth_path.string());
  }
  if (!opt.out.empty()) {
    write_text(opt.out, text);
    outputs.insert(outputs.begin(), opt.out);
  }
  if (!outputs.empty()) {
    std::vector<std::string> argv{"counterexample",
                                  "--alpha", fmt::format("{}", cfg.alpha),
                                  "--horizon", std::to_string(cfg.horizon),
                                  "--reps", std::to_string(cfg.reps),
                                  "--seed", std::to_string(cfg.seed)};
    if (opt.with_adjusted) argv.emplace_back("--with-adjusted");
    if (!opt.out.empty()) argv.insert(argv.end(), {"--out", opt.out});
    if (!opt.dump_panel.empty()) {
      argv.insert(argv.end(), {"--dump-panel", opt.dump_panel, "--dump-rep",
                               std::to_string(opt.dump_rep)});
    }
    Json config = {{"alpha", cfg.alpha}, {"horizon", cfg.horizon}, {"reps", cfg.reps},
                   {"with_adjusted", opt.with_adjusted}};
    const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
    Json manifest = make_manifest("counterexample", std::move(config), std::move(argv), outputs,
                                  seconds, resolve_threads(opt.threads));
    manifest["seeds"] = {{"seed", cfg.seed}};
    write_text(manifest_path(outputs.front()), manifest.dump(2) + "\n");
  }
  return kSuccess;
}

std::string join_methods(const std::vector<Method>& methods) {
  std::string list;
  for (const Method m : methods) {
    if (!list.empty()) list += ',';
    list += method_name(m);
  }
  return list;
}

Json resolved_config(const SimulationConfig& cfg) {
  return {{"k", cfg.hypotheses},
          {"t", cfg.horizon},
          {"reps", cfg.reps},
          {"alpha", cfg.alpha},
          {"pi0", cfg.pi0},
          {"mu1", cfg.mu1},
          {"methods", join_methods(cfg.methods)},
          {"stride", cfg.effective_stride()},
          {"null_count", cfg.null_count()},
          {"corr_seed", cfg.corr_seed},
          {"data_seed", cfg.data_seed}};
}

int cmd_simulate(SimulateOptions opt, std::ostream& out) {
  SimulationConfig& cfg = opt.config;
  try {
    cfg.methods = parse_methods(opt.methods);
    cfg.validate();
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }

  if (opt.dry_run) {
    out << resolved_config(cfg).dump(2) << '\n';
    return kSuccess;
  }

  const auto started = Clock::now();
  // Fail on an unwritable path before spending time on the simulation.
  auto csv_file = open_output(opt.out);
  const MetricSeries series = run_simulation(cfg, opt.threads);
  std::ostringstream csv;
  write_metrics_csv(series, csv);
  csv_file << csv.str();
  if (!csv_file) throw std::runtime_error("failed writing '" + opt.out + "'");
  csv_file.close();

  const std::string method_list = join_methods(cfg.methods);
  Json config = resolved_config(cfg);
  const std::vector<std::string> argv{
      "simulate",      "--k",         std::to_string(cfg.hypotheses),
      "--t",           std::to_string(cfg.horizon),
      "--reps",        std::to_string(cfg.reps),
      "--alpha",       fmt::format("{}", cfg.alpha),
      "--pi0",         fmt::format("{}", cfg.pi0),
      "--mu1",         fmt::format("{}", cfg.mu1),
      "--methods",     method_list,
      "--corr-seed",   std::to_string(cfg.corr_seed),
      "--data-seed",   std::to_string(cfg.data_seed),
      "--stride",      std::to_string(cfg.effective_stride()),
      "--out",         opt.out};
  const double seconds = std::chrono::duration<double>(Clock::now() - started).count();
  Json manifest = make_manifest("simulate", std::move(config), argv, {opt.out}, seconds,
                                resolve_threads(opt.threads));
  manifest["seeds"] = {{"corr_seed", cfg.corr_seed}, {"data_seed", cfg.data_seed}};
  manifest["final_fdr_of_maxima"] = series.final_fdr_of_maxima;
  manifest["audit"] = {{"evaluations", series.audit.evaluations},
                       {"standard_outside_runmax", series.audit.standard_outside_runmax},
                       {"adjusted_outside_runmax", series.audit.adjusted_outside_runmax},
                       {"runmax_shrinks", series.audit.runmax_shrinks},
                       {"adjusted_shrinks", series.audit.adjusted_shrinks}};
  write_text(manifest_path(opt.out), manifest.dump(2) + "\n");

  out << fmt::format("wrote {} ({} evaluation times)\n", opt.out, series.times.size());
  for (const MethodSeries& m : series.methods) {
    out << fmt::format("{:<12} final fdr {:.5f}  supfdr {:.5f}  power {:.5f}\n",
                       method_name(m.method), m.fdr.back(), m.supfdr.back(), m.power.back());
  }
  return kSuccess;
}

int cmd_check_adjuster(const CheckAdjusterOptions& opt, std::ostream& out) {
  if (!(opt.tolerance > 0.0)) throw UsageError("--tolerance must be positive");
  const AdmissibilityReport report = check_admissible(Adjuster::by_name(opt.adjuster), opt.tolerance);
  out << fmt::format("adjuster: {}\n", report.adjuster);
  out << fmt::format("integral: {:.15f}\n", report.integral);
  out << fmt::format("error_estimate: {:.3g}\n", report.error_estimate);
  out << fmt::format("monotone: {}\n", report.monotone ? "yes" : "no");
  out << fmt::format("infinite_at_infinity: {}\n", report.infinite_at_infinity ? "yes" : "no");
  out << fmt::format("tolerance: {:g}\n", opt.tolerance);
  if (!report.diagnostic.empty()) out << fmt::format("diagnostic: {}\n", report.diagnostic);
  out << fmt::format("verdict: {}\n", report.admissible ? "PASS" : "FAIL");
  return report.admissible ? kSuccess : kRuntimeFailure;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int cmd_ebh(const EbhOptions& opt, std::ostream& out) {
  try {
    require_level(opt.alpha);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(std::string("--alpha: ") + ex.what());
  }

  std::ifstream file;
  std::istream* in = &std::cin;
  if (opt.input != "-") {
    file.open(opt.input);
    if (!file) throw std::runtime_error("cannot open '" + opt.input + "'");
    in = &file;
  }

  std::vector<std::string> ids;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (ids.empty() && line == "hypothesis,value") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw std::runtime_error(fmt::format("line {}: expected 'hypothesis,value'", line_no));
    }
    const std::string id = trim(line.substr(0, comma));
    const std::string field = trim(line.substr(comma + 1));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(field, &used);
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("line {}: '{}' is not a number", line_no, field));
    }
    if (id.empty()) throw std::runtime_error(fmt::format("line {}: empty hypothesis id", line_no));
    if (std::isnan(value) || value < 0.0) {
      throw std::runtime_error(fmt::format("line {}: e-value must be nonnegative", line_no));
    }
    ids.push_back(id);
    values.push_back(value);
  }

  std::string rejected;
  std::size_t k_star = 0;
  if (!values.empty()) {
    const RejectionSet set = ebh(EVector(std::move(values)), opt.alpha);
    k_star = set.k_star();
    for (const std::size_t i : set.indices()) {
      if (!rejected.empty()) rejected += ',';
      rejected += ids[i];
    }
  }
  out << "k_star: " << k_star << '\n';
  out << "rejected: " << rejected << '\n';
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anytime-valid multiple testing with e-processes", "carefree"};
  app.require_subcommand(1);

  CounterexampleOptions ce;
  auto* ce_cmd = app.add_subcommand(
      "counterexample", "Monte Carlo FDR/FWER of running-max e-BH on two dependent null e-processes");
  ce_cmd->add_option("--alpha", ce.alpha, "Level in (0, 0.5)")->capture_default_str();
  ce_cmd->add_option("--horizon", ce.horizon, "Number of increments T")->capture_default_str();
  ce_cmd->add_option("--reps", ce.reps, "Monte Carlo replications")->capture_default_str();
  ce_cmd->add_option("--seed", ce.seed, "Base seed")->capture_default_str();
  ce_cmd->add_option("--threads", ce.threads, "Worker threads (0: CAREFREE_THREADS or hardware)");
  ce_cmd->add_flag("--with-adjusted", ce.with_adjusted,
                   "Also estimate the FDR of adjusted (A1, A2) running-max e-BH");
  ce_cmd->add_option("--out", ce.out, "Also write the JSON summary (and a manifest) here");
  ce_cmd->add_option("--dump-panel", ce.dump_panel,
                     "Write one replication's panel as hypothesis,time,value CSV");
  ce_cmd->add_option("--dump-rep", ce.dump_rep, "Replication index for --dump-panel")
      ->capture_default_str();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "FDR, supFDR and power over time for correlated Gaussian LR e-processes");
  sim_cmd->add_option("--k", sim.config.hypotheses, "Number of hypotheses")->capture_default_str();
  sim_cmd->add_option("--t", sim.config.horizon, "Observations per hypothesis")->capture_default_str();
  sim_cmd->add_option("--reps", sim.config.reps, "Replications")->capture_default_str();
  sim_cmd->add_option("--alpha", sim.config.alpha, "Level in (0, 1)")->capture_default_str();
  sim_cmd->add_option("--pi0", sim.config.pi0, "Fraction of true nulls in (0, 1]")
      ->capture_default_str();
  sim_cmd->add_option("--mu1", sim.config.mu1, "Alternative mean")->capture_default_str();
  sim_cmd->add_option("--methods", sim.methods, "Comma-separated subset of "
                      "standard,runmax,adjusted_A1,adjusted_A2")->capture_default_str();
  sim_cmd->add_option("--corr-seed", sim.config.corr_seed, "Seed of the correlation matrix")
      ->capture_default_str();
  sim_cmd->add_option("--data-seed", sim.config.data_seed, "Base seed for replication data")
      ->capture_default_str();
  sim_cmd->add_option("--stride", sim.config.stride,
                      "Evaluate every n-th step (0: 1 if T <= 500, else 10)")
      ->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0: CAREFREE_THREADS or hardware)");
  sim_cmd->add_option("--out", sim.out, "Metrics CSV path")->capture_default_str();
  sim_cmd->add_flag("--dry-run", sim.dry_run, "Print the resolved configuration and exit");

  CheckAdjusterOptions adj;
  auto* adj_cmd = app.add_subcommand("check-adjuster", "Verify the admissibility of an adjuster");
  adj_cmd->add_option("--adjuster", adj.adjuster, "A1 or A2")
      ->required()
      ->check(CLI::IsMember({"A1", "A2"}));
  adj_cmd->add_option("--tolerance", adj.tolerance, "Allowed |integral - 1|")
      ->capture_default_str();

  EbhOptions eb;
  auto* ebh_cmd = app.add_subcommand("ebh", "Run e-BH on a hypothesis,value CSV");
  ebh_cmd->add_option("--input,input", eb.input, "CSV path, '-' for stdin")->capture_default_str();
  ebh_cmd->add_option("--alpha", eb.alpha, "Level in (0, 1)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (ce_cmd->parsed()) return cmd_counterexample(ce, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim, out);
    if (adj_cmd->parsed()) return cmd_check_adjuster(adj, out);
    if (ebh_cmd->parsed()) return cmd_ebh(eb, out);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kUsageError;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"carefree"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace carefree::cli
