// mwf: capacity-maximizing transmit covariance under mixed power constraints.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mwf/checks.hpp"
#include "mwf/harness.hpp"
#include "mwf/io.hpp"
#include "mwf/oracle.hpp"
#include "mwf/solvers.hpp"

namespace fs = std::filesystem;
using mwf::io::json;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::vector<std::string> solvers;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::optional<int> jobs;

  void apply(mwf::ExperimentConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (trials) cfg.trials = *trials;
    if (!solvers.empty()) cfg.solvers = solvers;
    if (max_iter) cfg.max_iter = *max_iter;
    if (tol) cfg.tol = *tol;
    if (jobs) cfg.jobs = *jobs;
  }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw mwf::Error(mwf::ErrorCode::InvalidConfig,
                     "cannot write " + path.string());
  }
  out << text;
}

template <typename Writer, typename Rows>
std::string render(Writer writer, const Rows& rows) {
  std::ostringstream s;
  writer(s, rows);
  return s.str();
}

mwf::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return mwf::default_config();
  return mwf::config_from_json(mwf::io::read_json_file(path));
}

json kkt_to_json(const mwf::KktResiduals<double>& k) {
  return {{"stationarity", k.stationarity},
          {"complementarity_q", k.complementarity_q},
          {"complementarity_power", k.max_complementarity_power()},
          {"feasibility", k.feasibility},
          {"psd_violation", k.psd_violation}};
}

json report_to_json(const mwf::SolveReportXd& r,
                    const mwf::PowerPartitionXd& partition) {
  json j;
  j["solver"] = r.solver;
  j["capacity_nats"] = r.capacity_nats;
  j["capacity_bits"] = r.capacity_nats / std::log(2.0);
  j["iterations"] = r.iterations;
  j["Q"] = mwf::io::matrix_to_json(r.q.matrix());
  const mwf::VectorXr powers = mwf::group_powers(r.q, partition);
  j["group_powers"] = std::vector<double>(powers.data(),
                                          powers.data() + powers.size());
  j["budgets"] = std::vector<double>(partition.budgets().data(),
                                     partition.budgets().data() +
                                         partition.budgets().size());
  if (r.dual) {
    const auto& d = r.dual->values();
    j["dual"] = std::vector<double>(d.data(), d.data() + d.size());
    j["kkt"] = kkt_to_json(r.kkt);
  }
  if (!r.capacity_trace.empty()) j["capacity_trace"] = r.capacity_trace;
  if (!r.degenerate_groups.empty()) {
    std::vector<std::size_t> one_based;
    for (const auto k : r.degenerate_groups) one_based.push_back(k + 1);
    j["degenerate_groups"] = one_based;
  }
  return j;
}

int cmd_solve(const std::string& config, const std::string& out,
              const Overrides& ov) {
  const json input = mwf::io::read_json_file(config);
  const auto problem = mwf::io::problem_from_json(input);
  std::vector<std::string> solvers = ov.solvers;
  if (solvers.empty()) {
    solvers = {input.value("solver", std::string("iterative"))};
  }

  json result = json::array();
  for (const auto& name : solvers) {
    try {
      std::optional<mwf::SolveReportXd> report;
      if (name == "full_rank") {
        report = mwf::solve_full_rank(problem.model, problem.partition);
      } else if (name == "iterative") {
        mwf::IterativeOptions<double> opts;
        if (ov.max_iter) opts.max_iter = *ov.max_iter;
        if (ov.tol) opts.tol = *ov.tol;
        report = mwf::solve_iterative(problem.model, problem.partition, opts);
      } else if (name == "noniterative") {
        report = mwf::solve_noniterative(problem.model, problem.partition);
      } else if (name == "classical_wf") {
        report = mwf::solve_classical_wf(problem.model, problem.partition);
      } else if (name == "oracle") {
        auto o = mwf::solve_barrier(problem.model, problem.partition);
        o.report.iterations = o.newton_steps;
        report = std::move(o.report);
      } else {
        throw mwf::Error(mwf::ErrorCode::InvalidConfig,
                         "unknown solver: " + name);
      }
      result.push_back(report_to_json(*report, problem.partition));
    } catch (const mwf::Error& e) {
      result.push_back({{"solver", name},
                        {"error", mwf::to_string(e.code())},
                        {"message", e.what()}});
    }
  }
  const std::string text = result.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

int cmd_experiment(const std::string& config, const std::string& out,
                   const Overrides& ov, bool timing) {
  auto cfg = load_config(config);
  ov.apply(cfg);
  cfg.validate();
  const auto result = mwf::run_experiment(cfg);

  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  write_file(dir / "results.csv", render(mwf::write_results_csv, result.rows));
  write_file(dir / "summary.csv",
             render(mwf::write_summary_csv, result.summary));
  if (timing) {
    write_file(dir / "timing.csv", render(mwf::write_timing_csv, result.rows));
  }

  std::cout << render(mwf::write_summary_csv, result.summary);
  int failed = 0;
  for (const auto& r : result.rows) failed += r.ok ? 0 : 1;
  std::cerr << result.rows.size() << " rows (" << failed << " failed) -> "
            << (dir / "results.csv").string() << "\n";
  return 0;
}

int cmd_trace(const std::string& config, const std::string& out,
              const Overrides& ov, int trial, std::optional<double> snr) {
  mwf::IterativeOptions<double> opts;
  std::optional<mwf::SystemModelXd> model;
  std::optional<mwf::PowerPartitionXd> partition;

  const json input = config.empty() ? json() : mwf::io::read_json_file(config);
  if (input.is_object() && input.contains("H")) {
    auto problem = mwf::io::problem_from_json(input);
    model.emplace(std::move(problem.model));
    partition.emplace(std::move(problem.partition));
  } else {
    auto cfg = input.is_null() ? mwf::default_config()
                               : mwf::config_from_json(input);
    ov.apply(cfg);
    cfg.validate();
    partition.emplace(cfg.partition());
    const double s = snr.value_or(cfg.snr_db.back());
    model.emplace(mwf::SystemModelXd::white(
        mwf::generate_channel(cfg.m, cfg.n, cfg.seed,
                              static_cast<std::uint64_t>(trial)),
        mwf::noise_variance(partition->total_budget(), s)));
    opts.max_iter = cfg.max_iter;
    opts.tol = cfg.tol;
  }
  if (ov.max_iter) opts.max_iter = *ov.max_iter;
  if (ov.tol) opts.tol = *ov.tol;

  const auto trace = mwf::emit_convergence_trace(*model, *partition, opts);
  const std::string text = render(mwf::write_trace_csv, trace);
  if (out.empty()) {
    std::cout << text;
  } else {
    const fs::path dir(out);
    fs::create_directories(dir);
    write_file(dir / "trace.csv", text);
    std::cerr << trace.rows.size() << " rows -> "
              << (dir / "trace.csv").string() << "\n";
  }
  return 0;
}

int cmd_check(const Overrides& ov) {
  const auto results =
      mwf::run_checks(ov.seed.value_or(1), ov.trials.value_or(200));
  bool ok = true;
  for (const auto& r : results) {
    std::cout << mwf::format_check(r) << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmit covariance optimization under mixed power constraints"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  Overrides ov;
  bool timing = false;
  int trial = 0;
  std::optional<double> snr;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON problem or experiment config");
    sub->add_option("--out", out, "output directory (file for solve)");
    sub->add_option("--seed", ov.seed, "RNG seed");
    sub->add_option("--trials", ov.trials, "trials per SNR")
        ->check(CLI::PositiveNumber);
    sub->add_option("--solvers", ov.solvers,
                    "full_rank, iterative, noniterative, classical_wf, oracle")
        ->delimiter(',');
    sub->add_option("--max-iter", ov.max_iter, "iteration cap")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", ov.tol, "relative capacity change to stop")
        ->check(CLI::NonNegativeNumber);
  };

  auto* solve = app.add_subcommand("solve", "solve one problem file, print a JSON report");
  add_common(solve);
  solve->get_option("--config")->required();

  auto* experiment = app.add_subcommand(
      "experiment", "run an experiment config, write results.csv and summary.csv");
  add_common(experiment);
  experiment->add_option("--jobs", ov.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  experiment->add_flag("--timing", timing, "also write timing.csv");

  auto* trace = app.add_subcommand("trace", "write a convergence trace.csv");
  add_common(trace);
  trace->add_option("--trial", trial, "trial index of the channel")
      ->check(CLI::NonNegativeNumber);
  trace->add_option("--snr", snr, "SNR in dB (default: last in config)");

  auto* check = app.add_subcommand("check", "run identity and property suites");
  add_common(check);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(config, out, ov);
    if (*experiment) return cmd_experiment(config, out, ov, timing);
    if (*trace) return cmd_trace(config, out, ov, trial, snr);
    if (*check) return cmd_check(ov);
  } catch (const mwf::Error& e) {
    std::cerr << "error [" << mwf::to_string(e.code()) << "]: " << e.what()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
