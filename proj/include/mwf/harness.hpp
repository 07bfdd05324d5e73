#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mwf/io.hpp"
#include "mwf/oracle.hpp"
#include "mwf/solvers.hpp"
#include "mwf/system_model.hpp"

namespace mwf {

inline const std::vector<std::string>& known_solvers() {
  static const std::vector<std::string> names{
      "full_rank", "iterative", "noniterative", "classical_wf", "oracle"};
  return names;
}

struct ExperimentConfig {
  Eigen::Index m = 4;
  Eigen::Index n = 8;
  std::vector<std::vector<Eigen::Index>> groups;  // 0-based
  std::optional<std::vector<double>> power_ratios;
  std::optional<std::vector<double>> budgets;
  std::optional<double> total_power;  // defaults to N
  std::vector<double> snr_db{0.0, 10.0, 20.0};
  int trials = 50;
  std::uint64_t seed = 1;
  std::vector<std::string> solvers{"iterative", "noniterative", "oracle"};
  int max_iter = 100;
  double tol = 1e-8;
  int jobs = 1;

  /// Per-group budgets, either explicit or from ratios and total power.
  VectorXr resolved_budgets() const;
  double resolved_total_power() const;
  PowerPartitionXd partition() const;
  /// Throws InvalidConfig / partition errors.
  void validate() const;
};

/// Parses a config object. Missing groups mean one group per antenna; missing
/// ratios and budgets mean ratios G:G-1:...:1 over the G groups.
ExperimentConfig config_from_json(const io::json& j);
io::json config_to_json(const ExperimentConfig& cfg);

/// 4 x 8, per-antenna groups, ratios 8:7:...:1.
ExperimentConfig default_config();

/// p_k = total * r_k / sum(r).
VectorXr budgets_from_ratios(const std::vector<double>& ratios, double total);

double noise_variance(double total_power, double snr_db);

struct TrialResult {
  int trial_index = 0;
  double snr_db = 0;
  std::string solver_name;
  bool ok = false;
  std::string status;  // "ok" or the error code
  double capacity_nats = 0;
  int iterations = 0;
  double wall_time_s = 0;
  double max_group_violation = 0;  // relative to the group budget
  std::optional<double> kkt_stationarity;
};

struct SummaryRow {
  double snr_db = 0;
  std::string solver_name;
  int n_ok = 0;
  int n_failed = 0;
  double mean_capacity_nats = 0;
  double std_capacity_nats = 0;
  double mean_iterations = 0;
};

struct ExperimentResult {
  std::vector<TrialResult> rows;
  std::vector<SummaryRow> summary;
};

struct Verification {
  bool accepted = false;
  double max_group_violation = 0;
  double min_eigenvalue = 0;
};

/// Recomputes group powers and the spectrum of Q from scratch.
Verification verify_solution(const HermitianMatrixXd& q,
                             const PowerPartitionXd& partition);

/// Runs one solver by name on one instance. Solver errors are reported in the
/// returned row rather than thrown.
TrialResult run_trial(const std::string& solver, const SystemModelXd& model,
                      const PowerPartitionXd& partition, int max_iter,
                      double tol);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& rows,
                                  const std::vector<double>& snr_db,
                                  const std::vector<std::string>& solvers);

struct TraceRow {
  int iteration = 0;
  double capacity_nats = 0;
  std::optional<double> gap_to_oracle;  // (oracle - capacity) / oracle
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  std::optional<double> oracle_capacity_nats;
};

/// Iterative solver trace; iteration 0 is the initializer. The oracle
/// reference is skipped above its antenna limit.
ConvergenceTrace emit_convergence_trace(const SystemModelXd& model,
                                        const PowerPartitionXd& partition,
                                        const IterativeOptions<double>& opts);

void write_results_csv(std::ostream& out, const std::vector<TrialResult>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);
void write_timing_csv(std::ostream& out, const std::vector<TrialResult>& rows);

/// Fixed-format number for CSV output: 17 significant digits, empty for NaN.
std::string format_number(double x);

}  // namespace mwf
