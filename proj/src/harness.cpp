#include "mwf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "mwf/random.hpp"

namespace mwf {

namespace {

constexpr double kNatsToBits = 1.4426950408889634;  // 1 / ln 2

std::vector<std::vector<Eigen::Index>> per_antenna_groups(Eigen::Index n) {
  std::vector<std::vector<Eigen::Index>> g;
  for (Eigen::Index a = 0; a < n; ++a) g.push_back({a});
  return g;
}

std::vector<double> doubles_from_json(const io::json& j, const char* key) {
  if (!j.is_array()) {
    throw Error(ErrorCode::InvalidConfig,
                std::string(key) + " must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) {
      throw Error(ErrorCode::InvalidConfig,
                  std::string(key) + " must be an array of numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

template <typename T>
T positive_integer(const io::json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw Error(ErrorCode::InvalidConfig,
                std::string(key) + " must be a positive integer");
  }
  return j.get<T>();
}

}  // namespace

VectorXr budgets_from_ratios(const std::vector<double>& ratios, double total) {
  if (ratios.empty()) {
    throw Error(ErrorCode::InvalidConfig, "power ratios must be non-empty");
  }
  double sum = 0;
  for (const double r : ratios) {
    if (!(r > 0) || !std::isfinite(r)) {
      throw Error(ErrorCode::NonPositiveBudget, "power ratios must be > 0");
    }
    sum += r;
  }
  VectorXr p(static_cast<Eigen::Index>(ratios.size()));
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    p(static_cast<Eigen::Index>(k)) = total * ratios[k] / sum;
  }
  return p;
}

double noise_variance(double total_power, double snr_db) {
  return total_power / std::pow(10.0, snr_db / 10.0);
}

double ExperimentConfig::resolved_total_power() const {
  if (budgets) {
    double s = 0;
    for (const double b : *budgets) s += b;
    return s;
  }
  return total_power.value_or(static_cast<double>(n));
}

VectorXr ExperimentConfig::resolved_budgets() const {
  if (budgets) {
    return Eigen::Map<const VectorXr>(budgets->data(),
                                      static_cast<Eigen::Index>(budgets->size()));
  }
  const std::size_t g = groups.empty() ? static_cast<std::size_t>(n)
                                       : groups.size();
  std::vector<double> ratios;
  if (power_ratios) {
    ratios = *power_ratios;
  } else {
    for (std::size_t k = 0; k < g; ++k) {
      ratios.push_back(static_cast<double>(g - k));
    }
  }
  return budgets_from_ratios(ratios, resolved_total_power());
}

PowerPartitionXd ExperimentConfig::partition() const {
  return validate_partition<double>(
      n, groups.empty() ? per_antenna_groups(n) : groups, resolved_budgets());
}

void ExperimentConfig::validate() const {
  if (m < 1 || n < 1) {
    throw Error(ErrorCode::InvalidConfig, "M and N must be >= 1");
  }
  if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
  if (snr_db.empty()) {
    throw Error(ErrorCode::InvalidConfig, "snr_db must be non-empty");
  }
  for (const double s : snr_db) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::InvalidConfig, "snr_db entries must be finite");
    }
  }
  if (solvers.empty()) {
    throw Error(ErrorCode::InvalidConfig, "solvers must be non-empty");
  }
  for (const auto& s : solvers) {
    const auto& known = known_solvers();
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw Error(ErrorCode::InvalidConfig, "unknown solver: " + s);
    }
  }
  if (power_ratios && budgets) {
    throw Error(ErrorCode::InvalidConfig,
                "give either power_ratios or budgets, not both");
  }
  if (max_iter < 0 || !(tol >= 0)) {
    throw Error(ErrorCode::InvalidOptions, "bad iteration limits");
  }
  if (jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be >= 1");
  if (total_power && !(*total_power > 0)) {
    throw Error(ErrorCode::NonPositiveBudget, "total_power must be > 0");
  }
  (void)partition();
}

ExperimentConfig config_from_json(const io::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  }
  ExperimentConfig cfg;
  if (j.contains("M")) cfg.m = positive_integer<Eigen::Index>(j["M"], "M");
  if (j.contains("N")) cfg.n = positive_integer<Eigen::Index>(j["N"], "N");
  if (j.contains("groups")) cfg.groups = io::groups_from_json(j["groups"]);
  if (j.contains("power_ratios")) {
    cfg.power_ratios = doubles_from_json(j["power_ratios"], "power_ratios");
  }
  if (j.contains("budgets")) {
    cfg.budgets = doubles_from_json(j["budgets"], "budgets");
  }
  if (j.contains("total_power")) {
    if (!j["total_power"].is_number()) {
      throw Error(ErrorCode::InvalidConfig, "total_power must be a number");
    }
    cfg.total_power = j["total_power"].get<double>();
  }
  if (j.contains("snr_db")) cfg.snr_db = doubles_from_json(j["snr_db"], "snr_db");
  if (j.contains("trials")) cfg.trials = positive_integer<int>(j["trials"], "trials");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      throw Error(ErrorCode::InvalidConfig, "seed must be a non-negative integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("solvers")) {
    cfg.solvers.clear();
    for (const auto& s : j["solvers"]) {
      if (!s.is_string()) {
        throw Error(ErrorCode::InvalidConfig, "solvers must be strings");
      }
      cfg.solvers.push_back(s.get<std::string>());
    }
  }
  if (j.contains("max_iter")) {
    if (!j["max_iter"].is_number_integer()) {
      throw Error(ErrorCode::InvalidConfig, "max_iter must be an integer");
    }
    cfg.max_iter = j["max_iter"].get<int>();
  }
  if (j.contains("tol")) {
    if (!j["tol"].is_number()) {
      throw Error(ErrorCode::InvalidConfig, "tol must be a number");
    }
    cfg.tol = j["tol"].get<double>();
  }
  if (j.contains("jobs")) cfg.jobs = positive_integer<int>(j["jobs"], "jobs");
  cfg.validate();
  return cfg;
}

io::json config_to_json(const ExperimentConfig& cfg) {
  io::json j;
  j["M"] = cfg.m;
  j["N"] = cfg.n;
  j["groups"] = io::groups_to_json(cfg.groups.empty()
                                       ? per_antenna_groups(cfg.n)
                                       : cfg.groups);
  if (cfg.power_ratios) j["power_ratios"] = *cfg.power_ratios;
  if (cfg.budgets) j["budgets"] = *cfg.budgets;
  if (cfg.total_power) j["total_power"] = *cfg.total_power;
  j["snr_db"] = cfg.snr_db;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["solvers"] = cfg.solvers;
  j["max_iter"] = cfg.max_iter;
  j["tol"] = cfg.tol;
  return j;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.m = 4;
  cfg.n = 8;
  cfg.power_ratios = std::vector<double>{8, 7, 6, 5, 4, 3, 2, 1};
  cfg.snr_db = {0.0, 10.0, 20.0};
  cfg.trials = 50;
  cfg.seed = 2015;
  cfg.solvers = {"iterative", "noniterative", "oracle"};
  return cfg;
}

Verification verify_solution(const HermitianMatrixXd& q,
                             const PowerPartitionXd& partition) {
  Verification v;
  const ComplexMatrixXd& m = q.matrix();
  if (!all_finite(m) || q.dim() != partition.n_antennas()) return v;

  for (std::size_t k = 0; k < partition.n_groups(); ++k) {
    double power = 0;
    for (const Eigen::Index j : partition.groups()[k]) power += m(j, j).real();
    const double budget = partition.budget(k);
    v.max_group_violation =
        std::max(v.max_group_violation, std::max(0.0, power - budget) / budget);
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrixXd> es(m, Eigen::EigenvaluesOnly);
  const VectorXr& ev = es.eigenvalues();
  v.min_eigenvalue = ev(0);
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  v.accepted = v.max_group_violation <= Tolerances::feasibility &&
               v.min_eigenvalue >= -Tolerances::psd_clamp * scale;
  return v;
}

TrialResult run_trial(const std::string& solver, const SystemModelXd& model,
                      const PowerPartitionXd& partition, int max_iter,
                      double tol) {
  TrialResult row;
  row.solver_name = solver;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::optional<SolveReportXd> report;
    if (solver == "full_rank") {
      report = solve_full_rank(model, partition);
    } else if (solver == "iterative") {
      IterativeOptions<double> opts;
      opts.max_iter = max_iter;
      opts.tol = tol;
      report = solve_iterative(model, partition, opts);
    } else if (solver == "noniterative") {
      report = solve_noniterative(model, partition);
    } else if (solver == "classical_wf") {
      report = solve_classical_wf(model, partition);
    } else if (solver == "oracle") {
      auto oracle = solve_barrier(model, partition);
      report = std::move(oracle.report);
      report->iterations = oracle.newton_steps;
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown solver: " + solver);
    }
    row.capacity_nats = report->capacity_nats;
    row.iterations = report->iterations;
    if (report->dual) row.kkt_stationarity = report->kkt.stationarity;

    const Verification v = verify_solution(report->q, partition);
    row.max_group_violation = v.max_group_violation;
    row.ok = v.accepted && std::isfinite(row.capacity_nats) &&
             row.capacity_nats >= 0;
    row.status = row.ok ? "ok" : "Infeasible";
  } catch (const Error& e) {
    row.ok = false;
    row.status = to_string(e.code());
  }
  row.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return row;
}

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& rows,
                                  const std::vector<double>& snr_db,
                                  const std::vector<std::string>& solvers) {
  std::vector<SummaryRow> out;
  for (const double snr : snr_db) {
    for (const auto& solver : solvers) {
      SummaryRow s;
      s.snr_db = snr;
      s.solver_name = solver;
      double sum = 0;
      double iters = 0;
      for (const auto& r : rows) {
        if (r.snr_db != snr || r.solver_name != solver) continue;
        if (!r.ok) {
          ++s.n_failed;
          continue;
        }
        ++s.n_ok;
        sum += r.capacity_nats;
        iters += r.iterations;
      }
      if (s.n_ok > 0) {
        s.mean_capacity_nats = sum / s.n_ok;
        s.mean_iterations = iters / s.n_ok;
        double sq = 0;
        for (const auto& r : rows) {
          if (r.snr_db != snr || r.solver_name != solver || !r.ok) continue;
          const double d = r.capacity_nats - s.mean_capacity_nats;
          sq += d * d;
        }
        s.std_capacity_nats = s.n_ok > 1 ? std::sqrt(sq / (s.n_ok - 1)) : 0.0;
      } else {
        s.mean_capacity_nats = std::numeric_limits<double>::quiet_NaN();
        s.std_capacity_nats = std::numeric_limits<double>::quiet_NaN();
        s.mean_iterations = std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const PowerPartitionXd partition = cfg.partition();
  const double total = partition.total_budget();

  const std::size_t n_snr = cfg.snr_db.size();
  const std::size_t n_solvers = cfg.solvers.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialResult> rows(n_snr * n_trials * n_solvers);

  // Work item (snr, trial); each fills its own slice of rows.
  auto run_item = [&](std::size_t item) {
    const std::size_t si = item / n_trials;
    const std::size_t t = item % n_trials;
    const double snr = cfg.snr_db[si];
    const ComplexMatrixXd h = generate_channel(cfg.m, cfg.n, cfg.seed, t);
    std::optional<SystemModelXd> model;
    std::string model_error;
    try {
      model.emplace(SystemModelXd::white(h, noise_variance(total, snr)));
    } catch (const Error& e) {
      model_error = to_string(e.code());
    }
    for (std::size_t s = 0; s < n_solvers; ++s) {
      TrialResult row;
      if (model) {
        row = run_trial(cfg.solvers[s], *model, partition, cfg.max_iter,
                        cfg.tol);
      } else {
        row.solver_name = cfg.solvers[s];
        row.status = model_error;
      }
      row.trial_index = static_cast<int>(t);
      row.snr_db = snr;
      rows[item * n_solvers + s] = std::move(row);
    }
  };

  const std::size_t n_items = n_snr * n_trials;
  const auto n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), n_items);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n_items; ++i) run_item(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_items; i = next++) run_item(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  result.summary = summarize(rows, cfg.snr_db, cfg.solvers);
  result.rows = std::move(rows);
  return result;
}

ConvergenceTrace emit_convergence_trace(const SystemModelXd& model,
                                        const PowerPartitionXd& partition,
                                        const IterativeOptions<double>& opts) {
  ConvergenceTrace trace;
  const auto report = solve_iterative(model, partition, opts);
  if (model.tx() <= BarrierOptions<double>{}.max_antennas) {
    trace.oracle_capacity_nats =
        solve_barrier(model, partition).report.capacity_nats;
  }
  for (std::size_t i = 0; i < report.capacity_trace.size(); ++i) {
    TraceRow row;
    row.iteration = static_cast<int>(i);
    row.capacity_nats = report.capacity_trace[i];
    if (trace.oracle_capacity_nats) {
      const double ref = *trace.oracle_capacity_nats;
      row.gap_to_oracle = (ref - row.capacity_nats) / ref;
    }
    trace.rows.push_back(row);
  }
  return trace;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  if (x == 0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_results_csv(std::ostream& out, const std::vector<TrialResult>& rows) {
  out << "trial_index,snr_db,solver,status,capacity_nats,capacity_bits,"
         "iterations,max_group_violation,kkt_stationarity\n";
  for (const auto& r : rows) {
    out << r.trial_index << ',' << format_number(r.snr_db) << ','
        << r.solver_name << ',' << r.status << ',';
    if (r.status == "ok" || r.status == "Infeasible") {
      out << format_number(r.capacity_nats) << ','
          << format_number(r.capacity_nats * kNatsToBits) << ','
          << r.iterations << ',' << format_number(r.max_group_violation)
          << ',';
      if (r.kkt_stationarity) out << format_number(*r.kkt_stationarity);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "snr_db,solver,n_ok,n_failed,mean_capacity_nats,std_capacity_nats,"
         "mean_capacity_bits,std_capacity_bits,mean_iterations\n";
  for (const auto& s : rows) {
    out << format_number(s.snr_db) << ',' << s.solver_name << ',' << s.n_ok
        << ',' << s.n_failed << ',' << format_number(s.mean_capacity_nats)
        << ',' << format_number(s.std_capacity_nats) << ','
        << format_number(s.mean_capacity_nats * kNatsToBits) << ','
        << format_number(s.std_capacity_nats * kNatsToBits) << ','
        << format_number(s.mean_iterations) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << "iteration,capacity_nats,capacity_bits,oracle_capacity_nats,"
         "oracle_capacity_bits,relative_gap_to_oracle\n";
  for (const auto& r : trace.rows) {
    out << r.iteration << ',' << format_number(r.capacity_nats) << ','
        << format_number(r.capacity_nats * kNatsToBits) << ',';
    if (trace.oracle_capacity_nats) {
      out << format_number(*trace.oracle_capacity_nats) << ','
          << format_number(*trace.oracle_capacity_nats * kNatsToBits);
    } else {
      out << ',';
    }
    out << ',';
    if (r.gap_to_oracle) out << format_number(*r.gap_to_oracle);
    out << '\n';
  }
}

void write_timing_csv(std::ostream& out, const std::vector<TrialResult>& rows) {
  out << "trial_index,snr_db,solver,wall_time_s\n";
  for (const auto& r : rows) {
    out << r.trial_index << ',' << format_number(r.snr_db) << ','
        << r.solver_name << ',' << format_number(r.wall_time_s) << '\n';
  }
}

}  // namespace mwf
