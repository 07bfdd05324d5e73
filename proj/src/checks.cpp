#include "mwf/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mwf/harness.hpp"
#include "mwf/oracle.hpp"

namespace mwf {

namespace {

Eigen::Index uniform_int(GaussianStream& rng, Eigen::Index lo, Eigen::Index hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return std::min(hi, lo + static_cast<Eigen::Index>(rng.uniform() * span));
}

double log_uniform(GaussianStream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

/// Antennas shuffled and cut into 1..n contiguous groups; budgets in [0.2, 2].
PowerPartitionXd random_partition(GaussianStream& rng, Eigen::Index n) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = perm.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<Eigen::Index>(i) - 1));
    std::swap(perm[i - 1], perm[j]);
  }
  const Eigen::Index n_groups = uniform_int(rng, 1, n);
  std::vector<std::vector<Eigen::Index>> groups(
      static_cast<std::size_t>(n_groups));
  for (Eigen::Index i = 0; i < n; ++i) {
    // Every group gets one antenna first, the rest land anywhere.
    const Eigen::Index k = i < n_groups ? i : uniform_int(rng, 0, n_groups - 1);
    groups[static_cast<std::size_t>(k)].push_back(
        perm[static_cast<std::size_t>(i)]);
  }
  VectorXr budgets(n_groups);
  for (Eigen::Index k = 0; k < n_groups; ++k) {
    budgets(k) = 0.2 + 1.8 * rng.uniform();
  }
  return validate_partition<double>(n, std::move(groups), budgets);
}

struct Tally {
  CheckResult r;
  Tally(std::string name, double threshold) {
    r.name = std::move(name);
    r.threshold = threshold;
  }
  void add(double value) {
    ++r.total;
    r.worst = std::max(r.worst, value);
    if (!(value <= r.threshold)) ++r.failures;
  }
  void fail() {
    ++r.total;
    ++r.failures;
  }
  CheckResult done() {
    r.passed = r.failures == 0 && r.total > 0;
    return r;
  }
};

}  // namespace

IdentityInstance random_identity_instance(std::uint64_t seed,
                                          std::uint64_t index,
                                          Eigen::Index max_dim) {
  GaussianStream rng(seed, index);
  const Eigen::Index m = uniform_int(rng, 1, max_dim);
  const Eigen::Index n = uniform_int(rng, 1, max_dim);
  const bool deficient = m > 1 && n > 1 && rng.uniform() < 0.4;
  ComplexMatrixXd h;
  if (deficient) {
    const Eigen::Index r = uniform_int(rng, 1, std::min(m, n) - 1);
    h = generate_channel(m, r, seed ^ 0xA5A5A5A5ULL, index) *
        generate_channel(r, n, seed ^ 0x5A5A5A5AULL, index);
  } else {
    h = generate_channel(m, n, seed ^ 0x3C3C3C3CULL, index);
  }
  const double sigma2 = std::pow(10.0, -(rng.uniform() * 40.0 - 10.0) / 10.0);
  VectorXr d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = log_uniform(rng, std::exp(-3.0), std::exp(3.0));
  const double alpha = log_uniform(rng, 1e-6, 1.0);
  return IdentityInstance{SystemModelXd::white(std::move(h), sigma2),
                          DualDiagonalXd(d), alpha, deficient};
}

double conclusion1_normalized(const DualDiagonalXd& dual,
                              const SystemModelXd& model, double alpha) {
  const auto s = gram_matrix(model);
  const Eigen::Index n = s.dim();
  const ComplexMatrixXd ident = ComplexMatrixXd::Identity(n, n);
  const ComplexMatrixXd inv =
      (s.matrix() + Complex<double>(alpha) * ident).llt().solve(ident);
  const auto m = HermitianMatrixXd::symmetrized(
      ident - detail::scale_rows_cols(dual.sqrt(), inv));
  const auto evd = hermitian_evd(m);
  const ComplexMatrixXd phi =
      detail::weighted_outer(evd.vectors, neg_part(evd.values), n);
  const double raw = std::abs(((m.matrix() + phi) * phi).trace());
  return raw / std::max(1.0, m.matrix().norm() * phi.norm());
}

std::vector<CheckResult> run_checks(std::uint64_t seed, int trials) {
  if (trials < 1) throw Error(ErrorCode::InvalidOptions, "trials must be >= 1");
  std::vector<CheckResult> out;
  const auto n_trials = static_cast<std::uint64_t>(trials);

  {
    Tally b("dual_gap_identity", 1e-9);
    Tally c("trace_identity", 1e-10);
    Tally cn("trace_identity_normalized", 1e-12);
    for (std::uint64_t i = 0; i < n_trials; ++i) {
      const auto inst = random_identity_instance(seed, i);
      b.add(appendix_b_residual(inst.dual,
                                effective_basis(gram_matrix(inst.model))));
      c.add(conclusion1_residual(inst.dual, inst.model, inst.alpha));
      cn.add(conclusion1_normalized(inst.dual, inst.model, inst.alpha));
    }
    out.push_back(b.done());
    out.push_back(c.done());
    out.push_back(cn.done());
  }

  {
    Tally collapse("single_group_collapse_nats", 1e-6);
    for (std::uint64_t i = 0; i < n_trials; ++i) {
      GaussianStream rng(seed ^ 0xC011A95EULL, i);
      const Eigen::Index m = uniform_int(rng, 1, 6);
      const Eigen::Index n = uniform_int(rng, 1, 8);
      const double p = 0.5 + 4.5 * rng.uniform();
      const double snr = 20.0 * rng.uniform();
      const auto model = SystemModelXd::white(
          generate_channel(m, n, seed, i), noise_variance(p, snr));
      const auto part = sum_power_partition<double>(n, p);
      const double ref = solve_classical_wf(model, part).capacity_nats;
      collapse.add(std::max(
          std::abs(solve_noniterative(model, part).capacity_nats - ref),
          std::abs(solve_iterative(model, part).capacity_nats - ref)));
    }
    out.push_back(collapse.done());
  }

  {
    Tally feas("solver_feasibility_relative", Tolerances::feasibility);
    Tally idem("repair_idempotence", 1e-12);
    Tally scale("scale_covariance_nats", 1e-8);
    Tally gap("iterative_vs_oracle_relative_gap", 5e-3);
    for (std::uint64_t i = 0; i < n_trials; ++i) {
      GaussianStream rng(seed ^ 0x0DDBA11ULL, i);
      const Eigen::Index m = uniform_int(rng, 1, 6);
      const Eigen::Index n = uniform_int(rng, 1, 8);
      const auto part = random_partition(rng, n);
      const double snr = 20.0 * rng.uniform();
      const auto h = generate_channel(m, n, seed ^ 0xFEEDULL, i);
      const double sigma2 = noise_variance(part.total_budget(), snr);
      const auto model = SystemModelXd::white(h, sigma2);

      const auto it = solve_iterative(model, part);
      const auto ni = solve_noniterative(model, part);
      const auto oracle = solve_barrier(model, part);
      for (const auto* q : {&it.q, &ni.q, &oracle.report.q}) {
        const Verification v = verify_solution(*q, part);
        if (v.accepted) {
          feas.add(v.max_group_violation);
        } else {
          feas.fail();
        }
      }

      const auto repaired = repair_feasibility(it.q, part);
      idem.add((repaired.matrix() - it.q.matrix()).norm() /
               std::max(1.0, it.q.matrix().norm()));

      const double c = 0.1 + 9.9 * rng.uniform();
      const auto scaled_model = SystemModelXd::white(h, c * sigma2);
      const auto scaled_part = part.with_budgets(c * part.budgets());
      scale.add(std::max(
          std::abs(solve_iterative(scaled_model, scaled_part).capacity_nats -
                   it.capacity_nats),
          std::abs(solve_noniterative(scaled_model, scaled_part).capacity_nats -
                   ni.capacity_nats)));

      const double ref = oracle.report.capacity_nats;
      gap.add(ref > 0 ? (ref - it.capacity_nats) / ref : 0.0);
    }
    out.push_back(feas.done());
    out.push_back(idem.done());
    out.push_back(scale.done());
    out.push_back(gap.done());
  }
  return out;
}

std::string format_check(const CheckResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %-34s worst=%.3e threshold=%.1e (%d/%d over)",
                r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst,
                r.threshold, r.failures, r.total);
  return buf;
}

}  // namespace mwf
