#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mwf/errors.hpp"
#include "mwf/hermitian.hpp"
#include "mwf/system_model.hpp"
#include "mwf/tolerances.hpp"

namespace mwf {

/// Leading K eigenpairs of D^{-1/2} S D^{-1/2}.
template <typename Real>
struct WhitenedEvd {
  ComplexMatrix<Real> u1m;        // N x K
  RealVector<Real> lambda_tilde;  // K, decreasing
  Eigen::Index active = 0;        // number of entries strictly above one
};

template <typename Real>
struct KktResiduals {
  Real stationarity = 0;
  Real complementarity_q = 0;
  RealVector<Real> complementarity_power;
  Real feasibility = 0;
  Real psd_violation = 0;

  Real max_complementarity_power() const {
    return complementarity_power.size() == 0
               ? Real(0)
               : complementarity_power.maxCoeff();
  }
};

template <typename Real>
struct SolveReport {
  std::string solver;
  HermitianMatrix<Real> q;
  std::optional<DualDiagonal<Real>> dual;
  Real capacity_nats = 0;
  int iterations = 0;
  std::vector<Real> capacity_trace;
  KktResiduals<Real> kkt;
  RealVector<Real> group_power_slack;  // budget minus group power
  std::vector<std::size_t> degenerate_groups;
  Eigen::Index active_modes = 0;  // eigenmodes used by the non-iterative form
};

// ---------------------------------------------------------------------------
// Scalar baselines and objective evaluation

/// Sum-power water-filling over parallel channels with the given gains.
template <typename Real>
RealVector<Real> classical_waterfilling(const RealVector<Real>& gains,
                                        Real power) {
  if (power < Real(0)) {
    throw Error(ErrorCode::InvalidOptions, "power must be non-negative");
  }
  for (Eigen::Index i = 0; i < gains.size(); ++i) {
    if (!(gains(i) > Real(0))) {
      throw Error(ErrorCode::InvalidOptions, "gains must be positive");
    }
  }
  RealVector<Real> q = RealVector<Real>::Zero(gains.size());
  if (power == Real(0) || gains.size() == 0) return q;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(gains.size()));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return gains(a) > gains(b);
                   });
  // Largest active set whose weakest member still sits below the water level.
  Real inv_sum = 0;
  Real level = 0;
  std::size_t active = 0;
  for (std::size_t t = 0; t < order.size(); ++t) {
    const Real floor = Real(1) / gains(order[t]);
    const Real candidate =
        (power + inv_sum + floor) / static_cast<Real>(t + 1);
    if (candidate <= floor) break;
    inv_sum += floor;
    level = candidate;
    active = t + 1;
  }
  for (std::size_t t = 0; t < active; ++t) {
    q(order[t]) = std::max(Real(0), level - Real(1) / gains(order[t]));
  }
  return q;
}

/// log det(I + H Q H^H R_n^{-1}) in nats.
template <typename Real>
Real capacity(const HermitianMatrix<Real>& q, const SystemModel<Real>& model) {
  if (q.dim() != model.tx()) {
    throw Error(ErrorCode::DimensionMismatch,
                "covariance size does not match the channel");
  }
  Eigen::LLT<ComplexMatrix<Real>> llt(model.noise().matrix());
  const ComplexMatrix<Real> w = llt.matrixL().solve(model.channel());
  const Eigen::Index m = model.rx();
  const auto a = HermitianMatrix<Real>::symmetrized(
      ComplexMatrix<Real>::Identity(m, m) + w * q.matrix() * w.adjoint());
  return logdet_psd(a);
}

/// Linear MMSE receiver G = Q H^H (H Q H^H + R_n)^{-1}, N x M.
template <typename Real>
ComplexMatrix<Real> mmse_receiver(const HermitianMatrix<Real>& q,
                                  const SystemModel<Real>& model) {
  const ComplexMatrix<Real>& h = model.channel();
  const ComplexMatrix<Real> a =
      h * q.matrix() * h.adjoint() + model.noise().matrix();
  Eigen::LLT<ComplexMatrix<Real>> llt(0.5 * (a + a.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularNoise,
                "received covariance is not invertible");
  }
  // A is Hermitian, so Q H^H A^{-1} = (A^{-1} H Q)^H.
  return llt.solve(h * q.matrix()).adjoint();
}

// ---------------------------------------------------------------------------
// Dual-parametrized closed forms

template <typename Real>
Eigen::Index count_active(const RealVector<Real>& lambda_tilde) {
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < lambda_tilde.size(); ++i) {
    if (lambda_tilde(i) > Real(1)) ++t;
  }
  return t;
}

template <typename Real>
WhitenedEvd<Real> whitened_evd(const DualDiagonal<Real>& dual,
                               const EffectiveBasis<Real>& basis) {
  if (dual.size() != basis.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "dual diagonal does not match the basis dimension");
  }
  // B B^H with B = D^{-1/2} U1 Lambda^{1/2} is the whitened Gram matrix.
  const ComplexMatrix<Real> b =
      dual.inv_sqrt().template cast<Complex<Real>>().asDiagonal() * basis.u1 *
      basis.lambda.cwiseSqrt().template cast<Complex<Real>>().asDiagonal();
  const auto evd =
      hermitian_evd(HermitianMatrix<Real>::symmetrized(b * b.adjoint()));
  WhitenedEvd<Real> out;
  out.u1m = evd.vectors.leftCols(basis.rank);
  out.lambda_tilde = evd.values.head(basis.rank).cwiseMax(Real(0));
  out.active = count_active(out.lambda_tilde);
  return out;
}

namespace detail {

template <typename Real>
ComplexMatrix<Real> scale_rows_cols(const RealVector<Real>& s,
                                    const ComplexMatrix<Real>& m) {
  const auto diag = s.template cast<Complex<Real>>().asDiagonal();
  return diag * m * diag;
}

// U diag(w) U^H for the first `cols` columns of U.
template <typename Real>
ComplexMatrix<Real> weighted_outer(const ComplexMatrix<Real>& u,
                                   const RealVector<Real>& w,
                                   Eigen::Index cols) {
  const auto head = u.leftCols(cols);
  return head * w.head(cols).template cast<Complex<Real>>().asDiagonal() *
         head.adjoint();
}

template <typename Real>
void zero_groups(ComplexMatrix<Real>& q, const PowerPartition<Real>& partition,
                 const std::vector<std::size_t>& groups) {
  for (const std::size_t k : groups) {
    for (const Eigen::Index j : partition.group(k)) {
      q.row(j).setZero();
      q.col(j).setZero();
    }
  }
}

}  // namespace detail

/// Optimal covariance for a given dual diagonal:
/// Q = D^{-1/2} U (I - Lambda~^{-1})^+ U^H D^{-1/2}.
template <typename Real>
HermitianMatrix<Real> q_from_dual(const DualDiagonal<Real>& dual,
                                  const EffectiveBasis<Real>& basis) {
  const auto w = whitened_evd(dual, basis);
  RealVector<Real> gain(w.lambda_tilde.size());
  for (Eigen::Index i = 0; i < gain.size(); ++i) {
    gain(i) = w.lambda_tilde(i) > Real(1)
                  ? Real(1) - Real(1) / w.lambda_tilde(i)
                  : Real(0);
  }
  return HermitianMatrix<Real>::symmetrized(detail::scale_rows_cols(
      dual.inv_sqrt(), detail::weighted_outer(w.u1m, gain, gain.size())));
}

/// PSD projection followed by per-group rescaling onto the budgets. Groups
/// that carry no power after projection are left as they are.
template <typename Real>
HermitianMatrix<Real> repair_feasibility(
    const HermitianMatrix<Real>& q, const PowerPartition<Real>& partition) {
  const auto projected = psd_project(q);
  const RealVector<Real> g = group_powers(projected, partition);
  RealVector<Real> scale = RealVector<Real>::Ones(partition.n_antennas());
  for (std::size_t k = 0; k < partition.n_groups(); ++k) {
    const Real gk = g(static_cast<Eigen::Index>(k));
    // Below this the group's power is rounding noise from the projection.
    if (gk <= std::numeric_limits<Real>::epsilon() * partition.budget(k)) {
      continue;
    }
    const Real s = std::sqrt(partition.budget(k) / gk);
    for (const Eigen::Index j : partition.group(k)) scale(j) = s;
  }
  return HermitianMatrix<Real>::symmetrized(
      detail::scale_rows_cols(scale, projected.matrix()));
}

// ---------------------------------------------------------------------------
// KKT certificate and identity checks

template <typename Real>
KktResiduals<Real> kkt_residuals(const HermitianMatrix<Real>& q,
                                 const DualDiagonal<Real>& dual,
                                 const SystemModel<Real>& model,
                                 const PowerPartition<Real>& partition) {
  const auto s = gram_matrix(model);
  const Eigen::Index n = s.dim();
  if (q.dim() != n || dual.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "KKT inputs disagree in size");
  }
  const ComplexMatrix<Real> ident = ComplexMatrix<Real>::Identity(n, n);
  const ComplexMatrix<Real> grad =
      (ident + s.matrix() * q.matrix()).partialPivLu().solve(s.matrix());
  const ComplexMatrix<Real> psi =
      ComplexMatrix<Real>(
          dual.values().template cast<Complex<Real>>().asDiagonal()) -
      grad;

  KktResiduals<Real> out;
  const Real asym = Real(0.5) * (psi - psi.adjoint()).norm();
  const auto psi_evd = hermitian_evd(HermitianMatrix<Real>::symmetrized(psi));
  const Real neg = neg_part(psi_evd.values).norm();
  out.stationarity = std::hypot(asym, neg);
  out.complementarity_q = std::abs((q.matrix() * psi).trace());

  const RealVector<Real> g = group_powers(q, partition);
  const RealVector<Real> d = dual.per_group(partition);
  out.complementarity_power.resize(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const Real pk = partition.budget(static_cast<std::size_t>(k));
    out.complementarity_power(k) = std::abs(d(k) * (pk - g(k)));
    out.feasibility = std::max(out.feasibility, (g(k) - pk) / pk);
  }
  out.psd_violation = std::max(Real(0), -min_eigenvalue(q));
  return out;
}

/// |Tr[(M + Phi) Phi]| with M = I - D^{1/2} (S + alpha I)^{-1} D^{1/2} and
/// Phi the negative part of M; vanishes up to rounding for every D and alpha.
template <typename Real>
Real conclusion1_residual(const DualDiagonal<Real>& dual,
                          const SystemModel<Real>& model, Real alpha) {
  if (!(alpha > Real(0))) {
    throw Error(ErrorCode::InvalidOptions, "alpha must be positive");
  }
  const auto s = gram_matrix(model);
  const Eigen::Index n = s.dim();
  const ComplexMatrix<Real> ident = ComplexMatrix<Real>::Identity(n, n);
  const ComplexMatrix<Real> regularized_inv =
      (s.matrix() + Complex<Real>(alpha) * ident).llt().solve(ident);
  const auto m = HermitianMatrix<Real>::symmetrized(
      ident - detail::scale_rows_cols(dual.sqrt(), regularized_inv));
  const auto evd = hermitian_evd(m);
  const ComplexMatrix<Real> phi =
      detail::weighted_outer(evd.vectors, neg_part(evd.values), n);
  return std::abs(((m.matrix() + phi) * phi).trace());
}

/// ||U1^H D^{-1/2} U_M Lambda~^{-1} U_M^H D^{-1/2} U1 - Lambda^{-1}||_F.
template <typename Real>
Real appendix_b_residual(const DualDiagonal<Real>& dual,
                         const EffectiveBasis<Real>& basis) {
  const auto w = whitened_evd(dual, basis);
  const ComplexMatrix<Real> bottom = detail::scale_rows_cols(
      dual.inv_sqrt(),
      detail::weighted_outer(w.u1m, RealVector<Real>(w.lambda_tilde.cwiseInverse()), basis.rank));
  const ComplexMatrix<Real> projected =
      basis.u1.adjoint() * bottom * basis.u1;
  const ComplexMatrix<Real> expected =
      basis.lambda.cwiseInverse().template cast<Complex<Real>>().asDiagonal();
  return (projected - expected).norm();
}

// ---------------------------------------------------------------------------
// Solvers

namespace detail {

template <typename Real>
SolveReport<Real> finish_report(std::string name, HermitianMatrix<Real> q,
                                std::optional<DualDiagonal<Real>> dual,
                                const SystemModel<Real>& model,
                                const PowerPartition<Real>& partition) {
  SolveReport<Real> r;
  r.solver = std::move(name);
  r.capacity_nats = capacity(q, model);
  r.group_power_slack = partition.budgets() - group_powers(q, partition);
  if (dual) r.kkt = kkt_residuals(q, *dual, model, partition);
  r.q = std::move(q);
  r.dual = std::move(dual);
  return r;
}

}  // namespace detail

/// Closed form for a full-rank Gram matrix: Q = D^{-1} - S^{-1}, each group
/// spending exactly its budget.
template <typename Real>
SolveReport<Real> solve_full_rank(const SystemModel<Real>& model,
                                  const PowerPartition<Real>& partition) {
  const auto s = gram_matrix(model);
  const auto basis = effective_basis(s);
  if (basis.rank < s.dim()) {
    throw Error(ErrorCode::NotFullRank,
                "Gram matrix has rank " + std::to_string(basis.rank) +
                    " < " + std::to_string(s.dim()));
  }
  const ComplexMatrix<Real> s_inv = detail::weighted_outer(
      basis.u1, RealVector<Real>(basis.lambda.cwiseInverse()), basis.rank);
  RealVector<Real> per_group(static_cast<Eigen::Index>(partition.n_groups()));
  for (std::size_t k = 0; k < partition.n_groups(); ++k) {
    Real floor = 0;
    for (const Eigen::Index j : partition.group(k)) {
      floor += std::real(s_inv(j, j));
    }
    per_group(static_cast<Eigen::Index>(k)) =
        static_cast<Real>(partition.group(k).size()) /
        (partition.budget(k) + floor);
  }
  auto dual = build_dual_diag(partition, per_group);
  const ComplexMatrix<Real> d_inv =
      dual.values().cwiseInverse().template cast<Complex<Real>>().asDiagonal();
  auto q = HermitianMatrix<Real>::symmetrized(d_inv - s_inv);
  const auto evd_values = hermitian_evd(q).values;
  if (evd_values(evd_values.size() - 1) <
      -Real(Tolerances::psd_clamp) * detail::max_abs(evd_values)) {
    throw Error(ErrorCode::NotPSDRegime,
                "closed form is indefinite at this SNR");
  }
  return detail::finish_report<Real>("full_rank", std::move(q),
                                     std::move(dual), model, partition);
}

/// Dual diagonal and degenerate groups of one multiplier update.
template <typename Real>
struct DualUpdate {
  DualDiagonal<Real> dual;
  std::vector<std::size_t> degenerate;
};

namespace detail {

// d_k = sum_{j in group} [U U^H]_jj / (p_k + sum_{j in group} [F]_jj), where
// `level` and `floor` hold the two diagonals. Degenerate groups keep
// `fallback`.
template <typename Real>
DualUpdate<Real> group_ratio(const RealVector<Real>& level,
                             const RealVector<Real>& floor,
                             const PowerPartition<Real>& partition,
                             const RealVector<Real>& fallback) {
  RealVector<Real> per_group(static_cast<Eigen::Index>(partition.n_groups()));
  DualUpdate<Real> out;
  for (std::size_t k = 0; k < partition.n_groups(); ++k) {
    Real num = 0;
    Real den = partition.budget(k);
    for (const Eigen::Index j : partition.group(k)) {
      num += level(j);
      den += floor(j);
    }
    const auto kk = static_cast<Eigen::Index>(k);
    if (num < Real(Tolerances::degenerate_group)) {
      out.degenerate.push_back(k);
      per_group(kk) = fallback(kk);
    } else {
      per_group(kk) = num / den;
    }
  }
  out.dual = build_dual_diag(partition, per_group);
  return out;
}

template <typename Real>
RealVector<Real> row_energy(const ComplexMatrix<Real>& u, Eigen::Index cols,
                            const RealVector<Real>& weights) {
  RealVector<Real> out = RealVector<Real>::Zero(u.rows());
  for (Eigen::Index i = 0; i < cols; ++i) {
    out += weights(i) * u.col(i).cwiseAbs2();
  }
  return out;
}

}  // namespace detail

/// Multiplier update over the `active` leading whitened modes.
template <typename Real>
DualUpdate<Real> update_dual(const DualDiagonal<Real>& previous,
                             const WhitenedEvd<Real>& w,
                             const PowerPartition<Real>& partition) {
  const Eigen::Index t = w.active;
  const RealVector<Real> ones = RealVector<Real>::Ones(w.lambda_tilde.size());
  const RealVector<Real> level = detail::row_energy(w.u1m, t, ones);
  const RealVector<Real> floor =
      detail::row_energy(w.u1m, t,
                         RealVector<Real>(w.lambda_tilde.cwiseInverse()))
          .cwiseQuotient(previous.values());
  return detail::group_ratio(level, floor, partition,
                             previous.per_group(partition));
}

/// High-SNR multipliers computed from the leading `modes` eigenpairs of S.
template <typename Real>
DualUpdate<Real> noniterative_dual(const EffectiveBasis<Real>& basis,
                                   const PowerPartition<Real>& partition,
                                   Eigen::Index modes) {
  const RealVector<Real> ones = RealVector<Real>::Ones(modes);
  const RealVector<Real> level = detail::row_energy(basis.u1, modes, ones);
  const RealVector<Real> floor = detail::row_energy(
      basis.u1, modes, RealVector<Real>(basis.lambda.cwiseInverse()));
  RealVector<Real> fallback(static_cast<Eigen::Index>(partition.n_groups()));
  for (std::size_t k = 0; k < partition.n_groups(); ++k) {
    fallback(static_cast<Eigen::Index>(k)) = Real(1) / partition.budget(k);
  }
  return detail::group_ratio(level, floor, partition, fallback);
}

template <typename Real>
DualUpdate<Real> noniterative_dual(const EffectiveBasis<Real>& basis,
                                   const PowerPartition<Real>& partition) {
  return noniterative_dual(basis, partition, basis.rank);
}

/// Matrix water-filling on the leading `modes` eigenpairs of S:
/// repair([D^{-1/2} U U^H D^{-1/2} - U Lambda^{-1} U^H]^+) with the high-SNR
/// multipliers of the same modes.
template <typename Real>
SolveReport<Real> matrix_waterfilling(const SystemModel<Real>& model,
                                      const PowerPartition<Real>& partition,
                                      const EffectiveBasis<Real>& basis,
                                      Eigen::Index modes) {
  auto upd = noniterative_dual(basis, partition, modes);
  const RealVector<Real> ones = RealVector<Real>::Ones(modes);
  const ComplexMatrix<Real> level = detail::scale_rows_cols(
      upd.dual.inv_sqrt(), detail::weighted_outer(basis.u1, ones, modes));
  const ComplexMatrix<Real> bottom = detail::weighted_outer(
      basis.u1, RealVector<Real>(basis.lambda.cwiseInverse()), modes);
  ComplexMatrix<Real> raw = level - bottom;
  detail::zero_groups(raw, partition, upd.degenerate);
  auto q = repair_feasibility(HermitianMatrix<Real>::symmetrized(raw),
                              partition);
  auto report = detail::finish_report<Real>("noniterative", std::move(q),
                                            upd.dual, model, partition);
  report.degenerate_groups = std::move(upd.degenerate);
  report.active_modes = modes;
  return report;
}

/// Non-iterative solution. The high-SNR multipliers assume every eigenmode
/// of S carries power; at low SNR the weak modes fall below the water level,
/// so the closed form is evaluated on each leading truncation K, K-1, ..., 1
/// and the best repaired candidate is kept. The K-mode candidate is the
/// plain matrix water-filling; with a single group the best candidate is the
/// classical water-filling solution.
template <typename Real>
SolveReport<Real> solve_noniterative(const SystemModel<Real>& model,
                                     const PowerPartition<Real>& partition) {
  const auto basis = effective_basis(gram_matrix(model));
  auto best = matrix_waterfilling(model, partition, basis, basis.rank);
  for (Eigen::Index modes = basis.rank - 1; modes >= 1; --modes) {
    auto candidate = matrix_waterfilling(model, partition, basis, modes);
    if (candidate.capacity_nats > best.capacity_nats) {
      best = std::move(candidate);
    }
  }
  return best;
}

enum class DualInit { NonIterative, Identity, Explicit };

template <typename Real>
struct IterativeOptions {
  int max_iter = 100;
  Real tol = Real(1e-8);  // relative capacity change that ends the loop
  DualInit init = DualInit::NonIterative;
  std::optional<DualDiagonal<Real>> d0;  // used with DualInit::Explicit
};

/// Fixed-point iteration on the dual diagonal. Each step whitens S with the
/// previous multipliers, updates them, and rebuilds Q with the water bottom
/// frozen at the previous step; every iterate is repaired to be feasible.
template <typename Real>
SolveReport<Real> solve_iterative(const SystemModel<Real>& model,
                                  const PowerPartition<Real>& partition,
                                  const IterativeOptions<Real>& opts = {}) {
  if (opts.max_iter < 0 || !(opts.tol >= Real(0))) {
    throw Error(ErrorCode::InvalidOptions, "bad iteration limits");
  }
  const auto basis = effective_basis(gram_matrix(model));

  DualDiagonal<Real> prev;
  HermitianMatrix<Real> q;
  std::vector<std::size_t> degenerate;
  switch (opts.init) {
    case DualInit::NonIterative: {
      const auto start = solve_noniterative(model, partition);
      prev = *start.dual;
      q = start.q;
      degenerate = start.degenerate_groups;
      break;
    }
    case DualInit::Identity:
      prev = DualDiagonal<Real>::uniform(partition.n_antennas(), Real(1));
      q = repair_feasibility(q_from_dual(prev, basis), partition);
      break;
    case DualInit::Explicit:
      if (!opts.d0 || opts.d0->size() != partition.n_antennas()) {
        throw Error(ErrorCode::InvalidOptions,
                    "explicit initialization needs an N-entry D0");
      }
      prev = *opts.d0;
      q = repair_feasibility(q_from_dual(prev, basis), partition);
      break;
  }

  std::vector<Real> trace{capacity(q, model)};
  int iterations = 0;
  for (int n = 1; n <= opts.max_iter; ++n) {
    auto w = whitened_evd(prev, basis);
    // Keep at least the strongest mode so the update stays defined.
    w.active = std::max<Eigen::Index>(w.active, 1);
    auto upd = update_dual(prev, w, partition);

    const RealVector<Real> ones = RealVector<Real>::Ones(w.active);
    const ComplexMatrix<Real> level = detail::scale_rows_cols(
        upd.dual.inv_sqrt(), detail::weighted_outer(w.u1m, ones, w.active));
    const ComplexMatrix<Real> bottom = detail::scale_rows_cols(
        prev.inv_sqrt(),
        detail::weighted_outer(
            w.u1m, RealVector<Real>(w.lambda_tilde.cwiseInverse()), w.active));
    ComplexMatrix<Real> raw = level - bottom;
    detail::zero_groups(raw, partition, upd.degenerate);
    q = repair_feasibility(HermitianMatrix<Real>::symmetrized(raw), partition);

    const Real c = capacity(q, model);
    const Real last = trace.back();
    trace.push_back(c);
    iterations = n;
    prev = upd.dual;
    degenerate = std::move(upd.degenerate);
    if (std::abs(c - last) <= opts.tol * std::max(std::abs(c), Real(1e-300))) {
      break;
    }
  }

  auto report = detail::finish_report<Real>("iterative", std::move(q), prev,
                                            model, partition);
  report.iterations = iterations;
  report.capacity_trace = std::move(trace);
  report.degenerate_groups = std::move(degenerate);
  return report;
}

/// Sum-power water-filling on the eigenmodes of S. Only defined for a single
/// group covering every antenna.
template <typename Real>
SolveReport<Real> solve_classical_wf(const SystemModel<Real>& model,
                                     const PowerPartition<Real>& partition) {
  if (partition.n_groups() != 1) {
    throw Error(ErrorCode::InvalidOptions,
                "classical water-filling needs a single sum-power group");
  }
  const auto basis = effective_basis(gram_matrix(model));
  const RealVector<Real> powers =
      classical_waterfilling(basis.lambda, partition.budget(0));
  auto q = HermitianMatrix<Real>::symmetrized(
      detail::weighted_outer(basis.u1, powers, basis.rank));
  return detail::finish_report<Real>("classical_wf", std::move(q),
                                     std::nullopt, model, partition);
}

using SolveReportXd = SolveReport<double>;

}  // namespace mwf
