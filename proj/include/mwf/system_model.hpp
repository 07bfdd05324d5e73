#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mwf/errors.hpp"
#include "mwf/hermitian.hpp"
#include "mwf/tolerances.hpp"

namespace mwf {

/// Point-to-point link y = H x + n with noise covariance R_n.
template <typename Real>
class SystemModel {
 public:
  SystemModel(ComplexMatrix<Real> channel, HermitianMatrix<Real> noise)
      : h_(std::move(channel)), rn_(std::move(noise)) {
    if (h_.rows() < 1 || h_.cols() < 1) {
      throw Error(ErrorCode::DimensionMismatch, "channel must be non-empty");
    }
    if (rn_.dim() != h_.rows()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "noise covariance must be M x M for an M x N channel");
    }
    if (!all_finite(h_)) {
      throw Error(ErrorCode::NonFinite, "channel has non-finite entries");
    }
    if (h_.cwiseAbs().maxCoeff() == Real(0)) {
      throw Error(ErrorCode::ZeroChannel, "channel is identically zero");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es(
        rn_.matrix(), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (ev(0) <= Real(Tolerances::psd_clamp) * ev(ev.size() - 1)) {
      throw Error(ErrorCode::SingularNoise,
                  "noise covariance is not positive definite");
    }
  }

  /// R_n = sigma2 * I.
  static SystemModel white(ComplexMatrix<Real> channel, Real sigma2) {
    const Eigen::Index m = channel.rows();
    ComplexMatrix<Real> rn =
        ComplexMatrix<Real>::Identity(m, m) * Complex<Real>(sigma2);
    return SystemModel(std::move(channel),
                       HermitianMatrix<Real>::symmetrized(rn));
  }

  const ComplexMatrix<Real>& channel() const { return h_; }
  const HermitianMatrix<Real>& noise() const { return rn_; }
  Eigen::Index rx() const { return h_.rows(); }
  Eigen::Index tx() const { return h_.cols(); }

 private:
  ComplexMatrix<Real> h_;
  HermitianMatrix<Real> rn_;
};

/// Antenna groups (0-based, disjoint, covering 0..N-1) with their sum-power
/// budgets. Only obtainable through validate_partition.
template <typename Real>
class PowerPartition {
 public:
  using Group = std::vector<Eigen::Index>;

  Eigen::Index n_antennas() const { return n_; }
  std::size_t n_groups() const { return groups_.size(); }
  const std::vector<Group>& groups() const { return groups_; }
  const Group& group(std::size_t k) const { return groups_[k]; }
  const RealVector<Real>& budgets() const { return budgets_; }
  Real budget(std::size_t k) const {
    return budgets_(static_cast<Eigen::Index>(k));
  }
  Real total_budget() const { return budgets_.sum(); }
  std::size_t group_of(Eigen::Index antenna) const {
    return owner_[static_cast<std::size_t>(antenna)];
  }

  /// Same groups, new budgets (must stay positive).
  PowerPartition with_budgets(const RealVector<Real>& budgets) const;

 private:
  template <typename R>
  friend PowerPartition<R> validate_partition(
      Eigen::Index n, std::vector<std::vector<Eigen::Index>> groups,
      const RealVector<R>& budgets);

  Eigen::Index n_ = 0;
  std::vector<Group> groups_;
  RealVector<Real> budgets_;
  std::vector<std::size_t> owner_;
};

template <typename Real>
PowerPartition<Real> validate_partition(
    Eigen::Index n, std::vector<std::vector<Eigen::Index>> groups,
    const RealVector<Real>& budgets) {
  if (n < 1) {
    throw Error(ErrorCode::DimensionMismatch, "need at least one antenna");
  }
  if (static_cast<Eigen::Index>(groups.size()) != budgets.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "one budget is required per group");
  }
  constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(static_cast<std::size_t>(n), unassigned);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].empty()) {
      throw Error(ErrorCode::EmptyGroup, "group " + std::to_string(k) +
                                             " has no antennas");
    }
    for (const Eigen::Index j : groups[k]) {
      if (j < 0 || j >= n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "antenna index " + std::to_string(j) + " out of range");
      }
      auto& slot = owner[static_cast<std::size_t>(j)];
      if (slot != unassigned) {
        throw Error(ErrorCode::OverlappingGroups,
                    "antenna " + std::to_string(j) +
                        " belongs to more than one group");
      }
      slot = k;
    }
  }
  for (std::size_t j = 0; j < owner.size(); ++j) {
    if (owner[j] == unassigned) {
      throw Error(ErrorCode::IncompleteCover,
                  "antenna " + std::to_string(j) + " is in no group");
    }
  }
  for (Eigen::Index k = 0; k < budgets.size(); ++k) {
    if (!(budgets(k) > Real(0)) || !std::isfinite(budgets(k))) {
      throw Error(ErrorCode::NonPositiveBudget,
                  "budget of group " + std::to_string(k) + " must be > 0");
    }
  }
  PowerPartition<Real> out;
  out.n_ = n;
  out.groups_ = std::move(groups);
  out.budgets_ = budgets;
  out.owner_ = std::move(owner);
  return out;
}

template <typename Real>
PowerPartition<Real> PowerPartition<Real>::with_budgets(
    const RealVector<Real>& budgets) const {
  return validate_partition<Real>(n_, groups_, budgets);
}

/// One group holding every antenna.
template <typename Real>
PowerPartition<Real> sum_power_partition(Eigen::Index n, Real budget) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) all[static_cast<std::size_t>(j)] = j;
  RealVector<Real> b(1);
  b << budget;
  return validate_partition<Real>(n, {all}, b);
}

/// One group per antenna.
template <typename Real>
PowerPartition<Real> per_antenna_partition(const RealVector<Real>& budgets) {
  std::vector<std::vector<Eigen::Index>> groups;
  for (Eigen::Index j = 0; j < budgets.size(); ++j) groups.push_back({j});
  return validate_partition<Real>(budgets.size(), std::move(groups), budgets);
}

/// Noise-whitened Gram matrix S = H^H R_n^{-1} H.
template <typename Real>
HermitianMatrix<Real> gram_matrix(const SystemModel<Real>& model) {
  Eigen::LLT<ComplexMatrix<Real>> llt(model.noise().matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularNoise, "noise covariance is not invertible");
  }
  const ComplexMatrix<Real> whitened = llt.matrixL().solve(model.channel());
  return HermitianMatrix<Real>::symmetrized(whitened.adjoint() * whitened);
}

/// The K eigenpairs of S above the rank cut-off.
template <typename Real>
struct EffectiveBasis {
  Eigen::Index rank = 0;
  ComplexMatrix<Real> u1;   // N x K
  RealVector<Real> lambda;  // K, positive, decreasing

  Eigen::Index dim() const { return u1.rows(); }
};

template <typename Real>
EffectiveBasis<Real> effective_basis(const HermitianMatrix<Real>& s,
                                     Real rank_tol = Real(Tolerances::rank)) {
  const auto evd = hermitian_evd(s);
  const Real top = evd.values(0);
  if (!(top > Real(0))) {
    throw Error(ErrorCode::ZeroChannel, "Gram matrix has no positive mode");
  }
  Eigen::Index k = 0;
  while (k < evd.values.size() && evd.values(k) > rank_tol * top) ++k;
  EffectiveBasis<Real> out;
  out.rank = k;
  out.u1 = evd.vectors.leftCols(k);
  out.lambda = evd.values.head(k);
  return out;
}

/// Diagonal of Lagrange multipliers, constant within each antenna group.
template <typename Real>
class DualDiagonal {
 public:
  DualDiagonal() = default;

  /// Checks positivity only; group structure is checked by the partition-aware
  /// factory build_dual_diag.
  explicit DualDiagonal(RealVector<Real> d) : d_(std::move(d)) {
    for (Eigen::Index j = 0; j < d_.size(); ++j) {
      if (!(d_(j) > Real(0)) || !std::isfinite(d_(j))) {
        throw Error(ErrorCode::NonPositiveMultiplier,
                    "dual diagonal entries must be finite and > 0");
      }
    }
  }

  static DualDiagonal uniform(Eigen::Index n, Real value) {
    return DualDiagonal(RealVector<Real>::Constant(n, value));
  }

  const RealVector<Real>& values() const { return d_; }
  Real operator()(Eigen::Index j) const { return d_(j); }
  Eigen::Index size() const { return d_.size(); }

  RealVector<Real> inv_sqrt() const { return d_.cwiseSqrt().cwiseInverse(); }
  RealVector<Real> sqrt() const { return d_.cwiseSqrt(); }

  /// Reads back one value per group.
  RealVector<Real> per_group(const PowerPartition<Real>& partition) const {
    RealVector<Real> out(static_cast<Eigen::Index>(partition.n_groups()));
    for (std::size_t k = 0; k < partition.n_groups(); ++k) {
      out(static_cast<Eigen::Index>(k)) = d_(partition.group(k).front());
    }
    return out;
  }

 private:
  RealVector<Real> d_;
};

template <typename Real>
DualDiagonal<Real> build_dual_diag(const PowerPartition<Real>& partition,
                                   const RealVector<Real>& per_group) {
  if (per_group.size() != static_cast<Eigen::Index>(partition.n_groups())) {
    throw Error(ErrorCode::DimensionMismatch,
                "one multiplier is required per group");
  }
  RealVector<Real> d(partition.n_antennas());
  for (std::size_t k = 0; k < partition.n_groups(); ++k) {
    const Real value = per_group(static_cast<Eigen::Index>(k));
    if (!(value > Real(0)) || !std::isfinite(value)) {
      throw Error(ErrorCode::NonPositiveMultiplier,
                  "multiplier of group " + std::to_string(k) + " must be > 0");
    }
    for (const Eigen::Index j : partition.group(k)) d(j) = value;
  }
  return DualDiagonal<Real>(std::move(d));
}

/// Sum of Re(Q_jj) over each group.
template <typename Real>
RealVector<Real> group_powers(const HermitianMatrix<Real>& q,
                              const PowerPartition<Real>& partition) {
  if (q.dim() != partition.n_antennas()) {
    throw Error(ErrorCode::DimensionMismatch,
                "covariance size does not match the partition");
  }
  RealVector<Real> out =
      RealVector<Real>::Zero(static_cast<Eigen::Index>(partition.n_groups()));
  for (std::size_t k = 0; k < partition.n_groups(); ++k) {
    for (const Eigen::Index j : partition.group(k)) {
      out(static_cast<Eigen::Index>(k)) += std::real(q(j, j));
    }
  }
  return out;
}

using SystemModelXd = SystemModel<double>;
using PowerPartitionXd = PowerPartition<double>;
using EffectiveBasisXd = EffectiveBasis<double>;
using DualDiagonalXd = DualDiagonal<double>;

}  // namespace mwf
