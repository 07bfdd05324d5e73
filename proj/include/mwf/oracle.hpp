#pragma once

// Reference solvers used to check the closed forms. Nothing here calls into
// solvers.hpp except the KKT certificate attached to the final report.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mwf/errors.hpp"
#include "mwf/hermitian.hpp"
#include "mwf/solvers.hpp"
#include "mwf/system_model.hpp"

namespace mwf {

template <typename Real>
struct BarrierOptions {
  Real t0 = 1;
  Real t_mult = 8;
  Real inner_tol = Real(1e-12);  // on half the squared Newton decrement
  Real outer_tol = Real(1e-7);  // on the duality-gap bound m / t
  int max_outer = 20;
  int max_inner = 500;
  Real ridge = Real(1e-12);  // eps in logdet(Q + eps I)
  // Above this many antennas the dense Newton system gets too large.
  Eigen::Index max_antennas = 32;
};

template <typename Real>
struct OracleReport {
  SolveReport<Real> report;
  bool converged = true;
  int newton_steps = 0;
  Real final_t = 0;
  Real min_slack = 0;  // smallest barrier argument seen over all iterates
  std::vector<Real> outer_capacity;
};

namespace oracle_detail {

// Real coordinates of an N x N Hermitian matrix in an orthonormal basis of
// the trace inner product: diagonal entries, then for each i < j the
// symmetric and antisymmetric parts scaled by sqrt(2).
template <typename Real>
class HermitianCoords {
 public:
  explicit HermitianCoords(Eigen::Index n) : n_(n) {
    for (Eigen::Index i = 0; i < n; ++i) pairs_.push_back({i, i, Kind::Diag});
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        pairs_.push_back({i, j, Kind::Sym});
        pairs_.push_back({i, j, Kind::Antisym});
      }
    }
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(pairs_.size()); }

  RealVector<Real> coords(const ComplexMatrix<Real>& y) const {
    RealVector<Real> out(size());
    const Real r2 = std::sqrt(Real(2));
    for (Eigen::Index a = 0; a < size(); ++a) {
      const auto& p = pairs_[static_cast<std::size_t>(a)];
      switch (p.kind) {
        case Kind::Diag: out(a) = std::real(y(p.i, p.i)); break;
        // Re tr(Y (e_i e_j^T + e_j e_i^T)) / sqrt(2)
        case Kind::Sym:
          out(a) = (std::real(y(p.j, p.i)) + std::real(y(p.i, p.j))) / r2;
          break;
        // Re tr(Y i (e_i e_j^T - e_j e_i^T)) / sqrt(2)
        case Kind::Antisym:
          out(a) = (std::imag(y(p.i, p.j)) - std::imag(y(p.j, p.i))) / r2;
          break;
      }
    }
    return out;
  }

  ComplexMatrix<Real> matrix(const RealVector<Real>& x) const {
    ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(n_, n_);
    const Real r2 = std::sqrt(Real(2));
    const Complex<Real> im(0, 1);
    for (Eigen::Index a = 0; a < size(); ++a) {
      const auto& p = pairs_[static_cast<std::size_t>(a)];
      switch (p.kind) {
        case Kind::Diag: m(p.i, p.i) += x(a); break;
        case Kind::Sym:
          m(p.i, p.j) += x(a) / r2;
          m(p.j, p.i) += x(a) / r2;
          break;
        case Kind::Antisym:
          m(p.i, p.j) += im * x(a) / r2;
          m(p.j, p.i) -= im * x(a) / r2;
          break;
      }
    }
    return m;
  }

  // A E_a A for basis element a.
  ComplexMatrix<Real> sandwich(const ComplexMatrix<Real>& a,
                               Eigen::Index idx) const {
    const auto& p = pairs_[static_cast<std::size_t>(idx)];
    const Real r2 = std::sqrt(Real(2));
    const Complex<Real> im(0, 1);
    switch (p.kind) {
      case Kind::Diag: return a.col(p.i) * a.row(p.i);
      case Kind::Sym:
        return (a.col(p.i) * a.row(p.j) + a.col(p.j) * a.row(p.i)) / r2;
      case Kind::Antisym:
        return im * (a.col(p.i) * a.row(p.j) - a.col(p.j) * a.row(p.i)) / r2;
    }
    return {};
  }

 private:
  enum class Kind { Diag, Sym, Antisym };
  struct Pair {
    Eigen::Index i;
    Eigen::Index j;
    Kind kind;
  };
  Eigen::Index n_;
  std::vector<Pair> pairs_;
};

template <typename Real>
struct Problem {
  ComplexMatrix<Real> w;  // R_n^{-1/2}-whitened channel, M x N
  const PowerPartition<Real>* partition;
  Real ridge;
  Eigen::Index n;
};

template <typename Real>
RealVector<Real> slacks(const Problem<Real>& pb, const ComplexMatrix<Real>& q) {
  RealVector<Real> s(static_cast<Eigen::Index>(pb.partition->n_groups()));
  for (std::size_t k = 0; k < pb.partition->n_groups(); ++k) {
    Real g = 0;
    for (const Eigen::Index j : pb.partition->group(k)) g += std::real(q(j, j));
    s(static_cast<Eigen::Index>(k)) = pb.partition->budget(k) - g;
  }
  return s;
}

template <typename Real>
Real logdet_chol(const Eigen::LLT<ComplexMatrix<Real>>& llt) {
  return Real(2) * llt.matrixLLT().diagonal().real().array().log().sum();
}

template <typename Real>
Real rate(const Problem<Real>& pb, const ComplexMatrix<Real>& q) {
  const Eigen::Index m = pb.w.rows();
  ComplexMatrix<Real> a = ComplexMatrix<Real>::Identity(m, m) +
                          pb.w * q * pb.w.adjoint();
  a = Real(0.5) * (a + a.adjoint());
  Eigen::LLT<ComplexMatrix<Real>> llt(a);
  if (llt.info() != Eigen::Success) {
    return -std::numeric_limits<Real>::infinity();
  }
  return logdet_chol(llt);
}

// Barrier objective; -inf outside the domain.
template <typename Real>
Real objective(const Problem<Real>& pb, const ComplexMatrix<Real>& q, Real t) {
  const RealVector<Real> s = slacks(pb, q);
  if (s.minCoeff() <= Real(0)) return -std::numeric_limits<Real>::infinity();
  ComplexMatrix<Real> shifted =
      q + Complex<Real>(pb.ridge) * ComplexMatrix<Real>::Identity(pb.n, pb.n);
  shifted = Real(0.5) * (shifted + shifted.adjoint());
  Eigen::LLT<ComplexMatrix<Real>> llt(shifted);
  if (llt.info() != Eigen::Success ||
      llt.matrixLLT().diagonal().real().minCoeff() <= Real(0)) {
    return -std::numeric_limits<Real>::infinity();
  }
  return t * rate(pb, q) + logdet_chol(llt) + s.array().log().sum();
}

}  // namespace oracle_detail

/// Log-barrier interior-point maximization of log det(I + H Q H^H R_n^{-1})
/// over {Q >= 0, group powers <= budgets}, with damped Newton centering
/// steps in real Hermitian coordinates.
template <typename Real>
OracleReport<Real> solve_barrier(const SystemModel<Real>& model,
                                 const PowerPartition<Real>& partition,
                                 const BarrierOptions<Real>& opts = {}) {
  using namespace oracle_detail;
  if (!(opts.t0 > 0) || !(opts.t_mult > 1) || !(opts.inner_tol > 0) ||
      !(opts.outer_tol > 0) || opts.max_outer < 1 || opts.max_inner < 1) {
    throw Error(ErrorCode::InvalidOptions, "invalid barrier options");
  }
  const Eigen::Index n = model.tx();
  if (partition.n_antennas() != n) {
    throw Error(ErrorCode::DimensionMismatch, "partition size != N");
  }
  if (n > opts.max_antennas) {
    throw Error(ErrorCode::TooLarge, "barrier oracle limited to " +
                                         std::to_string(opts.max_antennas) +
                                         " antennas");
  }

  // Whitening through the Hermitian inverse square root of R_n.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> noise_es(
      model.noise().matrix());
  const ComplexMatrix<Real> rn_isqrt = noise_es.operatorInverseSqrt();
  Problem<Real> pb{rn_isqrt * model.channel(), &partition, opts.ridge, n};

  const HermitianCoords<Real> coords(n);
  const Eigen::Index dim = coords.size();
  const Real m_constraints =
      static_cast<Real>(n) + static_cast<Real>(partition.n_groups());

  ComplexMatrix<Real> q = ComplexMatrix<Real>::Zero(n, n);
  for (std::size_t k = 0; k < partition.n_groups(); ++k) {
    const Real each = Real(0.5) * partition.budget(k) /
                      static_cast<Real>(partition.group(k).size());
    for (const Eigen::Index j : partition.group(k)) q(j, j) = each;
  }

  OracleReport<Real> out;
  out.min_slack = std::numeric_limits<Real>::infinity();
  Real t = opts.t0;
  const ComplexMatrix<Real> ident_n = ComplexMatrix<Real>::Identity(n, n);
  const Eigen::Index mrx = pb.w.rows();
  const ComplexMatrix<Real> ident_m = ComplexMatrix<Real>::Identity(mrx, mrx);

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    bool stalled = false;
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      const RealVector<Real> s = slacks(pb, q);
      out.min_slack = std::min(out.min_slack, s.minCoeff());

      // Newton system in the eigenbasis V of Q + eps I, where the log-det
      // barrier Hessian is diagonal: dQ = V dX V^H.
      ComplexMatrix<Real> shifted = q + Complex<Real>(opts.ridge) * ident_n;
      shifted = Real(0.5) * (shifted + shifted.adjoint());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> qes(shifted);
      const ComplexMatrix<Real>& v = qes.eigenvectors();
      const RealVector<Real> mu = qes.eigenvalues();
      if (mu.minCoeff() <= Real(0)) {
        stalled = true;
        break;
      }
      ComplexMatrix<Real> rx = ident_m + pb.w * q * pb.w.adjoint();
      rx = Real(0.5) * (rx + rx.adjoint());
      const ComplexMatrix<Real> wv = pb.w * v;
      ComplexMatrix<Real> a = wv.adjoint() * rx.llt().solve(wv);
      a = Real(0.5) * (a + a.adjoint());
      const ComplexMatrix<Real> b =
          mu.cwiseInverse().template cast<Complex<Real>>().asDiagonal();

      // Gradient of the group barrier is -sum_k E_k / s_k; in the rotated
      // frame each indicator becomes V^H E_k V.
      std::vector<RealVector<Real>> group_dirs;
      ComplexMatrix<Real> grad = Complex<Real>(t) * a + b;
      for (std::size_t k = 0; k < partition.n_groups(); ++k) {
        ComplexMatrix<Real> ek = ComplexMatrix<Real>::Zero(n, n);
        for (const Eigen::Index j : partition.group(k)) {
          ek += v.row(j).adjoint() * v.row(j);
        }
        grad -= ek / s(static_cast<Eigen::Index>(k));
        group_dirs.push_back(coords.coords(ek));
      }
      const RealVector<Real> g = coords.coords(grad);

      // Negated Hessian, positive definite on the domain.
      Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> hess(dim, dim);
      for (Eigen::Index col = 0; col < dim; ++col) {
        const ComplexMatrix<Real> y =
            Complex<Real>(t) * coords.sandwich(a, col) +
            coords.sandwich(b, col);
        hess.col(col) = coords.coords(y);
      }
      for (std::size_t k = 0; k < partition.n_groups(); ++k) {
        const Real sk = s(static_cast<Eigen::Index>(k));
        hess.noalias() +=
            group_dirs[k] * group_dirs[k].transpose() / (sk * sk);
      }
      hess = Real(0.5) * (hess + hess.transpose()).eval();
      const RealVector<Real> jacobi = hess.diagonal().cwiseSqrt().cwiseInverse();
      const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> scaled =
          jacobi.asDiagonal() * hess * jacobi.asDiagonal();
      Eigen::LDLT<Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>> ldlt(
          scaled);
      const RealVector<Real> step =
          jacobi.cwiseProduct(ldlt.solve(jacobi.cwiseProduct(g)));
      const Real decrement2 = g.dot(step);
      if (!(decrement2 >= 0) || !std::isfinite(decrement2)) {
        stalled = true;
        break;
      }
      if (Real(0.5) * decrement2 <= opts.inner_tol) break;

      const ComplexMatrix<Real> dq = v * coords.matrix(step) * v.adjoint();
      bool accepted = false;
      if (decrement2 < Real(0.0625)) {
        // Quadratic phase: the full step stays inside the Dikin ellipsoid and
        // increases the objective, so only the domain is checked. Comparing
        // objective values here would be lost in rounding once t is large.
        const ComplexMatrix<Real> trial = q + dq;
        accepted = std::isfinite(objective(pb, trial, t));
        if (accepted) q = trial;
      } else {
        const Real f0 = objective(pb, q, t);
        Real alpha = 1;
        for (int ls = 0; ls < 60; ++ls) {
          const ComplexMatrix<Real> trial = q + Complex<Real>(alpha) * dq;
          const Real f1 = objective(pb, trial, t);
          if (std::isfinite(f1) &&
              f1 >= f0 + Real(0.25) * alpha * decrement2) {
            q = trial;
            accepted = true;
            break;
          }
          alpha *= Real(0.5);
        }
      }
      ++out.newton_steps;
      if (!accepted) {
        stalled = true;
        break;
      }
    }
    out.outer_capacity.push_back(rate(pb, q));
    out.final_t = t;
    if (stalled) {
      // Rounding floor reached; accept if the gap bound already holds.
      out.converged = m_constraints / t < Real(10) * opts.outer_tol;
      break;
    }
    if (m_constraints / t < opts.outer_tol) break;
    t *= opts.t_mult;
  }
  if (m_constraints / out.final_t >= Real(10) * opts.outer_tol) {
    out.converged = false;
  }

  const RealVector<Real> s = slacks(pb, q);
  RealVector<Real> per_group(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    per_group(k) = Real(1) / (out.final_t * s(k));
  }
  auto dual = build_dual_diag(partition, per_group);
  auto herm = HermitianMatrix<Real>::symmetrized(q);

  SolveReport<Real> r;
  r.solver = "oracle";
  r.capacity_nats = rate(pb, herm.matrix());
  r.iterations = out.newton_steps;
  r.capacity_trace = out.outer_capacity;
  r.group_power_slack = s;
  r.kkt = kkt_residuals(herm, dual, model, partition);
  r.q = std::move(herm);
  r.dual = std::move(dual);
  out.report = std::move(r);
  return out;
}

template <typename Real>
struct GridReport {
  SolveReport<Real> report;
  std::size_t feasible_points = 0;
  std::size_t rejected_points = 0;
};

/// Exhaustive search for N <= 2. Capacity is monotone in the Loewner order,
/// so the diagonal is restricted to the budget faces (q11 = p1, q22 = p2 for
/// two groups; q11 + q22 = p for one) and the grid spans q11 on that face
/// plus Re q12, Im q12 over [-sqrt(q11 q22), sqrt(q11 q22)]. Off-diagonal
/// points violating |q12|^2 <= q11 q22 are skipped.
template <typename Real>
GridReport<Real> grid_search_tiny(const SystemModel<Real>& model,
                                  const PowerPartition<Real>& partition,
                                  int resolution) {
  const Eigen::Index n = model.tx();
  if (n > 2) {
    throw Error(ErrorCode::TooLarge, "grid search supports N <= 2 only");
  }
  if (resolution < 2) {
    throw Error(ErrorCode::InvalidOptions, "resolution must be >= 2");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> noise_es(
      model.noise().matrix());
  oracle_detail::Problem<Real> pb{
      noise_es.operatorInverseSqrt() * model.channel(), &partition, Real(0),
      n};

  GridReport<Real> out;
  Real best = -std::numeric_limits<Real>::infinity();
  ComplexMatrix<Real> best_q = ComplexMatrix<Real>::Zero(n, n);
  const auto step = [&](Real lo, Real hi, int i) {
    return lo + (hi - lo) * static_cast<Real>(i) /
                    static_cast<Real>(resolution - 1);
  };
  const auto consider = [&](const ComplexMatrix<Real>& q) {
    const Real c = oracle_detail::rate(pb, q);
    ++out.feasible_points;
    if (c > best) {
      best = c;
      best_q = q;
    }
  };

  if (n == 1) {
    const Real p = partition.budget(0);
    for (int i = 0; i < resolution; ++i) {
      ComplexMatrix<Real> q(1, 1);
      q(0, 0) = step(0, p, i);
      consider(q);
    }
  } else {
    const bool shared = partition.n_groups() == 1;
    const int diag_points = shared ? resolution : 1;
    for (int d = 0; d < diag_points; ++d) {
      Real q11;
      Real q22;
      if (shared) {
        q11 = step(0, partition.budget(0), d);
        q22 = partition.budget(0) - q11;
      } else {
        q11 = partition.budget(partition.group_of(0));
        q22 = partition.budget(partition.group_of(1));
      }
      const Real radius = std::sqrt(q11 * q22);
      for (int re = 0; re < resolution; ++re) {
        for (int im = 0; im < resolution; ++im) {
          const Real x = step(-radius, radius, re);
          const Real y = step(-radius, radius, im);
          if (x * x + y * y > q11 * q22) {
            ++out.rejected_points;
            continue;
          }
          ComplexMatrix<Real> q(2, 2);
          q << Complex<Real>(q11), Complex<Real>(x, y), Complex<Real>(x, -y),
              Complex<Real>(q22);
          consider(q);
        }
      }
    }
  }

  auto herm = HermitianMatrix<Real>::symmetrized(best_q);
  SolveReport<Real> r;
  r.solver = "grid";
  r.capacity_nats = best;
  r.group_power_slack = partition.budgets() - group_powers(herm, partition);
  r.q = std::move(herm);
  out.report = std::move(r);
  return out;
}

}  // namespace mwf
