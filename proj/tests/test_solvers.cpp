#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mwf/oracle.hpp"
#include "mwf/solvers.hpp"
#include "support.hpp"

using namespace mwf;
using testing::Gen;
using C = std::complex<double>;

namespace {

VectorXr vec(std::initializer_list<double> v) {
  VectorXr out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double x : v) out(i++) = x;
  return out;
}

ComplexMatrixXd cdiag(const VectorXr& v) { return v.cast<C>().asDiagonal(); }

HermitianMatrixXd hdiag(std::initializer_list<double> v) {
  return HermitianMatrixXd::diagonal(vec(v));
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidOptions;
}

/// Independent scalar water-filling by bisection on the water level.
VectorXr bisection_waterfill(const VectorXr& gains, double p) {
  double lo = 0;
  double hi = p + 1.0 / gains.minCoeff() + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mu = 0.5 * (lo + hi);
    double used = 0;
    for (Eigen::Index j = 0; j < gains.size(); ++j) {
      used += std::max(0.0, mu - 1.0 / gains(j));
    }
    (used > p ? hi : lo) = mu;
  }
  VectorXr q(gains.size());
  for (Eigen::Index j = 0; j < gains.size(); ++j) {
    q(j) = std::max(0.0, lo - 1.0 / gains(j));
  }
  return q;
}

PowerPartitionXd random_partition(Gen& g, Eigen::Index n) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), g.engine());
  const Eigen::Index k = g.integer(1, n);
  std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    groups[static_cast<std::size_t>(i < k ? i : g.integer(0, k - 1))].push_back(
        perm[static_cast<std::size_t>(i)]);
  }
  VectorXr b(k);
  for (Eigen::Index j = 0; j < k; ++j) b(j) = g.uniform(0.2, 2.0);
  return validate_partition<double>(n, std::move(groups), b);
}

}  // namespace

TEST_CASE("classical_waterfilling examples") {
  const VectorXr q = classical_waterfilling<double>(vec({1, 4}), 1.0);
  CHECK(q(0) == doctest::Approx(0.125));
  CHECK(q(1) == doctest::Approx(0.875));
  CHECK(classical_waterfilling<double>(vec({2.5}), 3.0)(0) ==
        doctest::Approx(3.0));
  CHECK(classical_waterfilling<double>(vec({1, 4}), 0.0).isZero());
  CHECK(code_of([] { classical_waterfilling<double>(vec({1, 0}), 1.0); }) ==
        ErrorCode::InvalidOptions);
}

TEST_CASE("property: classical_waterfilling matches bisection") {
  Gen g(41);
  for (int t = 0; t < 300; ++t) {
    VectorXr gains(g.integer(1, 12));
    for (Eigen::Index j = 0; j < gains.size(); ++j) {
      gains(j) = g.log_uniform(1e-3, 1e3);
    }
    const double p = g.log_uniform(1e-3, 1e2);
    const VectorXr q = classical_waterfilling(gains, p);
    CHECK((q - bisection_waterfill(gains, p)).cwiseAbs().maxCoeff() <
          1e-9 * std::max(1.0, p));
    CHECK(q.sum() == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("capacity examples") {
  const auto model = SystemModelXd::white(cdiag(vec({1, 2})), 1.0);
  CHECK(capacity(HermitianMatrixXd::zero(2), model) == 0.0);
  CHECK(capacity(hdiag({0.125, 0.875}), model) ==
        doctest::Approx(std::log(5.0625)));
  const auto scalar = SystemModelXd::white(ComplexMatrixXd::Ones(1, 1), 1.0);
  CHECK(capacity(hdiag({2.0}), scalar) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("mmse_receiver examples") {
  const auto model = SystemModelXd::white(ComplexMatrixXd::Identity(2, 2), 1.0);
  CHECK(mmse_receiver(HermitianMatrixXd::zero(2), model).isZero());
  CHECK(testing::rel_diff(mmse_receiver(HermitianMatrixXd::identity(2), model),
                          0.5 * ComplexMatrixXd::Identity(2, 2)) < 1e-14);
  ComplexMatrixXd h(1, 1);
  h << C(0.6, -0.8);
  const auto scalar = SystemModelXd::white(h, 0.5);
  const C expected = 2.0 * std::conj(h(0, 0)) / (std::norm(h(0, 0)) * 2.0 + 0.5);
  CHECK(std::abs(mmse_receiver(hdiag({2.0}), scalar)(0, 0) - expected) < 1e-14);
}

TEST_CASE("count_active examples") {
  CHECK(count_active<double>(vec({2, 0.5})) == 1);
  CHECK(count_active<double>(vec({3, 2, 1.5})) == 3);
  CHECK(count_active<double>(vec({0.9})) == 0);
  CHECK(count_active<double>(vec({1.0})) == 0);
}

TEST_CASE("whitened_evd examples") {
  const auto basis = effective_basis(hdiag({4, 1}));
  SUBCASE("D = I") {
    const auto w = whitened_evd(DualDiagonalXd::uniform(2, 1.0), basis);
    CHECK(w.lambda_tilde(0) == doctest::Approx(4));
    CHECK(w.lambda_tilde(1) == doctest::Approx(1));
    CHECK(std::abs(w.u1m(0, 0)) == doctest::Approx(1));
    CHECK(w.active == 1);
  }
  SUBCASE("D = 4I") {
    const auto w = whitened_evd(DualDiagonalXd::uniform(2, 4.0), basis);
    CHECK(w.lambda_tilde(0) == doctest::Approx(1));
    CHECK(w.lambda_tilde(1) == doctest::Approx(0.25));
  }
  SUBCASE("rank one") {
    const auto b1 = effective_basis(hdiag({4, 0}));
    const auto w = whitened_evd(DualDiagonalXd(vec({1, 9})), b1);
    REQUIRE(w.lambda_tilde.size() == 1);
    CHECK(w.lambda_tilde(0) == doctest::Approx(4));
    CHECK(std::abs(w.u1m(0, 0)) == doctest::Approx(1));
  }
}

TEST_CASE("property: whitened_evd reconstructs and is orthonormal") {
  Gen g(8);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = g.integer(1, 8);
    const Eigen::Index m = g.integer(1, 8);
    const auto model = SystemModelXd::white(g.complex_matrix(m, n), 0.3);
    const auto s = gram_matrix(model);
    const auto basis = effective_basis(s);
    VectorXr d(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = g.log_uniform(0.1, 10.0);
    const DualDiagonalXd dual(d);
    const auto w = whitened_evd(dual, basis);
    const VectorXr is = d.cwiseSqrt().cwiseInverse();
    const ComplexMatrixXd target =
        cdiag(is) * s.matrix() * cdiag(is);
    const ComplexMatrixXd rec =
        w.u1m * cdiag(w.lambda_tilde) * w.u1m.adjoint();
    CHECK((rec - target).norm() <= 1e-9 * target.norm());
    CHECK((w.u1m.adjoint() * w.u1m -
           ComplexMatrixXd::Identity(basis.rank, basis.rank))
              .norm() < 1e-10);
    for (Eigen::Index i = 0; i + 1 < w.lambda_tilde.size(); ++i) {
      CHECK(w.lambda_tilde(i) >= w.lambda_tilde(i + 1));
    }
    CHECK(w.active == count_active(w.lambda_tilde));
  }
}

TEST_CASE("q_from_dual examples") {
  const auto basis = effective_basis(hdiag({4, 1}));
  CHECK(testing::rel_diff(
            q_from_dual(DualDiagonalXd::uniform(2, 1.0), basis).matrix(),
            hdiag({0.75, 0}).matrix()) < 1e-12);
  CHECK(testing::rel_diff(
            q_from_dual(DualDiagonalXd::uniform(2, 2.0), basis).matrix(),
            hdiag({0.25, 0}).matrix()) < 1e-12);
  CHECK(q_from_dual(DualDiagonalXd::uniform(2, 5.0), basis).matrix().isZero());
}

TEST_CASE("solve_full_rank examples") {
  const auto model = SystemModelXd::white(ComplexMatrixXd::Identity(2, 2), 1.0);
  SUBCASE("per-antenna (1,2)") {
    const auto r = solve_full_rank(model, per_antenna_partition<double>(vec({1, 2})));
    CHECK(testing::rel_diff(r.q.matrix(), hdiag({1, 2}).matrix()) < 1e-12);
    REQUIRE(r.dual);
    CHECK(r.dual->values()(0) == doctest::Approx(0.5));
    CHECK(r.dual->values()(1) == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("single group 3") {
    const auto r = solve_full_rank(model, sum_power_partition<double>(2, 3.0));
    CHECK(testing::rel_diff(r.q.matrix(), hdiag({1.5, 1.5}).matrix()) < 1e-12);
  }
  SUBCASE("rank deficient") {
    const auto deficient = SystemModelXd::white(cdiag(vec({2, 0})), 1.0);
    CHECK(code_of([&] {
            solve_full_rank(deficient, sum_power_partition<double>(2, 1.0));
          }) == ErrorCode::NotFullRank);
  }
  SUBCASE("low SNR leaves the PSD regime") {
    const auto weak = SystemModelXd::white(cdiag(vec({3, 0.1})), 1.0);
    CHECK(code_of([&] {
            solve_full_rank(weak, sum_power_partition<double>(2, 1.0));
          }) == ErrorCode::NotPSDRegime);
  }
}

TEST_CASE("update_dual examples") {
  SUBCASE("identity Gram, single group") {
    const Eigen::Index n = 3;
    const double p = 2.0;
    const auto basis = effective_basis(HermitianMatrixXd::identity(n));
    const auto prev = DualDiagonalXd::uniform(n, 1.0);
    auto w = whitened_evd(prev, basis);
    w.active = n;  // every mode carries power
    const auto upd =
        update_dual(prev, w, sum_power_partition<double>(n, p));
    CHECK(upd.degenerate.empty());
    CHECK(upd.dual.values().isApproxToConstant(3.0 / (p + 3.0)));
  }
  SUBCASE("diag(4,1), one active mode") {
    const auto basis = effective_basis(hdiag({4, 1}));
    const auto prev = DualDiagonalXd::uniform(2, 1.0);
    const auto w = whitened_evd(prev, basis);
    REQUIRE(w.active == 1);
    const double p1 = 0.7;
    const auto upd =
        update_dual(prev, w, per_antenna_partition<double>(vec({p1, 1.3})));
    CHECK(upd.dual.values()(0) == doctest::Approx(1.0 / (p1 + 0.25)));
    REQUIRE(upd.degenerate.size() == 1);
    CHECK(upd.degenerate[0] == 1);
    CHECK(upd.dual.values()(1) == prev.values()(1));
  }
}

TEST_CASE("property: update_dual is constant within groups") {
  Gen g(15);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = g.integer(1, 8);
    const auto model =
        SystemModelXd::white(g.complex_matrix(g.integer(1, 8), n), 0.2);
    const auto basis = effective_basis(gram_matrix(model));
    const auto part = random_partition(g, n);
    VectorXr d(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = g.log_uniform(0.05, 2.0);
    const DualDiagonalXd prev(d);
    auto w = whitened_evd(prev, basis);
    w.active = std::max<Eigen::Index>(w.active, 1);
    const auto upd = update_dual(prev, w, part);
    for (const auto& grp : part.groups()) {
      for (const Eigen::Index j : grp) {
        CHECK(upd.dual.values()(j) == upd.dual.values()(grp.front()));
        CHECK(upd.dual.values()(j) > 0);
      }
    }
  }
}

TEST_CASE("solve_noniterative examples") {
  SUBCASE("identity Gram, single group") {
    const Eigen::Index n = 4;
    const double p = 2.0;
    const auto model =
        SystemModelXd::white(ComplexMatrixXd::Identity(n, n), 1.0);
    const auto r = solve_noniterative(model, sum_power_partition<double>(n, p));
    CHECK(testing::rel_diff(r.q.matrix(),
                            (p / n) * ComplexMatrixXd::Identity(n, n)) < 1e-12);
    const auto nd = noniterative_dual(effective_basis(gram_matrix(model)),
                                      sum_power_partition<double>(n, p));
    CHECK(nd.dual.values().isApproxToConstant(n / (p + n)));
  }
  SUBCASE("diag(1,2), P = 1") {
    const auto model = SystemModelXd::white(cdiag(vec({1, 2})), 1.0);
    const auto r = solve_noniterative(model, sum_power_partition<double>(2, 1.0));
    CHECK(testing::rel_diff(r.q.matrix(), hdiag({0.125, 0.875}).matrix()) <
          1e-12);
    CHECK(r.capacity_nats == doctest::Approx(std::log(5.0625)));
  }
  SUBCASE("uniform D gives classical water-filling") {
    Gen g(2);
    const auto model = SystemModelXd::white(g.complex_matrix(3, 5), 0.5);
    const auto basis = effective_basis(gram_matrix(model));
    const double p = 2.5;
    const VectorXr wf = classical_waterfilling(basis.lambda, p);
    const double mu = (wf.array() + basis.lambda.array().inverse())
                          .maxCoeff();  // water level of an active mode
    const auto q = q_from_dual(DualDiagonalXd::uniform(5, 1.0 / mu), basis);
    const ComplexMatrixXd expected =
        basis.u1 * cdiag(wf) * basis.u1.adjoint();
    CHECK(testing::rel_diff(q.matrix(), expected) < 1e-10);
  }
}

TEST_CASE("repair_feasibility examples") {
  const auto single = sum_power_partition<double>(2, 1.0);
  CHECK(testing::rel_diff(repair_feasibility(hdiag({2, -1}), single).matrix(),
                          hdiag({1, 0}).matrix()) < 1e-14);
  CHECK(repair_feasibility(HermitianMatrixXd::zero(2), single).matrix().isZero());
  const auto q = hdiag({0.3, 0.7});
  CHECK(testing::rel_diff(repair_feasibility(q, single).matrix(), q.matrix()) <
        1e-12);
}

TEST_CASE("kkt_residuals examples") {
  const auto model = SystemModelXd::white(ComplexMatrixXd::Identity(2, 2), 1.0);
  const auto part = per_antenna_partition<double>(vec({1, 2}));
  const auto opt = kkt_residuals(hdiag({1, 2}), DualDiagonalXd(vec({0.5, 1.0 / 3})),
                                 model, part);
  CHECK(opt.stationarity <= 1e-10);
  CHECK(opt.complementarity_q <= 1e-10);
  CHECK(opt.max_complementarity_power() <= 1e-10);
  CHECK(opt.feasibility <= 1e-10);
  CHECK(opt.psd_violation <= 1e-10);

  const auto zero = kkt_residuals(HermitianMatrixXd::zero(2),
                                  DualDiagonalXd::uniform(2, 1.0), model, part);
  CHECK(zero.complementarity_power(0) == doctest::Approx(1));
  CHECK(zero.complementarity_power(1) == doctest::Approx(2));

  const auto over = kkt_residuals(hdiag({3, 2}), DualDiagonalXd(vec({0.5, 1.0 / 3})),
                                  model, part);
  CHECK(over.feasibility > 0);
}

TEST_CASE("identity residual examples") {
  const auto model = SystemModelXd::white(ComplexMatrixXd::Identity(3, 3), 1.0);
  const auto basis = effective_basis(gram_matrix(model));
  CHECK(appendix_b_residual(DualDiagonalXd::uniform(3, 1.0), basis) < 1e-14);
  Gen g(4);
  VectorXr d(3);
  for (Eigen::Index j = 0; j < 3; ++j) d(j) = g.log_uniform(0.1, 10);
  CHECK(conclusion1_residual(DualDiagonalXd(d), model, 1e-3) <= 1e-10);
  // M negative definite: large D.
  CHECK(conclusion1_residual(DualDiagonalXd::uniform(3, 50.0), model, 1.0) <=
        1e-10);
  // S = 0 direction, D = I, alpha = 1: M = 0.
  const auto thin = SystemModelXd::white(cdiag(vec({1, 0})), 1.0);
  CHECK(conclusion1_residual(DualDiagonalXd::uniform(2, 1.0), thin, 1.0) <=
        1e-14);
}

TEST_CASE("property: appendix B identity on full and rank-deficient channels") {
  Gen g(1234);
  double worst = 0;
  for (int t = 0; t < 500; ++t) {
    const Eigen::Index m = g.integer(1, 8);
    const Eigen::Index n = g.integer(1, 8);
    const Eigen::Index r = g.integer(1, std::min(m, n));
    const auto model = SystemModelXd::white(g.low_rank(m, n, r), g.log_uniform(0.1, 10));
    VectorXr d(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = g.log_uniform(0.05, 20.0);
    worst = std::max(worst, appendix_b_residual(DualDiagonalXd(d),
                                                effective_basis(gram_matrix(model))));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("solve_iterative converges to the separable optimum on diagonal channels") {
  const auto model = SystemModelXd::white(cdiag(vec({2.0, 1.5, 1.0})), 0.5);
  const auto part = per_antenna_partition<double>(vec({1.0, 0.5, 2.0}));
  const auto full = solve_full_rank(model, part);
  const auto it = solve_iterative(model, part);
  CHECK(testing::rel_diff(it.q.matrix(), full.q.matrix()) < 1e-8);
  CHECK(it.capacity_nats == doctest::Approx(full.capacity_nats).epsilon(1e-10));
}

TEST_CASE("property: single-group problems collapse to classical water-filling") {
  Gen g(99);
  double worst = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index m = g.integer(1, 6);
    const Eigen::Index n = g.integer(1, 8);
    const double p = g.uniform(0.5, 5.0);
    const double snr_db = g.uniform(0.0, 20.0);
    const auto model = SystemModelXd::white(g.complex_matrix(m, n),
                                            p / std::pow(10.0, snr_db / 10));
    const auto part = sum_power_partition<double>(n, p);
    const auto basis = effective_basis(gram_matrix(model));
    const VectorXr wf = bisection_waterfill(basis.lambda, p);
    const double ref = (1.0 + basis.lambda.array() * wf.array()).log().sum();
    worst = std::max({worst,
                      std::abs(solve_noniterative(model, part).capacity_nats - ref),
                      std::abs(solve_iterative(model, part).capacity_nats - ref)});
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("property: solver outputs are feasible, PSD and repair-idempotent") {
  Gen g(31337);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = g.integer(1, 8);
    const auto model = SystemModelXd::white(
        g.complex_matrix(g.integer(1, 8), n), g.log_uniform(0.01, 10.0));
    const auto part = random_partition(g, n);
    for (const auto& r : {solve_iterative(model, part), solve_noniterative(model, part)}) {
      const VectorXr g_k = group_powers(r.q, part);
      for (Eigen::Index k = 0; k < g_k.size(); ++k) {
        CHECK(g_k(k) <= part.budget(static_cast<std::size_t>(k)) * (1 + 1e-8));
      }
      const double lmax = hermitian_evd(r.q).values(0);
      CHECK(min_eigenvalue(r.q) >= -1e-10 * std::max(lmax, 1e-300));
      CHECK(testing::rel_diff(repair_feasibility(r.q, part).matrix(),
                              r.q.matrix()) < 1e-12);
    }
  }
}

TEST_CASE("property: scale covariance of every solver") {
  Gen g(777);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = g.integer(1, 6);
    const ComplexMatrixXd h = g.complex_matrix(g.integer(1, 6), n);
    const double sigma2 = g.log_uniform(0.05, 5.0);
    const auto part = random_partition(g, n);
    const double c = g.log_uniform(0.1, 10.0);
    const auto a = SystemModelXd::white(h, sigma2);
    const auto b = SystemModelXd::white(h, c * sigma2);
    const auto pb = part.with_budgets(c * part.budgets());
    CHECK(std::abs(solve_iterative(a, part).capacity_nats -
                   solve_iterative(b, pb).capacity_nats) <= 1e-8);
    CHECK(std::abs(solve_noniterative(a, part).capacity_nats -
                   solve_noniterative(b, pb).capacity_nats) <= 1e-8);
    CHECK(std::abs(solve_barrier(a, part).report.capacity_nats -
                   solve_barrier(b, pb).report.capacity_nats) <= 1e-6);
  }
}

TEST_CASE("property: full-rank closed form agrees with q_from_dual and KKT") {
  Gen g(2718);
  int succeeded = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = g.integer(1, 5);
    const auto model = SystemModelXd::white(
        g.complex_matrix(n + g.integer(0, 3), n), g.log_uniform(0.001, 0.1));
    const auto part = random_partition(g, n);
    try {
      const auto r = solve_full_rank(model, part);
      ++succeeded;
      const auto basis = effective_basis(gram_matrix(model));
      CHECK(testing::rel_diff(q_from_dual(*r.dual, basis).matrix(),
                              r.q.matrix()) <= 1e-9);
      CHECK(r.kkt.stationarity <= 1e-8);
      CHECK(r.kkt.complementarity_q <= 1e-8);
      CHECK(r.kkt.max_complementarity_power() <= 1e-8);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPSDRegime);
    }
  }
  CHECK(succeeded > 50);
}

TEST_CASE("iterative and non-iterative track the oracle on mixed groups") {
  Gen g(55);
  for (int t = 0; t < 20; ++t) {
    const auto part = random_partition(g, 8);
    const auto model = SystemModelXd::white(g.complex_matrix(4, 8),
                                            part.total_budget() / 10.0);
    const double ref = solve_barrier(model, part).report.capacity_nats;
    CHECK(solve_iterative(model, part).capacity_nats >= 0.995 * ref);
    CHECK(solve_noniterative(model, part).capacity_nats >= 0.98 * ref);
    CHECK(solve_iterative(model, part).capacity_nats <= ref * (1 + 1e-6));
  }
}

TEST_CASE("iterative options") {
  const auto model = SystemModelXd::white(cdiag(vec({2, 1})), 1.0);
  const auto part = per_antenna_partition<double>(vec({1, 1}));
  IterativeOptions<double> bad;
  bad.max_iter = -1;
  CHECK(code_of([&] { solve_iterative(model, part, bad); }) ==
        ErrorCode::InvalidOptions);
  IterativeOptions<double> explicit_init;
  explicit_init.init = DualInit::Explicit;
  CHECK(code_of([&] { solve_iterative(model, part, explicit_init); }) ==
        ErrorCode::InvalidOptions);
  explicit_init.d0 = DualDiagonalXd::uniform(2, 0.5);
  CHECK_NOTHROW(solve_iterative(model, part, explicit_init));
  IterativeOptions<double> identity;
  identity.init = DualInit::Identity;
  const auto r = solve_iterative(model, part, identity);
  CHECK(r.capacity_trace.size() == static_cast<std::size_t>(r.iterations) + 1);
  IterativeOptions<double> none;
  none.max_iter = 0;
  CHECK(solve_iterative(model, part, none).iterations == 0);
}
