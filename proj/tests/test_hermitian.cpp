#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mwf/hermitian.hpp"
#include "support.hpp"

using namespace mwf;
using testing::Gen;
using C = std::complex<double>;

namespace {

ComplexMatrixXd mat2(C a, C b, C c, C d) {
  ComplexMatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

HermitianMatrixXd diag(std::initializer_list<double> values) {
  VectorXr d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double v : values) d(i++) = v;
  return HermitianMatrixXd::diagonal(d);
}

}  // namespace

TEST_CASE("construction symmetrizes and rejects non-Hermitian input") {
  const auto h = HermitianMatrixXd(mat2(1, C(2, 1e-14), C(2, 0), 3));
  CHECK(h(0, 1) == std::conj(h(1, 0)));
  CHECK_THROWS_AS(HermitianMatrixXd(mat2(1, 2, 3, 4)), Error);
  ComplexMatrixXd bad = ComplexMatrixXd::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(HermitianMatrixXd{bad}, Error);
  CHECK_THROWS_AS(HermitianMatrixXd(ComplexMatrixXd(2, 3)), Error);
}

TEST_CASE("hermitian_evd examples") {
  SUBCASE("diag(1,3)") {
    const auto e = hermitian_evd(diag({1, 3}));
    CHECK(e.values(0) == doctest::Approx(3));
    CHECK(e.values(1) == doctest::Approx(1));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1));
    CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1));
  }
  SUBCASE("identity") {
    const auto e = hermitian_evd(HermitianMatrixXd::identity(2));
    CHECK(e.values(0) == doctest::Approx(1));
    CHECK(e.values(1) == doctest::Approx(1));
    CHECK(testing::rel_diff(e.reconstruct(), ComplexMatrixXd::Identity(2, 2)) <
          1e-12);
  }
  SUBCASE("Pauli-y") {
    const auto e =
        hermitian_evd(HermitianMatrixXd(mat2(0, C(0, -1), C(0, 1), 0)));
    CHECK(e.values(0) == doctest::Approx(1));
    CHECK(e.values(1) == doctest::Approx(-1));
  }
}

TEST_CASE("hermitian_evd is deterministic with repeated eigenvalues") {
  Gen g(11);
  const ComplexMatrixXd u =
      g.complex_matrix(4, 4).householderQr().householderQ();
  VectorXr lam(4);
  lam << 2, 2, 1, 1;
  const auto a = HermitianMatrixXd::symmetrized(
      u * lam.cast<C>().asDiagonal() * u.adjoint());
  const auto e1 = hermitian_evd(a);
  const auto e2 = hermitian_evd(a);
  CHECK(e1.vectors == e2.vectors);
  CHECK(e1.values == e2.values);
  for (Eigen::Index j = 0; j < 4; ++j) {
    Eigen::Index first = 0;
    while (std::abs(e1.vectors(first, j)) < 1e-8) ++first;
    CHECK(std::abs(e1.vectors(first, j).imag()) < 1e-12);
    CHECK(e1.vectors(first, j).real() > 0);
  }
}

TEST_CASE("psd_project examples") {
  CHECK(testing::rel_diff(psd_project(diag({2, -1})).matrix(),
                          diag({2, 0}).matrix()) < 1e-12);
  const auto half = psd_project(HermitianMatrixXd(mat2(0, 1, 1, 0)));
  CHECK(testing::rel_diff(half.matrix(), mat2(0.5, 0.5, 0.5, 0.5)) < 1e-12);
  Gen g(3);
  const auto p = g.psd(5, 3);
  CHECK(testing::rel_diff(psd_project(p).matrix(), p.matrix()) < 1e-12);
}

TEST_CASE("neg_part examples") {
  VectorXr a(2);
  a << 1, -2;
  CHECK(neg_part(a)(0) == 0);
  CHECK(neg_part(a)(1) == 2);
  CHECK(VectorXr(neg_part(VectorXr::Zero(2))).isZero());
  VectorXr b(1);
  b << -3;
  CHECK(neg_part(b)(0) == 3);
}

TEST_CASE("hermitian_sqrt examples") {
  CHECK(testing::rel_diff(hermitian_sqrt(diag({4, 9})).matrix(),
                          diag({2, 3}).matrix()) < 1e-12);
  CHECK(testing::rel_diff(hermitian_sqrt(HermitianMatrixXd::identity(3)).matrix(),
                          ComplexMatrixXd::Identity(3, 3)) < 1e-12);
  CHECK(testing::rel_diff(hermitian_sqrt(diag({4, 0})).matrix(),
                          diag({2, 0}).matrix()) < 1e-12);
  try {
    (void)hermitian_sqrt(diag({1, -0.5}));
    FAIL("expected NotPSD");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPSD);
  }
  // Rounding-level negatives are clamped.
  CHECK_NOTHROW((void)hermitian_sqrt(diag({1, -1e-13})));
}

TEST_CASE("logdet_psd examples") {
  const double e = std::numbers::e;
  CHECK(logdet_psd(HermitianMatrixXd::identity(3)) == doctest::Approx(0));
  CHECK(logdet_psd(diag({e, e * e})) == doctest::Approx(3));
  CHECK(logdet_psd(diag({2, 3})) == doctest::Approx(std::log(6.0)));
  try {
    (void)logdet_psd(diag({1, 0}));
    FAIL("expected NotPD");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotPD);
  }
}

TEST_CASE("property: evd reconstruction, unitarity, ordering and trace") {
  Gen g(20240501);
  double worst_rec = 0;
  double worst_unit = 0;
  double worst_trace = 0;
  double worst_proj = 0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = t < 20 ? 80 - t : g.integer(1, 24);
    const auto a = g.hermitian(n);
    const auto e = hermitian_evd(a);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      REQUIRE(e.values(i) >= e.values(i + 1));
    }
    worst_rec = std::max(worst_rec, (e.reconstruct() - a.matrix()).norm() /
                                        a.matrix().norm());
    worst_unit = std::max(
        worst_unit,
        (e.vectors.adjoint() * e.vectors - ComplexMatrixXd::Identity(n, n))
            .norm());
    worst_trace =
        std::max(worst_trace, std::abs(e.values.sum() - a.trace()) /
                                  std::max(1.0, e.values.cwiseAbs().sum()));
    // psd_project(A) = A + U neg(L) U^H
    const ComplexMatrixXd alt =
        a.matrix() + e.vectors * VectorXr(neg_part(e.values)).cast<C>().asDiagonal() *
                         e.vectors.adjoint();
    worst_proj = std::max(
        worst_proj, testing::rel_diff(psd_project(a).matrix(), alt));
  }
  CHECK(worst_rec < 1e-10);
  CHECK(worst_unit < 1e-10);
  CHECK(worst_trace < 1e-10);
  CHECK(worst_proj < 1e-10);
}

TEST_CASE("property: psd_project commutes with unitary conjugation") {
  Gen g(77);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = g.integer(1, 10);
    const auto a = g.hermitian(n);
    const ComplexMatrixXd u =
        g.complex_matrix(n, n).householderQr().householderQ();
    const auto rotated =
        HermitianMatrixXd::symmetrized(u * a.matrix() * u.adjoint());
    const ComplexMatrixXd lhs = psd_project(rotated).matrix();
    const ComplexMatrixXd rhs = u * psd_project(a).matrix() * u.adjoint();
    CHECK(testing::rel_diff(lhs, rhs) < 1e-10);
    CHECK(min_eigenvalue(psd_project(a)) >= -1e-10 * a.matrix().norm());
  }
}

TEST_CASE("property: hermitian_sqrt squares back") {
  Gen g(5);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = g.integer(1, 30);
    const auto a = g.psd(n, g.integer(1, n));
    const ComplexMatrixXd r = hermitian_sqrt(a).matrix();
    CHECK((r * r - a.matrix()).norm() / a.matrix().norm() < 1e-9);
    CHECK((r - r.adjoint()).norm() == 0.0);
  }
}
