#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

#include "mwf/hermitian.hpp"

namespace testing {

using mwf::ComplexMatrixXd;
using mwf::HermitianMatrixXd;
using mwf::VectorXr;

/// Small generator kit for property tests; seeded per test.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  Eigen::Index integer(Eigen::Index lo, Eigen::Index hi) {
    return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng_);
  }
  double normal() { return std::normal_distribution<double>()(rng_); }

  ComplexMatrixXd complex_matrix(Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        m(i, j) = {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)};
      }
    }
    return m;
  }

  /// Rank r product of Gaussian factors.
  ComplexMatrixXd low_rank(Eigen::Index rows, Eigen::Index cols,
                           Eigen::Index r) {
    return complex_matrix(rows, r) * complex_matrix(r, cols);
  }

  HermitianMatrixXd hermitian(Eigen::Index n) {
    const ComplexMatrixXd a = complex_matrix(n, n);
    return HermitianMatrixXd::symmetrized(a + a.adjoint());
  }

  HermitianMatrixXd psd(Eigen::Index n, Eigen::Index rank) {
    const ComplexMatrixXd a = complex_matrix(n, rank);
    return HermitianMatrixXd::symmetrized(a * a.adjoint());
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(const ComplexMatrixXd& a, const ComplexMatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testing
