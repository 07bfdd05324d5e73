#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mwf/random.hpp"
#include "mwf/solvers.hpp"

namespace mwf {

/// Random instance for identity checks: channel of random shape, possibly
/// rank-deficient, white noise at an SNR in [-10, 30] dB, and a dual diagonal
/// with entries log-uniform in [e^-3, e^3].
struct IdentityInstance {
  SystemModelXd model;
  DualDiagonalXd dual;
  double alpha = 1;  // log-uniform in [1e-6, 1]
  bool rank_deficient = false;
};

IdentityInstance random_identity_instance(std::uint64_t seed,
                                          std::uint64_t index,
                                          Eigen::Index max_dim = 8);

/// |Tr[(M + Phi) Phi]| / max(1, ||M||_F ||Phi||_F): the identity residual
/// measured against the size of the terms it cancels.
double conclusion1_normalized(const DualDiagonalXd& dual,
                              const SystemModelXd& model, double alpha);

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0;
  double threshold = 0;
  int failures = 0;
  int total = 0;
};

/// Identity and property suites behind the `check` command.
std::vector<CheckResult> run_checks(std::uint64_t seed, int trials);

std::string format_check(const CheckResult& r);

}  // namespace mwf
