#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "mwf/hermitian.hpp"
#include "mwf/system_model.hpp"

namespace mwf::io {

using nlohmann::json;

// Complex matrices are nested row arrays of [re, im] pairs. A bare number is
// accepted as a real entry.
ComplexMatrixXd matrix_from_json(const json& j);
json matrix_to_json(const ComplexMatrixXd& m);

// Groups are arrays of 1-based antenna indices on the wire.
std::vector<std::vector<Eigen::Index>> groups_from_json(const json& j);
json groups_to_json(const std::vector<std::vector<Eigen::Index>>& groups);

VectorXr vector_from_json(const json& j);

/// Single problem instance: channel, noise, partition.
struct Problem {
  SystemModelXd model;
  PowerPartitionXd partition;
};

/// Reads {"H", "noise" | "sigma2", "groups", "budgets"}. Missing groups mean
/// one group per antenna; missing noise means sigma2 = 1.
Problem problem_from_json(const json& j);

json read_json_file(const std::string& path);

}  // namespace mwf::io
