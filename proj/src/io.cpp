#include "mwf/io.hpp"

#include <fstream>

namespace mwf::io {

namespace {

Complex<double> entry_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw Error(ErrorCode::InvalidConfig,
              "matrix entries must be numbers or [re, im] pairs");
}

}  // namespace

ComplexMatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "matrix must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::InvalidConfig, "matrix rows differ in length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = entry_from_json(row[static_cast<std::size_t>(c)]);
    }
  }
  return m;
}

json matrix_to_json(const ComplexMatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(i, c).real(), m(i, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<Eigen::Index>> groups_from_json(const json& j) {
  if (!j.is_array()) {
    throw Error(ErrorCode::InvalidConfig, "groups must be an array of arrays");
  }
  std::vector<std::vector<Eigen::Index>> groups;
  for (const json& g : j) {
    if (!g.is_array()) {
      throw Error(ErrorCode::InvalidConfig, "each group must be an array");
    }
    std::vector<Eigen::Index> members;
    for (const json& idx : g) {
      if (!idx.is_number_integer()) {
        throw Error(ErrorCode::InvalidConfig, "antenna indices are integers");
      }
      members.push_back(idx.get<Eigen::Index>() - 1);
    }
    groups.push_back(std::move(members));
  }
  return groups;
}

json groups_to_json(const std::vector<std::vector<Eigen::Index>>& groups) {
  json out = json::array();
  for (const auto& g : groups) {
    json members = json::array();
    for (const Eigen::Index j : g) members.push_back(j + 1);
    out.push_back(std::move(members));
  }
  return out;
}

VectorXr vector_from_json(const json& j) {
  if (!j.is_array()) {
    throw Error(ErrorCode::InvalidConfig, "expected an array of numbers");
  }
  VectorXr v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw Error(ErrorCode::InvalidConfig, "expected an array of numbers");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Problem problem_from_json(const json& j) {
  if (!j.contains("H")) {
    throw Error(ErrorCode::InvalidConfig, "problem needs a channel \"H\"");
  }
  ComplexMatrixXd h = matrix_from_json(j.at("H"));
  const Eigen::Index n = h.cols();

  std::optional<SystemModelXd> model;
  if (j.contains("noise")) {
    model.emplace(std::move(h),
                  HermitianMatrixXd(matrix_from_json(j.at("noise"))));
  } else {
    model.emplace(
        SystemModelXd::white(std::move(h), j.value("sigma2", 1.0)));
  }

  std::vector<std::vector<Eigen::Index>> groups;
  if (j.contains("groups")) {
    groups = groups_from_json(j.at("groups"));
  } else {
    for (Eigen::Index a = 0; a < n; ++a) groups.push_back({a});
  }
  if (!j.contains("budgets")) {
    throw Error(ErrorCode::InvalidConfig, "problem needs \"budgets\"");
  }
  const VectorXr budgets = vector_from_json(j.at("budgets"));
  return Problem{*model, validate_partition<double>(n, std::move(groups),
                                                    budgets)};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
}

}  // namespace mwf::io
