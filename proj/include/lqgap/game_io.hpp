#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqgap/csv.hpp"
#include "lqgap/errors.hpp"
#include "lqgap/feedback.hpp"
#include "lqgap/game.hpp"
#include "lqgap/open_loop.hpp"

namespace lqgap {

// On-disk game format (JSON, schema version 1):
//   { "version": 1, "horizon": T,
//     "agents": [ {"A": [[...]], "B": [[...]]}, ... ],
//     "Q": [ [[...]], ... ], "R": [ [[...]], ... ],
//     "label": "optional",
//     "cost_symmetry": "auxiliary"    // optional; absent means standard
//   }
// Matrices are row-major 2D arrays; numbers are IEEE-754 doubles emitted at
// full round-trip precision, so save-then-load is bit-exact.

namespace detail {

inline nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& M) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty 2D array");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd M;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.empty())
      throw ParseError(where + ": row " + std::to_string(r) + " is not a non-empty array");
    if (r == 0) {
      cols = row.size();
      M.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      throw ParseError(where + ": ragged rows (row " + std::to_string(r) + " has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(cols) + ")");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw ParseError(where + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                         ") is not a number");
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return M;
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                           const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + ": missing field \"" + std::string(key) + "\"");
  return *it;
}

}  // namespace detail

inline LQGame load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(path + ": top level is not an object");

  const auto& version = detail::require_field(j, "version", path);
  if (!version.is_number_integer() || version.get<int>() != 1)
    throw ParseError(path + ": unsupported schema version " + version.dump() +
                     " (expected 1)");

  LQGame game;
  const auto& horizon = detail::require_field(j, "horizon", path);
  if (!horizon.is_number_integer() || horizon.get<long long>() < 1)
    throw ParseError(path + ": field \"horizon\" must be a positive integer");
  game.horizon = horizon.get<int>();

  const auto& agents = detail::require_field(j, "agents", path);
  if (!agents.is_array() || agents.empty())
    throw ParseError(path + ": field \"agents\" must be a non-empty array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string where = path + ": agents[" + std::to_string(i) + "]";
    if (!agents[i].is_object()) throw ParseError(where + " is not an object");
    AgentSpec a;
    a.A = detail::matrix_from_json(detail::require_field(agents[i], "A", where), where + ".A");
    a.B = detail::matrix_from_json(detail::require_field(agents[i], "B", where), where + ".B");
    game.agents.push_back(std::move(a));
  }

  const auto& Q = detail::require_field(j, "Q", path);
  if (!Q.is_array() || Q.size() != agents.size())
    throw ParseError(path + ": field \"Q\" must be an array of " +
                     std::to_string(agents.size()) + " matrices");
  for (std::size_t i = 0; i < Q.size(); ++i)
    game.Q.push_back(detail::matrix_from_json(Q[i], path + ": Q[" + std::to_string(i) + "]"));

  const auto& R = detail::require_field(j, "R", path);
  if (!R.is_array() || R.size() != agents.size())
    throw ParseError(path + ": field \"R\" must be an array of " +
                     std::to_string(agents.size()) + " matrices");
  for (std::size_t i = 0; i < R.size(); ++i)
    game.R.push_back(detail::matrix_from_json(R[i], path + ": R[" + std::to_string(i) + "]"));

  if (const auto it = j.find("label"); it != j.end()) {
    if (!it->is_string()) throw ParseError(path + ": field \"label\" must be a string");
    game.label = it->get<std::string>();
  }
  if (const auto it = j.find("cost_symmetry"); it != j.end()) {
    const std::string v = it->is_string() ? it->get<std::string>() : it->dump();
    if (v == "auxiliary")
      game.cost_symmetry = CostSymmetry::kAuxiliary;
    else if (v == "standard")
      game.cost_symmetry = CostSymmetry::kStandard;
    else
      throw ParseError(path + ": field \"cost_symmetry\" must be \"standard\" or \"auxiliary\"");
  }
  return game;
}

inline void save_game(const LQGame& game, const std::string& path) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["horizon"] = game.horizon;
  j["agents"] = nlohmann::ordered_json::array();
  for (const auto& a : game.agents) {
    nlohmann::ordered_json agent;
    agent["A"] = detail::matrix_to_json(a.A);
    agent["B"] = detail::matrix_to_json(a.B);
    j["agents"].push_back(std::move(agent));
  }
  j["Q"] = nlohmann::ordered_json::array();
  for (const auto& Qi : game.Q) j["Q"].push_back(detail::matrix_to_json(Qi));
  j["R"] = nlohmann::ordered_json::array();
  for (const auto& Ri : game.R) j["R"].push_back(detail::matrix_to_json(Ri));
  if (!game.label.empty()) j["label"] = game.label;
  if (game.cost_symmetry == CostSymmetry::kAuxiliary) j["cost_symmetry"] = "auxiliary";
  write_file_atomic(path, j.dump(2) + "\n");
}

// Per-stage solution exports, arrays keyed by the 1-based stage index.
inline nlohmann::ordered_json feedback_solution_json(const FeedbackSolution& sol) {
  nlohmann::ordered_json j;
  const int T = static_cast<int>(sol.K.size());
  for (int k = 0; k < T; ++k) j["K"][std::to_string(k + 1)] = detail::matrix_to_json(sol.K[k]);
  for (int k = 0; k < T; ++k) j["F"][std::to_string(k + 1)] = detail::matrix_to_json(sol.F[k]);
  for (int k = 0; k <= T; ++k) {
    nlohmann::ordered_json per_agent = nlohmann::ordered_json::array();
    for (const auto& Zi : sol.Z[k]) per_agent.push_back(detail::matrix_to_json(Zi));
    j["Z"][std::to_string(k + 1)] = std::move(per_agent);
  }
  return j;
}

inline void save_feedback_solution(const FeedbackSolution& sol, const std::string& path) {
  write_file_atomic(path, feedback_solution_json(sol).dump(2) + "\n");
}

inline nlohmann::ordered_json openloop_solution_json(const OpenLoopSolution& sol) {
  nlohmann::ordered_json j;
  const int T = static_cast<int>(sol.L.size());
  for (int k = 0; k < T; ++k) j["L"][std::to_string(k + 1)] = detail::matrix_to_json(sol.L[k]);
  for (int k = 0; k < T; ++k)
    j["Lambda"][std::to_string(k + 1)] = detail::matrix_to_json(sol.Lambda[k]);
  for (int k = 0; k <= T; ++k) {
    nlohmann::ordered_json per_agent = nlohmann::ordered_json::array();
    for (const auto& Mi : sol.M[k]) per_agent.push_back(detail::matrix_to_json(Mi));
    j["M"][std::to_string(k + 1)] = std::move(per_agent);
  }
  return j;
}

inline void save_openloop_solution(const OpenLoopSolution& sol, const std::string& path) {
  write_file_atomic(path, openloop_solution_json(sol).dump(2) + "\n");
}

}  // namespace lqgap
