#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lqgap/errors.hpp"
#include "lqgap/linalg.hpp"

namespace lqgap {

// Numerical tolerances used by validation and the solvers. Eigen-solves on
// matrices this small (n <= ~16) are accurate to near machine epsilon, so the
// slack can sit close to it.
inline constexpr double kSymmetryTol = 1e-10;   // max |Q - Q^T| entry
inline constexpr double kPsdSlack = -1e-10;     // min eigenvalue floor for PSD
inline constexpr double kPdFloor = 1e-12;       // min eigenvalue floor for PD
inline constexpr double kSingularityLimit = 1e12;  // stage-matrix condition cap

// Per-agent dynamics x^i_{t+1} = A^i x^i_t + B^i u^i_t.
struct AgentSpec {
  Eigen::MatrixXd A;  // n_i x n_i
  Eigen::MatrixXd B;  // n_i x m_i

  int state_dim() const { return static_cast<int>(A.rows()); }
  int control_dim() const { return static_cast<int>(B.cols()); }
};

// Whether the state-cost matrices are required to be symmetric PSD (the
// standard game class) or are allowed to be asymmetric (auxiliary games,
// which keep only one row block of each Q^i).
enum class CostSymmetry { kStandard, kAuxiliary };

// An N-agent finite-horizon linear-quadratic game. Dynamics are decoupled
// per agent; coupling enters through the state costs Q^i, which act on the
// stacked state of all agents. Agent i pays
//   sum_{t=1..T} u^i_t' R^i u^i_t + x_{t+1}' Q^i x_{t+1}
// (the initial state incurs no cost).
struct LQGame {
  std::vector<AgentSpec> agents;
  int horizon = 0;                 // T
  std::vector<Eigen::MatrixXd> Q;  // N matrices, each n x n (n = sum n_i)
  std::vector<Eigen::MatrixXd> R;  // N matrices, each m_i x m_i
  CostSymmetry cost_symmetry = CostSymmetry::kStandard;
  std::string label;

  int num_agents() const { return static_cast<int>(agents.size()); }

  int state_dim() const {
    int n = 0;
    for (const auto& a : agents) n += a.state_dim();
    return n;
  }

  int control_dim() const {
    int m = 0;
    for (const auto& a : agents) m += a.control_dim();
    return m;
  }

  int state_offset(int i) const {
    int off = 0;
    for (int j = 0; j < i; ++j) off += agents[j].state_dim();
    return off;
  }

  int control_offset(int i) const {
    int off = 0;
    for (int j = 0; j < i; ++j) off += agents[j].control_dim();
    return off;
  }

  // Agent i's row block of a stacked gain-like matrix (m x n -> m_i x n).
  Eigen::MatrixXd control_rows(const Eigen::MatrixXd& M, int i) const {
    return M.middleRows(control_offset(i), agents[i].control_dim());
  }

  // Agent i's row block of a stacked state-indexed matrix (n x * -> n_i x *).
  Eigen::MatrixXd state_rows(const Eigen::MatrixXd& M, int i) const {
    return M.middleRows(state_offset(i), agents[i].state_dim());
  }
};

// Concatenated joint system: A = blkdiag(A^1..A^N), B = blkdiag(B^1..B^N),
// and B_hat[i] = the columns of B belonging to agent i (zero outside agent
// i's row block).
struct StackedSystem {
  Eigen::MatrixXd A;                   // n x n
  Eigen::MatrixXd B;                   // n x m
  std::vector<Eigen::MatrixXd> B_hat;  // N matrices, n x m_i
};

inline StackedSystem assemble_stacked(const LQGame& game) {
  const int N = game.num_agents();
  for (int i = 0; i < N; ++i) {
    const auto& a = game.agents[i];
    if (a.A.rows() == 0 || a.A.rows() != a.A.cols())
      throw ValidationError("agent " + std::to_string(i) + ": A must be square, got " +
                            std::to_string(a.A.rows()) + "x" + std::to_string(a.A.cols()));
    if (a.B.rows() != a.A.rows() || a.B.cols() < 1)
      throw ValidationError("agent " + std::to_string(i) + ": B is " +
                            std::to_string(a.B.rows()) + "x" + std::to_string(a.B.cols()) +
                            " but A is " + std::to_string(a.A.rows()) + "x" +
                            std::to_string(a.A.cols()));
  }

  const int n = game.state_dim();
  const int m = game.control_dim();
  StackedSystem sys;
  sys.A = Eigen::MatrixXd::Zero(n, n);
  sys.B = Eigen::MatrixXd::Zero(n, m);
  sys.B_hat.reserve(N);
  for (int i = 0; i < N; ++i) {
    const auto& a = game.agents[i];
    const int no = game.state_offset(i);
    const int mo = game.control_offset(i);
    sys.A.block(no, no, a.state_dim(), a.state_dim()) = a.A;
    sys.B.block(no, mo, a.state_dim(), a.control_dim()) = a.B;
    Eigen::MatrixXd bh = Eigen::MatrixXd::Zero(n, a.control_dim());
    bh.middleRows(no, a.state_dim()) = a.B;
    sys.B_hat.push_back(std::move(bh));
  }
  return sys;
}

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Static part of the well-posedness assumptions: shapes, symmetry, Q^i PSD
// (standard games only), R^i symmetric PD. Invertibility of the per-stage
// matrices is a property of the recursion and is checked at solve time.
inline ValidationReport validate(const LQGame& game) {
  ValidationReport rep;
  auto flag = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  const int N = game.num_agents();
  if (N < 1) {
    flag("game has no agents");
    return rep;
  }
  if (game.horizon < 1) flag("horizon must be >= 1, got " + std::to_string(game.horizon));

  bool dims_ok = true;
  for (int i = 0; i < N; ++i) {
    const auto& a = game.agents[i];
    if (a.A.rows() == 0 || a.A.rows() != a.A.cols()) {
      flag("agent " + std::to_string(i) + ": A must be square, got " +
           std::to_string(a.A.rows()) + "x" + std::to_string(a.A.cols()));
      dims_ok = false;
    }
    if (a.B.rows() != a.A.rows() || a.B.cols() < 1) {
      flag("agent " + std::to_string(i) + ": B is " + std::to_string(a.B.rows()) + "x" +
           std::to_string(a.B.cols()) + ", expected " + std::to_string(a.A.rows()) +
           " rows and at least one column");
      dims_ok = false;
    }
  }
  if (static_cast<int>(game.Q.size()) != N)
    flag("expected " + std::to_string(N) + " Q matrices, got " + std::to_string(game.Q.size()));
  if (static_cast<int>(game.R.size()) != N)
    flag("expected " + std::to_string(N) + " R matrices, got " + std::to_string(game.R.size()));
  if (!dims_ok || static_cast<int>(game.Q.size()) != N || static_cast<int>(game.R.size()) != N)
    return rep;

  const int n = game.state_dim();
  for (int i = 0; i < N; ++i) {
    const auto& Qi = game.Q[i];
    if (Qi.rows() != n || Qi.cols() != n) {
      flag("Q[" + std::to_string(i) + "] is " + std::to_string(Qi.rows()) + "x" +
           std::to_string(Qi.cols()) + ", expected " + std::to_string(n) + "x" +
           std::to_string(n));
      continue;
    }
    if (game.cost_symmetry == CostSymmetry::kStandard) {
      const double asym = (Qi - Qi.transpose()).cwiseAbs().maxCoeff();
      if (asym > kSymmetryTol)
        flag("Q[" + std::to_string(i) + "] asymmetric: max |Q - Q^T| = " + std::to_string(asym));
      if (min_symmetric_eigenvalue(Qi) < kPsdSlack)
        flag("Q[" + std::to_string(i) + "] not positive semi-definite (min eigenvalue " +
             std::to_string(min_symmetric_eigenvalue(Qi)) + ")");
    }
  }
  for (int i = 0; i < N; ++i) {
    const auto& Ri = game.R[i];
    const int mi = game.agents[i].control_dim();
    if (Ri.rows() != mi || Ri.cols() != mi) {
      flag("R[" + std::to_string(i) + "] is " + std::to_string(Ri.rows()) + "x" +
           std::to_string(Ri.cols()) + ", expected " + std::to_string(mi) + "x" +
           std::to_string(mi));
      continue;
    }
    const double asym = (Ri - Ri.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol)
      flag("R[" + std::to_string(i) + "] asymmetric: max |R - R^T| = " + std::to_string(asym));
    if (min_symmetric_eigenvalue(Ri) <= kPdFloor)
      flag("R[" + std::to_string(i) + "] not positive definite (min eigenvalue " +
           std::to_string(min_symmetric_eigenvalue(Ri)) + ")");
  }
  return rep;
}

}  // namespace lqgap
