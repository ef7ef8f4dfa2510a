#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lqgap/errors.hpp"
#include "lqgap/game.hpp"
#include "lqgap/linalg.hpp"
#include "lqgap/trajectory.hpp"

namespace lqgap {

// Feedback Nash equilibrium of an LQ game via the coupled Riccati recursion
// (Basar & Olsder, "Dynamic Noncooperative Game Theory", ch. 6). Stage
// vectors are 0-indexed: index k holds stage t = k+1, so K[k] = K_{k+1} and
// Z[k][i] = Z^i_{k+1}; Z has one extra slot with Z[T][i] = Z^i_{T+1} = Q^i.
struct FeedbackSolution {
  std::vector<std::vector<Eigen::MatrixXd>> Z;  // T+1 stages x N agents, n x n
  std::vector<Eigen::MatrixXd> K;               // T gains, m x n (row blocks per agent)
  std::vector<Eigen::MatrixXd> F;               // T closed-loop maps A - sum_j Bhat^j K^j
  std::vector<Eigen::MatrixXd> P;               // T stage matrices, m x m
  std::vector<Eigen::MatrixXd> S;               // T stage right-hand sides, m x n
  std::vector<double> p_condition;              // condition estimate of each P_t
};

// Backward recursion over t = T..1. At each stage the agents' first-order
// conditions couple into one linear system P_t K_t = S_t with
//   [P_t]_{ii} = R^i + Bhat^i' Z^i_{t+1} Bhat^i,
//   [P_t]_{ij} = Bhat^i' Z^i_{t+1} Bhat^j,
//   [S_t]_{i,:} = Bhat^i' Z^i_{t+1} A,
// solved densely (no regularization: uniqueness of the equilibrium assumes an
// exact solve). Then F_t = A - sum_j Bhat^j K^j_t and
// Z^i_t = Q^i + F_t' Z^i_{t+1} F_t + K^i_t' R^i K^i_t.
inline FeedbackSolution solve_fbne(const LQGame& game, const StackedSystem& sys,
                                   double singularity_limit = kSingularityLimit) {
  const int N = game.num_agents();
  const int T = game.horizon;
  const int n = game.state_dim();
  const int m = game.control_dim();

  FeedbackSolution sol;
  sol.Z.assign(T + 1, std::vector<Eigen::MatrixXd>(N));
  sol.K.assign(T, Eigen::MatrixXd());
  sol.F.assign(T, Eigen::MatrixXd());
  sol.P.assign(T, Eigen::MatrixXd());
  sol.S.assign(T, Eigen::MatrixXd());
  sol.p_condition.assign(T, 0.0);

  for (int i = 0; i < N; ++i) sol.Z[T][i] = game.Q[i];

  for (int k = T - 1; k >= 0; --k) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, n);
    for (int i = 0; i < N; ++i) {
      const int moi = game.control_offset(i);
      const int mi = game.agents[i].control_dim();
      const Eigen::MatrixXd BiZ = sys.B_hat[i].transpose() * sol.Z[k + 1][i];
      for (int j = 0; j < N; ++j) {
        const int moj = game.control_offset(j);
        const int mj = game.agents[j].control_dim();
        Eigen::MatrixXd blk = BiZ * sys.B_hat[j];
        if (i == j) blk += game.R[i];
        P.block(moi, moj, mi, mj) = blk;
      }
      S.middleRows(moi, mi) = BiZ * sys.A;
    }

    const double cond = condition_estimate(P);
    sol.p_condition[k] = cond;
    if (!(cond <= singularity_limit))
      throw SingularStageMatrix(k + 1, cond,
                                "feedback stage matrix P singular at t=" + std::to_string(k + 1) +
                                    " (condition " + std::to_string(cond) + ")");

    Eigen::MatrixXd K = P.partialPivLu().solve(S);
    Eigen::MatrixXd F = sys.A;
    for (int j = 0; j < N; ++j)
      F -= sys.B_hat[j] * K.middleRows(game.control_offset(j), game.agents[j].control_dim());
    for (int i = 0; i < N; ++i) {
      const Eigen::MatrixXd Ki = K.middleRows(game.control_offset(i), game.agents[i].control_dim());
      sol.Z[k][i] = game.Q[i] + F.transpose() * sol.Z[k + 1][i] * F +
                    Ki.transpose() * game.R[i] * Ki;
    }
    sol.K[k] = std::move(K);
    sol.F[k] = std::move(F);
    sol.P[k] = std::move(P);
    sol.S[k] = std::move(S);
  }
  return sol;
}

// Equilibrium play: u^i_t = -K^i_t x_t, x_{t+1} = F_t x_t.
inline Trajectory rollout_feedback(const FeedbackSolution& sol, const StackedSystem& sys,
                                   const Eigen::VectorXd& x1) {
  if (x1.size() != sys.A.rows())
    throw ValidationError("x1 has dimension " + std::to_string(x1.size()) + ", expected " +
                          std::to_string(sys.A.rows()));
  Trajectory traj;
  traj.x.reserve(sol.K.size() + 1);
  traj.u.reserve(sol.K.size());
  traj.x.push_back(x1);
  for (std::size_t k = 0; k < sol.K.size(); ++k) {
    traj.u.push_back(-sol.K[k] * traj.x.back());
    traj.x.push_back(sol.F[k] * traj.x.back());
  }
  return traj;
}

// Optimal gains for min sum_t u_t' R u_t + x_{t+1}' Q x_{t+1} under
// time-varying dynamics x_{t+1} = A_t x_t + B u_t. Standard single-agent
// Riccati recursion; used to certify unilateral optimality.
inline std::vector<Eigen::MatrixXd> time_varying_lqr(const std::vector<Eigen::MatrixXd>& A_t,
                                                     const Eigen::MatrixXd& B,
                                                     const Eigen::MatrixXd& Q,
                                                     const Eigen::MatrixXd& R,
                                                     double singularity_limit = kSingularityLimit) {
  const int T = static_cast<int>(A_t.size());
  std::vector<Eigen::MatrixXd> K(T);
  Eigen::MatrixXd Z = Q;
  for (int k = T - 1; k >= 0; --k) {
    const Eigen::MatrixXd H = R + B.transpose() * Z * B;
    const double cond = condition_estimate(H);
    if (!(cond <= singularity_limit))
      throw SingularStageMatrix(k + 1, cond,
                                "single-agent stage matrix singular at t=" + std::to_string(k + 1) +
                                    " (condition " + std::to_string(cond) + ")");
    K[k] = H.partialPivLu().solve(B.transpose() * Z * A_t[k]);
    const Eigen::MatrixXd F = A_t[k] - B * K[k];
    Z = Q + F.transpose() * Z * F + K[k].transpose() * R * K[k];
  }
  return K;
}

// Freezes every other agent's feedback gain inside the dynamics,
// A~_t = A - sum_{j != i} Bhat^j K^j_t, solves the resulting single-agent
// time-varying LQR for agent i, and reports max_t ||K_lqr - K_sol||_2.
// A small value certifies that agent i's strategy is unilaterally optimal at
// the gain level (and hence from every state, by linearity).
inline double unilateral_optimality_residual(const LQGame& game, const StackedSystem& sys,
                                             const FeedbackSolution& sol, int agent) {
  const int T = game.horizon;
  std::vector<Eigen::MatrixXd> A_t(T);
  for (int k = 0; k < T; ++k) {
    Eigen::MatrixXd At = sys.A;
    for (int j = 0; j < game.num_agents(); ++j) {
      if (j == agent) continue;
      At -= sys.B_hat[j] * game.control_rows(sol.K[k], j);
    }
    A_t[k] = std::move(At);
  }
  const auto K_lqr = time_varying_lqr(A_t, sys.B_hat[agent], game.Q[agent], game.R[agent]);
  double residual = 0.0;
  for (int k = 0; k < T; ++k)
    residual = std::max(residual, spectral_norm(K_lqr[k] - game.control_rows(sol.K[k], agent)));
  return residual;
}

}  // namespace lqgap
