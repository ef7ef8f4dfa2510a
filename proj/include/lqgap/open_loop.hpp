#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lqgap/errors.hpp"
#include "lqgap/game.hpp"
#include "lqgap/linalg.hpp"
#include "lqgap/trajectory.hpp"

namespace lqgap {

// Open-loop Nash equilibrium quantities. Same stage indexing as
// FeedbackSolution: index k holds stage t = k+1; M[T][i] = M^i_{T+1} = Q^i.
struct OpenLoopSolution {
  std::vector<std::vector<Eigen::MatrixXd>> M;  // T+1 stages x N agents, n x n
  std::vector<Eigen::MatrixXd> Lambda;          // T matrices, n x n
  std::vector<Eigen::MatrixXd> L;               // T gains, m x n (row blocks per agent)
  std::vector<double> lambda_condition;         // condition estimate of each Lambda_t
};

// Backward recursion
//   Lambda_t = I + sum_i Bhat^i (R^i)^-1 Bhat^i' M^i_{t+1},
//   L^i_t    = (R^i)^-1 Bhat^i' M^i_{t+1} Lambda_t^-1 A,
//   M^i_t    = Q^i + A' M^i_{t+1} Lambda_t^-1 A,
// with Lambda_t^-1 applied through a dense solve. The (R^i)^-1 factors are
// formed once per game (R^i is small and positive definite).
inline OpenLoopSolution solve_olne(const LQGame& game, const StackedSystem& sys,
                                   double singularity_limit = kSingularityLimit) {
  const int N = game.num_agents();
  const int T = game.horizon;
  const int n = game.state_dim();
  const int m = game.control_dim();

  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> r_lu;
  r_lu.reserve(N);
  std::vector<Eigen::MatrixXd> G(N);  // Bhat^i (R^i)^-1 Bhat^i'
  for (int i = 0; i < N; ++i) {
    r_lu.emplace_back(game.R[i]);
    G[i] = sys.B_hat[i] * r_lu[i].solve(sys.B_hat[i].transpose());
  }

  OpenLoopSolution sol;
  sol.M.assign(T + 1, std::vector<Eigen::MatrixXd>(N));
  sol.Lambda.assign(T, Eigen::MatrixXd());
  sol.L.assign(T, Eigen::MatrixXd());
  sol.lambda_condition.assign(T, 0.0);

  for (int i = 0; i < N; ++i) sol.M[T][i] = game.Q[i];

  for (int k = T - 1; k >= 0; --k) {
    Eigen::MatrixXd Lam = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < N; ++i) Lam += G[i] * sol.M[k + 1][i];

    const double cond = condition_estimate(Lam);
    sol.lambda_condition[k] = cond;
    if (!(cond <= singularity_limit))
      throw SingularStageMatrix(k + 1, cond,
                                "open-loop stage matrix Lambda singular at t=" +
                                    std::to_string(k + 1) + " (condition " +
                                    std::to_string(cond) + ")");

    const Eigen::MatrixXd Psi = Lam.partialPivLu().solve(sys.A);  // Lambda^-1 A
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, n);
    for (int i = 0; i < N; ++i) {
      L.middleRows(game.control_offset(i), game.agents[i].control_dim()) =
          r_lu[i].solve(sys.B_hat[i].transpose() * sol.M[k + 1][i] * Psi);
    }
    for (int i = 0; i < N; ++i)
      sol.M[k][i] = game.Q[i] + sys.A.transpose() * sol.M[k + 1][i] * Psi;
    sol.Lambda[k] = std::move(Lam);
    sol.L[k] = std::move(L);
  }
  return sol;
}

// Equilibrium play: u^i_t = -L^i_t x_t with x_{t+1} = Lambda_t^-1 A x_t. The
// closed-loop identity A x_t + B u_t = Lambda_t^-1 A x_t holds in exact
// arithmetic; re-simulating the raw dynamics recovers the same states.
inline Trajectory rollout_openloop(const OpenLoopSolution& sol, const StackedSystem& sys,
                                   const Eigen::VectorXd& x1) {
  if (x1.size() != sys.A.rows())
    throw ValidationError("x1 has dimension " + std::to_string(x1.size()) + ", expected " +
                          std::to_string(sys.A.rows()));
  Trajectory traj;
  traj.x.reserve(sol.L.size() + 1);
  traj.u.reserve(sol.L.size());
  traj.x.push_back(x1);
  for (std::size_t k = 0; k < sol.L.size(); ++k) {
    traj.u.push_back(-sol.L[k] * traj.x.back());
    traj.x.push_back(sol.Lambda[k].partialPivLu().solve(sys.A * traj.x.back()));
  }
  return traj;
}

struct KktResult {
  Eigen::VectorXd u;  // stacked controls, time-major: (u_1', ..., u_T')'
  Trajectory trajectory;
};

// Independent open-loop oracle: unrolls the dynamics into x = Phi x1 + Theta u,
// forms each agent's exact stationarity condition in its own control block,
// stacks them into one mT x mT linear system and solves it densely. Each C^i
// is strictly convex in u^i (R^i > 0, Q^i >= 0), so the unique stationary
// point is the open-loop equilibrium. Test instrument only; guarded to small
// problems.
inline KktResult kkt_oracle(const LQGame& game, const StackedSystem& sys,
                            const Eigen::VectorXd& x1) {
  const int N = game.num_agents();
  const int T = game.horizon;
  const int n = game.state_dim();
  const int m = game.control_dim();
  if (static_cast<long long>(m) * T > 2000)
    throw SizeGuardError("kkt_oracle: m*T = " + std::to_string(static_cast<long long>(m) * T) +
                         " exceeds the 2000 dense-solve guard");
  if (x1.size() != n)
    throw ValidationError("x1 has dimension " + std::to_string(x1.size()) + ", expected " +
                          std::to_string(n));

  // Powers of A; block row r of Phi/Theta corresponds to x_{r+2}.
  std::vector<Eigen::MatrixXd> Apow(T + 1);
  Apow[0] = Eigen::MatrixXd::Identity(n, n);
  for (int p = 1; p <= T; ++p) Apow[p] = sys.A * Apow[p - 1];

  Eigen::MatrixXd Phi(n * T, n);
  Eigen::MatrixXd Theta = Eigen::MatrixXd::Zero(n * T, m * T);
  for (int r = 0; r < T; ++r) {
    Phi.middleRows(r * n, n) = Apow[r + 1];
    for (int c = 0; c <= r; ++c) Theta.block(r * n, c * m, n, m) = Apow[r - c] * sys.B;
  }
  const Eigen::VectorXd phi_x1 = Phi * x1;

  Eigen::MatrixXd H(m * T, m * T);
  Eigen::VectorXd g(m * T);
  for (int i = 0; i < N; ++i) {
    const Eigen::MatrixXd Qs = 0.5 * (game.Q[i] + game.Q[i].transpose());
    // W = blkdiag_T(Qs) * Theta and w = blkdiag_T(Qs) * Phi x1, block-row-wise.
    Eigen::MatrixXd W(n * T, m * T);
    Eigen::VectorXd w(n * T);
    for (int r = 0; r < T; ++r) {
      W.middleRows(r * n, n) = Qs * Theta.middleRows(r * n, n);
      w.segment(r * n, n) = Qs * phi_x1.segment(r * n, n);
    }
    Eigen::MatrixXd Hi = Theta.transpose() * W;  // + blkdiag_T of R^i in agent i's block
    const Eigen::VectorXd gi = Theta.transpose() * w;
    const int mo = game.control_offset(i);
    const int mi = game.agents[i].control_dim();
    for (int t = 0; t < T; ++t)
      Hi.block(t * m + mo, t * m + mo, mi, mi) += game.R[i];
    // Agent i's stationarity rows land in the row positions of its own
    // controls within u.
    for (int t = 0; t < T; ++t) {
      H.middleRows(t * m + mo, mi) = Hi.middleRows(t * m + mo, mi);
      g.segment(t * m + mo, mi) = gi.segment(t * m + mo, mi);
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
  if (!lu.isInvertible())
    throw SingularSystem("kkt_oracle: stacked stationarity system is singular");
  const Eigen::VectorXd u = lu.solve(-g);

  std::vector<Eigen::VectorXd> controls(T);
  for (int t = 0; t < T; ++t) controls[t] = u.segment(t * m, m);
  KktResult result;
  result.u = u;
  result.trajectory = simulate(sys, controls, x1);
  return result;
}

}  // namespace lqgap
