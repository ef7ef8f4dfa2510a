#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lqgap/errors.hpp"
#include "lqgap/game.hpp"

namespace lqgap {

// State/control sequences. x[k] holds x_{k+1} (so x.front() = x_1 and
// x.back() = x_{T+1}); u[k] holds the stacked control u_{k+1}.
struct Trajectory {
  std::vector<Eigen::VectorXd> x;  // T+1 states in R^n
  std::vector<Eigen::VectorXd> u;  // T controls in R^m
};

// Propagates the raw stacked dynamics x_{t+1} = A x_t + B u_t under the given
// control sequence. Serves as the re-simulation oracle for both rollouts.
inline Trajectory simulate(const StackedSystem& sys, const std::vector<Eigen::VectorXd>& controls,
                           const Eigen::VectorXd& x1) {
  if (x1.size() != sys.A.rows())
    throw ValidationError("x1 has dimension " + std::to_string(x1.size()) + ", expected " +
                          std::to_string(sys.A.rows()));
  Trajectory traj;
  traj.x.reserve(controls.size() + 1);
  traj.u = controls;
  traj.x.push_back(x1);
  for (const auto& u : controls) {
    if (u.size() != sys.B.cols())
      throw ValidationError("control has dimension " + std::to_string(u.size()) +
                            ", expected " + std::to_string(sys.B.cols()));
    traj.x.push_back(sys.A * traj.x.back() + sys.B * u);
  }
  return traj;
}

// Agent i's realized cost sum_t u^i_t' R^i u^i_t + x_{t+1}' Q^i x_{t+1}.
inline double agent_cost(const LQGame& game, const Trajectory& traj, int i) {
  const int mo = game.control_offset(i);
  const int mi = game.agents[i].control_dim();
  double cost = 0.0;
  for (std::size_t k = 0; k < traj.u.size(); ++k) {
    const Eigen::VectorXd ui = traj.u[k].segment(mo, mi);
    cost += ui.dot(game.R[i] * ui);
    cost += traj.x[k + 1].dot(game.Q[i] * traj.x[k + 1]);
  }
  return cost;
}

}  // namespace lqgap
