#include "lqgap/open_loop.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "lqgap/errors.hpp"
#include "lqgap/feedback.hpp"
#include "lqgap/fixtures.hpp"
#include "lqgap/rng.hpp"
#include "lqgap/trajectory.hpp"
#include "test_util.hpp"

namespace {

using lqgap::agent_cost;
using lqgap::assemble_stacked;
using lqgap::kkt_oracle;
using lqgap::LQGame;
using lqgap::rollout_openloop;
using lqgap::simulate;
using lqgap::solve_olne;
using lqgap::Trajectory;

TEST(SolveOlne, ScalarGameClosedForm) {
  // A=B=Q=R=1, T=1: Lambda = 1 + 1*1*1 = 2, L = 1*1*(1/2)*1 = 0.5,
  // M_1 = 1 + 1*1*0.5 = 1.5.
  const LQGame g = testutil::scalar_game(1);
  const auto sys = assemble_stacked(g);
  const auto sol = solve_olne(g, sys);
  EXPECT_NEAR(sol.Lambda[0](0, 0), 2.0, 1e-15);
  EXPECT_NEAR(sol.L[0](0, 0), 0.5, 1e-15);
  EXPECT_NEAR(sol.M[0][0](0, 0), 1.5, 1e-15);
  EXPECT_NEAR(sol.M[1][0](0, 0), 1.0, 1e-15);
}

TEST(SolveOlne, ZeroStateCostIsPassive) {
  LQGame g = testutil::scalar_game(4);
  g.Q[0].setZero();
  const auto sys = assemble_stacked(g);
  const auto sol = solve_olne(g, sys);
  for (int k = 0; k < g.horizon; ++k) {
    EXPECT_EQ(sol.L[k](0, 0), 0.0);
    EXPECT_EQ(sol.Lambda[k], Eigen::MatrixXd::Identity(1, 1));
    EXPECT_EQ(sol.M[k][0](0, 0), 0.0);
  }
}

TEST(KktOracle, ScalarClosedForm) {
  // T=1 open-loop cost u^2 + (x1 + u)^2 minimized at u = -x1/2.
  const LQGame g = testutil::scalar_game(1);
  const auto sys = assemble_stacked(g);
  const auto kkt = kkt_oracle(g, sys, Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(kkt.u(0), -0.5, 1e-15);
  EXPECT_NEAR(kkt.trajectory.x[1](0), 0.5, 1e-15);
}

TEST(KktOracle, ZeroStateCostGivesZeroControls) {
  LQGame g = testutil::scalar_game(3);
  g.Q[0].setZero();
  const auto sys = assemble_stacked(g);
  const auto kkt = kkt_oracle(g, sys, Eigen::VectorXd::Ones(1));
  EXPECT_LT(kkt.u.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SolveOlne, AgreesWithKktOracle) {
  // The Riccati-form equilibrium and the dense stationarity solve are two
  // independent derivations; they must produce the same play.
  lqgap::SplitMix64 rng(9001);
  for (int trial = 0; trial < 20; ++trial) {
    const LQGame g = testutil::sampled_game(
        42, trial, trial % 2 ? lqgap::SamplerMode::kRandomDynamics
                             : lqgap::SamplerMode::kFixedDynamics);
    const auto sys = assemble_stacked(g);
    Eigen::VectorXd x1(g.state_dim());
    for (int r = 0; r < x1.size(); ++r) x1(r) = rng.uniform(-1, 1);
    const auto sol = solve_olne(g, sys);
    const Trajectory traj = rollout_openloop(sol, sys, x1);
    const auto kkt = kkt_oracle(g, sys, x1);
    for (int k = 0; k < g.horizon; ++k) {
      const Eigen::VectorXd u_kkt = kkt.u.segment(k * g.control_dim(), g.control_dim());
      EXPECT_LT((traj.u[k] - u_kkt).cwiseAbs().maxCoeff(), 1e-8)
          << "trial " << trial << " stage " << k;
    }
    for (int t = 0; t <= g.horizon; ++t)
      EXPECT_LT((traj.x[t] - kkt.trajectory.x[t]).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(RolloutOpenloop, MatchesRawDynamicsResimulation) {
  // The rollout propagates x via Lambda^-1 A; replaying its controls through
  // x_{t+1} = A x_t + B u_t must reproduce the same states.
  const LQGame g = lqgap::fixtures::g2();
  const auto sys = assemble_stacked(g);
  const auto sol = solve_olne(g, sys);
  Eigen::VectorXd x1(4);
  x1 << 0.3, -1.2, 0.8, 0.1;
  const Trajectory traj = rollout_openloop(sol, sys, x1);
  const Trajectory resim = simulate(sys, traj.u, x1);
  for (int t = 0; t <= g.horizon; ++t)
    EXPECT_LT((traj.x[t] - resim.x[t]).cwiseAbs().maxCoeff(), 1e-9) << "t " << t;
}

TEST(SolveOlne, SingleAgentMatchesFeedbackPlay) {
  // With one agent both solution concepts collapse to the optimal control, so
  // the trajectories coincide even though the representations differ.
  LQGame g;
  Eigen::MatrixXd A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
  A << 0.9, 0.2, -0.1, 1.05;
  B << 0.0, 1.0;
  Q << 2.0, 0.3, 0.3, 1.0;
  R << 0.5;
  g.agents = {{A, B}};
  g.horizon = 8;
  g.Q = {Q};
  g.R = {R};
  const auto sys = assemble_stacked(g);
  Eigen::VectorXd x1(2);
  x1 << 1.0, -1.0;
  const Trajectory fb = lqgap::rollout_feedback(lqgap::solve_fbne(g, sys), sys, x1);
  const Trajectory ol = rollout_openloop(solve_olne(g, sys), sys, x1);
  for (int t = 0; t <= g.horizon; ++t)
    EXPECT_LT((fb.x[t] - ol.x[t]).cwiseAbs().maxCoeff(), 1e-9);
  for (int k = 0; k < g.horizon; ++k)
    EXPECT_LT((fb.u[k] - ol.u[k]).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveOlne, FinalStageGainEqualsFeedbackGain) {
  // At the last stage the information structures are equivalent: K_T = L_T.
  for (int idx = 0; idx < 5; ++idx) {
    const LQGame g = testutil::sampled_game(43, idx);
    const auto sys = assemble_stacked(g);
    const auto fb = lqgap::solve_fbne(g, sys);
    const auto ol = solve_olne(g, sys);
    EXPECT_LT(testutil::max_abs_diff(fb.K[g.horizon - 1], ol.L[g.horizon - 1]), 1e-10);
  }
}

TEST(SolveOlne, NoAgentGainsFromOpenLoopDeviation) {
  // Strict convexity in own controls: any unilateral open-loop perturbation
  // strictly increases that agent's cost.
  const LQGame g = testutil::sampled_game(44, 0);
  const auto sys = assemble_stacked(g);
  const auto sol = solve_olne(g, sys);
  Eigen::VectorXd x1(g.state_dim());
  x1 << 1.0, 0.5, -0.5, 1.0;
  const Trajectory eq = rollout_openloop(sol, sys, x1);
  lqgap::SplitMix64 rng(7);
  for (int i = 0; i < g.num_agents(); ++i) {
    const double cost_eq = agent_cost(g, eq, i);
    std::vector<Eigen::VectorXd> controls = eq.u;
    for (auto& u : controls)
      u(g.control_offset(i)) += 1e-3 * rng.uniform(-1, 1);
    const Trajectory dev = simulate(sys, controls, x1);
    const double cost_dev = agent_cost(g, dev, i);
    EXPECT_GT(cost_dev - cost_eq, 1e-9) << "agent " << i;
  }
}

TEST(SolveOlne, DeterministicAcrossRepeats) {
  const LQGame g = testutil::sampled_game(44, 1, lqgap::SamplerMode::kRandomDynamics);
  const auto sys = assemble_stacked(g);
  const auto a = solve_olne(g, sys);
  const auto b = solve_olne(g, sys);
  for (int k = 0; k < g.horizon; ++k) {
    EXPECT_EQ(a.L[k], b.L[k]);
    EXPECT_EQ(a.Lambda[k], b.Lambda[k]);
  }
}

TEST(SolveOlne, SingularLambdaReportsStage) {
  // N=1, A=B=R=1, Q=-1 (declared auxiliary so validation rules don't apply):
  // Lambda_T = 1 + (-1) = 0 exactly.
  LQGame g = testutil::scalar_game(2);
  g.Q[0](0, 0) = -1.0;
  g.cost_symmetry = lqgap::CostSymmetry::kAuxiliary;
  const auto sys = assemble_stacked(g);
  try {
    solve_olne(g, sys);
    FAIL() << "expected SingularStageMatrix";
  } catch (const lqgap::SingularStageMatrix& e) {
    EXPECT_EQ(e.stage, 2);  // backward pass hits t = T first
    EXPECT_NE(std::string(e.what()).find("Lambda"), std::string::npos);
  }
}

TEST(KktOracle, RefusesOversizedProblems) {
  const LQGame g = testutil::scalar_game(2001);
  const auto sys = assemble_stacked(g);
  EXPECT_THROW(kkt_oracle(g, sys, Eigen::VectorXd::Ones(1)), lqgap::SizeGuardError);
}

TEST(KktOracle, RejectsWrongInitialStateSize) {
  const LQGame g = testutil::scalar_game(2);
  const auto sys = assemble_stacked(g);
  EXPECT_THROW(kkt_oracle(g, sys, Eigen::VectorXd::Ones(3)), lqgap::ValidationError);
}

}  // namespace
