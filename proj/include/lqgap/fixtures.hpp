#pragma once

#include <Eigen/Dense>

#include "lqgap/game.hpp"

namespace lqgap::fixtures {

// The benchmark games also shipped as JSON under fixtures/. Embedded here so
// the CLI's built-in experiment and the tests can cross-check the files
// against an independent in-code copy.

namespace detail {

inline AgentSpec oscillator_agent() {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.0, 1.0, -1.0, -1.0;
  B << 0.0, 1.0;
  return {A, B};
}

inline LQGame two_agent_oscillator(const Eigen::MatrixXd& Q1, const Eigen::MatrixXd& Q2,
                                   const char* label) {
  LQGame g;
  g.agents = {oscillator_agent(), oscillator_agent()};
  g.horizon = 10;
  g.Q = {Q1, Q2};
  g.R = {Eigen::MatrixXd::Constant(1, 1, 3.0), Eigen::MatrixXd::Constant(1, 1, 2.0)};
  g.label = label;
  return g;
}

}  // namespace detail

// Two-agent game whose feedback and open-loop equilibria nearly coincide.
inline LQGame g1() {
  Eigen::MatrixXd Q1(4, 4), Q2(4, 4);
  Q1 << 1.86, 0.85, 0.57, 0.44,
        0.85, 1.99, 0.35, 0.25,
        0.57, 0.35, 1.53, 0.70,
        0.44, 0.25, 0.70, 1.07;
  Q2 << 1.29, 0.92, 0.98, 0.57,
        0.92, 1.16, 0.78, 0.53,
        0.98, 0.78, 1.63, 0.53,
        0.57, 0.53, 0.53, 1.84;
  return detail::two_agent_oscillator(Q1, Q2, "G1");
}

// Same dynamics as g1 but with heavy cross-agent cost mass: the two
// equilibria diverge by orders of magnitude more.
inline LQGame g2() {
  Eigen::MatrixXd Q1(4, 4), Q2(4, 4);
  Q1 << 1.48, 1.41, 1.09, 0.94,
        1.41, 1.66, 0.89, 1.46,
        1.09, 0.89, 1.64, 0.87,
        0.94, 1.46, 0.87, 1.95;
  Q2 << 1.83, 0.44, 1.43, 0.81,
        0.44, 1.97, 0.63, 0.87,
        1.43, 0.63, 1.29, 0.85,
        0.81, 0.87, 0.85, 0.73;
  return detail::two_agent_oscillator(Q1, Q2, "G2");
}

// Scalar two-agent pair used by the bound-tightness experiment:
// A^i = B^i = 1, R^i = 300, T = 10; the base game has identity state costs.
inline LQGame example1_base() {
  LQGame g;
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  g.agents = {{one, one}, {one, one}};
  g.horizon = 10;
  g.Q = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
  g.R = {Eigen::MatrixXd::Constant(1, 1, 300.0), Eigen::MatrixXd::Constant(1, 1, 300.0)};
  g.label = "Example1-G";
  return g;
}

// Perturbed state costs: Q^1 scaled by 1.1, Q^2 with 0.1 off-diagonals;
// both perturbations have spectral norm 0.1.
inline LQGame example1_perturbed() {
  LQGame g = example1_base();
  g.Q[0] = 1.1 * Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd Q2(2, 2);
  Q2 << 1.0, 0.1, 0.1, 1.0;
  g.Q[1] = Q2;
  g.label = "Example1-Ghat";
  return g;
}

}  // namespace lqgap::fixtures
