#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "lqgap/feedback.hpp"
#include "lqgap/game.hpp"
#include "lqgap/open_loop.hpp"

namespace lqgap {

inline constexpr double kCoincidenceTol = 1e-9;

// The auxiliary game keeps, in each Q^i, only the rows belonging to agent i's
// own state block and zeroes every other row block. Dynamics, R and T are
// unchanged. The result is generally asymmetric, hence the auxiliary cost
// flag (validation skips symmetry/PSD for it, and the solvers run verbatim
// with no symmetrization).
inline LQGame build_auxiliary(const LQGame& game) {
  LQGame aux = game;
  aux.cost_symmetry = CostSymmetry::kAuxiliary;
  for (int i = 0; i < game.num_agents(); ++i) {
    Eigen::MatrixXd Qt = Eigen::MatrixXd::Zero(game.Q[i].rows(), game.Q[i].cols());
    const int no = game.state_offset(i);
    const int ni = game.agents[i].state_dim();
    Qt.middleRows(no, ni) = game.Q[i].middleRows(no, ni);
    aux.Q[i] = std::move(Qt);
  }
  return aux;
}

// Numerical certificates for the identities linking a game G and its
// auxiliary game G~ (all residuals in the spectral norm, maxima over stages
// and agents):
//  - lemma1: the open-loop gains of G and G~ coincide, L~ = L;
//  - remark3: M~^i has nonzero entries only in agent i's row block;
//  - lemma2: for G~, feedback and open-loop solutions coincide, K~ = L~ and
//    F~ = Lambda~^-1 A;
//  - lemma3: G's open-loop propagator equals G~'s closed loop,
//    Lambda^-1 A = F~;
//  - deltaK_series: dK~_t = ||K~_t - K_t||_2, whose vanishing makes the
//    feedback and open-loop trajectories of G identical.
struct AuxiliaryReport {
  double lemma1_residual = 0.0;
  double remark3_residual = 0.0;
  double lemma2_gain_residual = 0.0;
  double lemma2_dynamics_residual = 0.0;
  double lemma3_residual = 0.0;
  std::vector<double> deltaK_series;  // index k holds stage t = k+1
  bool coincide = false;
};

inline AuxiliaryReport verify_auxiliary_identities(const LQGame& game,
                                                   double coincidence_tol = kCoincidenceTol,
                                                   double singularity_limit = kSingularityLimit) {
  const StackedSystem sys = assemble_stacked(game);
  const LQGame aux = build_auxiliary(game);
  const int N = game.num_agents();
  const int T = game.horizon;

  auto tagged = [](const char* what, auto&& solve) {
    try {
      return solve();
    } catch (const SingularStageMatrix& e) {
      throw SingularStageMatrix(e.stage, e.condition,
                                std::string("while running the ") + what + ": " + e.what());
    }
  };
  const OpenLoopSolution ol = tagged("open-loop solve of the base game",
                                     [&] { return solve_olne(game, sys, singularity_limit); });
  const OpenLoopSolution ol_aux = tagged("open-loop solve of the auxiliary game",
                                         [&] { return solve_olne(aux, sys, singularity_limit); });
  const FeedbackSolution fb_aux = tagged("feedback solve of the auxiliary game",
                                         [&] { return solve_fbne(aux, sys, singularity_limit); });
  const FeedbackSolution fb = tagged("feedback solve of the base game",
                                     [&] { return solve_fbne(game, sys, singularity_limit); });

  AuxiliaryReport rep;
  rep.deltaK_series.resize(T);
  for (int k = 0; k < T; ++k) {
    for (int i = 0; i < N; ++i) {
      rep.lemma1_residual =
          std::max(rep.lemma1_residual,
                   spectral_norm(game.control_rows(ol_aux.L[k], i) - game.control_rows(ol.L[k], i)));
      rep.lemma2_gain_residual =
          std::max(rep.lemma2_gain_residual,
                   spectral_norm(game.control_rows(fb_aux.K[k], i) -
                                 game.control_rows(ol_aux.L[k], i)));
    }
    const Eigen::MatrixXd lam_aux_inv_A = ol_aux.Lambda[k].partialPivLu().solve(sys.A);
    const Eigen::MatrixXd lam_inv_A = ol.Lambda[k].partialPivLu().solve(sys.A);
    rep.lemma2_dynamics_residual =
        std::max(rep.lemma2_dynamics_residual, spectral_norm(fb_aux.F[k] - lam_aux_inv_A));
    rep.lemma3_residual = std::max(rep.lemma3_residual, spectral_norm(lam_inv_A - fb_aux.F[k]));
    rep.deltaK_series[k] = spectral_norm(fb_aux.K[k] - fb.K[k]);
  }
  for (int k = 0; k <= T; ++k) {
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        rep.remark3_residual =
            std::max(rep.remark3_residual, spectral_norm(game.state_rows(ol_aux.M[k][i], j)));
      }
    }
  }
  rep.coincide =
      *std::max_element(rep.deltaK_series.begin(), rep.deltaK_series.end()) <= coincidence_tol;
  return rep;
}

// dK~_t = ||K~_t - K_t||_2 for t = 1..T (stacked-gain spectral norm).
inline std::vector<double> coincidence_gap(const LQGame& game) {
  const StackedSystem sys = assemble_stacked(game);
  const FeedbackSolution fb = solve_fbne(game, sys);
  const FeedbackSolution fb_aux = solve_fbne(build_auxiliary(game), sys);
  std::vector<double> series(game.horizon);
  for (int k = 0; k < game.horizon; ++k) series[k] = spectral_norm(fb_aux.K[k] - fb.K[k]);
  return series;
}

}  // namespace lqgap
