#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lqgap/auxiliary.hpp"
#include "lqgap/csv.hpp"
#include "lqgap/feedback.hpp"
#include "lqgap/game.hpp"

namespace lqgap {

// Recursive perturbation bounds for the feedback Riccati quantities of two
// games G and G^ that share dynamics and control costs and differ only in
// the state costs, with eps = max_i ||Q^^i - Q^i||_2. Stage index k holds
// t = k+1. Bounds at stages where the recursion's precondition
// dP_t < 1 / ||P_t^-1||_2 fails (and all earlier stages, since the recursion
// cannot continue past them) are NaN with applicable = false. Actual
// deviations from the two feedback solves ride along for comparison.
struct GapBoundSeries {
  double epsilon = 0.0;
  int horizon = 0;
  std::vector<double> bound_dP, bound_dS, bound_dK;     // T entries
  std::vector<std::vector<double>> bound_dZ;            // T+1 stages x N agents
  std::vector<bool> applicable;                         // T entries
  std::vector<double> actual_dP, actual_dS, actual_dK;  // T entries
  std::vector<std::vector<double>> actual_dZ;           // T+1 stages x N agents
};

inline GapBoundSeries compute_bound(const LQGame& game, const LQGame& perturbed) {
  const int N = game.num_agents();
  const int T = game.horizon;
  if (perturbed.num_agents() != N || perturbed.horizon != T)
    throw ValidationError("perturbed game must share agent count and horizon");
  for (int i = 0; i < N; ++i) {
    if (game.agents[i].A != perturbed.agents[i].A || game.agents[i].B != perturbed.agents[i].B)
      throw ValidationError("perturbed game must share dynamics (agent " + std::to_string(i) +
                            " differs)");
    if (game.R[i] != perturbed.R[i])
      throw ValidationError("perturbed game must share control costs (agent " +
                            std::to_string(i) + " differs)");
    if (game.Q[i].rows() != perturbed.Q[i].rows() || game.Q[i].cols() != perturbed.Q[i].cols())
      throw ValidationError("perturbed game must share state-cost dimensions (agent " +
                            std::to_string(i) + " differs)");
  }

  const StackedSystem sys = assemble_stacked(game);
  const FeedbackSolution fb = solve_fbne(game, sys);
  const FeedbackSolution fbp = solve_fbne(perturbed, sys);

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  GapBoundSeries out;
  out.horizon = T;
  for (int i = 0; i < N; ++i)
    out.epsilon = std::max(out.epsilon, spectral_norm(perturbed.Q[i] - game.Q[i]));
  out.bound_dP.assign(T, nan);
  out.bound_dS.assign(T, nan);
  out.bound_dK.assign(T, nan);
  out.bound_dZ.assign(T + 1, std::vector<double>(N, nan));
  out.applicable.assign(T, false);
  out.actual_dP.assign(T, 0.0);
  out.actual_dS.assign(T, 0.0);
  out.actual_dK.assign(T, 0.0);
  out.actual_dZ.assign(T + 1, std::vector<double>(N, 0.0));

  for (int i = 0; i < N; ++i) {
    out.bound_dZ[T][i] = out.epsilon;
    out.actual_dZ[T][i] = spectral_norm(fbp.Z[T][i] - fb.Z[T][i]);
  }
  for (int k = 0; k < T; ++k) {
    out.actual_dP[k] = spectral_norm(fbp.P[k] - fb.P[k]);
    out.actual_dS[k] = spectral_norm(fbp.S[k] - fb.S[k]);
    out.actual_dK[k] = spectral_norm(fbp.K[k] - fb.K[k]);
    for (int i = 0; i < N; ++i) out.actual_dZ[k][i] = spectral_norm(fbp.Z[k][i] - fb.Z[k][i]);
  }

  const double norm_A = spectral_norm(sys.A);
  const double norm_B = spectral_norm(sys.B);
  const double sqrt_N = std::sqrt(static_cast<double>(N));

  bool broken = false;
  for (int k = T - 1; k >= 0; --k) {
    if (broken) continue;  // precondition already failed at a later-in-recursion stage

    double dz_max = 0.0;
    for (int i = 0; i < N; ++i) dz_max = std::max(dz_max, out.bound_dZ[k + 1][i]);
    const double bP = sqrt_N * norm_B * norm_B * dz_max;
    const double bS = sqrt_N * norm_A * norm_B * dz_max;
    out.bound_dP[k] = bP;
    out.bound_dS[k] = bS;

    const double pinv_norm = 1.0 / smallest_singular_value(fb.P[k]);
    if (!(bP * pinv_norm < 1.0)) {
      broken = true;  // bound_dK and earlier stages stay NaN / inapplicable
      continue;
    }

    const double norm_K = spectral_norm(fb.K[k]);
    const double bK = pinv_norm / (1.0 - pinv_norm * bP) * (norm_K * bP + bS);
    out.bound_dK[k] = bK;
    out.applicable[k] = true;

    const double norm_F = spectral_norm(sys.A - sys.B * fb.K[k]);
    for (int i = 0; i < N; ++i) {
      const double norm_Ki = spectral_norm(game.control_rows(fb.K[k], i));
      const double norm_Z = spectral_norm(fb.Z[k + 1][i]);
      const double norm_R = spectral_norm(game.R[i]);
      const double dz_next = out.bound_dZ[k + 1][i];
      out.bound_dZ[k][i] = (norm_Ki * norm_Ki + 1.0) * out.epsilon +
                           norm_B * (norm_Z + dz_next) * (2.0 * norm_F + norm_B * bK) * bK +
                           norm_F * norm_F * dz_next +
                           (norm_R + out.epsilon) * (2.0 * norm_Ki + bK) * bK;
    }
  }
  return out;
}

// Bound on the per-stage feedback-to-open-loop gain gap ||L_t - K_t||_2 of a
// single game: apply the perturbation bound with the auxiliary game as the
// perturbed one. The auxiliary game's feedback gains equal the open-loop
// gains of the base game, so the actual_dK series attached here is exactly
// that gap.
inline GapBoundSeries bound_fbne_olne_gap(const LQGame& game) {
  return compute_bound(game, build_auxiliary(game));
}

// Per-stage bound vs. actual gain deviation, one CSV row per stage.
inline GapBoundSeries tightness_experiment(const LQGame& game, const LQGame& perturbed,
                                           const std::string& out_path) {
  const GapBoundSeries series = compute_bound(game, perturbed);
  std::string csv = "t,bound_dK,actual_dK,applicable\n";
  for (int k = 0; k < series.horizon; ++k) {
    csv += std::to_string(k + 1);
    csv += ',';
    csv += format_double(series.bound_dK[k]);
    csv += ',';
    csv += format_double(series.actual_dK[k]);
    csv += ',';
    csv += series.applicable[k] ? '1' : '0';
    csv += '\n';
  }
  write_file_atomic(out_path, csv);
  return series;
}

}  // namespace lqgap
