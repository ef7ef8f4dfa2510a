#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lqgap/game.hpp"
#include "lqgap/linalg.hpp"
#include "lqgap/rng.hpp"

namespace lqgap {

enum class SamplerMode {
  kFixedDynamics,   // A^i = [[0,1],[-1,-1]], B^i = [[0],[1]]; only Q varies
  kRandomDynamics,  // A, B entries uniform in [0,1]
  kDenseAround,     // base game's dynamics; Q = base Q + symmetric perturbation
};

// Q matrices are drawn symmetric with diagonal entries uniform in [1,2] and
// off-diagonals uniform in [0,1.5], then rejected until positive
// semi-definite. The ranges bracket the cost-matrix regime the studies target
// (diagonals around 0.7-2, off-diagonals up to ~1.5).
struct SamplerConfig {
  int n_agents = 2;
  std::vector<int> state_dims = {2, 2};    // per agent
  std::vector<int> control_dims = {1, 1};  // per agent
  int horizon = 10;
  long long sample_count = 1;
  std::uint64_t master_seed = 0;
  SamplerMode mode = SamplerMode::kFixedDynamics;
  std::optional<LQGame> base;  // dense mode only
  double radius = 0.0;         // dense mode: perturbation entries in [-radius, radius]
  double q_diag_lo = 1.0, q_diag_hi = 2.0;
  double q_off_lo = 0.0, q_off_hi = 1.5;
  int max_retries = 100;
};

struct SampleResult {
  std::optional<LQGame> game;
  bool first_try_ok = true;  // every Q accepted without a PSD retry
  std::uint64_t seed = 0;    // the derived per-sample stream seed
  std::string rejection;     // nonempty iff the retry budget was exhausted
};

namespace detail {

// Upper triangle (row-major, diagonal included) drawn and mirrored; the
// traversal order is part of the determinism contract.
inline Eigen::MatrixXd sample_symmetric(SplitMix64& rng, int n, double diag_lo, double diag_hi,
                                        double off_lo, double off_hi) {
  Eigen::MatrixXd Q(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      const double v = (r == c) ? rng.uniform(diag_lo, diag_hi) : rng.uniform(off_lo, off_hi);
      Q(r, c) = v;
      Q(c, r) = v;
    }
  }
  return Q;
}

inline Eigen::MatrixXd sample_perturbation(SplitMix64& rng, int n, double radius) {
  Eigen::MatrixXd D(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      const double v = rng.uniform(-radius, radius);
      D(r, c) = v;
      D(c, r) = v;
    }
  }
  return D;
}

inline Eigen::MatrixXd fixed_A() {
  Eigen::MatrixXd A(2, 2);
  A << 0.0, 1.0, -1.0, -1.0;
  return A;
}

inline Eigen::MatrixXd fixed_B() {
  Eigen::MatrixXd B(2, 1);
  B << 0.0, 1.0;
  return B;
}

// Control costs held fixed across samples: R^1 = 3, R^2 = 2 (times identity),
// further agents 1.
inline Eigen::MatrixXd default_R(int agent, int m) {
  const double v = agent == 0 ? 3.0 : (agent == 1 ? 2.0 : 1.0);
  return v * Eigen::MatrixXd::Identity(m, m);
}

}  // namespace detail

// Pure function of (master_seed, index): the per-sample stream makes studies
// independent of scheduling. Rejection (PSD retry budget exhausted) is
// reported, not thrown; it is an expected outcome of the sampler.
inline SampleResult sample_game(const SamplerConfig& config, long long index) {
  if (config.mode == SamplerMode::kDenseAround) {
    if (!config.base) throw ValidationError("dense sampling requires a base game");
    if (config.radius < 0.0) throw ValidationError("dense sampling radius must be >= 0");
  }

  SampleResult result;
  result.seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(index));
  SplitMix64 rng(result.seed);

  const bool dense = config.mode == SamplerMode::kDenseAround;
  const int N = dense ? config.base->num_agents() : config.n_agents;

  LQGame game;
  game.horizon = dense ? config.base->horizon : config.horizon;
  game.agents.resize(N);
  if (config.mode == SamplerMode::kFixedDynamics) {
    for (int i = 0; i < N; ++i) game.agents[i] = {detail::fixed_A(), detail::fixed_B()};
  } else if (config.mode == SamplerMode::kRandomDynamics) {
    for (int i = 0; i < N; ++i) {
      const int ni = config.state_dims[i];
      const int mi = config.control_dims[i];
      Eigen::MatrixXd A(ni, ni), B(ni, mi);
      for (int r = 0; r < ni; ++r)
        for (int c = 0; c < ni; ++c) A(r, c) = rng.uniform(0.0, 1.0);
      for (int r = 0; r < ni; ++r)
        for (int c = 0; c < mi; ++c) B(r, c) = rng.uniform(0.0, 1.0);
      game.agents[i] = {std::move(A), std::move(B)};
    }
  } else {
    game.agents = config.base->agents;
  }

  const int n = game.state_dim();
  game.Q.reserve(N);
  for (int i = 0; i < N; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt < config.max_retries; ++attempt) {
      Eigen::MatrixXd Q =
          dense ? Eigen::MatrixXd(config.base->Q[i] +
                                  detail::sample_perturbation(rng, n, config.radius))
                : detail::sample_symmetric(rng, n, config.q_diag_lo, config.q_diag_hi,
                                           config.q_off_lo, config.q_off_hi);
      if (min_symmetric_eigenvalue(Q) >= kPsdSlack) {
        if (attempt > 0) result.first_try_ok = false;
        game.Q.push_back(std::move(Q));
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.first_try_ok = false;
      result.rejection = "q_psd_agent_" + std::to_string(i);
      return result;
    }
  }

  game.R.reserve(N);
  for (int i = 0; i < N; ++i)
    game.R.push_back(dense ? config.base->R[i]
                           : detail::default_R(i, game.agents[i].control_dim()));
  result.game = std::move(game);
  return result;
}

}  // namespace lqgap
