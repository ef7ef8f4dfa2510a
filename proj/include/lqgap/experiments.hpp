#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "lqgap/auxiliary.hpp"
#include "lqgap/csv.hpp"
#include "lqgap/feedback.hpp"
#include "lqgap/game.hpp"
#include "lqgap/open_loop.hpp"
#include "lqgap/sampler.hpp"

namespace lqgap {

// Work items are independent and slot-indexed, so results do not depend on
// the worker count or interleaving.
inline void parallel_for(long long count, int threads,
                         const std::function<void(long long)>& body) {
  if (count <= 0) return;
  const int workers =
      static_cast<int>(std::max<long long>(1, std::min<long long>(threads, count)));
  if (workers == 1) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      long long i;
      while (!failed.load(std::memory_order_relaxed) &&
             (i = next.fetch_add(1)) < count) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// One Monte Carlo sample: the sampled game's auxiliary-gap data plus
// dynamics-heterogeneity metrics. delta_Q = max_i ||Q~^i - Q^i||_2 and
// delta_K[k] = ||K~_{k+1} - K_{k+1}||_2 against the auxiliary game.
struct MonteCarloRecord {
  long long sample_index = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" | "rejected:<reason>" | "solver_failed:stage=<t>"
  double delta_Q = std::numeric_limits<double>::quiet_NaN();
  double het_A = std::numeric_limits<double>::quiet_NaN();
  double het_B = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> delta_K;  // T entries when status == "ok", else empty
};

namespace detail {

// max_i ||X_i - avg(X)||_2; NaN when the agents' shapes differ.
inline double heterogeneity(const std::vector<Eigen::MatrixXd>& mats) {
  for (const auto& M : mats)
    if (M.rows() != mats[0].rows() || M.cols() != mats[0].cols())
      return std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(mats[0].rows(), mats[0].cols());
  for (const auto& M : mats) avg += M;
  avg /= static_cast<double>(mats.size());
  double h = 0.0;
  for (const auto& M : mats) h = std::max(h, spectral_norm(M - avg));
  return h;
}

inline MonteCarloRecord monte_carlo_record(const SamplerConfig& config, long long index) {
  MonteCarloRecord rec;
  rec.sample_index = index;
  const SampleResult sample = sample_game(config, index);
  rec.seed = sample.seed;
  if (!sample.game) {
    rec.status = "rejected:" + sample.rejection;
    return rec;
  }
  const LQGame& game = *sample.game;
  std::vector<Eigen::MatrixXd> As, Bs;
  for (const auto& a : game.agents) {
    As.push_back(a.A);
    Bs.push_back(a.B);
  }
  rec.het_A = heterogeneity(As);
  rec.het_B = heterogeneity(Bs);
  try {
    const StackedSystem sys = assemble_stacked(game);
    const LQGame aux = build_auxiliary(game);
    const FeedbackSolution fb = solve_fbne(game, sys);
    const FeedbackSolution fb_aux = solve_fbne(aux, sys);
    rec.delta_Q = 0.0;
    for (int i = 0; i < game.num_agents(); ++i)
      rec.delta_Q = std::max(rec.delta_Q, spectral_norm(aux.Q[i] - game.Q[i]));
    rec.delta_K.resize(game.horizon);
    for (int k = 0; k < game.horizon; ++k)
      rec.delta_K[k] = spectral_norm(fb_aux.K[k] - fb.K[k]);
  } catch (const SingularStageMatrix& e) {
    rec.status = "solver_failed:stage=" + std::to_string(e.stage);
    rec.delta_K.clear();
  }
  return rec;
}

}  // namespace detail

// Records come back ordered by sample_index regardless of the worker count;
// failed samples are recorded, never dropped.
inline std::vector<MonteCarloRecord> run_monte_carlo(const SamplerConfig& config,
                                                     int threads = 1) {
  if (config.sample_count < 1)
    throw ValidationError("sample_count must be >= 1, got " +
                          std::to_string(config.sample_count));
  std::vector<MonteCarloRecord> records(config.sample_count);
  parallel_for(config.sample_count, threads,
               [&](long long i) { records[i] = detail::monte_carlo_record(config, i); });
  return records;
}

inline void append_record_row(std::string& csv, const MonteCarloRecord& rec, int horizon) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  csv += std::to_string(rec.sample_index);
  csv += ',';
  csv += std::to_string(rec.seed);
  csv += ',';
  csv += rec.status;
  csv += ',';
  csv += format_double(rec.delta_Q);
  csv += ',';
  csv += format_double(rec.het_A);
  csv += ',';
  csv += format_double(rec.het_B);
  for (int k = 0; k < horizon; ++k) {
    csv += ',';
    csv += format_double(k < static_cast<int>(rec.delta_K.size()) ? rec.delta_K[k] : nan);
  }
  csv += '\n';
}

inline std::string monte_carlo_csv(const std::vector<MonteCarloRecord>& records, int horizon) {
  std::string csv = "sample_index,seed,status,delta_Q,het_A,het_B";
  for (int k = 0; k < horizon; ++k) csv += ",delta_K_t" + std::to_string(k + 1);
  csv += '\n';
  for (const auto& rec : records) append_record_row(csv, rec, horizon);
  return csv;
}

// Feedback vs. open-loop trajectories from the same initial state, with the
// per-stage deviation as a percentage of the initial state:
// pct_t = 100 * ||x^fb_t - x^ol_t||_inf / ||x_1||_inf (pct_1 = 0 always).
struct TrajectoryComparison {
  Trajectory feedback;
  Trajectory open_loop;
  std::vector<double> pct;  // T+1 entries, index k holds stage t = k+1
};

inline TrajectoryComparison compare_trajectories(const LQGame& game, const Eigen::VectorXd& x1) {
  const double x1_norm = x1.lpNorm<Eigen::Infinity>();
  if (!(x1_norm > 0.0))
    throw ValidationError("x1 must be nonzero (the percentage normalization is undefined)");
  const StackedSystem sys = assemble_stacked(game);
  TrajectoryComparison cmp;
  cmp.feedback = rollout_feedback(solve_fbne(game, sys), sys, x1);
  cmp.open_loop = rollout_openloop(solve_olne(game, sys), sys, x1);
  cmp.pct.assign(game.horizon + 1, 0.0);
  for (int k = 1; k <= game.horizon; ++k)
    cmp.pct[k] = 100.0 * (cmp.feedback.x[k] - cmp.open_loop.x[k]).lpNorm<Eigen::Infinity>() /
                 x1_norm;
  return cmp;
}

inline std::string trajectory_csv(const TrajectoryComparison& cmp) {
  const int n = static_cast<int>(cmp.feedback.x[0].size());
  std::string csv = "t";
  for (int j = 1; j <= n; ++j) csv += ",x_fb_" + std::to_string(j);
  for (int j = 1; j <= n; ++j) csv += ",x_ol_" + std::to_string(j);
  csv += ",pct_diff\n";
  for (std::size_t k = 0; k < cmp.feedback.x.size(); ++k) {
    csv += std::to_string(k + 1);
    for (int j = 0; j < n; ++j) csv += "," + format_double(cmp.feedback.x[k](j));
    for (int j = 0; j < n; ++j) csv += "," + format_double(cmp.open_loop.x[k](j));
    csv += "," + format_double(cmp.pct[k]);
    csv += '\n';
  }
  return csv;
}

// Two cohorts of randomly sampled games split by dynamics heterogeneity
// (max_i ||A_i - avg(A)||_2, or the B analog): a pilot run pins the
// median-based threshold, then rejection sampling fills a strictly-above tier
// and an at-or-below tier.
struct HeterogeneityStudy {
  double threshold = 0.0;
  std::vector<MonteCarloRecord> high;
  std::vector<MonteCarloRecord> low;
};

inline HeterogeneityStudy run_heterogeneity_study(char vary, int per_tier,
                                                  std::uint64_t master_seed, int threads = 1,
                                                  int pilot_count = 1000) {
  if (vary != 'A' && vary != 'B') throw ValidationError("vary must be 'A' or 'B'");
  if (per_tier < 1) throw ValidationError("per_tier must be >= 1");

  SamplerConfig config;
  config.mode = SamplerMode::kRandomDynamics;
  config.master_seed = master_seed;

  // Pilot: dynamics-only metric distribution (indices 0 .. pilot_count-1).
  std::vector<double> metrics(pilot_count,
                              std::numeric_limits<double>::quiet_NaN());
  parallel_for(pilot_count, threads, [&](long long i) {
    const SampleResult s = sample_game(config, i);
    if (!s.game) return;
    std::vector<Eigen::MatrixXd> mats;
    for (const auto& a : s.game->agents) mats.push_back(vary == 'A' ? a.A : a.B);
    metrics[i] = detail::heterogeneity(mats);
  });
  std::vector<double> valid;
  for (double v : metrics)
    if (v == v) valid.push_back(v);
  if (valid.empty()) throw ValidationError("heterogeneity pilot produced no valid samples");
  std::sort(valid.begin(), valid.end());
  HeterogeneityStudy study;
  study.threshold = valid[valid.size() / 2];

  // Fill tiers in deterministic chunks: records are built in parallel, then
  // assigned sequentially in index order, so the outcome is thread-count
  // independent.
  const long long budget = 200LL * per_tier + 10000;
  const int chunk = std::max(threads, 1) * 64;
  long long index = pilot_count;
  while (static_cast<int>(study.high.size()) < per_tier ||
         static_cast<int>(study.low.size()) < per_tier) {
    if (index - pilot_count > budget)
      throw ValidationError("heterogeneity tier rejection budget exhausted");
    std::vector<MonteCarloRecord> batch(chunk);
    parallel_for(chunk, threads, [&](long long j) {
      batch[j] = detail::monte_carlo_record(config, index + j);
    });
    for (const auto& rec : batch) {
      if (rec.status != "ok") continue;
      const double metric = vary == 'A' ? rec.het_A : rec.het_B;
      if (metric > study.threshold) {
        if (static_cast<int>(study.high.size()) < per_tier) study.high.push_back(rec);
      } else if (static_cast<int>(study.low.size()) < per_tier) {
        study.low.push_back(rec);
      }
    }
    index += chunk;
  }
  return study;
}

inline std::string heterogeneity_csv(const HeterogeneityStudy& study, int horizon) {
  std::string csv = "tier,sample_index,seed,status,delta_Q,het_A,het_B";
  for (int k = 0; k < horizon; ++k) csv += ",delta_K_t" + std::to_string(k + 1);
  csv += '\n';
  for (const auto& rec : study.high) {
    csv += "high,";
    std::string row;
    append_record_row(row, rec, horizon);
    csv += row;
  }
  for (const auto& rec : study.low) {
    csv += "low,";
    std::string row;
    append_record_row(row, rec, horizon);
    csv += row;
  }
  return csv;
}

// Dense Monte Carlo in a radius-ball of symmetric perturbations around a base
// game's state costs; same record schema as run_monte_carlo.
inline std::vector<MonteCarloRecord> run_dense_sampling(const LQGame& base, double radius,
                                                        long long count,
                                                        std::uint64_t master_seed,
                                                        int threads = 1) {
  SamplerConfig config;
  config.mode = SamplerMode::kDenseAround;
  config.base = base;
  config.radius = radius;
  config.sample_count = count;
  config.master_seed = master_seed;
  return run_monte_carlo(config, threads);
}

}  // namespace lqgap
