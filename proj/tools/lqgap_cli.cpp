// Command-line front end: equilibrium solves, identity verification, gap
// bounds and the Monte Carlo studies, with deterministic machine-readable
// output. Exit codes: 0 success, 1 usage/validation failure, 2 solver
// failure (the failing stage is reported on stderr).

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqgap/lqgap.hpp"

namespace {

using nlohmann::ordered_json;

// Residual gate for `verify`'s exit code: the identities hold exactly in
// exact arithmetic, so anything beyond solve round-off is a failure.
constexpr double kLemmaGate = 1e-9;

lqgap::LQGame load_validated(const std::string& path) {
  lqgap::LQGame game = lqgap::load_game(path);
  const lqgap::ValidationReport report = lqgap::validate(game);
  if (!report.ok()) {
    std::string msg = path + " failed validation:";
    for (const auto& v : report.violations) msg += "\n  - " + v;
    throw lqgap::ValidationError(msg);
  }
  return game;
}

Eigen::VectorXd parse_x1(const std::string& text, int n) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw lqgap::ValidationError("cannot parse x1 component \"" + item + "\"");
    }
  }
  if (static_cast<int>(values.size()) != n)
    throw lqgap::ValidationError("x1 has " + std::to_string(values.size()) +
                                 " components, expected " + std::to_string(n));
  Eigen::VectorXd x1(n);
  for (int i = 0; i < n; ++i) x1(i) = values[i];
  return x1;
}

void emit_json(const ordered_json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    lqgap::write_file_atomic(out_path, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon LQ dynamic games: feedback vs. open-loop Nash equilibria"};
  app.require_subcommand(1);

  std::string game_path, perturbed_path, out_path, x1_text, mode = "fixed", vary = "A";
  std::uint64_t seed = 0;
  long long samples = 10000;
  int threads = 1, horizon = 10, per_tier = 1000;
  double coincidence_tol = lqgap::kCoincidenceTol;
  double singularity_tol = lqgap::kSingularityLimit;
  double radius = 0.05;

  auto* solve_fbne_cmd = app.add_subcommand("solve-fbne", "Feedback Nash equilibrium gains");
  solve_fbne_cmd->add_option("--game", game_path, "game JSON file")->required();
  solve_fbne_cmd->add_option("--out", out_path, "output JSON path (stdout if omitted)");
  solve_fbne_cmd->add_option("--singularity-tol", singularity_tol,
                             "stage-matrix condition limit");

  auto* solve_olne_cmd = app.add_subcommand("solve-olne", "Open-loop Nash equilibrium gains");
  solve_olne_cmd->add_option("--game", game_path, "game JSON file")->required();
  solve_olne_cmd->add_option("--out", out_path, "output JSON path (stdout if omitted)");
  solve_olne_cmd->add_option("--singularity-tol", singularity_tol,
                             "stage-matrix condition limit");

  auto* compare_cmd =
      app.add_subcommand("compare", "Feedback vs. open-loop trajectories from one x1");
  compare_cmd->add_option("--game", game_path, "game JSON file")->required();
  compare_cmd->add_option("--x1", x1_text, "initial state, comma separated (default all ones)");
  compare_cmd->add_option("--out", out_path, "output CSV path")->required();

  auto* verify_cmd =
      app.add_subcommand("verify", "Auxiliary-game identity residuals (JSON on stdout)");
  verify_cmd->add_option("--game", game_path, "game JSON file")->required();
  verify_cmd->add_option("--coincidence-tol", coincidence_tol,
                         "gain-coincidence tolerance for the report's `coincide` field");
  verify_cmd->add_option("--singularity-tol", singularity_tol, "stage-matrix condition limit");

  auto* bound_cmd = app.add_subcommand(
      "bound", "Per-stage gain-deviation bound vs. actual (CSV: t,bound_dK,actual_dK,applicable)");
  bound_cmd->add_option("--game", game_path, "game JSON file")->required();
  bound_cmd->add_option("--perturbed", perturbed_path,
                        "perturbed game JSON file (defaults to the auxiliary game)");
  bound_cmd->add_option("--out", out_path, "output CSV path")->required();

  auto* mc_cmd = app.add_subcommand("montecarlo", "Sampled-game study of the auxiliary gap");
  mc_cmd->add_option("--samples", samples, "number of samples")->required();
  mc_cmd->add_option("--seed", seed, "master seed")->required();
  mc_cmd->add_option("--mode", mode, "sampling mode")
      ->check(CLI::IsMember({"fixed", "random"}))
      ->required();
  mc_cmd->add_option("--out", out_path, "output CSV path")->required();
  mc_cmd->add_option("--threads", threads, "worker cap (output is identical for any value)");
  mc_cmd->add_option("--horizon", horizon, "game horizon T");

  auto* hetero_cmd =
      app.add_subcommand("hetero", "Two-cohort study split by dynamics heterogeneity");
  hetero_cmd->add_option("--vary", vary, "which dynamics matrix to split on")
      ->check(CLI::IsMember({"A", "B"}))
      ->required();
  hetero_cmd->add_option("--per-tier", per_tier, "records per cohort");
  hetero_cmd->add_option("--seed", seed, "master seed")->required();
  hetero_cmd->add_option("--out", out_path, "output CSV path")->required();
  hetero_cmd->add_option("--threads", threads, "worker cap");

  auto* dense_cmd =
      app.add_subcommand("dense", "Dense sampling of state costs around a base game");
  dense_cmd->add_option("--game", game_path, "base game JSON file")->required();
  dense_cmd->add_option("--radius", radius, "perturbation entry radius");
  dense_cmd->add_option("--samples", samples, "number of samples");
  dense_cmd->add_option("--seed", seed, "master seed")->required();
  dense_cmd->add_option("--out", out_path, "output CSV path")->required();
  dense_cmd->add_option("--threads", threads, "worker cap");

  auto* example1_cmd = app.add_subcommand(
      "example1", "Bound-tightness experiment on the built-in scalar game pair");
  example1_cmd->add_option("--out", out_path, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*solve_fbne_cmd) {
      const lqgap::LQGame game = load_validated(game_path);
      const lqgap::FeedbackSolution sol =
          lqgap::solve_fbne(game, lqgap::assemble_stacked(game), singularity_tol);
      emit_json(lqgap::feedback_solution_json(sol), out_path);
    } else if (*solve_olne_cmd) {
      const lqgap::LQGame game = load_validated(game_path);
      const lqgap::OpenLoopSolution sol =
          lqgap::solve_olne(game, lqgap::assemble_stacked(game), singularity_tol);
      emit_json(lqgap::openloop_solution_json(sol), out_path);
    } else if (*compare_cmd) {
      const lqgap::LQGame game = load_validated(game_path);
      const Eigen::VectorXd x1 = x1_text.empty()
                                     ? Eigen::VectorXd::Ones(game.state_dim()).eval()
                                     : parse_x1(x1_text, game.state_dim());
      const lqgap::TrajectoryComparison cmp = lqgap::compare_trajectories(game, x1);
      lqgap::write_file_atomic(out_path, lqgap::trajectory_csv(cmp));
    } else if (*verify_cmd) {
      const lqgap::LQGame game = load_validated(game_path);
      const lqgap::AuxiliaryReport rep =
          lqgap::verify_auxiliary_identities(game, coincidence_tol, singularity_tol);
      ordered_json j;
      j["lemma1_residual"] = rep.lemma1_residual;
      j["remark3_residual"] = rep.remark3_residual;
      j["lemma2_gain_residual"] = rep.lemma2_gain_residual;
      j["lemma2_dynamics_residual"] = rep.lemma2_dynamics_residual;
      j["lemma3_residual"] = rep.lemma3_residual;
      j["deltaK_series"] = rep.deltaK_series;
      j["coincide"] = rep.coincide;
      std::cout << j.dump(2) << "\n";
      const bool pass = rep.lemma1_residual <= kLemmaGate && rep.remark3_residual <= kLemmaGate &&
                        rep.lemma2_gain_residual <= kLemmaGate &&
                        rep.lemma2_dynamics_residual <= kLemmaGate &&
                        rep.lemma3_residual <= kLemmaGate;
      if (!pass) {
        std::cerr << "identity residuals exceed " << kLemmaGate << "\n";
        return 1;
      }
    } else if (*bound_cmd) {
      const lqgap::LQGame game = load_validated(game_path);
      const lqgap::LQGame perturbed =
          perturbed_path.empty() ? lqgap::build_auxiliary(game) : load_validated(perturbed_path);
      lqgap::tightness_experiment(game, perturbed, out_path);
    } else if (*mc_cmd) {
      lqgap::SamplerConfig config;
      config.mode = mode == "fixed" ? lqgap::SamplerMode::kFixedDynamics
                                    : lqgap::SamplerMode::kRandomDynamics;
      config.sample_count = samples;
      config.master_seed = seed;
      config.horizon = horizon;
      const auto records = lqgap::run_monte_carlo(config, threads);
      lqgap::write_file_atomic(out_path, lqgap::monte_carlo_csv(records, config.horizon));
    } else if (*hetero_cmd) {
      const auto study = lqgap::run_heterogeneity_study(vary[0], per_tier, seed, threads);
      lqgap::write_file_atomic(out_path, lqgap::heterogeneity_csv(study, 10));
    } else if (*dense_cmd) {
      const lqgap::LQGame base = load_validated(game_path);
      const auto records = lqgap::run_dense_sampling(base, radius, samples, seed, threads);
      lqgap::write_file_atomic(out_path, lqgap::monte_carlo_csv(records, base.horizon));
    } else if (*example1_cmd) {
      lqgap::tightness_experiment(lqgap::fixtures::example1_base(),
                                  lqgap::fixtures::example1_perturbed(), out_path);
    }
  } catch (const lqgap::SingularStageMatrix& e) {
    std::cerr << "solver failure at stage " << e.stage << ": " << e.what() << "\n";
    return 2;
  } catch (const lqgap::SingularSystem& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const lqgap::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const lqgap::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
