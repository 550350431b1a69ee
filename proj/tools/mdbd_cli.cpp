#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "mdbd/harness.hpp"

namespace {

void apply_env_out_dir(mdbd::RunConfig& cfg) {
  if (const char* dir = std::getenv("MDBD_OUT_DIR")) cfg.out_dir = dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed mirror-descent dynamics simulator"};
  app.require_subcommand(1);

  mdbd::RunConfig cfg;
  std::string config_path;
  std::string algorithm = "mdbd";
  std::string projection_mode = "fast";
  std::string scheme = "euler";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override)");
    cmd->add_option("--family", cfg.family, "secV | regression | file:<path>");
    cmd->add_option("--N", cfg.n_agents, "number of agents");
    cmd->add_option("--n", cfg.n, "per-agent dimension");
    cmd->add_option("--seed", cfg.seed, "instance seed");
    cmd->add_option("--l1-coef", cfg.l1_coef, "l1 coefficient c_i");
    cmd->add_option("--q", cfg.q, "equality rows");
    cmd->add_option("--out", cfg.out_dir, "output directory");
  };

  auto* run = app.add_subcommand("run", "integrate the dynamics, write artifacts");
  add_common(run);
  run->add_option("--step", cfg.step, "step size");
  run->add_option("--T", cfg.horizon, "horizon");
  run->add_option("--record-every", cfg.record_every, "record every k steps");
  run->add_option("--scheme", scheme, "euler | rk4");
  run->add_option("--algorithm", algorithm, "mdbd | projection");
  run->add_option("--projection-mode", projection_mode, "fast | generic-qp");
  run->add_flag("--oracle", cfg.run_oracle, "solve the reference saddle first");
  run->add_option("--oracle-tol", cfg.oracle_tol, "oracle KKT tolerance");

  auto* gen = app.add_subcommand("gen", "generate and write an instance only");
  add_common(gen);

  auto* bench = app.add_subcommand("bench", "per-step timing across dimensions");
  mdbd::BenchOptions bopts;
  bench->add_option("--dims", bopts.dims, "dimensions, ascending");
  bench->add_option("--N", bopts.n_agents, "number of agents");
  bench->add_option("--seed", bopts.seed, "instance seed");
  bench->add_option("--reps", bopts.repetitions, "timing repetitions");
  bench->add_flag("--to-threshold", bopts.to_threshold,
                  "also time wall clock to the optimal-error threshold");
  bench->add_option("--threshold", bopts.threshold, "optimal-error threshold");
  bench->add_option("--time-limit", bopts.time_limit,
                    "per-cell limit in seconds; exceeded cells print >LIMIT");
  bench->add_option("--out", bopts.out_path, "output CSV path");

  auto* verify = app.add_subcommand("verify", "re-check instance and saddle files");
  std::string instance_path, saddle_path;
  verify->add_option("instance", instance_path, "instance JSON")->required();
  verify->add_option("saddle", saddle_path, "saddle JSON (optional)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      // File supplies defaults; flags given on the command line win.
      mdbd::RunConfig merged = mdbd::config_from_json_file(config_path);
      auto* active = app.get_subcommands().front();
      auto overridden = [&](const std::string& flag) {
        return active->count(flag) > 0;
      };
      if (overridden("--family")) merged.family = cfg.family;
      if (overridden("--N")) merged.n_agents = cfg.n_agents;
      if (overridden("--n")) merged.n = cfg.n;
      if (overridden("--seed")) merged.seed = cfg.seed;
      if (overridden("--l1-coef")) merged.l1_coef = cfg.l1_coef;
      if (overridden("--q")) merged.q = cfg.q;
      if (overridden("--out")) merged.out_dir = cfg.out_dir;
      if (active == run) {
        if (overridden("--step")) merged.step = cfg.step;
        if (overridden("--T")) merged.horizon = cfg.horizon;
        if (overridden("--record-every")) merged.record_every = cfg.record_every;
        if (overridden("--oracle")) merged.run_oracle = cfg.run_oracle;
        if (overridden("--oracle-tol")) merged.oracle_tol = cfg.oracle_tol;
      }
      cfg = merged;
    }
    if (run->parsed() || gen->parsed()) {
      cfg.scheme = scheme == "rk4" ? mdbd::Scheme::RungeKutta4
                                   : mdbd::Scheme::ExplicitEuler;
      cfg.algorithm = algorithm == "projection"
                          ? mdbd::Algorithm::ProjectionBaseline
                          : mdbd::Algorithm::Mdbd;
      cfg.projection_mode = projection_mode == "generic-qp"
                                ? mdbd::ProjectionMode::GenericQp
                                : mdbd::ProjectionMode::Fast;
      apply_env_out_dir(cfg);
    }

    if (gen->parsed()) {
      std::cout << mdbd::generate_artifact(cfg) << "\n";
      return 0;
    }
    if (run->parsed()) {
      mdbd::RunResult res = mdbd::run_experiment(cfg);
      std::cout << "summary: " << res.summary_path << "\n";
      if (res.diverged) {
        std::cerr << "DIVERGED (step size too large?)\n";
        return res.exit_code;
      }
      return 0;
    }
    if (bench->parsed()) {
      auto cells = mdbd::run_bench(bopts);
      mdbd::write_bench_csv(bopts.out_path, cells);
      std::cout << bopts.out_path << "\n";
      return 0;
    }
    if (verify->parsed()) {
      auto checks = mdbd::verify_artifacts(instance_path, saddle_path);
      bool all_pass = true;
      for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
        if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
        std::cout << "\n";
        all_pass = all_pass && c.pass;
      }
      return all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
