#include <iostream>

#include "CLI11.hpp"
#include "gfchain/cli.hpp"

int main(int argc, char** argv) {
  using gfchain::cli::RunConfig;
  RunConfig cfg;

  CLI::App app{"Finite-volume growth-fragmentation chain: kernels, invariant measures, sampling, studies"};
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.add_option("command", cfg.command, "kernel | invariant | simulate | refine | check")
      ->required()
      ->check(CLI::IsMember(gfchain::cli::commands()));
  app.add_option("--model", cfg.model, "example1..example4 or table")->capture_default_str();
  app.add_option("--table", cfg.table, "CSV with columns x,s at the grid points");
  app.add_option("--a", cfg.a, "range a")->capture_default_str();
  app.add_option("--nx", cfg.n_x, "even cell count")->capture_default_str();
  app.add_option("--tol", cfg.tol, "power-iteration l1 tolerance")->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "power-iteration cap")->capture_default_str();
  app.add_option("--seed", cfg.seed, "trajectory seed")->capture_default_str();
  app.add_option("--steps", cfg.n_steps, "trajectory length")->capture_default_str();
  app.add_option("--init", cfg.init, "initial size of the trajectory")->capture_default_str();
  app.add_option("--levels", cfg.levels, "refinement levels")->capture_default_str();
  app.add_option("--h-max", cfg.h_max, "coarsest mesh of the refinement study")->capture_default_str();
  app.add_option("--out", cfg.out, "output CSV path");
  app.add_option("--growth", cfg.growth, "growth constants m,M,alpha,X0")->delimiter(',')->expected(4);
  app.add_option("--drift-x", cfg.drift_x, "drift-check sizes")->delimiter(',');
  app.add_option("--tail-x", cfg.tail_x, "starting size of the tail check")->capture_default_str();
  app.add_option("--tail-xprime", cfg.tail_xprime, "tail-check cut points")->delimiter(',');
  app.add_option("--quad-step", cfg.quad_step, "midpoint step of the continuous oracle")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: code=" << gfchain::cli::kInvalidConfig << " kind=config message="
              << gfchain::cli::one_line(e.what()) << '\n';
    return gfchain::cli::kInvalidConfig;
  }
  return gfchain::cli::run(cfg, std::cout, std::cerr);
}
