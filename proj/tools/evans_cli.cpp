// evans_cli: evaluate D(lambda), convergence studies, lambda sweeps,
// predicted-vs-measured errors and gnuplot scripts.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evans/cli.hpp"

namespace {

using evans::cli::RunConfig;

struct Flags {
  std::vector<std::string> lambdas;
  std::string sweep;
  std::string method = "magnus4";
};

void add_model_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--model", cfg.model.name, "nagumo | constant | bump | profile")->capture_default_str();
  sub->add_option("--a", cfg.model.a, "Nagumo threshold parameter")->capture_default_str();
  sub->add_option("--q", cfg.model.q, "constant f'(U) of the constant and bump models")->capture_default_str();
  sub->add_option("--c", cfg.model.c, "wave speed (constant, bump, profile)")->capture_default_str();
  sub->add_option("--amplitude", cfg.model.amplitude, "bump amplitude")->capture_default_str();
  sub->add_option("--width", cfg.model.width, "bump width")->capture_default_str();
  sub->add_option("--profile", cfg.model.profile_path, "file of (xi, f'(U(xi))) samples");
}

void add_run_flags(CLI::App* sub, RunConfig& cfg, Flags& flags) {
  add_model_flags(sub, cfg);
  sub->add_option("--lambda", flags.lambdas, "spectral parameter: re, re+imi or re,im (repeatable)")
      ->allow_extra_args(false);
  sub->add_option("--lambda-sweep", flags.sweep, "geometric sweep start,factor,count");
  sub->add_option("--method", flags.method, "midpoint | magnus4 | gl4")->capture_default_str();
  sub->add_option("--L", cfg.L, "half-length of the truncated domain")->capture_default_str();
  sub->add_option("--N", cfg.N, "steps per half-line");
  sub->add_option("--h", cfg.h, "step size (repeatable)")->allow_extra_args(false);
  sub->add_option("--output,-o", cfg.output, "write CSV here instead of stdout");
  sub->add_option("--jobs,-j", cfg.jobs, "worker threads (default: number of processors)");
}

int finish(RunConfig& cfg, const Flags& flags) {
  try {
    for (const auto& l : flags.lambdas) cfg.lambdas.push_back(evans::cli::parse_lambda(l));
    if (!flags.sweep.empty()) cfg.sweep = evans::cli::parse_sweep(flags.sweep);
    const auto m = evans::parse_method(flags.method);
    if (!m) throw evans::DomainError("unknown method '" + flags.method + "' (midpoint, magnus4, gl4)");
    cfg.method = *m;
  } catch (const evans::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return evans::cli::kExitConfig;
  }
  return evans::cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evans function of scalar reaction-diffusion fronts by two-sided shooting"};
  app.require_subcommand(1);
  // "--h" is the step size, so help is long-form only (inherited by subcommands).
  app.set_help_flag("--help", "print this help and exit");

  RunConfig cfg;
  Flags flags;
  auto* evaluate = app.add_subcommand("evaluate", "D(lambda) for each lambda");
  auto* converge = app.add_subcommand("converge", "|E_D| against h with a fitted order");
  auto* sweep = app.add_subcommand("sweep", "|E_D| and asymptotic residual against |lambda|");
  auto* predict = app.add_subcommand("predict", "measured against predicted E_D");
  auto* reference = app.add_subcommand("reference", "converged reference values by step halving");
  for (auto* sub : {evaluate, converge, sweep, predict, reference}) add_run_flags(sub, cfg, flags);

  auto* plotscript = app.add_subcommand("plotscript", "gnuplot script for a CSV written by this tool");
  plotscript->add_option("csv", cfg.csv_path, "CSV file")->required();
  plotscript->add_option("--output,-o", cfg.output, "write the script here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return evans::cli::kExitConfig;
  }

  if (!plotscript->parsed()) {
    if (const int rc = finish(cfg, flags); rc != evans::cli::kExitOk) return rc;
  }

  std::ostringstream out;
  int rc = evans::cli::kExitOk;
  if (evaluate->parsed()) rc = evans::cli::cmd_evaluate(cfg, out, std::cerr);
  if (converge->parsed()) rc = evans::cli::cmd_converge(cfg, out, std::cerr);
  if (sweep->parsed()) rc = evans::cli::cmd_sweep_lambda(cfg, out, std::cerr);
  if (predict->parsed()) rc = evans::cli::cmd_predict(cfg, out, std::cerr);
  if (reference->parsed()) rc = evans::cli::cmd_reference(cfg, out, std::cerr);
  if (plotscript->parsed()) rc = evans::cli::cmd_plotscript(cfg, out, std::cerr);
  if (rc != evans::cli::kExitOk) return rc;

  if (cfg.output.empty()) {
    std::cout << out.str();
    return std::cout.good() ? rc : evans::cli::kExitConfig;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  file << out.str();
  if (!file) {
    std::cerr << "error: cannot write '" << cfg.output << "'\n";
    return evans::cli::kExitConfig;
  }
  return rc;
}
