// grfl: run | verify | gauge-fix | spectrum

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "grfl/cli.hpp"
#include "grfl/error.hpp"
#include "grfl/functional.hpp"

int main(int argc, char** argv) {
  using namespace grfl;
  CLI::App app{"Generalized Ricci flow lab on the periodic 3-torus"};
  app.require_subcommand(1);

  std::string config, suite = "all", in_path, out_path, backend = "spectral";
  double tol = 1e-10;

  auto* run_cmd = app.add_subcommand("run", "integrate a configured flow, write CSV, checkpoint and summary");
  run_cmd->add_option("config", config, "key=value configuration file")->required();

  auto* verify_cmd = app.add_subcommand("verify", "run analysis suites on the configured initial state");
  verify_cmd->add_option("config", config, "key=value configuration file")->required();
  verify_cmd->add_option("--suite", suite, "symbol, critical, evolution, structural, ibp or all")
      ->check(CLI::IsMember({"symbol", "critical", "evolution", "structural", "ibp", "all"}));

  auto* gauge_cmd = app.add_subcommand("gauge-fix", "project A and B of a checkpoint onto the Coulomb gauge");
  gauge_cmd->add_option("in", in_path, "input checkpoint")->required();
  gauge_cmd->add_option("out", out_path, "output checkpoint")->required();

  auto* spec_cmd = app.add_subcommand("spectrum", "print the lowest eigenvalue lambda of a checkpointed state");
  spec_cmd->add_option("checkpoint", in_path, "checkpoint")->required();
  spec_cmd->add_option("--tol", tol, "eigen-residual tolerance");

  for (auto* c : {gauge_cmd, spec_cmd})
    c->add_option("--backend", backend, "derivative backend")->check(CLI::IsMember({"spectral", "central4"}));

  CLI11_PARSE(app, argc, argv);
  const Backend be = backend == "central4" ? Backend::central4 : Backend::spectral;

  try {
    if (*run_cmd) return cmd_run(load_config(config), std::cout);
    if (*verify_cmd) return cmd_verify(load_config(config), parse_suite(suite), std::cout);
    if (*gauge_cmd) {
      FlowState s = checkpoint_read(in_path, be);
      project_gauge(s);
      checkpoint_write(s, out_path);
      return exit_ok;
    }
    if (*spec_cmd) {
      const SpectralResult r = lambda_eigen(checkpoint_read(in_path, be), tol);
      std::printf("lambda=%.17g\niterations=%d\nresidual=%.3g\n", r.lambda, r.iterations, r.residual);
      return exit_ok;
    }
  } catch (const StepRejected& e) {
    std::cerr << "grfl: " << e.what() << '\n';
    return exit_rejected;
  } catch (const ParseError& e) {
    std::cerr << "grfl: config " << e.what() << '\n';
    return exit_config;
  } catch (const ValidationError& e) {
    std::cerr << "grfl: config key " << e.what() << '\n';
    return exit_config;
  } catch (const NonSPDMetric& e) {
    std::cerr << "grfl: initial data: " << e.what() << '\n';
    return exit_config;
  } catch (const FormatError& e) {
    std::cerr << "grfl: " << e.what() << '\n';
    return exit_io;
  } catch (const TruncatedFile& e) {
    std::cerr << "grfl: " << e.what() << '\n';
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "grfl: " << e.what() << '\n';
    return exit_io;
  }
  return exit_ok;
}
