#include <CLI11.hpp>

#include <cstdint>
#include <string>

#include "tergm/runner.hpp"
#include "tergm/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Batch toolkit for longitudinal conflict-network models"};
  app.set_version_flag("--version", tergm::kVersion);
  app.require_subcommand(1);

  std::string config, out;
  long long seed = -1;
  int threads = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"fit", "bootstrapped pseudolikelihood fit -> coefficients.csv, fit.json"},
      {"gof", "simulated yearly envelopes at the fitted theta -> gof.csv"},
      {"predict", "out-of-sample tie probabilities and ROC/PR scores"},
      {"closure", "triadic-closure probability strata on both networks + KS test"},
      {"influence", "leave-one-dyad-out scan of a covariate coefficient"},
      {"synth", "known-theta synthetic panel -> nodes.csv, dyads.csv"},
      {"features", "yearly joint-regime and mixed-regime configuration counts"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->add_option("--config", config, "JSON run configuration file")->required();
    s->add_option("--out", out, "output directory (overrides the config)");
    s->add_option("--seed", seed, "RNG seed (overrides the config)")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  tergm::CliOverrides ov;
  if (!out.empty()) ov.out = out;
  if (seed >= 0) ov.seed = static_cast<std::uint64_t>(seed);
  ov.threads = threads;
  return tergm::run_cli(app.get_subcommands().front()->get_name(), config, ov);
}
