#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tergm/estimate.hpp"
#include "tergm/stats.hpp"

namespace tergm {

struct SamplerConfig {
  long long burn_in = -1;  // toggles; -1 = 10·C(n,2)
  long long thin = -1;     // toggles between retained draws; -1 = C(n,2)
  int n_draws = 1000;
  std::uint64_t seed = 0;
  enum class Init { empty, observed, random } init = Init::empty;
  double random_p = 0.5;
  // Non-empty: proposals cycle through this fixed dyad order instead of
  // uniform random picks.  Distributionally equivalent; exists so the
  // scan-order invariance property can be exercised.
  std::vector<std::pair<int, int>> scan_order;

  void validate(int n) const;
};

struct SamplerReport {
  double mean_density = 0.0;
  long long frozen_dyads = 0;  // missing-covariate dyads pinned at their initial state
  bool degenerate = false;     // mean density escaped [0.01, 0.99]
  std::string warning;
};

// Metropolis chain over single-dyad toggles with acceptance
// min(1, exp(±theta·delta)); sink runs once per retained draw while the
// slice's network holds that draw.
void run_chain(YearSlice slice, const ModelSpec& model, const std::vector<double>& theta,
               const SamplerConfig& config, const std::function<void(const YearSlice&)>& sink,
               SamplerReport* report = nullptr);

std::vector<NetworkState> sample_networks(const YearSlice& slice, const ModelSpec& model,
                                          const std::vector<double>& theta,
                                          const SamplerConfig& config,
                                          SamplerReport* report = nullptr);

struct ExactResult {
  std::vector<std::string> terms;
  std::vector<double> expected;  // E[h] under the model
  double partition = 0.0;        // sum of exp(theta·h) over all graphs
};

// Brute-force enumeration of every graph on the slice's roster (n ≤ 5).
ExactResult enumerate_exact(const YearSlice& slice, const ModelSpec& model,
                            const std::vector<double>& theta);

struct GofCell {
  int year = 0;
  std::string term;
  double observed = 0.0, sim_mean = 0.0, lo95 = 0.0, hi95 = 0.0;
  bool within = false;
};

// Year-by-year simulated envelopes at the fitted theta.  Each year runs an
// independent chain seeded from a per-year substream of config.seed.
std::vector<GofCell> goodness_of_fit(const FitResult& fit, const TemporalNetworkPanel& panel,
                                     const ModelSpec& model, const ModelSpec& gof_terms,
                                     const SamplerConfig& config, int threads = 1,
                                     std::vector<SamplerReport>* reports = nullptr,
                                     std::optional<std::pair<int, int>> year_range = std::nullopt);

// Default envelope battery: edges, isolates, both mixed two-stars, both
// mixed triangles, gwesp(0.5).
ModelSpec default_gof_battery();

}  // namespace tergm
