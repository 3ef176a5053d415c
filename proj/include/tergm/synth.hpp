#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tergm/panel.hpp"
#include "tergm/sampler.hpp"

namespace tergm {

// Known-theta panel generator: fixed regime composition and capabilities,
// geography-style dyad covariates, and one ERGM draw per year.
struct SynthConfig {
  int n_states = 30;
  int first_year = 1900;
  int n_years = 10;
  double dem_frac = 0.35;          // share of democracies
  double aut_frac = 0.35;          // share of autocracies; the rest are anocracies
  double contiguity_p = 0.2;       // P(dyad is contiguous)
  double alliance_p = 0.15;        // P(dyad allied)
  double missing_polity_frac = 0.0;  // per node-year
  ModelSpec model;                 // generating terms
  std::vector<double> theta;       // generating coefficients
  std::uint64_t seed = 0;
  SamplerConfig sampler;           // per-year chain settings; n_draws is forced to 1
  PanelDeriveConfig derive;        // regime cuts used for the generator's labels

  void validate() const;
};

struct SynthResult {
  std::shared_ptr<const RawTables> raw;
  std::vector<SamplerReport> reports;  // one per year
  bool any_degenerate = false;
};

// Deterministic in config.seed.  Generator models may use structural terms,
// joint/weak-link regime terms, contiguity, alliance, cap_ratio, cinc_high,
// and ln_states; temporally recursive covariates (peace years) are rejected.
SynthResult generate_synthetic_panel(const SynthConfig& config);

}  // namespace tergm
