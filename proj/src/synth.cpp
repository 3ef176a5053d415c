#include "tergm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tergm/errors.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace {

std::string state_name(int idx, int n_states) {
  int width = 1;
  for (int v = n_states; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(idx + 1);
  return "S" + std::string(width - digits.size(), '0') + digits;
}

void check_generator_terms(const ModelSpec& model) {
  static const std::set<std::string> allowed_covs = {"contiguity", "alliance", "cap_ratio",
                                                     "cinc_high", "ln_states"};
  for (const auto& t : model.terms) {
    if ((t.kind == TermKind::dyad_cov || t.kind == TermKind::year_cov) &&
        !allowed_covs.count(t.cov_name))
      throw ValidationError("generator models cannot use covariate '" + t.cov_name +
                            "' (only static attribute covariates are available)");
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n_states < 2) throw ValidationError("synth n_states must be at least 2");
  if (n_years < 1) throw ValidationError("synth n_years must be positive");
  if (dem_frac < 0 || aut_frac < 0 || dem_frac + aut_frac > 1.0)
    throw ValidationError("synth regime fractions must be non-negative and sum to at most 1");
  for (double p : {contiguity_p, alliance_p, missing_polity_frac})
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("synth probabilities must lie in [0, 1]");
  model.validate(/*require_edges=*/false);
  check_generator_terms(model);
  if (theta.size() != model.size())
    throw ValidationError("synth theta length does not match the generator model");
  derive.validate();
}

SynthResult generate_synthetic_panel(const SynthConfig& config) {
  config.validate();
  const int n = config.n_states;

  auto attr_rng = make_rng(config.seed, rng_tag::kSynthAttrs);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Regime classes, shuffled so class is independent of the id ordering.
  int n_dem = static_cast<int>(std::llround(config.dem_frac * n));
  int n_aut = static_cast<int>(std::llround(config.aut_frac * n));
  n_aut = std::min(n_aut, n - n_dem);
  std::vector<int> cls(n, 0);  // 0 anoc, 1 dem, 2 aut
  std::fill(cls.begin(), cls.begin() + n_dem, 1);
  std::fill(cls.begin() + n_dem, cls.begin() + n_dem + n_aut, 2);
  std::shuffle(cls.begin(), cls.end(), attr_rng);

  const int dem_lo = config.derive.democracy_cut + 1, dem_hi = 10;
  const int aut_hi = config.derive.autocracy_cut - 1, aut_lo = -10;
  if (dem_lo > dem_hi || aut_hi < aut_lo)
    throw ValidationError("regime cuts leave no room for dem or aut polity scores");
  std::vector<int> polity(n);
  std::vector<double> cinc(n);
  double cinc_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (cls[i] == 1)
      polity[i] = dem_lo + static_cast<int>(unif(attr_rng) * (dem_hi - dem_lo + 1)) % (dem_hi - dem_lo + 1);
    else if (cls[i] == 2)
      polity[i] = aut_hi - static_cast<int>(unif(attr_rng) * (aut_hi - aut_lo + 1)) % (aut_hi - aut_lo + 1);
    else
      polity[i] = config.derive.autocracy_cut +
                  static_cast<int>(unif(attr_rng) *
                                   (config.derive.democracy_cut - config.derive.autocracy_cut + 1)) %
                      (config.derive.democracy_cut - config.derive.autocracy_cut + 1);
    cinc[i] = 0.05 + unif(attr_rng);
    cinc_sum += cinc[i];
  }
  for (double& c : cinc) c /= cinc_sum;

  auto dyads = all_dyads(n);
  std::vector<int> contiguity(dyads.size()), alliance(dyads.size());
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    contiguity[d] = unif(attr_rng) < config.contiguity_p ? 1 : 0;
    alliance[d] = unif(attr_rng) < config.alliance_p ? 1 : 0;
  }

  // Attribute-only records first; the panel machinery then derives labels
  // and covariate arrays exactly as a real ingest would.
  auto skeleton = std::make_shared<RawTables>();
  for (int yi = 0; yi < config.n_years; ++yi) {
    int year = config.first_year + yi;
    for (int i = 0; i < n; ++i) {
      NodeYearRecord r;
      r.year = year;
      r.state_id = state_name(i, n);
      bool missing = config.missing_polity_frac > 0 && unif(attr_rng) < config.missing_polity_frac;
      if (!missing) r.polity = polity[i];
      r.cinc = cinc[i];
      skeleton->nodes.push_back(std::move(r));
    }
    for (std::size_t d = 0; d < dyads.size(); ++d) {
      DyadYearRecord r;
      r.year = year;
      r.state_a = state_name(dyads[d].first, n);
      r.state_b = state_name(dyads[d].second, n);
      r.mid = false;
      r.contiguity = contiguity[d];
      r.alliance = alliance[d];
      skeleton->dyads.push_back(std::move(r));
    }
  }

  TemporalNetworkPanel panel = build_panel(skeleton, config.derive, EdgeRule::all_mid);
  derive_capability_covariates(panel);
  derive_scale_covariate(panel);

  SynthResult result;
  result.reports.resize(config.n_years);
  std::vector<NetworkState> nets(config.n_years);
  for (int yi = 0; yi < config.n_years; ++yi) {
    const YearSlice& s = panel.slice(config.first_year + yi);
    SamplerConfig cfg = config.sampler;
    cfg.n_draws = 1;
    cfg.seed = substream_seed(config.seed, rng_tag::kSynthYear, yi);
    nets[yi] = sample_networks(s, config.model, config.theta, cfg, &result.reports[yi])[0];
    if (result.reports[yi].degenerate) result.any_degenerate = true;
  }

  auto raw = std::make_shared<RawTables>();
  raw->nodes = skeleton->nodes;
  raw->dyads.reserve(skeleton->dyads.size());
  for (int yi = 0; yi < config.n_years; ++yi) {
    auto host_rng = make_rng(config.seed, rng_tag::kSynthYear, 1000003ULL + yi);
    std::uniform_int_distribution<int> hostility(1, 5);
    for (std::size_t d = 0; d < dyads.size(); ++d) {
      DyadYearRecord r = skeleton->dyads[static_cast<std::size_t>(yi) * dyads.size() + d];
      if (nets[yi].has(dyads[d].first, dyads[d].second)) {
        r.mid = true;
        r.hostility = hostility(host_rng);
      }
      raw->dyads.push_back(std::move(r));
    }
  }
  result.raw = raw;
  return result;
}

}  // namespace tergm
