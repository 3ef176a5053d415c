#include "tergm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tergm/errors.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Covariate completeness does not depend on the network state, so the set of
// proposable dyads is fixed for the whole chain.
std::vector<std::pair<int, int>> eligible_dyads(const YearSlice& s, const ModelSpec& model) {
  std::vector<std::pair<int, int>> out;
  for (auto [i, j] : all_dyads(s.n())) {
    bool ok = true;
    for (const auto& t : model.terms)
      if (is_covariate_term(t.kind) && std::isnan(dyad_value(s, t, i, j))) {
        ok = false;
        break;
      }
    if (ok) out.emplace_back(i, j);
  }
  return out;
}

}  // namespace

void SamplerConfig::validate(int n) const {
  if (n_draws < 1) throw ValidationError("sampler n_draws must be positive");
  if (burn_in < -1 || thin < -1 || thin == 0)
    throw ValidationError("sampler burn_in/thin must be positive (or -1 for the default)");
  if (!(random_p >= 0.0 && random_p <= 1.0))
    throw ValidationError("sampler random_p must lie in [0, 1]");
  for (auto [i, j] : scan_order)
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
      throw ValidationError("sampler scan_order contains an invalid dyad");
}

void run_chain(YearSlice slice, const ModelSpec& model, const std::vector<double>& theta,
               const SamplerConfig& config, const std::function<void(const YearSlice&)>& sink,
               SamplerReport* report) {
  model.validate(/*require_edges=*/false);
  if (theta.size() != model.size())
    throw ValidationError("theta length does not match the model");
  for (double v : theta)
    if (!std::isfinite(v)) throw ValidationError("theta must be finite");
  config.validate(slice.n());

  const int n = slice.n();
  const long long m = static_cast<long long>(dyad_count(n));
  const long long burn = config.burn_in >= 0 ? config.burn_in : 10 * m;
  const long long thin = config.thin >= 0 ? config.thin : std::max(1LL, m);

  auto rng = make_rng(config.seed, rng_tag::kSampler);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const std::vector<std::pair<int, int>> elig = eligible_dyads(slice, model);
  const std::vector<std::pair<int, int>>& proposals =
      config.scan_order.empty() ? elig : config.scan_order;
  if (report) report->frozen_dyads = m - static_cast<long long>(elig.size());

  switch (config.init) {
    case SamplerConfig::Init::empty:
      slice.net.clear();
      break;
    case SamplerConfig::Init::observed:
      break;
    case SamplerConfig::Init::random:
      slice.net.clear();
      for (auto [i, j] : elig)
        if (unif(rng) < config.random_p) slice.net.set(i, j, true);
      break;
  }

  std::vector<double> delta(model.size());
  std::size_t cursor = 0;
  auto step = [&]() {
    if (proposals.empty()) return;
    std::pair<int, int> d;
    if (!config.scan_order.empty()) {
      d = proposals[cursor];
      cursor = (cursor + 1) % proposals.size();
    } else {
      d = proposals[static_cast<std::size_t>(unif(rng) * proposals.size()) % proposals.size()];
    }
    change_vector(slice, model, d.first, d.second, delta.data());
    double dlp = dot(theta, delta);
    if (slice.net.has(d.first, d.second)) dlp = -dlp;
    if (dlp >= 0.0 || unif(rng) < std::exp(dlp)) slice.net.toggle(d.first, d.second);
  };

  for (long long t = 0; t < burn; ++t) step();
  double density_sum = 0.0;
  for (int draw = 0; draw < config.n_draws; ++draw) {
    for (long long t = 0; t < thin; ++t) step();
    if (m > 0) density_sum += static_cast<double>(slice.net.edge_count()) / static_cast<double>(m);
    sink(slice);
  }

  if (report) {
    report->mean_density = config.n_draws > 0 ? density_sum / config.n_draws : 0.0;
    if (m > 0 && (report->mean_density < 0.01 || report->mean_density > 0.99)) {
      report->degenerate = true;
      report->warning = "possible degeneracy: mean simulated density " +
                        format_double(report->mean_density) + " in year " +
                        std::to_string(slice.year);
    }
  }
}

std::vector<NetworkState> sample_networks(const YearSlice& slice, const ModelSpec& model,
                                          const std::vector<double>& theta,
                                          const SamplerConfig& config, SamplerReport* report) {
  std::vector<NetworkState> draws;
  draws.reserve(config.n_draws);
  run_chain(slice, model, theta, config, [&](const YearSlice& s) { draws.push_back(s.net); },
            report);
  return draws;
}

ExactResult enumerate_exact(const YearSlice& slice, const ModelSpec& model,
                            const std::vector<double>& theta) {
  model.validate(/*require_edges=*/false);
  if (theta.size() != model.size())
    throw ValidationError("theta length does not match the model");
  const int n = slice.n();
  if (n > 5)
    throw ValidationError("exact enumeration supports at most 5 nodes (got " +
                          std::to_string(n) + ")");
  const int m = static_cast<int>(dyad_count(n));
  auto dyads = all_dyads(n);

  ExactResult out;
  out.terms = model.term_names();
  out.expected.assign(model.size(), 0.0);

  YearSlice work = slice;
  std::vector<double> h(model.size());
  for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
    work.net.clear();
    for (int b = 0; b < m; ++b)
      if (mask >> b & 1) work.net.toggle(dyads[b].first, dyads[b].second);
    for (std::size_t t = 0; t < model.size(); ++t) {
      h[t] = full_statistic(work, model.terms[t]);
      if (std::isnan(h[t]))
        throw ValidationError("statistic '" + out.terms[t] +
                              "' is undefined on this roster (missing covariates)");
    }
    double w = std::exp(dot(theta, h));
    out.partition += w;
    for (std::size_t t = 0; t < model.size(); ++t) out.expected[t] += w * h[t];
  }
  for (auto& e : out.expected) e /= out.partition;
  return out;
}

std::vector<GofCell> goodness_of_fit(const FitResult& fit, const TemporalNetworkPanel& panel,
                                     const ModelSpec& model, const ModelSpec& gof_terms,
                                     const SamplerConfig& config, int threads,
                                     std::vector<SamplerReport>* reports,
                                     std::optional<std::pair<int, int>> year_range) {
  if (!fit.converged) throw EstimationError("goodness of fit requires a converged fit");
  gof_terms.validate(/*require_edges=*/false);

  std::vector<const YearSlice*> slices;
  for (const auto& s : panel.slices()) {
    if (year_range && (s.year < year_range->first || s.year > year_range->second)) continue;
    slices.push_back(&s);
  }
  if (slices.empty()) throw ValidationError("no years selected for goodness of fit");

  const std::size_t nterms = gof_terms.size();
  std::vector<std::vector<GofCell>> per_year(slices.size());
  std::vector<SamplerReport> local_reports(slices.size());
  parallel_for(slices.size(), threads, [&](std::size_t yi) {
    const YearSlice& s = *slices[yi];
    SamplerConfig cfg = config;
    cfg.seed = substream_seed(config.seed, rng_tag::kGofYear, yi);
    std::vector<std::vector<double>> sims(nterms);
    for (auto& v : sims) v.reserve(cfg.n_draws);
    run_chain(s, model, fit.theta, cfg,
              [&](const YearSlice& draw) {
                for (std::size_t t = 0; t < nterms; ++t)
                  sims[t].push_back(full_statistic(draw, gof_terms.terms[t]));
              },
              &local_reports[yi]);
    auto& cells = per_year[yi];
    cells.resize(nterms);
    for (std::size_t t = 0; t < nterms; ++t) {
      GofCell& c = cells[t];
      c.year = s.year;
      c.term = gof_terms.terms[t].name();
      c.observed = full_statistic(s, gof_terms.terms[t]);
      c.sim_mean = std::accumulate(sims[t].begin(), sims[t].end(), 0.0) / sims[t].size();
      c.lo95 = quantile(sims[t], 0.025);
      c.hi95 = quantile(sims[t], 0.975);
      c.within = c.observed >= c.lo95 && c.observed <= c.hi95;
    }
  });

  std::vector<GofCell> out;
  for (auto& cells : per_year) out.insert(out.end(), cells.begin(), cells.end());
  if (reports) *reports = std::move(local_reports);
  return out;
}

ModelSpec default_gof_battery() {
  ModelSpec g;
  g.terms.push_back({TermKind::edges, std::nullopt, "", 0.5});
  g.terms.push_back({TermKind::isolates, std::nullopt, "", 0.5});
  g.terms.push_back({TermKind::mixed_two_star, RegimeType::dem, "", 0.5});
  g.terms.push_back({TermKind::mixed_two_star, RegimeType::aut, "", 0.5});
  g.terms.push_back({TermKind::mixed_triangle, RegimeType::dem, "", 0.5});
  g.terms.push_back({TermKind::mixed_triangle, RegimeType::aut, "", 0.5});
  g.terms.push_back({TermKind::gwesp, std::nullopt, "", 0.5});
  return g;
}

}  // namespace tergm
