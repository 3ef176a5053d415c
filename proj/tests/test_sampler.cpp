#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tergm/errors.hpp"
#include "tergm/sampler.hpp"
#include "helpers.hpp"

using namespace tergm;
using testutil::make_panel;
using testutil::make_slice;

namespace {

ModelSpec model_of(std::vector<TermSpec> terms) {
  ModelSpec m;
  m.terms = std::move(terms);
  return m;
}

TermSpec structural(TermKind k, std::optional<RegimeType> t = {}) {
  TermSpec ts;
  ts.kind = k;
  ts.same_type = t;
  return ts;
}

std::vector<double> edge_count_trace(const YearSlice& s, const ModelSpec& m,
                                     const std::vector<double>& theta, SamplerConfig cfg) {
  std::vector<double> trace;
  run_chain(s, m, theta, cfg, [&](const YearSlice& draw) {
    trace.push_back(static_cast<double>(draw.net.edge_count()));
  });
  return trace;
}

}  // namespace

TEST_CASE("zero theta samples the uniform graph distribution") {
  YearSlice s = make_slice(2000, "DDDDDD");
  ModelSpec m = model_of({structural(TermKind::edges)});
  SamplerConfig cfg;
  cfg.n_draws = 2000;
  cfg.seed = 1;
  SamplerReport report;
  auto trace = edge_count_trace(s, m, {0.0}, cfg);
  double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / trace.size();
  double density = mean / static_cast<double>(dyad_count(6));
  CHECK(density == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("chains are reproducible in the seed") {
  YearSlice s = make_slice(2000, "DADA", {{0, 1}});
  ModelSpec m = model_of({structural(TermKind::edges),
                          structural(TermKind::mixed_two_star, RegimeType::dem)});
  SamplerConfig cfg;
  cfg.n_draws = 200;
  cfg.seed = 42;
  auto a = edge_count_trace(s, m, {-0.4, 0.2}, cfg);
  auto b = edge_count_trace(s, m, {-0.4, 0.2}, cfg);
  CHECK(a == b);
  cfg.seed = 43;
  CHECK(a != edge_count_trace(s, m, {-0.4, 0.2}, cfg));
}

TEST_CASE("initialization modes are honored") {
  YearSlice s = make_slice(2000, "DDD", {{0, 1}, {1, 2}, {0, 2}});
  ModelSpec m = model_of({structural(TermKind::edges)});
  SamplerConfig cfg;
  cfg.n_draws = 1;
  cfg.burn_in = 0;
  cfg.thin = 1;
  cfg.seed = 5;

  cfg.init = SamplerConfig::Init::observed;
  std::vector<NetworkState> draw = sample_networks(s, m, {0.0}, cfg);
  // One toggle away from the observed triangle.
  long long diff = std::abs(draw[0].edge_count() - 3);
  CHECK(diff <= 1);

  cfg.init = SamplerConfig::Init::empty;
  draw = sample_networks(s, m, {0.0}, cfg);
  CHECK(draw[0].edge_count() <= 1);
}

TEST_CASE("strongly positive edge terms trigger the degeneracy warning") {
  YearSlice s = make_slice(2000, "DDDDD");
  ModelSpec m = model_of({structural(TermKind::edges)});
  SamplerConfig cfg;
  cfg.n_draws = 300;
  cfg.seed = 9;
  SamplerReport report;
  run_chain(s, m, {6.0}, cfg, [](const YearSlice&) {}, &report);
  CHECK(report.degenerate);
  CHECK(report.mean_density > 0.9);
  CHECK(!report.warning.empty());

  SamplerReport healthy;
  run_chain(s, m, {0.0}, cfg, [](const YearSlice&) {}, &healthy);
  CHECK_FALSE(healthy.degenerate);
  CHECK(healthy.warning.empty());
}

TEST_CASE("dyads with missing covariates stay frozen at their initial state") {
  YearSlice s = make_slice(2000, "DDDD", {{0, 1}});
  s.dyad_cov["x"] = std::vector<double>(dyad_count(4), 1.0);
  s.dyad_cov["x"][dyad_index(0, 1, 4)] = std::nan("");
  TermSpec xc;
  xc.kind = TermKind::dyad_cov;
  xc.cov_name = "x";
  ModelSpec m = model_of({structural(TermKind::edges), xc});

  SamplerConfig cfg;
  cfg.n_draws = 100;
  cfg.seed = 3;
  SamplerReport report;

  cfg.init = SamplerConfig::Init::observed;
  bool always_present = true;
  run_chain(s, m, {0.0, 0.1}, cfg,
            [&](const YearSlice& draw) { always_present &= draw.net.has(0, 1); }, &report);
  CHECK(always_present);
  CHECK(report.frozen_dyads == 1);

  cfg.init = SamplerConfig::Init::empty;
  bool never_present = true;
  run_chain(s, m, {0.0, 0.1}, cfg,
            [&](const YearSlice& draw) { never_present &= !draw.net.has(0, 1); }, &report);
  CHECK(never_present);
}

TEST_CASE("exact enumeration matches hand-computed three-node values") {
  YearSlice s = make_slice(2000, "DDD");
  ModelSpec m = model_of({structural(TermKind::edges)});

  ExactResult flat = enumerate_exact(s, m, {0.0});
  CHECK(flat.partition == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(flat.expected[0] == doctest::Approx(1.5).epsilon(1e-12));

  // Independent-dyad model: each edge present with p = e^t/(1+e^t).
  double t = std::log(3.0);
  ExactResult biased = enumerate_exact(s, m, {t});
  CHECK(biased.partition == doctest::Approx(64.0).epsilon(1e-9));
  CHECK(biased.expected[0] == doctest::Approx(2.25).epsilon(1e-12));

  SUBCASE("expected mixed triangle never exceeds the expected mixed two-star") {
    YearSlice mixed = make_slice(2000, "DADAD");
    ModelSpec mm = model_of({structural(TermKind::edges),
                             structural(TermKind::mixed_two_star, RegimeType::dem),
                             structural(TermKind::mixed_triangle, RegimeType::dem)});
    for (double th : {-1.0, 0.0, 0.7}) {
      ExactResult r = enumerate_exact(mixed, mm, {th, 0.3, -0.4});
      CHECK(r.expected[2] <= r.expected[1] + 1e-12);
    }
  }
  SUBCASE("six nodes are out of range") {
    YearSlice big = make_slice(2000, "DDDDDD");
    CHECK_THROWS_AS(enumerate_exact(big, m, {0.0}), ValidationError);
  }
}

TEST_CASE("sampler means agree with exact enumeration on four nodes") {
  YearSlice s = make_slice(2000, "DADA");
  ModelSpec m = model_of({structural(TermKind::edges),
                          structural(TermKind::mixed_two_star, RegimeType::dem),
                          structural(TermKind::mixed_triangle, RegimeType::dem)});
  std::vector<double> theta{-0.5, 0.3, -1.0};
  ExactResult exact = enumerate_exact(s, m, theta);

  SamplerConfig cfg;
  cfg.n_draws = 20000;
  cfg.seed = 77;
  std::vector<std::vector<double>> stats(m.size());
  run_chain(s, m, theta, cfg, [&](const YearSlice& draw) {
    for (std::size_t c = 0; c < m.size(); ++c)
      stats[c].push_back(full_statistic(draw, m.terms[c]));
  });

  for (std::size_t c = 0; c < m.size(); ++c) {
    const auto& v = stats[c];
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    // Batch-means standard error absorbs the residual chain autocorrelation.
    const std::size_t n_batches = 50, batch = v.size() / n_batches;
    std::vector<double> bm;
    for (std::size_t bdx = 0; bdx < n_batches; ++bdx) {
      double s2 = 0;
      for (std::size_t i = bdx * batch; i < (bdx + 1) * batch; ++i) s2 += v[i];
      bm.push_back(s2 / batch);
    }
    double bmean = std::accumulate(bm.begin(), bm.end(), 0.0) / n_batches;
    double var = 0;
    for (double b : bm) var += (b - bmean) * (b - bmean);
    var /= (n_batches - 1);
    double se = std::sqrt(var / n_batches);
    INFO("term ", m.terms[c].name(), " mean ", mean, " exact ", exact.expected[c], " se ", se);
    CHECK(std::abs(mean - exact.expected[c]) <= 3.5 * std::max(se, 1e-3));
  }
}

TEST_CASE("fixed scan order samples the same distribution as uniform proposals") {
  YearSlice s = make_slice(2000, "DADA");
  ModelSpec m = model_of({structural(TermKind::edges)});
  std::vector<double> theta{-0.5};

  SamplerConfig uniform;
  uniform.n_draws = 8000;
  uniform.seed = 11;
  auto tu = edge_count_trace(s, m, theta, uniform);

  SamplerConfig cyclic = uniform;
  cyclic.seed = 12;
  cyclic.scan_order = all_dyads(4);
  auto tc = edge_count_trace(s, m, theta, cyclic);

  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  auto sd = [&](const std::vector<double>& v) {
    double mu = mean(v), acc = 0;
    for (double x : v) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / (v.size() - 1));
  };
  double se = std::sqrt(sd(tu) * sd(tu) / tu.size() + sd(tc) * sd(tc) / tc.size());
  CHECK(std::abs(mean(tu) - mean(tc)) < 5 * std::max(se, 5e-3));
}

TEST_CASE("goodness-of-fit envelopes are deterministic and well-formed") {
  std::vector<YearSlice> slices;
  slices.push_back(make_slice(1990, "DADD", {{0, 1}, {1, 2}}));
  slices.push_back(make_slice(1991, "DADD", {{0, 1}}));
  slices.push_back(make_slice(1992, "DADD", {{0, 1}, {0, 2}, {2, 3}}));
  TemporalNetworkPanel panel = make_panel(std::move(slices));

  ModelSpec m = model_of({structural(TermKind::edges)});
  FitResult fit = fit_logistic(build_design_matrix(panel, m));
  SamplerConfig cfg;
  cfg.n_draws = 400;
  cfg.seed = 21;

  std::vector<SamplerReport> reports;
  auto cells = goodness_of_fit(fit, panel, m, default_gof_battery(), cfg, 1, &reports);
  CHECK(cells.size() == 3 * default_gof_battery().size());
  CHECK(reports.size() == 3);
  for (const auto& cell : cells) {
    CHECK(cell.lo95 <= cell.hi95);
    bool inside = cell.observed >= cell.lo95 && cell.observed <= cell.hi95;
    CHECK(cell.within == inside);
  }

  auto cells2 = goodness_of_fit(fit, panel, m, default_gof_battery(), cfg, 2, nullptr);
  REQUIRE(cells2.size() == cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].sim_mean == cells2[i].sim_mean);
    CHECK(cells[i].lo95 == cells2[i].lo95);
  }

  SUBCASE("year filter restricts the battery") {
    auto some = goodness_of_fit(fit, panel, m, default_gof_battery(), cfg, 1, nullptr,
                                std::pair<int, int>{1991, 1992});
    CHECK(some.size() == 2 * default_gof_battery().size());
  }
  SUBCASE("an unconverged fit is refused") {
    FitResult bad = fit;
    bad.converged = false;
    CHECK_THROWS_AS(
        goodness_of_fit(bad, panel, m, default_gof_battery(), cfg, 1, nullptr),
        EstimationError);
  }
}
