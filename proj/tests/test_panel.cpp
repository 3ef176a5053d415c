#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "tergm/errors.hpp"
#include "tergm/panel.hpp"
#include "helpers.hpp"

using namespace tergm;
namespace fs = std::filesystem;

namespace {

const std::string kNodes = std::string(TEST_DATA_DIR) + "/fixture/nodes.csv";
const std::string kDyads = std::string(TEST_DATA_DIR) + "/fixture/dyads.csv";

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("tergm_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv");
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
  std::string str() const { return path.string(); }
};

// A two-state world with configurable MID years, used for clock tests.
std::shared_ptr<RawTables> two_state_history(int first_year, int last_year,
                                             const std::vector<int>& mid_years,
                                             const std::vector<int>& skip_years = {}) {
  auto raw = std::make_shared<RawTables>();
  for (int y = first_year; y <= last_year; ++y) {
    raw->nodes.push_back({y, "XXX", 8, 0.5, true});
    bool skipped = std::find(skip_years.begin(), skip_years.end(), y) != skip_years.end();
    raw->nodes.push_back({y, "YYY", -8, 0.5, !skipped});
    if (skipped) continue;
    DyadYearRecord d;
    d.year = y;
    d.state_a = "XXX";
    d.state_b = "YYY";
    d.mid = std::find(mid_years.begin(), mid_years.end(), y) != mid_years.end();
    if (d.mid) d.hostility = 5;
    raw->dyads.push_back(d);
  }
  return raw;
}

double peace_years_at(const TemporalNetworkPanel& panel, int year) {
  const YearSlice& s = panel.slice(year);
  return (*s.find_dyad_cov("peace_years"))[0];
}

}  // namespace

TEST_CASE("fixture ingestion builds sorted rosters and both edge rules") {
  PanelDeriveConfig cfg;
  PreparedPanels panels = prepare_panels(kNodes, kDyads, cfg);

  CHECK(panels.all_mid.years() == std::vector<int>{1950, 1951, 1952, 1953, 1954});
  const YearSlice& s50 = panels.all_mid.slice(1950);
  CHECK(s50.roster == std::vector<std::string>{"AAA", "BBB", "CCC", "DDD", "EEE"});
  CHECK(panels.all_mid.slice(1952).n() == 6);   // FFF enters
  CHECK(panels.all_mid.slice(1954).n() == 5);   // EEE leaves
  CHECK(panels.all_mid.slice(1954).index_of("EEE") == -1);

  // Every year has two MIDs; only the hostility>=4 ones survive the fatal rule.
  for (int y : panels.all_mid.years()) {
    CHECK(panels.all_mid.slice(y).net.edge_count() == 2);
    CHECK(panels.fatal.slice(y).net.edge_count() == 1);
  }
  const YearSlice& f50 = panels.fatal.slice(1950);
  CHECK(f50.net.has(f50.index_of("AAA"), f50.index_of("CCC")));
  CHECK_FALSE(f50.net.has(f50.index_of("BBB"), f50.index_of("DDD")));
}

TEST_CASE("regime indicators use strict polity cuts") {
  PanelDeriveConfig cfg;
  CHECK(regime_indicators(7, cfg) == std::pair<int8_t, int8_t>{1, 0});
  CHECK(regime_indicators(-8, cfg) == std::pair<int8_t, int8_t>{0, 1});
  CHECK(regime_indicators(3, cfg) == std::pair<int8_t, int8_t>{0, 0});
  CHECK(regime_indicators(6, cfg) == std::pair<int8_t, int8_t>{0, 0});   // boundary: not dem
  CHECK(regime_indicators(-6, cfg) == std::pair<int8_t, int8_t>{0, 0});  // boundary: not aut
  CHECK(regime_indicators(std::nullopt, cfg) == std::pair<int8_t, int8_t>{-1, -1});

  PanelDeriveConfig loose;
  loose.democracy_cut = 2;
  loose.autocracy_cut = -2;
  CHECK(regime_indicators(3, loose) == std::pair<int8_t, int8_t>{1, 0});

  PanelDeriveConfig bad;
  bad.democracy_cut = -7;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  // Fixture: CCC's 1950 polity is blank -> labels unknown that year only.
  PreparedPanels panels = prepare_panels(kNodes, kDyads, cfg);
  const YearSlice& s50 = panels.all_mid.slice(1950);
  CHECK(s50.dem[s50.index_of("CCC")] == -1);
  CHECK(s50.aut[s50.index_of("CCC")] == -1);
  const YearSlice& s51 = panels.all_mid.slice(1951);
  CHECK(s51.aut[s51.index_of("CCC")] == 1);
}

TEST_CASE("parser reports file, line, and reason") {
  TempFile good_nodes(
      "year,state_id,polity,cinc,in_system\n"
      "2000,XXX,5,0.5,1\n"
      "2000,YYY,-5,0.5,1\n");

  SUBCASE("node header mismatch") {
    TempFile bad("year,state,polity,cinc,in_system\n2000,XXX,5,0.5,1\n");
    TempFile dyads("year,state_a,state_b,mid,hostility,contiguity,alliance\n");
    CHECK_THROWS_WITH_AS(parse_tables(bad.str(), dyads.str()),
                         doctest::Contains("header"), ParseError);
  }
  SUBCASE("dyad row with a malformed field carries its line number") {
    TempFile dyads(
        "year,state_a,state_b,mid,hostility,contiguity,alliance\n"
        "2000,XXX,YYY,maybe,,0,0\n");
    try {
      parse_tables(good_nodes.str(), dyads.str());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.file() == dyads.str());
    }
  }
  SUBCASE("mid without hostility") {
    TempFile dyads(
        "year,state_a,state_b,mid,hostility,contiguity,alliance\n"
        "2000,XXX,YYY,1,,0,0\n");
    CHECK_THROWS_WITH_AS(parse_tables(good_nodes.str(), dyads.str()),
                         doctest::Contains("hostility"), ValidationError);
  }
  SUBCASE("hostility outside 1..5") {
    TempFile dyads(
        "year,state_a,state_b,mid,hostility,contiguity,alliance\n"
        "2000,XXX,YYY,1,9,0,0\n");
    CHECK_THROWS_AS(parse_tables(good_nodes.str(), dyads.str()), ValidationError);
  }
  SUBCASE("duplicate dyad-year") {
    TempFile dyads(
        "year,state_a,state_b,mid,hostility,contiguity,alliance\n"
        "2000,XXX,YYY,0,,0,0\n"
        "2000,YYY,XXX,0,,0,0\n");
    CHECK_THROWS_WITH_AS(parse_tables(good_nodes.str(), dyads.str()),
                         doctest::Contains("duplicate"), ValidationError);
  }
  SUBCASE("dyad references a state outside the system") {
    TempFile dyads(
        "year,state_a,state_b,mid,hostility,contiguity,alliance\n"
        "2000,XXX,ZZZ,0,,0,0\n");
    CHECK_THROWS_WITH_AS(parse_tables(good_nodes.str(), dyads.str()),
                         doctest::Contains("not in the system"), ValidationError);
  }
  SUBCASE("self dyad") {
    TempFile dyads(
        "year,state_a,state_b,mid,hostility,contiguity,alliance\n"
        "2000,XXX,XXX,0,,0,0\n");
    CHECK_THROWS_AS(parse_tables(good_nodes.str(), dyads.str()), ValidationError);
  }
  SUBCASE("reserved extra column name") {
    TempFile dyads("year,state_a,state_b,mid,hostility,contiguity,alliance,peace_years\n");
    CHECK_THROWS_WITH_AS(parse_tables(good_nodes.str(), dyads.str()),
                         doctest::Contains("reserved"), ParseError);
  }
  SUBCASE("extra covariate columns are ingested") {
    TempFile dyads(
        "year,state_a,state_b,mid,hostility,contiguity,alliance,trade\n"
        "2000,XXX,YYY,0,,1,0,0.75\n");
    auto raw = parse_tables(good_nodes.str(), dyads.str());
    CHECK(raw->extra_names == std::vector<std::string>{"trade"});
    TemporalNetworkPanel p = build_panel(raw, PanelDeriveConfig{}, EdgeRule::all_mid);
    CHECK((*p.slice(2000).find_dyad_cov("trade"))[0] == 0.75);
  }
}

TEST_CASE("peace clock counts consecutive quiet years and resets on conflict") {
  auto raw = two_state_history(1, 11, /*mid_years=*/{5, 8});
  TemporalNetworkPanel panel = build_panel(raw, PanelDeriveConfig{}, EdgeRule::all_mid);
  derive_peace_years(panel, PanelDeriveConfig{});

  CHECK(peace_years_at(panel, 8) == 0.0);   // conflict year resets
  CHECK(peace_years_at(panel, 7) == 2.0);   // quiet 6 and 7 after the year-5 MID
  CHECK(peace_years_at(panel, 5) == 0.0);
  CHECK(peace_years_at(panel, 4) == 3.0);   // quiet 2,3,4 after entry at 1
  CHECK(peace_years_at(panel, 11) == 3.0);  // quiet 9,10,11

  SUBCASE("an always-quiet dyad accrues one per year with exact powers") {
    auto quiet = two_state_history(1, 11, {});
    TemporalNetworkPanel qp = build_panel(quiet, PanelDeriveConfig{}, EdgeRule::all_mid);
    derive_peace_years(qp, PanelDeriveConfig{});
    CHECK(peace_years_at(qp, 1) == 0.0);
    CHECK(peace_years_at(qp, 11) == 10.0);
    CHECK((*qp.slice(11).find_dyad_cov("peace_years_sq"))[0] == 100.0);
    CHECK((*qp.slice(11).find_dyad_cov("peace_years_cu"))[0] == 1000.0);
  }
  SUBCASE("the cap truncates the stored value but not the clock") {
    PanelDeriveConfig capped;
    capped.peace_year_cap = 4;
    auto quiet = two_state_history(1, 11, {10});
    TemporalNetworkPanel qp = build_panel(quiet, capped, EdgeRule::all_mid);
    derive_peace_years(qp, capped);
    CHECK(peace_years_at(qp, 9) == 4.0);   // true clock is 8
    CHECK((*qp.slice(9).find_dyad_cov("peace_years_sq"))[0] == 16.0);
    CHECK(peace_years_at(qp, 10) == 0.0);
    CHECK(peace_years_at(qp, 11) == 1.0);
  }
  SUBCASE("system exit wipes the history") {
    auto gap = two_state_history(1, 6, {}, /*skip_years=*/{3});
    TemporalNetworkPanel gp = build_panel(gap, PanelDeriveConfig{}, EdgeRule::all_mid);
    derive_peace_years(gp, PanelDeriveConfig{});
    CHECK(peace_years_at(gp, 2) == 1.0);
    CHECK(peace_years_at(gp, 4) == 0.0);  // re-entry: no history credit
    CHECK(peace_years_at(gp, 6) == 2.0);
  }
  SUBCASE("a gap in panel years is rejected") {
    auto raw2 = std::make_shared<RawTables>();
    raw2->nodes.push_back({2000, "XXX", 5, 0.5, true});
    raw2->nodes.push_back({2002, "XXX", 5, 0.5, true});
    TemporalNetworkPanel gp = build_panel(raw2, PanelDeriveConfig{}, EdgeRule::all_mid);
    CHECK_THROWS_WITH_AS(derive_peace_years(gp, PanelDeriveConfig{}),
                         doctest::Contains("contiguous"), ValidationError);
  }
}

TEST_CASE("capability covariates follow the max-over-sum rule") {
  PreparedPanels panels = prepare_panels(kNodes, kDyads, PanelDeriveConfig{});
  const YearSlice& s = panels.all_mid.slice(1950);
  int a = s.index_of("AAA"), b = s.index_of("BBB");
  std::size_t k = dyad_index(std::min(a, b), std::max(a, b), s.n());
  CHECK((*s.find_dyad_cov("cap_ratio"))[k] == doctest::Approx(0.30 / 0.55).epsilon(1e-12));
  CHECK((*s.find_dyad_cov("cinc_high"))[k] == doctest::Approx(0.30).epsilon(1e-12));

  // DDD's 1954 cinc is blank -> its dyads are missing both columns.
  const YearSlice& s54 = panels.all_mid.slice(1954);
  int d = s54.index_of("DDD"), a54 = s54.index_of("AAA");
  std::size_t kd = dyad_index(std::min(d, a54), std::max(d, a54), s54.n());
  CHECK(std::isnan((*s54.find_dyad_cov("cap_ratio"))[kd]));
  CHECK(std::isnan((*s54.find_dyad_cov("cinc_high"))[kd]));

  SUBCASE("two zero-capability states leave the ratio undefined") {
    YearSlice z = testutil::make_slice(2000, "DD");
    z.cinc = {0.0, 0.0};
    TemporalNetworkPanel zp = testutil::make_panel({z});
    derive_capability_covariates(zp);
    CHECK(std::isnan((*zp.slice(2000).find_dyad_cov("cap_ratio"))[0]));
    CHECK((*zp.slice(2000).find_dyad_cov("cinc_high"))[0] == 0.0);
  }
  SUBCASE("ratio lands in [0.5, 1]") {
    for (const auto& sl : panels.all_mid.slices()) {
      const auto* col = sl.find_dyad_cov("cap_ratio");
      for (double v : *col)
        if (!std::isnan(v)) {
          CHECK(v >= 0.5);
          CHECK(v <= 1.0);
        }
    }
  }
}

TEST_CASE("prepared panels share clocks and carry the scale covariate") {
  PreparedPanels panels = prepare_panels(kNodes, kDyads, PanelDeriveConfig{});
  for (const auto* panel : {&panels.all_mid, &panels.fatal}) {
    for (const auto& s : panel->slices()) {
      CHECK(s.find_dyad_cov("peace_years") != nullptr);
      CHECK(s.find_dyad_cov("cap_ratio") != nullptr);
      CHECK(s.year_cov.at("ln_states") == doctest::Approx(std::log(s.n())).epsilon(1e-12));
    }
  }
  // The clock must be computed against the all-MID adjacency on both panels:
  // BBB-DDD fight (hostility 2) in 1950 is invisible to the fatal network,
  // but the fatal panel's clock still resets.
  const YearSlice& f51 = panels.fatal.slice(1951);
  int b = f51.index_of("BBB"), d = f51.index_of("DDD");
  std::size_t k = dyad_index(std::min(b, d), std::max(b, d), f51.n());
  CHECK((*f51.find_dyad_cov("peace_years"))[k] == 1.0);
}

TEST_CASE("export is canonical and round trips") {
  PreparedPanels panels = prepare_panels(kNodes, kDyads, PanelDeriveConfig{});
  auto [nodes_csv, dyads_csv] = export_panel(panels.all_mid);
  TempFile n2(nodes_csv), d2(dyads_csv);
  TemporalNetworkPanel again = ingest_panel(n2.str(), d2.str(), PanelDeriveConfig{});
  auto [nodes_csv2, dyads_csv2] = export_panel(again);
  CHECK(nodes_csv == nodes_csv2);
  CHECK(dyads_csv == dyads_csv2);
  for (int y : panels.all_mid.years())
    CHECK(again.slice(y).net == panels.all_mid.slice(y).net);
}
