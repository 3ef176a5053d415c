#include "tergm/panel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tergm/csv.hpp"
#include "tergm/errors.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kNodeHeader = {"year", "state_id", "polity", "cinc", "in_system"};
const std::vector<std::string> kDyadHeaderPrefix = {"year",      "state_a",    "state_b", "mid",
                                                    "hostility", "contiguity", "alliance"};

std::string dyad_name(const std::string& a, const std::string& b) {
  return a + "-" + b;
}

}  // namespace

std::vector<std::pair<int, int>> all_dyads(int n) {
  std::vector<std::pair<int, int>> out;
  out.reserve(dyad_count(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

void PanelDeriveConfig::validate() const {
  if (democracy_cut <= autocracy_cut)
    throw ValidationError("democracy_cut must be greater than autocracy_cut");
  if (fatal_threshold < 1 || fatal_threshold > 5)
    throw ValidationError("fatal_threshold must lie in 1..5");
  if (peace_year_cap && *peace_year_cap < 0)
    throw ValidationError("peace_year_cap must be non-negative");
}

const char* edge_rule_name(EdgeRule r) {
  return r == EdgeRule::all_mid ? "all_mid" : "fatal";
}

std::pair<int8_t, int8_t> regime_indicators(std::optional<int> polity,
                                            const PanelDeriveConfig& config) {
  if (!polity) return {-1, -1};
  return {static_cast<int8_t>(*polity > config.democracy_cut ? 1 : 0),
          static_cast<int8_t>(*polity < config.autocracy_cut ? 1 : 0)};
}

int YearSlice::index_of(const std::string& id) const {
  auto it = std::lower_bound(roster.begin(), roster.end(), id);
  if (it == roster.end() || *it != id) return -1;
  return static_cast<int>(it - roster.begin());
}

const std::vector<double>* YearSlice::find_dyad_cov(const std::string& name) const {
  auto it = dyad_cov.find(name);
  return it == dyad_cov.end() ? nullptr : &it->second;
}

std::vector<int> TemporalNetworkPanel::years() const {
  std::vector<int> out;
  out.reserve(slices_.size());
  for (const auto& s : slices_) out.push_back(s.year);
  return out;
}

bool TemporalNetworkPanel::has_year(int year) const {
  for (const auto& s : slices_)
    if (s.year == year) return true;
  return false;
}

const YearSlice& TemporalNetworkPanel::slice(int year) const {
  for (const auto& s : slices_)
    if (s.year == year) return s;
  throw ValidationError("panel has no year " + std::to_string(year));
}

YearSlice& TemporalNetworkPanel::mutable_slice(int year) {
  for (auto& s : slices_)
    if (s.year == year) return s;
  throw ValidationError("panel has no year " + std::to_string(year));
}

const std::vector<std::string>& reserved_covariate_names() {
  static const std::vector<std::string> names = {
      "peace_years", "peace_years_sq", "peace_years_cu", "cap_ratio", "cinc_high"};
  return names;
}

// ---------------------------------------------------------------------------
// Parsing and validation.
// ---------------------------------------------------------------------------

std::shared_ptr<const RawTables> parse_tables(const std::string& node_file,
                                              const std::string& dyad_file) {
  auto tables = std::make_shared<RawTables>();

  CsvTable nt = read_csv(node_file);
  if (nt.header != kNodeHeader)
    throw ParseError(node_file, 1, "node file header must be year,state_id,polity,cinc,in_system");
  std::set<std::pair<int, std::string>> seen_nodes;
  for (std::size_t r = 0; r < nt.rows.size(); ++r) {
    const auto& row = nt.rows[r];
    long line = nt.line_numbers[r];
    NodeYearRecord rec;
    try {
      auto year = parse_int_field(row[0]);
      if (!year) throw std::invalid_argument("year is required");
      rec.year = static_cast<int>(*year);
      rec.state_id = row[1];
      if (rec.state_id.empty()) throw std::invalid_argument("state_id is required");
      if (auto p = parse_int_field(row[2])) rec.polity = static_cast<int>(*p);
      rec.cinc = parse_double_field(row[3]);
      auto ins = parse_bool_field(row[4]);
      if (!ins) throw std::invalid_argument("in_system is required");
      rec.in_system = *ins;
    } catch (const std::invalid_argument& e) {
      throw ParseError(node_file, line, e.what());
    }
    if (rec.polity && (*rec.polity < -10 || *rec.polity > 10))
      throw ValidationError(node_file + ":" + std::to_string(line) + ": polity " +
                            std::to_string(*rec.polity) + " outside [-10, 10]");
    if (rec.cinc && (*rec.cinc < 0.0 || *rec.cinc > 1.0))
      throw ValidationError(node_file + ":" + std::to_string(line) + ": cinc " +
                            format_double(*rec.cinc) + " outside [0, 1]");
    if (!seen_nodes.insert({rec.year, rec.state_id}).second)
      throw ValidationError(node_file + ":" + std::to_string(line) + ": duplicate state-year (" +
                            rec.state_id + ", " + std::to_string(rec.year) + ")");
    tables->nodes.push_back(std::move(rec));
  }

  CsvTable dt = read_csv(dyad_file);
  if (dt.header.size() < kDyadHeaderPrefix.size() ||
      !std::equal(kDyadHeaderPrefix.begin(), kDyadHeaderPrefix.end(), dt.header.begin()))
    throw ParseError(dyad_file, 1,
                     "dyad file header must start with "
                     "year,state_a,state_b,mid,hostility,contiguity,alliance");
  tables->extra_names.assign(dt.header.begin() + kDyadHeaderPrefix.size(), dt.header.end());
  {
    std::set<std::string> uniq;
    for (const auto& name : tables->extra_names) {
      if (name.empty() || !uniq.insert(name).second)
        throw ParseError(dyad_file, 1, "duplicate or empty extra covariate column '" + name + "'");
      for (const auto& reserved : reserved_covariate_names())
        if (name == reserved)
          throw ParseError(dyad_file, 1, "extra covariate column '" + name + "' is reserved");
    }
  }

  // In-system lookup used for the roster rule.
  std::set<std::pair<int, std::string>> in_system;
  for (const auto& n : tables->nodes)
    if (n.in_system) in_system.insert({n.year, n.state_id});

  std::set<std::tuple<int, std::string, std::string>> seen_dyads;
  for (std::size_t r = 0; r < dt.rows.size(); ++r) {
    const auto& row = dt.rows[r];
    long line = dt.line_numbers[r];
    DyadYearRecord rec;
    try {
      auto year = parse_int_field(row[0]);
      if (!year) throw std::invalid_argument("year is required");
      rec.year = static_cast<int>(*year);
      rec.state_a = row[1];
      rec.state_b = row[2];
      if (rec.state_a.empty() || rec.state_b.empty())
        throw std::invalid_argument("state_a and state_b are required");
      auto mid = parse_bool_field(row[3]);
      if (!mid) throw std::invalid_argument("mid is required");
      rec.mid = *mid;
      if (auto h = parse_int_field(row[4])) rec.hostility = static_cast<int>(*h);
      if (auto c = parse_int_field(row[5])) rec.contiguity = static_cast<int>(*c);
      if (auto a = parse_int_field(row[6])) rec.alliance = static_cast<int>(*a);
      rec.extras.reserve(tables->extra_names.size());
      for (std::size_t c = kDyadHeaderPrefix.size(); c < row.size(); ++c)
        rec.extras.push_back(parse_double_field(row[c]));
    } catch (const std::invalid_argument& e) {
      throw ParseError(dyad_file, line, e.what());
    }
    std::string where = dyad_file + ":" + std::to_string(line) + ": ";
    if (rec.state_a == rec.state_b)
      throw ValidationError(where + "self-dyad " + rec.state_a);
    if (rec.state_a > rec.state_b) std::swap(rec.state_a, rec.state_b);
    if (rec.mid && !rec.hostility)
      throw ValidationError(where + "hostility required when mid=1 for " +
                            dyad_name(rec.state_a, rec.state_b));
    if (rec.hostility && (*rec.hostility < 1 || *rec.hostility > 5))
      throw ValidationError(where + "hostility " + std::to_string(*rec.hostility) +
                            " outside 1..5");
    if (rec.contiguity && (*rec.contiguity < 0 || *rec.contiguity > 6))
      throw ValidationError(where + "contiguity " + std::to_string(*rec.contiguity) +
                            " outside 0..6");
    if (rec.alliance && *rec.alliance < 0)
      throw ValidationError(where + "alliance level must be non-negative");
    for (const auto* id : {&rec.state_a, &rec.state_b})
      if (!in_system.count({rec.year, *id}))
        throw ValidationError(where + "state " + *id + " is not in the system in " +
                              std::to_string(rec.year));
    if (!seen_dyads.insert({rec.year, rec.state_a, rec.state_b}).second)
      throw ValidationError(where + "duplicate dyad-year (" +
                            dyad_name(rec.state_a, rec.state_b) + ", " +
                            std::to_string(rec.year) + ")");
    tables->dyads.push_back(std::move(rec));
  }

  if (!tables->dyads.empty()) {
    std::set<int> node_years, dyad_years;
    for (const auto& n : tables->nodes) node_years.insert(n.year);
    for (const auto& d : tables->dyads) dyad_years.insert(d.year);
    bool overlap = std::any_of(dyad_years.begin(), dyad_years.end(),
                               [&](int y) { return node_years.count(y) > 0; });
    if (!overlap) throw ValidationError("node and dyad files cover disjoint year ranges");
  }
  return tables;
}

// ---------------------------------------------------------------------------
// Panel construction.
// ---------------------------------------------------------------------------

TemporalNetworkPanel build_panel(std::shared_ptr<const RawTables> raw,
                                 const PanelDeriveConfig& config, EdgeRule rule) {
  config.validate();

  std::map<int, std::vector<const NodeYearRecord*>> by_year;
  for (const auto& n : raw->nodes) by_year[n.year].push_back(&n);

  std::vector<YearSlice> slices;
  slices.reserve(by_year.size());
  for (auto& [year, recs] : by_year) {
    YearSlice s;
    s.year = year;
    for (const auto* r : recs)
      if (r->in_system) s.roster.push_back(r->state_id);
    std::sort(s.roster.begin(), s.roster.end());
    int n = s.n();
    s.polity.assign(n, kNan);
    s.cinc.assign(n, kNan);
    s.dem.assign(n, -1);
    s.aut.assign(n, -1);
    for (const auto* r : recs) {
      if (!r->in_system) continue;
      int i = s.index_of(r->state_id);
      if (r->polity) {
        s.polity[i] = *r->polity;
        std::tie(s.dem[i], s.aut[i]) = regime_indicators(r->polity, config);
      }
      if (r->cinc) s.cinc[i] = *r->cinc;
    }
    s.net = NetworkState(n);
    s.dyad_cov["contiguity"].assign(dyad_count(n), kNan);
    s.dyad_cov["alliance"].assign(dyad_count(n), kNan);
    for (const auto& name : raw->extra_names) s.dyad_cov[name].assign(dyad_count(n), kNan);
    slices.push_back(std::move(s));
  }

  TemporalNetworkPanel panel(raw, std::move(slices), rule);
  for (const auto& d : raw->dyads) {
    if (!panel.has_year(d.year))
      throw ValidationError("dyad row for " + dyad_name(d.state_a, d.state_b) + " in year " +
                            std::to_string(d.year) + " has no node-year records");
    YearSlice& s = panel.mutable_slice(d.year);
    int i = s.index_of(d.state_a);
    int j = s.index_of(d.state_b);
    if (i < 0 || j < 0)
      throw ValidationError("dyad " + dyad_name(d.state_a, d.state_b) + " not on the " +
                            std::to_string(d.year) + " roster");
    if (i > j) std::swap(i, j);
    bool edge = d.mid;
    if (rule == EdgeRule::fatal)
      edge = d.mid && d.hostility && *d.hostility >= config.fatal_threshold;
    if (edge) s.net.set(i, j, true);
    std::size_t k = dyad_index(i, j, s.n());
    if (d.contiguity) s.dyad_cov["contiguity"][k] = *d.contiguity;
    if (d.alliance) s.dyad_cov["alliance"][k] = *d.alliance;
    for (std::size_t e = 0; e < d.extras.size(); ++e)
      if (d.extras[e]) s.dyad_cov[raw->extra_names[e]][k] = *d.extras[e];
  }
  return panel;
}

TemporalNetworkPanel ingest_panel(const std::string& node_file, const std::string& dyad_file,
                                  const PanelDeriveConfig& config) {
  return build_panel(parse_tables(node_file, dyad_file), config, EdgeRule::all_mid);
}

std::pair<TemporalNetworkPanel, TemporalNetworkPanel> derive_networks(
    const TemporalNetworkPanel& panel, const PanelDeriveConfig& config) {
  return {build_panel(panel.raw_ptr(), config, EdgeRule::all_mid),
          build_panel(panel.raw_ptr(), config, EdgeRule::fatal)};
}

// ---------------------------------------------------------------------------
// Derived covariates.
// ---------------------------------------------------------------------------

void derive_peace_years(TemporalNetworkPanel& panel, const PanelDeriveConfig& config) {
  auto years = panel.years();
  for (std::size_t t = 1; t < years.size(); ++t)
    if (years[t] != years[t - 1] + 1)
      throw ValidationError("peace-year derivation requires contiguous years (gap after " +
                            std::to_string(years[t - 1]) + ")");

  // Clock value carried from the previous year, keyed by state-id pair.
  std::map<std::pair<std::string, std::string>, long> prev_clock;
  for (auto& s : panel.mutable_slices()) {
    int n = s.n();
    auto& py = s.dyad_cov["peace_years"];
    auto& py2 = s.dyad_cov["peace_years_sq"];
    auto& py3 = s.dyad_cov["peace_years_cu"];
    py.assign(dyad_count(n), kNan);
    py2.assign(dyad_count(n), kNan);
    py3.assign(dyad_count(n), kNan);
    std::map<std::pair<std::string, std::string>, long> next_clock;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        std::pair<std::string, std::string> key{s.roster[i], s.roster[j]};
        long value;
        if (s.net.has(i, j)) {
          value = 0;
        } else {
          auto it = prev_clock.find(key);
          // First joint-membership year (or re-entry): no history credit.
          value = it == prev_clock.end() ? 0 : it->second + 1;
        }
        next_clock[key] = value;
        if (config.peace_year_cap && value > *config.peace_year_cap)
          value = *config.peace_year_cap;
        std::size_t k = dyad_index(i, j, n);
        double v = static_cast<double>(value);
        py[k] = v;
        py2[k] = v * v;
        py3[k] = v * v * v;
      }
    }
    prev_clock.swap(next_clock);
  }
}

void derive_capability_covariates(TemporalNetworkPanel& panel) {
  for (auto& s : panel.mutable_slices()) {
    int n = s.n();
    auto& ratio = s.dyad_cov["cap_ratio"];
    auto& high = s.dyad_cov["cinc_high"];
    ratio.assign(dyad_count(n), kNan);
    high.assign(dyad_count(n), kNan);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double a = s.cinc[i], b = s.cinc[j];
        if (std::isnan(a) || std::isnan(b)) continue;
        std::size_t k = dyad_index(i, j, n);
        double hi = std::max(a, b);
        high[k] = hi;
        double sum = a + b;
        if (sum > 0) ratio[k] = hi / sum;  // both zero: ratio stays missing
      }
    }
  }
}

void derive_scale_covariate(TemporalNetworkPanel& panel) {
  for (auto& s : panel.mutable_slices()) {
    if (s.roster.empty())
      throw ValidationError("empty roster in year " + std::to_string(s.year) +
                            "; ln_states undefined");
    s.year_cov["ln_states"] = std::log(static_cast<double>(s.n()));
  }
}

void copy_dyad_covariates(const TemporalNetworkPanel& from, TemporalNetworkPanel& to,
                          const std::vector<std::string>& names) {
  for (auto& dst : to.mutable_slices()) {
    const YearSlice& src = from.slice(dst.year);
    if (src.roster != dst.roster)
      throw ValidationError("cannot copy covariates: rosters differ in year " +
                            std::to_string(dst.year));
    for (const auto& name : names) {
      const auto* col = src.find_dyad_cov(name);
      if (!col) throw ValidationError("covariate '" + name + "' not derived on source panel");
      dst.dyad_cov[name] = *col;
    }
  }
}

// ---------------------------------------------------------------------------
// Export.
// ---------------------------------------------------------------------------

std::pair<std::string, std::string> export_panel(const TemporalNetworkPanel& panel) {
  const RawTables& raw = panel.raw();

  std::vector<const NodeYearRecord*> nodes;
  nodes.reserve(raw.nodes.size());
  for (const auto& n : raw.nodes) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(), [](const auto* a, const auto* b) {
    return std::tie(a->year, a->state_id) < std::tie(b->year, b->state_id);
  });

  CsvWriter nw(kNodeHeader);
  for (const auto* n : nodes) {
    nw.add_row({std::to_string(n->year), n->state_id,
                n->polity ? std::to_string(*n->polity) : "",
                n->cinc ? format_double(*n->cinc) : "", n->in_system ? "1" : "0"});
  }

  std::vector<const DyadYearRecord*> dyads;
  dyads.reserve(raw.dyads.size());
  for (const auto& d : raw.dyads) dyads.push_back(&d);
  std::sort(dyads.begin(), dyads.end(), [](const auto* a, const auto* b) {
    return std::tie(a->year, a->state_a, a->state_b) < std::tie(b->year, b->state_a, b->state_b);
  });

  std::vector<std::string> header = kDyadHeaderPrefix;
  header.insert(header.end(), raw.extra_names.begin(), raw.extra_names.end());
  CsvWriter dw(header);
  for (const auto* d : dyads) {
    std::vector<std::string> row = {std::to_string(d->year),
                                    d->state_a,
                                    d->state_b,
                                    d->mid ? "1" : "0",
                                    d->hostility ? std::to_string(*d->hostility) : "",
                                    d->contiguity ? std::to_string(*d->contiguity) : "",
                                    d->alliance ? std::to_string(*d->alliance) : ""};
    for (const auto& e : d->extras) row.push_back(e ? format_double(*e) : "");
    dw.add_row(row);
  }
  return {nw.str(), dw.str()};
}

PreparedPanels prepare_panels(std::shared_ptr<const RawTables> raw,
                              const PanelDeriveConfig& config) {
  PreparedPanels out{build_panel(raw, config, EdgeRule::all_mid),
                     build_panel(raw, config, EdgeRule::fatal)};
  // Peace clocks run against any MID, so both networks carry the all-MID clocks.
  derive_peace_years(out.all_mid, config);
  copy_dyad_covariates(out.all_mid, out.fatal,
                       {"peace_years", "peace_years_sq", "peace_years_cu"});
  for (auto* p : {&out.all_mid, &out.fatal}) {
    derive_capability_covariates(*p);
    derive_scale_covariate(*p);
  }
  return out;
}

PreparedPanels prepare_panels(const std::string& node_file, const std::string& dyad_file,
                              const PanelDeriveConfig& config) {
  return prepare_panels(parse_tables(node_file, dyad_file), config);
}

}  // namespace tergm
