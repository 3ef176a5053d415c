#include "tergm/runner.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "tergm/csv.hpp"
#include "tergm/errors.hpp"
#include "tergm/estimate.hpp"
#include "tergm/evaluate.hpp"
#include "tergm/panel.hpp"
#include "tergm/sampler.hpp"
#include "tergm/stats.hpp"
#include "tergm/synth.hpp"
#include "tergm/util.hpp"
#include "tergm/version.hpp"

namespace tergm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string joinpath(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path.empty() ? "<config>" : path, msg);
}

const json* find(const json& o, const char* key) {
  auto it = o.find(key);
  return it == o.end() ? nullptr : &*it;
}

void check_object(const json& o, const std::string& path) {
  if (!o.is_object()) fail(path, "must be a JSON object");
}

void check_known_keys(const json& o, const std::string& path,
                      std::initializer_list<const char*> keys) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(joinpath(path, it.key()), "unknown field");
  }
}

long long get_int(const json& o, const std::string& path, const char* key,
                  std::optional<long long> def) {
  const json* v = find(o, key);
  if (!v || v->is_null()) {
    if (def) return *def;
    fail(joinpath(path, key), "missing required integer");
  }
  if (!v->is_number_integer()) fail(joinpath(path, key), "must be an integer");
  return v->get<long long>();
}

double get_num(const json& o, const std::string& path, const char* key,
               std::optional<double> def) {
  const json* v = find(o, key);
  if (!v || v->is_null()) {
    if (def) return *def;
    fail(joinpath(path, key), "missing required number");
  }
  if (!v->is_number()) fail(joinpath(path, key), "must be a number");
  return v->get<double>();
}

std::string get_str(const json& o, const std::string& path, const char* key,
                    std::optional<std::string> def) {
  const json* v = find(o, key);
  if (!v || v->is_null()) {
    if (def) return *def;
    fail(joinpath(path, key), "missing required string");
  }
  if (!v->is_string()) fail(joinpath(path, key), "must be a string");
  return v->get<std::string>();
}

std::pair<int, int> get_year_range(const json& o, const std::string& path) {
  if (!o.is_array() || o.size() != 2 || !o[0].is_number_integer() || !o[1].is_number_integer())
    fail(path, "must be a two-element [first_year, last_year] array");
  int lo = o[0].get<int>(), hi = o[1].get<int>();
  if (lo > hi) fail(path, "first year exceeds last year");
  return {lo, hi};
}

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  fs::path out;
  std::string nodes_file, dyads_file;
  bool has_data = false;
  EdgeRule network = EdgeRule::all_mid;
  PanelDeriveConfig derive;
  ModelSpec model;
  bool has_model = false;
  int n_boot = 500;
  double tol = 1e-8;
  int max_iter = 100;
  double ridge = 0.0;
  SamplerConfig sampler;
  std::optional<std::pair<int, int>> train, test;
  std::optional<ModelSpec> gof_terms;
  int closure_cap = 6;
  std::string influence_target;
  std::optional<SynthConfig> synth;
  int threads = 1;
  std::string config_hash;
};

RunConfig load_config(const std::string& command, const std::string& config_path,
                      const CliOverrides& ov) {
  std::ifstream in(config_path);
  if (!in) fail("", "cannot open config file: " + config_path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("", std::string("config is not valid JSON: ") + e.what());
  }
  check_object(root, "");
  check_known_keys(root, "",
                   {"seed", "out", "data", "network", "derive", "model", "estimation", "sampler",
                    "split", "gof", "closure", "influence", "synth"});

  RunConfig c;
  c.command = command;
  c.threads = std::max(1, ov.threads);

  long long seed = get_int(root, "", "seed", std::nullopt);
  if (seed < 0) fail("seed", "must be non-negative");
  c.seed = ov.seed.value_or(static_cast<std::uint64_t>(seed));

  if (ov.out)
    c.out = *ov.out;
  else if (find(root, "out"))
    c.out = get_str(root, "", "out", std::nullopt);
  if (c.out.empty()) fail("out", "output directory required (config field or --out)");

  if (const json* d = find(root, "data")) {
    check_object(*d, "data");
    check_known_keys(*d, "data", {"nodes", "dyads"});
    c.nodes_file = get_str(*d, "data", "nodes", std::nullopt);
    c.dyads_file = get_str(*d, "data", "dyads", std::nullopt);
    if (!fs::exists(c.nodes_file)) fail("data.nodes", "file not found: " + c.nodes_file);
    if (!fs::exists(c.dyads_file)) fail("data.dyads", "file not found: " + c.dyads_file);
    c.has_data = true;
  }

  if (find(root, "network")) {
    std::string n = get_str(root, "", "network", std::nullopt);
    if (n == "all_mid")
      c.network = EdgeRule::all_mid;
    else if (n == "fatal")
      c.network = EdgeRule::fatal;
    else
      fail("network", "must be \"all_mid\" or \"fatal\"");
  }

  if (const json* d = find(root, "derive")) {
    check_object(*d, "derive");
    check_known_keys(*d, "derive",
                     {"fatal_threshold", "democracy_cut", "autocracy_cut", "peace_year_cap"});
    c.derive.fatal_threshold = static_cast<int>(get_int(*d, "derive", "fatal_threshold", 4));
    c.derive.democracy_cut = static_cast<int>(get_int(*d, "derive", "democracy_cut", 6));
    c.derive.autocracy_cut = static_cast<int>(get_int(*d, "derive", "autocracy_cut", -6));
    if (const json* cap = find(*d, "peace_year_cap"); cap && !cap->is_null())
      c.derive.peace_year_cap = static_cast<int>(get_int(*d, "derive", "peace_year_cap", std::nullopt));
    try {
      c.derive.validate();
    } catch (const ValidationError& e) {
      fail("derive", e.what());
    }
  }

  if (const json* m = find(root, "model")) {
    try {
      c.model = model_from_json(m->dump());
    } catch (const ValidationError& e) {
      fail("model", e.what());
    }
    c.has_model = true;
  }

  if (const json* e = find(root, "estimation")) {
    check_object(*e, "estimation");
    check_known_keys(*e, "estimation", {"n_boot", "tol", "max_iter", "ridge"});
    c.n_boot = static_cast<int>(get_int(*e, "estimation", "n_boot", 500));
    c.tol = get_num(*e, "estimation", "tol", 1e-8);
    c.max_iter = static_cast<int>(get_int(*e, "estimation", "max_iter", 100));
    c.ridge = get_num(*e, "estimation", "ridge", 0.0);
    if (c.n_boot < 1) fail("estimation.n_boot", "must be at least 1");
    if (!(c.tol > 0)) fail("estimation.tol", "must be positive");
    if (c.max_iter < 1) fail("estimation.max_iter", "must be at least 1");
    if (c.ridge < 0) fail("estimation.ridge", "must be non-negative");
  }

  if (const json* s = find(root, "sampler")) {
    check_object(*s, "sampler");
    check_known_keys(*s, "sampler", {"burn_in", "thin", "n_draws", "init", "random_p"});
    c.sampler.burn_in = get_int(*s, "sampler", "burn_in", -1);
    c.sampler.thin = get_int(*s, "sampler", "thin", -1);
    c.sampler.n_draws = static_cast<int>(get_int(*s, "sampler", "n_draws", 1000));
    c.sampler.random_p = get_num(*s, "sampler", "random_p", 0.5);
    std::string init = get_str(*s, "sampler", "init", "empty");
    if (init == "empty")
      c.sampler.init = SamplerConfig::Init::empty;
    else if (init == "observed")
      c.sampler.init = SamplerConfig::Init::observed;
    else if (init == "random")
      c.sampler.init = SamplerConfig::Init::random;
    else
      fail("sampler.init", "must be \"empty\", \"observed\", or \"random\"");
    try {
      c.sampler.validate(0);
    } catch (const ValidationError& e2) {
      fail("sampler", e2.what());
    }
  }

  if (const json* s = find(root, "split")) {
    check_object(*s, "split");
    check_known_keys(*s, "split", {"train", "test"});
    if (const json* t = find(*s, "train")) c.train = get_year_range(*t, "split.train");
    if (const json* t = find(*s, "test")) c.test = get_year_range(*t, "split.test");
    if (c.train && c.test && c.train->first <= c.test->second && c.test->first <= c.train->second)
      fail("split", "train and test years overlap");
  }

  if (const json* g = find(root, "gof")) {
    check_object(*g, "gof");
    check_known_keys(*g, "gof", {"terms"});
    if (const json* t = find(*g, "terms")) {
      try {
        c.gof_terms = model_from_json(t->dump());
      } catch (const ValidationError& e) {
        fail("gof.terms", e.what());
      }
    }
  }

  if (const json* cl = find(root, "closure")) {
    check_object(*cl, "closure");
    check_known_keys(*cl, "closure", {"cap"});
    c.closure_cap = static_cast<int>(get_int(*cl, "closure", "cap", 6));
    if (c.closure_cap < 1) fail("closure.cap", "must be at least 1");
  }

  if (const json* infl = find(root, "influence")) {
    check_object(*infl, "influence");
    check_known_keys(*infl, "influence", {"target"});
    c.influence_target = get_str(*infl, "influence", "target", "");
  }

  if (const json* s = find(root, "synth")) {
    check_object(*s, "synth");
    check_known_keys(*s, "synth",
                     {"n_states", "first_year", "n_years", "dem_frac", "aut_frac", "contiguity_p",
                      "alliance_p", "missing_polity_frac", "theta"});
    SynthConfig sc;
    sc.n_states = static_cast<int>(get_int(*s, "synth", "n_states", 30));
    sc.first_year = static_cast<int>(get_int(*s, "synth", "first_year", 1900));
    sc.n_years = static_cast<int>(get_int(*s, "synth", "n_years", 10));
    sc.dem_frac = get_num(*s, "synth", "dem_frac", 0.35);
    sc.aut_frac = get_num(*s, "synth", "aut_frac", 0.35);
    sc.contiguity_p = get_num(*s, "synth", "contiguity_p", 0.2);
    sc.alliance_p = get_num(*s, "synth", "alliance_p", 0.15);
    sc.missing_polity_frac = get_num(*s, "synth", "missing_polity_frac", 0.0);
    const json* th = find(*s, "theta");
    if (!th || !th->is_array()) fail("synth.theta", "must be an array of numbers");
    for (const auto& v : *th) {
      if (!v.is_number()) fail("synth.theta", "must be an array of numbers");
      sc.theta.push_back(v.get<double>());
    }
    if (!c.has_model) fail("model", "required for synth (the generating model)");
    sc.model = c.model;
    sc.seed = c.seed;
    sc.sampler = c.sampler;
    sc.derive = c.derive;
    try {
      sc.validate();
    } catch (const ValidationError& e) {
      fail("synth", e.what());
    }
    c.synth = std::move(sc);
  }

  auto require = [&](bool ok, const char* path, const char* msg) {
    if (!ok) fail(path, msg);
  };
  if (command == "synth") {
    require(c.synth.has_value(), "synth", "required for the synth command");
  } else {
    require(c.has_data, "data", "required for this command");
  }
  if (command == "fit" || command == "gof" || command == "predict" || command == "closure" ||
      command == "influence") {
    require(c.has_model, "model", "required for this command");
    try {
      c.model.validate(/*require_edges=*/true);
    } catch (const ValidationError& e) {
      fail("model", e.what());
    }
  }
  if (command == "predict") {
    require(c.train.has_value() && c.test.has_value(), "split",
            "predict requires both train and test year ranges");
  }
  if (command == "influence") {
    require(!c.influence_target.empty(), "influence.target", "required for the influence command");
    if (c.model.index_of(c.influence_target) < 0)
      fail("influence.target", "'" + c.influence_target + "' is not a term of the model");
  }

  json canon = root;
  canon["seed"] = c.seed;
  canon.erase("out");
  c.config_hash = fnv1a_hex(canon.dump());
  return c;
}

// One run owns the output directory for its lifetime.
struct DirLock {
  fs::path file;
  explicit DirLock(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail("out", "cannot create output directory " + dir.string() + ": " + ec.message());
    file = dir / ".lock";
    int fd = ::open(file.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST)
        fail("out", "output directory is locked by another run (remove " + file.string() +
                        " if stale)");
      fail("out", "cannot create lock file " + file.string());
    }
    ::close(fd);
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(file, ec);
  }
};

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string bytes) {
    files_.emplace_back(name, std::move(bytes));
  }
  void add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }
  json& counts() { return counts_; }
  json& warnings() { return warnings_; }

  void publish(const RunConfig& c) {
    json manifest;
    manifest["command"] = c.command;
    manifest["version"] = kVersion;
    manifest["seed"] = c.seed;
    manifest["config_hash"] = c.config_hash;
    json outs = json::array();
    for (const auto& [name, bytes] : files_) outs.push_back(name);
    manifest["outputs"] = outs;
    manifest["counts"] = counts_.is_null() ? json::object() : counts_;
    if (!warnings_.is_null()) manifest["warnings"] = warnings_;
    for (const auto& [name, bytes] : files_) atomic_write_file(dir_ / name, bytes);
    atomic_write_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
  json counts_;
  json warnings_;
};

std::vector<int> years_in(const TemporalNetworkPanel& p,
                          std::optional<std::pair<int, int>> range) {
  std::vector<int> out;
  for (const auto& s : p.slices())
    if (!range || (s.year >= range->first && s.year <= range->second)) out.push_back(s.year);
  return out;
}

void add_panel_counts(Artifacts& a, const TemporalNetworkPanel& panel) {
  a.counts()["node_rows"] = panel.raw().nodes.size();
  a.counts()["dyad_rows"] = panel.raw().dyads.size();
  a.counts()["years"] = panel.slices().size();
}

json fit_meta(const FitResult& fit, const DesignMatrix& d) {
  json m;
  m["converged"] = fit.converged;
  m["iterations"] = fit.iterations;
  m["gradient_norm"] = fit.gradient_norm;
  m["log_pseudolikelihood"] = fit.log_pseudolikelihood;
  m["n_rows"] = fit.n_rows;
  m["excluded_rows"] = d.excluded_rows;
  m["indeterminate_label_triples"] = d.indeterminate_triples;
  m["n_boot"] = fit.n_boot;
  m["n_boot_failed"] = fit.n_boot_failed;
  m["terms"] = fit.terms;
  m["theta"] = fit.theta;
  if (fit.has_ci()) {
    m["ci_lo95"] = fit.ci_lo95;
    m["ci_hi95"] = fit.ci_hi95;
  }
  return m;
}

void cmd_fit(const RunConfig& c) {
  PreparedPanels panels = prepare_panels(c.nodes_file, c.dyads_file, c.derive);
  const TemporalNetworkPanel& panel = panels.by_rule(c.network);
  DesignMatrix d = build_design_matrix(panel, c.model, c.train);
  BootstrapOptions bo;
  bo.n_boot = c.n_boot;
  bo.seed = c.seed;
  bo.tol = c.tol;
  bo.max_iter = c.max_iter;
  bo.ridge = c.ridge;
  bo.threads = c.threads;
  FitResult fit = bootstrap_fit(d, bo);

  CsvWriter w({"term", "estimate", "lo95", "hi95", "reliable"});
  for (const auto& r : significance_table(fit))
    w.add_row({r.term, format_double(r.estimate), format_double(r.lo95), format_double(r.hi95),
               r.reliable ? "1" : "0"});

  Artifacts a(c.out);
  a.add("coefficients.csv", w.str());
  a.add_json("fit.json", fit_meta(fit, d));
  add_panel_counts(a, panel);
  a.counts()["design_rows"] = d.n_rows();
  a.counts()["excluded_rows"] = d.excluded_rows;
  a.publish(c);
}

void cmd_gof(const RunConfig& c) {
  PreparedPanels panels = prepare_panels(c.nodes_file, c.dyads_file, c.derive);
  const TemporalNetworkPanel& panel = panels.by_rule(c.network);
  DesignMatrix d = build_design_matrix(panel, c.model, c.train);
  FitOptions fo;
  fo.tol = c.tol;
  fo.max_iter = c.max_iter;
  fo.ridge = c.ridge;
  FitResult fit = fit_logistic(d, fo);

  ModelSpec battery = c.gof_terms.value_or(default_gof_battery());
  SamplerConfig sc = c.sampler;
  sc.seed = c.seed;
  std::vector<SamplerReport> reports;
  std::vector<GofCell> cells =
      goodness_of_fit(fit, panel, c.model, battery, sc, c.threads, &reports, c.train);

  CsvWriter w({"year", "term", "observed", "sim_mean", "lo95", "hi95", "within"});
  for (const auto& cell : cells)
    w.add_row({std::to_string(cell.year), cell.term, format_double(cell.observed),
               format_double(cell.sim_mean), format_double(cell.lo95), format_double(cell.hi95),
               cell.within ? "1" : "0"});

  Artifacts a(c.out);
  a.add("gof.csv", w.str());
  json meta = fit_meta(fit, d);
  meta["n_cells"] = cells.size();
  long long within = std::count_if(cells.begin(), cells.end(),
                                   [](const GofCell& g) { return g.within; });
  meta["n_within"] = within;
  a.add_json("gof.json", meta);
  for (const auto& r : reports)
    if (r.degenerate) a.warnings().push_back(r.warning);
  add_panel_counts(a, panel);
  a.publish(c);
}

void cmd_predict(const RunConfig& c) {
  PreparedPanels panels = prepare_panels(c.nodes_file, c.dyads_file, c.derive);
  const TemporalNetworkPanel& panel = panels.by_rule(c.network);
  DesignMatrix d = build_design_matrix(panel, c.model, c.train);
  FitOptions fo;
  fo.tol = c.tol;
  fo.max_iter = c.max_iter;
  fo.ridge = c.ridge;
  FitResult fit = fit_logistic(d, fo);

  std::vector<int> test_years = years_in(panel, c.test);
  if (test_years.empty()) throw ValidationError("no panel years inside the test range");
  PredictionSet preds =
      predict_ties(fit.theta, c.model, panel, test_years, years_in(panel, c.train));

  CsvWriter pw({"year", "state_a", "state_b", "probability", "label"});
  for (const auto& r : preds.rows)
    pw.add_row({std::to_string(r.year), r.state_a, r.state_b, format_double(r.probability),
                std::to_string(r.label)});

  CsvWriter sw({"year", "roc_auc", "pr_auc", "n_pos", "n_dyads"});
  for (const auto& r : per_year_scores(preds))
    sw.add_row({std::to_string(r.year), format_double(r.roc), format_double(r.pr),
                std::to_string(r.n_pos), std::to_string(r.n_dyads)});

  json metrics;
  long long n_pos = 0;
  for (const auto& r : preds.rows) n_pos += r.label;
  metrics["n_predictions"] = preds.rows.size();
  metrics["n_pos"] = n_pos;
  metrics["skipped_missing_covariates"] = preds.skipped;
  if (n_pos > 0 && n_pos < static_cast<long long>(preds.rows.size())) {
    metrics["roc_auc_pooled"] = roc_auc(preds);
    metrics["pr_auc_pooled"] = pr_auc(preds);
  } else {
    metrics["roc_auc_pooled"] = nullptr;
    metrics["pr_auc_pooled"] = nullptr;
    metrics["flagged"] = "pooled test labels are single-class";
  }

  Artifacts a(c.out);
  a.add("predictions.csv", pw.str());
  a.add("scores.csv", sw.str());
  a.add_json("metrics.json", metrics);
  a.add_json("fit.json", fit_meta(fit, d));
  add_panel_counts(a, panel);
  a.publish(c);
}

std::string stratum_label(int w, int cap) {
  return w >= cap ? std::to_string(cap) + "+" : std::to_string(w);
}

void cmd_closure(const RunConfig& c) {
  PreparedPanels panels = prepare_panels(c.nodes_file, c.dyads_file, c.derive);

  Artifacts a(c.out);
  CsvWriter w({"network", "stratum", "probability"});
  std::vector<double> pooled_mid, pooled_fatal;
  json meta;
  for (EdgeRule rule : {EdgeRule::all_mid, EdgeRule::fatal}) {
    const TemporalNetworkPanel& panel = panels.by_rule(rule);
    DesignMatrix d = build_design_matrix(panel, c.model, std::nullopt);
    FitOptions fo;
    fo.tol = c.tol;
    fo.max_iter = c.max_iter;
    fo.ridge = c.ridge;
    FitResult fit = fit_logistic(d, fo);
    ClosureDistribution dist =
        closure_probabilities(fit.theta, c.model, panel, c.closure_cap);
    for (const auto& [stratum, probs] : dist.strata)
      for (double p : probs)
        w.add_row({edge_rule_name(rule), stratum_label(stratum, c.closure_cap),
                   format_double(p)});
    auto& pooled = rule == EdgeRule::all_mid ? pooled_mid : pooled_fatal;
    pooled = dist.pooled();
    json side;
    side["n"] = dist.total();
    side["skipped_missing_covariates"] = dist.skipped;
    side["theta"] = fit.theta;
    if (dist.total() == 0) a.warnings().push_back(std::string("no qualifying dyads in the ") +
                                                  edge_rule_name(rule) + " network");
    meta[edge_rule_name(rule)] = side;
  }

  json ks;
  if (!pooled_mid.empty() && !pooled_fatal.empty()) {
    KsResult r = ks_two_sample(pooled_mid, pooled_fatal);
    ks["D"] = r.d;
    ks["p_two_sided"] = r.p_two;
    ks["D_plus"] = r.d_plus;
    ks["p_one_sided"] = r.p_one;
    ks["n"] = r.n;
    ks["m"] = r.m;
    ks["alternative"] = "all_mid closure probabilities stochastically greater than fatal";
  } else {
    ks["D"] = nullptr;
    ks["p_two_sided"] = nullptr;
    ks["p_one_sided"] = nullptr;
    ks["flagged"] = "at least one closure distribution is empty";
  }
  ks["networks"] = meta;

  a.add("closure.csv", w.str());
  a.add_json("ks.json", ks);
  add_panel_counts(a, panels.all_mid);
  a.publish(c);
}

void cmd_influence(const RunConfig& c) {
  PreparedPanels panels = prepare_panels(c.nodes_file, c.dyads_file, c.derive);
  const TemporalNetworkPanel& panel = panels.by_rule(c.network);
  InfluenceOptions io;
  io.tol = c.tol;
  io.max_iter = c.max_iter;
  io.ridge = c.ridge;
  io.threads = c.threads;
  InfluenceReport report = influence_scan(panel, c.model, c.influence_target, io);

  CsvWriter w({"state_a", "state_b", "delta", "rank", "profile"});
  for (const auto& r : report.rows)
    w.add_row({r.state_a, r.state_b, format_double(r.delta), std::to_string(r.rank), r.profile});

  json meta;
  meta["target"] = report.target;
  meta["baseline_estimate"] = report.baseline.theta[c.model.index_of(c.influence_target)];
  meta["baseline_theta"] = report.baseline.theta;
  meta["n_dyads"] = report.rows.size();
  meta["n_failed"] =
      std::count_if(report.rows.begin(), report.rows.end(),
                    [](const InfluenceRow& r) { return r.failed; });

  Artifacts a(c.out);
  a.add("influence.csv", w.str());
  a.add_json("influence.json", meta);
  add_panel_counts(a, panel);
  a.publish(c);
}

void cmd_synth(const RunConfig& c) {
  SynthResult result = generate_synthetic_panel(*c.synth);
  TemporalNetworkPanel panel = build_panel(result.raw, c.derive, EdgeRule::all_mid);
  auto [nodes_csv, dyads_csv] = export_panel(panel);

  json meta;
  meta["model"] = json::parse(model_to_json(c.synth->model));
  meta["true_theta"] = c.synth->theta;
  meta["n_states"] = c.synth->n_states;
  meta["n_years"] = c.synth->n_years;
  meta["first_year"] = c.synth->first_year;

  Artifacts a(c.out);
  a.add("nodes.csv", nodes_csv);
  a.add("dyads.csv", dyads_csv);
  a.add_json("synth.json", meta);
  for (const auto& r : result.reports)
    if (r.degenerate) a.warnings().push_back(r.warning);
  add_panel_counts(a, panel);
  a.publish(c);
}

void cmd_features(const RunConfig& c) {
  PreparedPanels panels = prepare_panels(c.nodes_file, c.dyads_file, c.derive);
  const TemporalNetworkPanel& panel = panels.by_rule(c.network);
  CsvWriter w({"year", "feature", "count"});
  for (const auto& r : yearly_feature_counts(panel))
    w.add_row({std::to_string(r.year), r.feature, std::to_string(r.count)});

  Artifacts a(c.out);
  a.add("features.csv", w.str());
  add_panel_counts(a, panel);
  a.publish(c);
}

json error_json(const std::string& type, const std::string& message, const json& extra) {
  json e;
  e["error"]["type"] = type;
  e["error"]["message"] = message;
  for (auto it = extra.begin(); it != extra.end(); ++it) e["error"][it.key()] = it.value();
  return e;
}

void report_error(const json& e, const CliOverrides& ov) {
  std::fprintf(stderr, "%s\n", e.dump(2).c_str());
  if (ov.out) {
    try {
      fs::create_directories(*ov.out);
      atomic_write_file(fs::path(*ov.out) / "error.json", e.dump(2) + "\n");
    } catch (...) {
    }
  }
}

}  // namespace

bool is_known_command(const std::string& command) {
  static const std::vector<std::string> known = {"fit",     "gof",   "predict", "closure",
                                                 "influence", "synth", "features"};
  return std::find(known.begin(), known.end(), command) != known.end();
}

void execute(const std::string& command, const std::string& config_path,
             const CliOverrides& overrides) {
  if (!is_known_command(command)) fail("command", "unknown command: " + command);
  RunConfig c = load_config(command, config_path, overrides);
  DirLock lock(c.out);
  if (command == "fit")
    cmd_fit(c);
  else if (command == "gof")
    cmd_gof(c);
  else if (command == "predict")
    cmd_predict(c);
  else if (command == "closure")
    cmd_closure(c);
  else if (command == "influence")
    cmd_influence(c);
  else if (command == "synth")
    cmd_synth(c);
  else
    cmd_features(c);
}

int run_cli(const std::string& command, const std::string& config_path,
            const CliOverrides& overrides) {
  try {
    execute(command, config_path, overrides);
    return 0;
  } catch (const ConfigError& e) {
    report_error(error_json("config", e.what(), {{"field", e.field()}}), overrides);
    return 2;
  } catch (const ParseError& e) {
    report_error(error_json("parse", e.what(), {{"file", e.file()}, {"line", e.line()}}),
                 overrides);
    return 3;
  } catch (const ValidationError& e) {
    report_error(error_json("validation", e.what(), json::object()), overrides);
    return 3;
  } catch (const EstimationError& e) {
    report_error(error_json("estimation", e.what(), json::object()), overrides);
    return 4;
  } catch (const std::exception& e) {
    report_error(error_json("internal", e.what(), json::object()), overrides);
    return 1;
  }
}

}  // namespace tergm
