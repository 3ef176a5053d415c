#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tergm/network_state.hpp"

namespace tergm {

// ---------------------------------------------------------------------------
// Raw records, as read from the node-year and dyad-year CSVs.
// ---------------------------------------------------------------------------

struct NodeYearRecord {
  int year = 0;
  std::string state_id;
  std::optional<int> polity;   // [-10, 10]
  std::optional<double> cinc;  // [0, 1]
  bool in_system = true;
};

struct DyadYearRecord {
  int year = 0;
  std::string state_a, state_b;  // normalized so state_a < state_b
  bool mid = false;
  std::optional<int> hostility;  // 1..5, required when mid
  std::optional<int> contiguity;  // ordinal 0..6
  std::optional<int> alliance;    // ordinal commitment level
  std::vector<std::optional<double>> extras;  // aligned with RawTables::extra_names
};

struct RawTables {
  std::vector<NodeYearRecord> nodes;
  std::vector<DyadYearRecord> dyads;
  std::vector<std::string> extra_names;
};

// ---------------------------------------------------------------------------
// Derivation settings.
// ---------------------------------------------------------------------------

struct PanelDeriveConfig {
  int fatal_threshold = 4;  // hostility >= threshold => fatal tie
  int democracy_cut = 6;    // dem iff polity >  democracy_cut
  int autocracy_cut = -6;   // aut iff polity <  autocracy_cut
  std::optional<int> peace_year_cap;

  void validate() const;  // democracy_cut > autocracy_cut, threshold in 1..5
};

enum class EdgeRule { all_mid, fatal };

const char* edge_rule_name(EdgeRule r);

// (dem, aut) indicators for one polity score; dem iff strictly above the
// democracy cut, aut iff strictly below the autocracy cut, -1 when missing.
std::pair<int8_t, int8_t> regime_indicators(std::optional<int> polity,
                                            const PanelDeriveConfig& config);

// ---------------------------------------------------------------------------
// One network-year: roster, attributes, adjacency, covariates.
//
// Node indices are local to the slice; the roster is sorted by state id so
// every derived structure is deterministic.  Dyadic covariates are packed
// upper-triangular arrays indexed by dyad_index(); NaN marks missing.
// ---------------------------------------------------------------------------

struct YearSlice {
  int year = 0;
  std::vector<std::string> roster;
  std::vector<double> polity;  // NaN = missing
  std::vector<double> cinc;    // NaN = missing
  std::vector<int8_t> dem, aut;  // 1, 0, or -1 = missing
  NetworkState net;
  std::map<std::string, std::vector<double>> dyad_cov;
  std::map<std::string, double> year_cov;

  int n() const { return static_cast<int>(roster.size()); }
  int index_of(const std::string& id) const;  // -1 if not on the roster

  const std::vector<double>* find_dyad_cov(const std::string& name) const;
};

class TemporalNetworkPanel {
 public:
  TemporalNetworkPanel() = default;
  TemporalNetworkPanel(std::shared_ptr<const RawTables> raw, std::vector<YearSlice> slices,
                       EdgeRule rule)
      : raw_(std::move(raw)), slices_(std::move(slices)), rule_(rule) {}

  std::vector<int> years() const;
  bool has_year(int year) const;
  const YearSlice& slice(int year) const;
  YearSlice& mutable_slice(int year);
  const std::vector<YearSlice>& slices() const { return slices_; }
  std::vector<YearSlice>& mutable_slices() { return slices_; }
  const RawTables& raw() const { return *raw_; }
  std::shared_ptr<const RawTables> raw_ptr() const { return raw_; }
  EdgeRule rule() const { return rule_; }

 private:
  std::shared_ptr<const RawTables> raw_;
  std::vector<YearSlice> slices_;  // ascending year order
  EdgeRule rule_ = EdgeRule::all_mid;
};

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------

// Parse + validate the two CSVs.  Throws ParseError / ValidationError.
std::shared_ptr<const RawTables> parse_tables(const std::string& node_file,
                                              const std::string& dyad_file);

// Roster/attribute/adjacency construction from validated records.
TemporalNetworkPanel build_panel(std::shared_ptr<const RawTables> raw,
                                 const PanelDeriveConfig& config, EdgeRule rule);

TemporalNetworkPanel ingest_panel(const std::string& node_file, const std::string& dyad_file,
                                  const PanelDeriveConfig& config);

// (all-MID network, fatal subnetwork) from the same records.
std::pair<TemporalNetworkPanel, TemporalNetworkPanel> derive_networks(
    const TemporalNetworkPanel& panel, const PanelDeriveConfig& config);

// Consecutive conflict-free-year clocks computed against the panel's own
// adjacency, plus exact squared/cubed columns.  Clocks start at 0 in a
// dyad's first joint-membership year and reset on system re-entry.
void derive_peace_years(TemporalNetworkPanel& panel, const PanelDeriveConfig& config);

// cap_ratio = max(cinc) / (cinc_a + cinc_b), cinc_high = max(cinc).
void derive_capability_covariates(TemporalNetworkPanel& panel);

// Per-year constant ln(|roster|) attached as a year covariate.
void derive_scale_covariate(TemporalNetworkPanel& panel);

// Copy named dyadic covariate columns between panels built from the same
// records (identical rosters required).
void copy_dyad_covariates(const TemporalNetworkPanel& from, TemporalNetworkPanel& to,
                          const std::vector<std::string>& names);

// Canonical CSV export of the raw records: (node_csv, dyad_csv) bytes,
// ordered by (year, state) / (year, dyad key).
std::pair<std::string, std::string> export_panel(const TemporalNetworkPanel& panel);

// Full pipeline used by the CLI: ingest, split into the two networks, derive
// every standard covariate.  Peace-year clocks are computed on the all-MID
// network and attached to both panels.
struct PreparedPanels {
  TemporalNetworkPanel all_mid;
  TemporalNetworkPanel fatal;

  const TemporalNetworkPanel& by_rule(EdgeRule r) const {
    return r == EdgeRule::all_mid ? all_mid : fatal;
  }
};

PreparedPanels prepare_panels(std::shared_ptr<const RawTables> raw,
                              const PanelDeriveConfig& config);
PreparedPanels prepare_panels(const std::string& node_file, const std::string& dyad_file,
                              const PanelDeriveConfig& config);

// Reserved derived-covariate names; rejected as extra CSV columns.
const std::vector<std::string>& reserved_covariate_names();

}  // namespace tergm
