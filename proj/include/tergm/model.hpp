#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tergm {

// Statistic families the engine knows how to score.  Structural terms look at
// the adjacency structure (plus regime labels for the mixed terms); covariate
// terms read dyad- or year-level columns off the panel.
enum class TermKind {
  edges,
  isolates,
  mixed_two_star,
  mixed_triangle,
  gwesp,
  dyad_cov,
  year_cov,
  joint_indicator,
  weak_link,
};

enum class RegimeType { dem, aut };

const char* term_kind_name(TermKind k);
const char* regime_name(RegimeType r);

struct TermSpec {
  TermKind kind = TermKind::edges;
  // mixed_* and joint_indicator: which regime the matched pair belongs to.
  std::optional<RegimeType> same_type;
  // dyad_cov / year_cov: column to read.
  std::string cov_name;
  // gwesp decay.
  double alpha = 0.5;

  // Canonical display name, e.g. "edges", "mixed_two_star_dem", "gwesp_0.5",
  // "contiguity", "joint_aut".
  std::string name() const;
};

struct ModelSpec {
  std::vector<TermSpec> terms;

  std::size_t size() const { return terms.size(); }
  std::vector<std::string> term_names() const;
  // Checks per-term fields, duplicate names, and (optionally) that an edges
  // term is present.  Throws ValidationError.
  void validate(bool require_edges = true) const;
  int index_of(const std::string& term_name) const;  // -1 when absent
};

// JSON wire format: array of {"term": ..., "same_type"/"cov_name"/"alpha": ...}.
std::string model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const std::string& json_text);

}  // namespace tergm
