#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tergm/model.hpp"
#include "tergm/panel.hpp"

namespace tergm {

// Counters for conditions that shrink the usable information without being
// errors: mixed-term triples whose regime membership cannot be decided from
// the available labels, and design rows dropped for missing covariates.
struct StatCounters {
  long long indeterminate_triples = 0;
  long long excluded_rows = 0;
};

// h_term(N) on one year slice.  Covariate-family terms sum the dyad value
// over present edges; missing values propagate as NaN.
double full_statistic(const YearSlice& s, const TermSpec& term, StatCounters* counters = nullptr);

// h(N with i–j) − h(N without i–j), computed from the local neighborhood
// only.  The result does not depend on the slice's current (i,j) state.
double change_statistic(const YearSlice& s, const TermSpec& term, int i, int j,
                        StatCounters* counters = nullptr);

// All terms of a model at once; out must hold model.size() doubles.
void change_vector(const YearSlice& s, const ModelSpec& model, int i, int j, double* out,
                   StatCounters* counters = nullptr);

// Edge value of a covariate-family term (dyad_cov, year_cov, joint_indicator,
// weak_link) on dyad (i,j); NaN when undeterminable.  Structural terms throw.
double dyad_value(const YearSlice& s, const TermSpec& term, int i, int j);

bool is_covariate_term(TermKind k);

struct DesignMatrix {
  std::vector<std::string> colnames;
  std::size_t k = 0;
  std::vector<double> x;        // row-major, n_rows × k
  std::vector<std::uint8_t> y;  // observed tie
  std::vector<int> year;        // per row
  std::vector<std::int32_t> dyad_id;  // index into dyad_names
  std::vector<std::pair<std::string, std::string>> dyad_names;
  long long excluded_rows = 0;
  long long indeterminate_triples = 0;

  std::size_t n_rows() const { return y.size(); }
  const double* row(std::size_t r) const { return x.data() + r * k; }
};

// Pooled pseudolikelihood design: one row per complete-covariate dyad-year,
// response = observed tie, regressors = change statistics with the focal
// dyad clamped absent.  Rows ordered by year, then dyad.  Throws when the
// model lacks an edges term or no usable rows remain.
DesignMatrix build_design_matrix(const TemporalNetworkPanel& panel, const ModelSpec& model,
                                 std::optional<std::pair<int, int>> year_range = std::nullopt);

struct FeatureCountRow {
  int year = 0;
  std::string feature;
  long long count = 0;
};

// Tidy (year, feature, count) rows for the joint-regime and mixed-regime
// configurations; dem- and aut-variant counts are summed per feature.
std::vector<FeatureCountRow> yearly_feature_counts(const TemporalNetworkPanel& panel);

const std::vector<std::string>& feature_count_names();

}  // namespace tergm
