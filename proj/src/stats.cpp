#include "tergm/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include "tergm/errors.hpp"

namespace tergm {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Tri-state label algebra over {1 yes, 0 no, -1 unknown}: a conjunction is
// 0 as soon as any factor is known 0, unknown if any factor is unknown.
inline int tri_and(int a, int b) {
  if (a == 0 || b == 0) return 0;
  if (a < 0 || b < 0) return -1;
  return 1;
}

inline int tri3(int a, int b, int c) { return tri_and(a, tri_and(b, c)); }

inline long long pairs2(long long m) { return m * (m - 1) / 2; }

// Geometric shared-partner weight: e^a (1 - (1 - e^{-a})^w).
inline double esp_weight(double alpha, long long w) {
  if (w <= 0) return 0.0;
  return std::exp(alpha) * (1.0 - std::pow(1.0 - std::exp(-alpha), static_cast<double>(w)));
}

inline const std::vector<int8_t>& endpoint_labels(const YearSlice& s, RegimeType same) {
  return same == RegimeType::dem ? s.dem : s.aut;
}
inline const std::vector<int8_t>& center_labels(const YearSlice& s, RegimeType same) {
  return same == RegimeType::dem ? s.aut : s.dem;
}

void tally(int t, double& total, StatCounters* c) {
  if (t == 1)
    total += 1.0;
  else if (t < 0 && c)
    ++c->indeterminate_triples;
}

double full_mixed_two_star(const YearSlice& s, RegimeType same, StatCounters* c) {
  const auto& el = endpoint_labels(s, same);
  const auto& ml = center_labels(s, same);
  double total = 0.0;
  for (int j = 0; j < s.n(); ++j) {
    if (ml[j] == 0) continue;
    long long yes = 0, unk = 0;
    s.net.for_each_neighbor(j, [&](int u) {
      if (el[u] == 1)
        ++yes;
      else if (el[u] < 0)
        ++unk;
    });
    if (ml[j] == 1) {
      total += static_cast<double>(pairs2(yes));
      if (c) c->indeterminate_triples += pairs2(yes + unk) - pairs2(yes);
    } else if (c) {
      c->indeterminate_triples += pairs2(yes + unk);
    }
  }
  return total;
}

double full_mixed_triangle(const YearSlice& s, RegimeType same, StatCounters* c) {
  const auto& el = endpoint_labels(s, same);
  const auto& ml = center_labels(s, same);
  double total = 0.0;
  std::vector<int> nbr;
  for (int j = 0; j < s.n(); ++j) {
    if (ml[j] == 0) continue;
    nbr.clear();
    s.net.for_each_neighbor(j, [&](int u) { nbr.push_back(u); });
    for (std::size_t a = 0; a < nbr.size(); ++a)
      for (std::size_t b = a + 1; b < nbr.size(); ++b) {
        if (!s.net.has(nbr[a], nbr[b])) continue;
        tally(tri3(ml[j], el[nbr[a]], el[nbr[b]]), total, c);
      }
  }
  return total;
}

double delta_mixed_two_star(const YearSlice& s, RegimeType same, int i, int j, StatCounters* c) {
  const auto& el = endpoint_labels(s, same);
  const auto& ml = center_labels(s, same);
  double d = 0.0;
  auto around_center = [&](int a, int b) {
    // i–j as a star edge with b the shared partner: endpoints a and k ∈ N(b)\{a}.
    int base = tri_and(el[a], ml[b]);
    if (base == 0) return;
    s.net.for_each_neighbor(b, [&](int k) {
      if (k == a) return;
      tally(tri_and(base, el[k]), d, c);
    });
  };
  around_center(i, j);
  around_center(j, i);
  return d;
}

template <class F>
void for_each_common_neighbor(const NetworkState& net, int i, int j, F&& f) {
  const uint64_t* a = net.row(i);
  const uint64_t* b = net.row(j);
  for (int w = 0; w < net.words(); ++w) {
    uint64_t bits = a[w] & b[w];
    while (bits) {
      f(w * 64 + std::countr_zero(bits));
      bits &= bits - 1;
    }
  }
}

double delta_mixed_triangle(const YearSlice& s, RegimeType same, int i, int j, StatCounters* c) {
  const auto& el = endpoint_labels(s, same);
  const auto& ml = center_labels(s, same);
  double d = 0.0;
  for_each_common_neighbor(s.net, i, j, [&](int k) {
    tally(tri3(el[i], ml[j], el[k]), d, c);  // i–j, j–k stars; i–k closes
    tally(tri3(el[j], ml[i], el[k]), d, c);  // j–i, i–k stars; j–k closes
    tally(tri3(el[i], el[j], ml[k]), d, c);  // i–j closes the k-centered star
  });
  return d;
}

double delta_gwesp(const YearSlice& s, double alpha, int i, int j) {
  // Shared-partner counts are taken with the focal edge absent, so the
  // result is independent of the current (i,j) state.
  int present = s.net.has(i, j) ? 1 : 0;
  long long cn = 0;
  double d = 0.0;
  for_each_common_neighbor(s.net, i, j, [&](int k) {
    ++cn;
    long long sp_ik = s.net.common_neighbors(i, k) - present;
    long long sp_jk = s.net.common_neighbors(j, k) - present;
    d += esp_weight(alpha, sp_ik + 1) - esp_weight(alpha, sp_ik);
    d += esp_weight(alpha, sp_jk + 1) - esp_weight(alpha, sp_jk);
  });
  return d + esp_weight(alpha, cn);
}

void check_dyad(const YearSlice& s, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= s.n() || j >= s.n())
    throw ValidationError("dyad (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is not a valid pair on a roster of " + std::to_string(s.n()));
}

}  // namespace

bool is_covariate_term(TermKind k) {
  return k == TermKind::dyad_cov || k == TermKind::year_cov || k == TermKind::joint_indicator ||
         k == TermKind::weak_link;
}

double dyad_value(const YearSlice& s, const TermSpec& term, int i, int j) {
  check_dyad(s, i, j);
  if (i > j) std::swap(i, j);
  switch (term.kind) {
    case TermKind::dyad_cov: {
      const auto* col = s.find_dyad_cov(term.cov_name);
      if (!col) throw ValidationError("unknown dyad covariate: " + term.cov_name);
      return (*col)[dyad_index(i, j, s.n())];
    }
    case TermKind::year_cov: {
      auto it = s.year_cov.find(term.cov_name);
      if (it == s.year_cov.end())
        throw ValidationError("unknown year covariate: " + term.cov_name);
      return it->second;
    }
    case TermKind::joint_indicator: {
      const auto& lab =
          term.same_type.value_or(RegimeType::dem) == RegimeType::aut ? s.aut : s.dem;
      int t = tri_and(lab[i], lab[j]);
      return t < 0 ? kNan : static_cast<double>(t);
    }
    case TermKind::weak_link: {
      double a = s.polity[i], b = s.polity[j];
      if (std::isnan(a) || std::isnan(b)) return kNan;
      return std::min(a, b);
    }
    default:
      throw ValidationError(std::string("term has no dyadic value: ") + term_kind_name(term.kind));
  }
}

double full_statistic(const YearSlice& s, const TermSpec& term, StatCounters* counters) {
  switch (term.kind) {
    case TermKind::edges:
      return static_cast<double>(s.net.edge_count());
    case TermKind::isolates: {
      int iso = 0;
      for (int i = 0; i < s.n(); ++i)
        if (s.net.degree(i) == 0) ++iso;
      return iso;
    }
    case TermKind::mixed_two_star:
      return full_mixed_two_star(s, term.same_type.value_or(RegimeType::dem), counters);
    case TermKind::mixed_triangle:
      return full_mixed_triangle(s, term.same_type.value_or(RegimeType::dem), counters);
    case TermKind::gwesp: {
      double total = 0.0;
      s.net.for_each_edge(
          [&](int u, int v) { total += esp_weight(term.alpha, s.net.common_neighbors(u, v)); });
      return total;
    }
    default: {
      double total = 0.0;
      s.net.for_each_edge([&](int u, int v) { total += dyad_value(s, term, u, v); });
      return total;
    }
  }
}

double change_statistic(const YearSlice& s, const TermSpec& term, int i, int j,
                        StatCounters* counters) {
  check_dyad(s, i, j);
  if (i > j) std::swap(i, j);
  switch (term.kind) {
    case TermKind::edges:
      return 1.0;
    case TermKind::isolates: {
      int present = s.net.has(i, j) ? 1 : 0;
      double d = 0.0;
      if (s.net.degree(i) - present == 0) d -= 1.0;
      if (s.net.degree(j) - present == 0) d -= 1.0;
      return d;
    }
    case TermKind::mixed_two_star:
      return delta_mixed_two_star(s, term.same_type.value_or(RegimeType::dem), i, j, counters);
    case TermKind::mixed_triangle:
      return delta_mixed_triangle(s, term.same_type.value_or(RegimeType::dem), i, j, counters);
    case TermKind::gwesp:
      return delta_gwesp(s, term.alpha, i, j);
    default:
      return dyad_value(s, term, i, j);
  }
}

void change_vector(const YearSlice& s, const ModelSpec& model, int i, int j, double* out,
                   StatCounters* counters) {
  for (std::size_t t = 0; t < model.terms.size(); ++t)
    out[t] = change_statistic(s, model.terms[t], i, j, counters);
}

DesignMatrix build_design_matrix(const TemporalNetworkPanel& panel, const ModelSpec& model,
                                 std::optional<std::pair<int, int>> year_range) {
  model.validate(/*require_edges=*/true);
  DesignMatrix m;
  m.colnames = model.term_names();
  m.k = model.size();
  std::map<std::pair<std::string, std::string>, std::int32_t> ids;
  std::vector<double> delta(m.k);
  StatCounters counters;
  for (const auto& s : panel.slices()) {
    if (year_range && (s.year < year_range->first || s.year > year_range->second)) continue;
    for (auto [i, j] : all_dyads(s.n())) {
      change_vector(s, model, i, j, delta.data(), &counters);
      bool complete = std::none_of(delta.begin(), delta.end(),
                                   [](double v) { return std::isnan(v); });
      if (!complete) {
        ++m.excluded_rows;
        continue;
      }
      std::pair<std::string, std::string> key{s.roster[i], s.roster[j]};
      auto [it, inserted] = ids.emplace(key, static_cast<std::int32_t>(m.dyad_names.size()));
      if (inserted) m.dyad_names.push_back(key);
      m.x.insert(m.x.end(), delta.begin(), delta.end());
      m.y.push_back(s.net.has(i, j) ? 1 : 0);
      m.year.push_back(s.year);
      m.dyad_id.push_back(it->second);
    }
  }
  m.indeterminate_triples = counters.indeterminate_triples;
  if (m.n_rows() == 0)
    throw ValidationError("design matrix has no usable rows (all dyads excluded or empty panel)");
  return m;
}

const std::vector<std::string>& feature_count_names() {
  static const std::vector<std::string> names = {
      "joint_dem_edges", "joint_aut_edges", "mixed_edges", "mixed_two_stars", "mixed_triangles"};
  return names;
}

std::vector<FeatureCountRow> yearly_feature_counts(const TemporalNetworkPanel& panel) {
  std::vector<FeatureCountRow> rows;
  for (const auto& s : panel.slices()) {
    long long joint_dem = 0, joint_aut = 0, mixed = 0;
    s.net.for_each_edge([&](int u, int v) {
      if (tri_and(s.dem[u], s.dem[v]) == 1) ++joint_dem;
      if (tri_and(s.aut[u], s.aut[v]) == 1) ++joint_aut;
      if (tri_and(s.dem[u], s.aut[v]) == 1 || tri_and(s.aut[u], s.dem[v]) == 1) ++mixed;
    });
    long long mts = std::llround(full_mixed_two_star(s, RegimeType::dem, nullptr) +
                                 full_mixed_two_star(s, RegimeType::aut, nullptr));
    long long mt = std::llround(full_mixed_triangle(s, RegimeType::dem, nullptr) +
                                full_mixed_triangle(s, RegimeType::aut, nullptr));
    long long values[] = {joint_dem, joint_aut, mixed, mts, mt};
    for (std::size_t f = 0; f < feature_count_names().size(); ++f)
      rows.push_back({s.year, feature_count_names()[f], values[f]});
  }
  return rows;
}

}  // namespace tergm
