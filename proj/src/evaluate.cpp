#include "tergm/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "tergm/errors.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace {

double dot(const std::vector<double>& a, const double* b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// P(K > lambda) for the Kolmogorov distribution; the small-lambda branch
// uses the theta-function dual so both tails converge fast.
double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  if (lambda < 1.18) {
    double cdf = 0.0;
    double c = std::sqrt(2.0 * M_PI) / lambda;
    for (int j = 1; j <= 100; ++j) {
      double t = std::exp(-(2.0 * j - 1) * (2.0 * j - 1) * M_PI * M_PI / (8.0 * lambda * lambda));
      cdf += t;
      if (t < 1e-16) break;
    }
    return std::clamp(1.0 - c * cdf, 0.0, 1.0);
  }
  double q = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    double t = 2.0 * sign * std::exp(-2.0 * j * j * lambda * lambda);
    q += t;
    if (std::abs(t) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(q, 0.0, 1.0);
}

void check_lengths(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw ValidationError("scores and labels must be equal-length and non-empty");
  for (double s : scores)
    if (!std::isfinite(s)) throw ValidationError("scores must be finite");
}

std::vector<double> scores_of(const PredictionSet& p) {
  std::vector<double> v;
  v.reserve(p.rows.size());
  for (const auto& r : p.rows) v.push_back(r.probability);
  return v;
}

std::vector<int> labels_of(const PredictionSet& p) {
  std::vector<int> v;
  v.reserve(p.rows.size());
  for (const auto& r : p.rows) v.push_back(r.label);
  return v;
}

}  // namespace

PredictionSet predict_ties(const std::vector<double>& theta, const ModelSpec& model,
                           const TemporalNetworkPanel& panel, const std::vector<int>& test_years,
                           const std::vector<int>& train_years) {
  model.validate(/*require_edges=*/false);
  if (theta.size() != model.size())
    throw ValidationError("theta length does not match the model");
  if (test_years.empty()) throw ValidationError("no test years given");
  std::set<int> train(train_years.begin(), train_years.end());
  for (int y : test_years)
    if (train.count(y))
      throw ValidationError("train and test years overlap at " + std::to_string(y));

  std::vector<int> years(test_years);
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());

  PredictionSet out;
  std::vector<double> delta(model.size());
  for (int y : years) {
    if (!panel.has_year(y))
      throw ValidationError("test year " + std::to_string(y) + " is not in the panel");
    const YearSlice& s = panel.slice(y);
    for (auto [i, j] : all_dyads(s.n())) {
      change_vector(s, model, i, j, delta.data());
      if (std::any_of(delta.begin(), delta.end(), [](double v) { return std::isnan(v); })) {
        ++out.skipped;
        continue;
      }
      PredictionRow r;
      r.year = y;
      r.state_a = s.roster[i];
      r.state_b = s.roster[j];
      r.probability = logistic(dot(theta, delta.data()));
      r.label = s.net.has(i, j) ? 1 : 0;
      out.rows.push_back(std::move(r));
    }
  }
  return out;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_lengths(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos = 0.0, neg = 0.0, rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));  // 1-based
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]]) rank_sum_pos += midrank;
    i = j;
  }
  for (std::size_t t = 0; t < n; ++t) (labels[t] ? pos : neg) += 1.0;
  if (pos == 0.0 || neg == 0.0)
    throw ValidationError("ROC AUC undefined: one response class is empty");
  double u = rank_sum_pos - pos * (pos + 1.0) / 2.0;
  return u / (pos * neg);
}

double pr_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_lengths(scores, labels);
  const std::size_t n = scores.size();
  double total_pos = 0.0;
  for (int l : labels) total_pos += l ? 1.0 : 0.0;
  if (total_pos == 0.0) throw ValidationError("PR AUC undefined: no positive labels");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double tp = 0.0, fp = 0.0, area = 0.0, prev_recall = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t t = i; t < j; ++t) (labels[order[t]] ? tp : fp) += 1.0;
    double recall = tp / total_pos;
    double precision = tp / (tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

double roc_auc(const PredictionSet& preds) { return roc_auc(scores_of(preds), labels_of(preds)); }
double pr_auc(const PredictionSet& preds) { return pr_auc(scores_of(preds), labels_of(preds)); }

std::vector<YearScoreRow> per_year_scores(const PredictionSet& preds) {
  if (preds.rows.empty()) throw ValidationError("no predictions to score");
  std::map<int, PredictionSet> by_year;
  for (const auto& r : preds.rows) by_year[r.year].rows.push_back(r);

  std::vector<YearScoreRow> out;
  for (auto& [year, p] : by_year) {
    YearScoreRow row;
    row.year = year;
    row.n_dyads = static_cast<long long>(p.rows.size());
    for (const auto& r : p.rows) row.n_pos += r.label;
    if (row.n_pos == 0 || row.n_pos == row.n_dyads) {
      row.flagged = true;
      row.roc = row.pr = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.roc = roc_auc(p);
      row.pr = pr_auc(p);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> ClosureDistribution::pooled() const {
  std::vector<double> all;
  for (const auto& [w, v] : strata) all.insert(all.end(), v.begin(), v.end());
  return all;
}

std::size_t ClosureDistribution::total() const {
  std::size_t t = 0;
  for (const auto& [w, v] : strata) t += v.size();
  return t;
}

ClosureDistribution closure_probabilities(const std::vector<double>& theta, const ModelSpec& model,
                                          const TemporalNetworkPanel& panel, int cap) {
  model.validate(/*require_edges=*/false);
  if (theta.size() != model.size())
    throw ValidationError("theta length does not match the model");
  if (cap < 1) throw ValidationError("closure stratum cap must be positive");

  ClosureDistribution out;
  out.cap = cap;
  std::vector<double> delta(model.size());
  for (const auto& s : panel.slices()) {
    for (auto [i, j] : all_dyads(s.n())) {
      bool same_dem = s.dem[i] == 1 && s.dem[j] == 1;
      bool same_aut = s.aut[i] == 1 && s.aut[j] == 1;
      if (!same_dem && !same_aut) continue;
      const auto& opp = same_dem ? s.aut : s.dem;
      int w = 0;
      s.net.for_each_neighbor(i, [&](int k) {
        if (k != j && s.net.has(j, k) && opp[k] == 1) ++w;
      });
      if (w < 1) continue;
      change_vector(s, model, i, j, delta.data());
      if (std::any_of(delta.begin(), delta.end(), [](double v) { return std::isnan(v); })) {
        ++out.skipped;
        continue;
      }
      out.strata[std::min(w, cap)].push_back(logistic(dot(theta, delta.data())));
    }
  }
  return out;
}

KsResult ks_two_sample(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw ValidationError("KS test requires two non-empty samples");
  std::vector<double> a(x), b(y);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  KsResult r;
  r.n = a.size();
  r.m = b.size();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    double fx = static_cast<double>(i) / a.size();
    double fy = static_cast<double>(j) / b.size();
    r.d = std::max(r.d, std::abs(fx - fy));
    r.d_plus = std::max(r.d_plus, fy - fx);
  }
  double ne = static_cast<double>(r.n) * r.m / (r.n + r.m);
  r.p_two = kolmogorov_q(std::sqrt(ne) * r.d);
  r.p_one = std::clamp(std::exp(-2.0 * ne * r.d_plus * r.d_plus), 0.0, 1.0);
  return r;
}

namespace {

bool covariate_only(const ModelSpec& m) {
  return std::all_of(m.terms.begin(), m.terms.end(), [](const TermSpec& t) {
    return t.kind == TermKind::edges || is_covariate_term(t.kind);
  });
}

std::string regime_profile(const TemporalNetworkPanel& panel, const std::string& a,
                           const std::string& b) {
  int dd = 0, aa = 0, mixed = 0, other = 0;
  for (const auto& s : panel.slices()) {
    int i = s.index_of(a), j = s.index_of(b);
    if (i < 0 || j < 0) continue;
    if (s.dem[i] == 1 && s.dem[j] == 1)
      ++dd;
    else if (s.aut[i] == 1 && s.aut[j] == 1)
      ++aa;
    else if ((s.dem[i] == 1 && s.aut[j] == 1) || (s.aut[i] == 1 && s.dem[j] == 1))
      ++mixed;
    else
      ++other;
  }
  return "dem-dem:" + std::to_string(dd) + " mixed:" + std::to_string(mixed) +
         " aut-aut:" + std::to_string(aa) + " other:" + std::to_string(other);
}

}  // namespace

InfluenceReport influence_scan(const TemporalNetworkPanel& panel, const ModelSpec& covariate_model,
                               const std::string& target_term, const InfluenceOptions& opts) {
  if (!covariate_only(covariate_model))
    throw ValidationError(
        "influence scan models must be dyadic-covariate-only (edges plus covariate terms)");
  int target = covariate_model.index_of(target_term);
  if (target < 0)
    throw ValidationError("target term '" + target_term + "' is not in the model");

  DesignMatrix d = build_design_matrix(panel, covariate_model, std::nullopt);
  FitOptions base;
  base.tol = opts.tol;
  base.max_iter = opts.max_iter;
  base.ridge = opts.ridge;
  FitResult baseline = fit_logistic(d, base);
  double base_theta = baseline.theta[target];

  // Every pair ever jointly on a roster, row-backed or not.
  std::set<std::pair<std::string, std::string>> pairs(d.dyad_names.begin(), d.dyad_names.end());
  for (const auto& s : panel.slices())
    for (auto [i, j] : all_dyads(s.n())) pairs.insert({s.roster[i], s.roster[j]});
  std::vector<std::pair<std::string, std::string>> dyads(pairs.begin(), pairs.end());

  std::map<std::pair<std::string, std::string>, std::int32_t> id_of;
  for (std::size_t k = 0; k < d.dyad_names.size(); ++k)
    id_of[d.dyad_names[k]] = static_cast<std::int32_t>(k);

  std::vector<InfluenceRow> rows(dyads.size());
  parallel_for(dyads.size(), opts.threads, [&](std::size_t k) {
    InfluenceRow& row = rows[k];
    row.state_a = dyads[k].first;
    row.state_b = dyads[k].second;
    row.profile = regime_profile(panel, row.state_a, row.state_b);
    auto it = id_of.find(dyads[k]);
    if (it == id_of.end()) {
      row.delta = 0.0;  // no design rows: excluding the dyad is a no-op
      return;
    }
    FitOptions ro = base;
    ro.warm_start = baseline.theta;
    ro.weights.assign(d.n_rows(), 1.0);
    for (std::size_t r = 0; r < d.n_rows(); ++r)
      if (d.dyad_id[r] == it->second) ro.weights[r] = 0.0;
    try {
      row.delta = fit_logistic(d, ro).theta[target] - base_theta;
    } catch (const EstimationError&) {
      row.failed = true;
      row.delta = std::numeric_limits<double>::quiet_NaN();
    }
  });

  std::stable_sort(rows.begin(), rows.end(), [](const InfluenceRow& a, const InfluenceRow& b) {
    if (a.failed != b.failed) return b.failed;
    if (a.failed) return std::tie(a.state_a, a.state_b) < std::tie(b.state_a, b.state_b);
    if (a.delta != b.delta) return a.delta > b.delta;
    return std::tie(a.state_a, a.state_b) < std::tie(b.state_a, b.state_b);
  });
  int rank = 0;
  for (auto& row : rows)
    if (!row.failed) row.rank = ++rank;

  InfluenceReport report;
  report.baseline = std::move(baseline);
  report.target = target_term;
  report.rows = std::move(rows);
  return report;
}

}  // namespace tergm
