#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tergm/estimate.hpp"

namespace tergm {

struct PredictionRow {
  int year = 0;
  std::string state_a, state_b;
  double probability = 0.0;
  int label = 0;
};

struct PredictionSet {
  std::vector<PredictionRow> rows;
  long long skipped = 0;  // dyads dropped for missing covariates
};

// Conditional one-toggle tie probabilities on the observed test networks:
// p = logistic(theta·delta) with the focal dyad clamped absent.  train_years,
// when given, must be disjoint from test_years.
PredictionSet predict_ties(const std::vector<double>& theta, const ModelSpec& model,
                           const TemporalNetworkPanel& panel, const std::vector<int>& test_years,
                           const std::vector<int>& train_years = {});

// Mann–Whitney ROC AUC, ties counted half.  Throws on single-class input.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Precision-step area under the PR curve, descending-score sweep with tied
// scores grouped.  Throws when no positives exist.
double pr_auc(const std::vector<double>& scores, const std::vector<int>& labels);

double roc_auc(const PredictionSet& preds);
double pr_auc(const PredictionSet& preds);

struct YearScoreRow {
  int year = 0;
  double roc = 0.0, pr = 0.0;  // NaN when flagged
  long long n_pos = 0, n_dyads = 0;
  bool flagged = false;  // single-class year, metrics undefined
};

std::vector<YearScoreRow> per_year_scores(const PredictionSet& preds);

struct ClosureDistribution {
  // stratum (shared-enemy count, capped) -> closure probabilities
  std::map<int, std::vector<double>> strata;
  int cap = 6;
  long long skipped = 0;  // qualifying dyads dropped for missing covariates

  std::vector<double> pooled() const;
  std::size_t total() const;
};

// For every same-regime dyad with >= 1 opposite-regime shared enemy:
// p = logistic(theta·delta), recorded under min(w, cap).
ClosureDistribution closure_probabilities(const std::vector<double>& theta, const ModelSpec& model,
                                          const TemporalNetworkPanel& panel, int cap = 6);

struct KsResult {
  double d = 0.0;       // two-sided sup |ECDF_x - ECDF_y|
  double p_two = 1.0;   // asymptotic Kolmogorov p-value
  double d_plus = 0.0;  // sup (ECDF_y - ECDF_x); alternative "x stochastically greater"
  double p_one = 1.0;   // exp(-2·ne·d_plus²)
  std::size_t n = 0, m = 0;
};

KsResult ks_two_sample(const std::vector<double>& x, const std::vector<double>& y);

struct InfluenceRow {
  std::string state_a, state_b;
  double delta = 0.0;  // target coefficient, dyad excluded, minus baseline
  int rank = 0;        // 1-based, descending delta; 0 when failed
  std::string profile;
  bool failed = false;
};

struct InfluenceReport {
  FitResult baseline;
  std::string target;
  std::vector<InfluenceRow> rows;  // sorted by rank, failures last
};

struct InfluenceOptions {
  double tol = 1e-8;
  int max_iter = 100;
  double ridge = 0.0;
  int threads = 1;
};

// Leave-one-dyad-out scan over a dyadic-covariate-only logistic model:
// each refit zero-weights one dyad's rows, warm-started from the baseline.
InfluenceReport influence_scan(const TemporalNetworkPanel& panel, const ModelSpec& covariate_model,
                               const std::string& target_term,
                               const InfluenceOptions& opts = {});

}  // namespace tergm
