#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tergm/stats.hpp"

namespace tergm {

struct FitOptions {
  double tol = 1e-8;     // gradient max-norm
  int max_iter = 100;
  double ridge = 0.0;    // > 0 also disables the singular-Hessian guard
  std::vector<double> weights;     // per-row; empty = all ones
  std::vector<double> warm_start;  // initial theta; empty = zeros
};

struct FitResult {
  std::vector<std::string> terms;
  std::vector<double> theta;
  std::vector<double> ci_lo95, ci_hi95;  // empty until bootstrapped
  std::size_t n_rows = 0;
  long long excluded_rows = 0;
  int n_boot = 0;         // successful replicates
  int n_boot_failed = 0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  double log_pseudolikelihood = 0.0;
  std::uint64_t seed = 0;

  bool has_ci() const { return !ci_lo95.empty(); }
};

// Damped-Newton logistic MPLE point fit.  Throws EstimationError on single
// class, per-column complete separation, singular Hessian, or iteration
// exhaustion.
FitResult fit_logistic(const DesignMatrix& design, const FitOptions& opts = {});

struct BootstrapOptions {
  int n_boot = 500;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int max_iter = 100;
  double ridge = 0.0;
  int threads = 1;
  double max_failure_rate = 0.2;
};

// Point fit on the pooled design plus percentile CIs from year-block
// resampling (replicate = reweight rows by resampled-year multiplicity).
// Deterministic for a fixed seed, independent of thread count.
FitResult bootstrap_fit(const DesignMatrix& design, const BootstrapOptions& opts);
FitResult bootstrap_fit(const TemporalNetworkPanel& panel, const ModelSpec& model,
                        const BootstrapOptions& opts,
                        std::optional<std::pair<int, int>> year_range = std::nullopt);

struct SignificanceRow {
  std::string term;
  double estimate = 0.0, lo95 = 0.0, hi95 = 0.0;
  bool reliable = false;  // CI excludes zero
};

std::vector<SignificanceRow> significance_table(const FitResult& fit);

}  // namespace tergm
