#include "tergm/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include <Eigen/Dense>

#include "tergm/errors.hpp"
#include "tergm/util.hpp"

namespace tergm {

namespace {

using Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double weighted_loglik(const Eigen::Map<const RowMat>& X, const std::vector<std::uint8_t>& y,
                       const std::vector<double>* w, const VectorXd& theta, double ridge) {
  double ll = 0.0;
  VectorXd eta = X * theta;
  for (Eigen::Index r = 0; r < eta.size(); ++r) {
    double wr = w ? (*w)[r] : 1.0;
    if (wr == 0.0) continue;
    ll += wr * (y[r] * eta[r] - softplus(eta[r]));
  }
  if (ridge > 0.0) ll -= 0.5 * ridge * theta.squaredNorm();
  return ll;
}

// Hard failures that the optimizer cannot talk its way out of: a constant
// response, or one column whose values split the classes perfectly.
void check_degeneracy(const DesignMatrix& d, const std::vector<double>* w) {
  double pos = 0.0, neg = 0.0;
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    double wr = w ? (*w)[r] : 1.0;
    if (wr == 0.0) continue;
    (d.y[r] ? pos : neg) += wr;
  }
  if (pos == 0.0 || neg == 0.0)
    throw EstimationError(std::string("complete separation: response has only ") +
                          (pos == 0.0 ? "zeros" : "ones"));
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < d.k; ++c) {
    double min1 = inf, max1 = -inf, min0 = inf, max0 = -inf;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      double wr = w ? (*w)[r] : 1.0;
      if (wr == 0.0) continue;
      double v = d.x[r * d.k + c];
      if (d.y[r]) {
        min1 = std::min(min1, v);
        max1 = std::max(max1, v);
      } else {
        min0 = std::min(min0, v);
        max0 = std::max(max0, v);
      }
    }
    if (min1 > max0 || max1 < min0)
      throw EstimationError("complete separation on column '" + d.colnames[c] + "'");
  }
}

}  // namespace

FitResult fit_logistic(const DesignMatrix& d, const FitOptions& opts) {
  const std::size_t n = d.n_rows(), k = d.k;
  if (n == 0 || k == 0) throw EstimationError("empty design matrix");
  const std::vector<double>* w = opts.weights.empty() ? nullptr : &opts.weights;
  if (w && w->size() != n)
    throw EstimationError("row-weight vector length does not match the design matrix");
  // A ridge penalty keeps the maximizer finite even under separation, so the
  // degeneracy screen only applies to the unpenalized problem.
  if (opts.ridge == 0.0) check_degeneracy(d, w);

  Eigen::Map<const RowMat> X(d.x.data(), static_cast<Eigen::Index>(n),
                             static_cast<Eigen::Index>(k));
  VectorXd theta = VectorXd::Zero(static_cast<Eigen::Index>(k));
  if (!opts.warm_start.empty()) {
    if (opts.warm_start.size() != k)
      throw EstimationError("warm-start vector length does not match the model");
    theta = Eigen::Map<const VectorXd>(opts.warm_start.data(), static_cast<Eigen::Index>(k));
  }

  FitResult out;
  out.terms = d.colnames;
  out.n_rows = n;
  out.excluded_rows = d.excluded_rows;

  // Identifiability is a property of the weighted design, not of theta:
  // X'WX is rank deficient at every theta exactly when it is at theta = 0.
  // Checking it once here keeps nearly separated fits, whose curvature
  // flattens legitimately as they drift, from tripping a structural error.
  if (opts.ridge == 0.0) {
    Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t r = 0; r < n; ++r) {
      double wr = w ? (*w)[r] : 1.0;
      if (wr == 0.0) continue;
      auto xr = X.row(static_cast<Eigen::Index>(r));
      h0.noalias() += wr * (xr.transpose() * xr);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0);
    const VectorXd& ev = es.eigenvalues();
    double lo = ev.minCoeff(), hi = ev.maxCoeff();
    if (!(hi > 0.0) || lo <= hi * 1e-12) {
      Eigen::Index bad = 0;
      es.eigenvectors().col(0).cwiseAbs().maxCoeff(&bad);
      throw EstimationError("singular Hessian near column '" + d.colnames[bad] +
                            "'; remove collinear or constant terms (or set a ridge penalty)");
    }
  }

  double ll = weighted_loglik(X, d.y, w, theta, opts.ridge);
  VectorXd grad(static_cast<Eigen::Index>(k));
  Eigen::MatrixXd hess(k, k);
  double gnorm = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    VectorXd eta = X * theta;
    grad.setZero();
    hess.setZero();
    for (std::size_t r = 0; r < n; ++r) {
      double wr = w ? (*w)[r] : 1.0;
      if (wr == 0.0) continue;
      double mu = logistic(eta[static_cast<Eigen::Index>(r)]);
      auto xr = X.row(static_cast<Eigen::Index>(r));
      grad += wr * (d.y[r] - mu) * xr.transpose();
      hess.noalias() += (wr * mu * (1.0 - mu)) * (xr.transpose() * xr);
    }
    if (opts.ridge > 0.0) {
      grad -= opts.ridge * theta;
      hess.diagonal().array() += opts.ridge;
    }
    gnorm = grad.cwiseAbs().maxCoeff();
    if (gnorm < opts.tol) break;

    VectorXd step = hess.ldlt().solve(grad);
    const double accept_slack = 1e-13 * (1.0 + std::abs(ll));
    // Once the predicted quadratic gain drops under the rounding noise of the
    // log-likelihood sum, comparing candidate values only reads that noise:
    // damping would stall the iteration a hair short of the tolerance.  The
    // undamped step is a microscopic refinement, so take it outright.
    const double predicted = 0.5 * grad.dot(step);
    if (predicted >= 0.0 && predicted <= accept_slack) {
      theta += step;
      ll = weighted_loglik(X, d.y, w, theta, opts.ridge);
      continue;
    }
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      VectorXd cand = theta + scale * step;
      double cand_ll = weighted_loglik(X, d.y, w, cand, opts.ridge);
      if (cand_ll >= ll - accept_slack) {
        theta = std::move(cand);
        ll = cand_ll;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted)
      throw EstimationError("line search stalled at iteration " + std::to_string(iter + 1) +
                            " (gradient max-norm " + format_double(gnorm) + ")");
  }
  if (gnorm >= opts.tol) {
    std::ostringstream trace;
    trace << "no convergence after " << opts.max_iter << " iterations; gradient max-norm "
          << format_double(gnorm) << ", log-pseudolikelihood " << format_double(ll)
          << ", theta = [";
    for (Eigen::Index c = 0; c < theta.size(); ++c)
      trace << (c ? ", " : "") << format_double(theta[c]);
    trace << "]";
    throw EstimationError(trace.str());
  }

  out.theta.assign(theta.data(), theta.data() + theta.size());
  out.converged = true;
  out.iterations = iter;
  out.gradient_norm = gnorm;
  out.log_pseudolikelihood = ll;
  return out;
}

FitResult bootstrap_fit(const DesignMatrix& d, const BootstrapOptions& opts) {
  if (opts.n_boot < 1) throw EstimationError("n_boot must be at least 1");
  std::vector<int> years(d.year.begin(), d.year.end());
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  if (years.size() < 2)
    throw EstimationError("year-block bootstrap needs at least 2 years of data");

  FitOptions base;
  base.tol = opts.tol;
  base.max_iter = opts.max_iter;
  base.ridge = opts.ridge;
  FitResult point = fit_logistic(d, base);
  point.seed = opts.seed;

  std::map<int, int> year_pos;
  for (std::size_t i = 0; i < years.size(); ++i) year_pos[years[i]] = static_cast<int>(i);
  std::vector<int> row_year_pos(d.n_rows());
  for (std::size_t r = 0; r < d.n_rows(); ++r) row_year_pos[r] = year_pos.at(d.year[r]);

  std::vector<std::vector<double>> reps(opts.n_boot);
  std::vector<std::string> failures(opts.n_boot);
  parallel_for(opts.n_boot, opts.threads, [&](std::size_t rep) {
    auto rng = make_rng(opts.seed, rng_tag::kBootstrap, rep);
    std::uniform_int_distribution<std::size_t> pick(0, years.size() - 1);
    std::vector<double> mult(years.size(), 0.0);
    for (std::size_t i = 0; i < years.size(); ++i) mult[pick(rng)] += 1.0;
    FitOptions ro = base;
    ro.warm_start = point.theta;
    ro.weights.resize(d.n_rows());
    for (std::size_t r = 0; r < d.n_rows(); ++r) ro.weights[r] = mult[row_year_pos[r]];
    try {
      reps[rep] = fit_logistic(d, ro).theta;
    } catch (const EstimationError& e) {
      failures[rep] = e.what();
    }
  });

  int failed = 0;
  std::string first_failure;
  for (int rep = 0; rep < opts.n_boot; ++rep)
    if (reps[rep].empty()) {
      ++failed;
      if (first_failure.empty()) first_failure = failures[rep];
    }
  if (failed > opts.max_failure_rate * opts.n_boot)
    throw EstimationError(std::to_string(failed) + " of " + std::to_string(opts.n_boot) +
                          " bootstrap replicates failed (first: " + first_failure + ")");

  point.n_boot = opts.n_boot - failed;
  point.n_boot_failed = failed;
  point.ci_lo95.resize(d.k);
  point.ci_hi95.resize(d.k);
  std::vector<double> coord;
  coord.reserve(point.n_boot);
  for (std::size_t c = 0; c < d.k; ++c) {
    coord.clear();
    for (const auto& t : reps)
      if (!t.empty()) coord.push_back(t[c]);
    point.ci_lo95[c] = quantile(coord, 0.025);
    point.ci_hi95[c] = quantile(coord, 0.975);
  }
  return point;
}

FitResult bootstrap_fit(const TemporalNetworkPanel& panel, const ModelSpec& model,
                        const BootstrapOptions& opts,
                        std::optional<std::pair<int, int>> year_range) {
  DesignMatrix d = build_design_matrix(panel, model, year_range);
  return bootstrap_fit(d, opts);
}

std::vector<SignificanceRow> significance_table(const FitResult& fit) {
  if (!fit.has_ci()) throw EstimationError("significance table requires bootstrap CIs");
  std::vector<SignificanceRow> rows;
  rows.reserve(fit.theta.size());
  for (std::size_t c = 0; c < fit.theta.size(); ++c) {
    SignificanceRow r;
    r.term = fit.terms[c];
    r.estimate = fit.theta[c];
    r.lo95 = fit.ci_lo95[c];
    r.hi95 = fit.ci_hi95[c];
    r.reliable = r.lo95 > 0.0 || r.hi95 < 0.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace tergm
