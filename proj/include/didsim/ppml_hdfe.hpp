// ppml_hdfe.hpp — Poisson pseudo-maximum-likelihood with high-dimensional
// fixed effects. IRLS outer loop; each weighted least-squares step absorbs
// the fixed effects by weighted alternating projections (within-group
// demeaning iterated across factors). Covariance is the cluster-robust
// sandwich B^-1 M B^-1 with B the expected Hessian on demeaned regressors
// and M the sum over clusters of outer products of summed scores, scaled by
// G/(G-1).
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "didsim/event_stack.hpp"

namespace didsim {

struct FeSpec {
  // One entry per factor: row -> dense level index (>= 0).
  std::vector<std::vector<int>> factors;
};

struct PpmlOptions {
  double dev_tol = 1e-8;      // relative deviance change
  int max_iter = 100;
  double proj_tol = 1e-10;    // inner alternating-projection tolerance
  int proj_max_sweeps = 100000;
  // Drop rows belonging to an FE group whose outcomes are all zero (the
  // group's effect is unbounded below and carries no information).
  bool drop_zero_groups = true;
  bool require_convergence = true;  // throw PpmlConvergenceError if exceeded
};

class PpmlConvergenceError : public std::runtime_error {
 public:
  PpmlConvergenceError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), deviance_trace(std::move(trace)) {}
  std::vector<double> deviance_trace;
};

struct PpmlFit {
  Eigen::VectorXd beta;        // NaN at dropped (collinear) columns
  std::vector<char> kept;      // per-column retention flag
  Eigen::MatrixXd vcov;        // zero rows/cols at dropped columns
  std::vector<double> se;      // sqrt of vcov diagonal; NaN at dropped
  bool converged = false;
  int iterations = 0;
  double deviance = 0.0;
  std::vector<double> deviance_trace;
  int n_obs = 0;               // rows used in the fit
  int n_dropped_rows = 0;
  int n_dropped_units = 0;     // all-zero groups of the first factor
  int n_clusters = 0;
  std::vector<std::string> warnings;

  // Diagnostics on retained rows (original-order indices in retained_rows).
  Eigen::VectorXd mu;
  std::vector<int> retained_rows;
};

// Weighted within-transformation: subtracts weighted group means for every
// factor, sweeping until no entry moves by more than tol * max(1, |col|_inf).
// Returns the number of sweeps used.
int demean_weighted(Eigen::Ref<Eigen::MatrixXd> m, const Eigen::VectorXd& w,
                    const std::vector<std::vector<int>>& factors, double tol,
                    int max_sweeps);

PpmlFit fit_ppml(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                 const FeSpec& fe, const std::vector<int>& cluster,
                 const PpmlOptions& opt = {});

// Sandwich over the demeaned design: B^-1 (sum_g s_g s_g') B^-1 * G/(G-1)
// with s_g the cluster sum of (y - mu) * xt rows. Throws if G < 2.
Eigen::MatrixXd cluster_vcov(const Eigen::VectorXd& residual,
                             const Eigen::VectorXd& weights,
                             const Eigen::MatrixXd& x_demeaned,
                             const std::vector<int>& cluster);

// Two-sided critical value. df <= 0 selects the standard normal; a positive
// df selects Student's t (the documented finite-cluster switch).
double critical_value(double level, int df = 0);

struct EventStudyFit {
  RegressorLayout layout;
  PpmlFit fit;
  std::vector<int> retained_cohorts;

  bool has_k(int k) const;
  double gamma_at(int k) const;
  double se_at(int k) const;
};

struct EstimatorConfig {
  PpmlOptions ppml;
  double level = 0.05;
  bool t_critical = false;  // use t(G-1) instead of the normal
};

EventStudyFit fit_event_study(const StackedDataset& data,
                              const StackConfig& stack_config,
                              const EstimatorConfig& config = {});

struct WaldResult {
  double t = 0.0;
  bool reject = false;
  bool reject_positive = false;  // reject AND coefficient above null
};

WaldResult wald_test(const EventStudyFit& fit, int k, double null_value = 0.0,
                     double level = 0.05, bool t_critical = false);

}  // namespace didsim
