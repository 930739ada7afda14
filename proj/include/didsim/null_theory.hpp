// null_theory.hpp — closed-form event-study path under the null of no
// effect, for first-detection timing with per-paper flag probability p.
//
// Output in the detection month is distributed as the q-weighted
// (size-biased) version of the monthly output pmf; the month before first
// detection is (1-p)^y-weighted; later months carry no selection. The
// implied coefficient path relative to k=-1 is
//   gamma_0    = log( E[y q(y)]/E[q(y)]  /  (E[y (1-p)^y]/E[(1-p)^y]) )
//   gamma_plus = log( mu / (E[y (1-p)^y]/E[(1-p)^y]) )      for k >= 1,
// which for Poisson output reduces to a plateau of -log(1-p).
#pragma once

#include <vector>

#include "didsim/flag_rules.hpp"
#include "didsim/panel_dgp.hpp"

namespace didsim {

// Pmf of monthly output over {0,1,...,n_max}, truncated where the tail mass
// falls below `tail_tol`.
struct OutputPmf {
  std::vector<double> prob;

  double mean() const;
  double variance() const;
  int n_max() const { return static_cast<int>(prob.size()) - 1; }

  static OutputPmf poisson(double mu, double tail_tol = 1e-12);
  // Gamma(shape, scale)-mixed Poisson, i.e. negative binomial.
  static OutputPmf gamma_poisson_mixture(double shape, double scale,
                                         double tail_tol = 1e-12);
  // Finite mixture of Poissons with the given means (equal weights).
  static OutputPmf poisson_mixture(const std::vector<double>& mus,
                                   double tail_tol = 1e-12);
  static OutputPmf from_probabilities(std::vector<double> probs);
  // Pmf matching a configured mean distribution; the theory overlay for a
  // simulated panel.
  static OutputPmf from_mean_distribution(const MeanDistribution& means,
                                          double tail_tol = 1e-12);
};

struct NullPath {
  double mean_k0 = 0.0;       // E[y | detection month]
  double mean_kminus1 = 0.0;  // E[y | month before first detection]
  double mean_post = 0.0;     // mu, no selection for k >= 1
  double gamma0 = 0.0;
  double gamma_plus = 0.0;
  bool degenerate = false;    // zero variance or zero detection mass
};

// Exact summation over the truncated support. Degenerate pmfs (zero
// variance, or no detection mass) return a flagged zero path.
NullPath gamma_null_general(const OutputPmf& pmf, double p);

// Poisson closed forms; agrees with gamma_null_general on a matched
// truncated pmf.
NullPath gamma_null_poisson(double mu, double p);

// Empirical conditional mean of y at event time k over treated authors in
// one simulated panel. Throws if no (author, month) pair lands at k inside
// the panel window.
double conditional_event_time_mean(const AuthorPanel& panel,
                                   const TreatmentAssignment& assignment,
                                   int k);

}  // namespace didsim
