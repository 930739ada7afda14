#include "didsim/null_theory.hpp"

#include <cmath>
#include <stdexcept>

namespace didsim {

namespace {

constexpr int kMaxSupport = 1 << 20;

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("null path: p must lie in (0,1)");
}

}  // namespace

double OutputPmf::mean() const {
  double m = 0.0;
  for (std::size_t n = 1; n < prob.size(); ++n) m += n * prob[n];
  return m;
}

double OutputPmf::variance() const {
  double m = mean();
  double s = 0.0;
  for (std::size_t n = 0; n < prob.size(); ++n) {
    double d = static_cast<double>(n) - m;
    s += d * d * prob[n];
  }
  return s;
}

OutputPmf OutputPmf::poisson(double mu, double tail_tol) {
  if (mu <= 0.0) throw std::invalid_argument("OutputPmf::poisson: mu <= 0");
  OutputPmf pmf;
  double pn = std::exp(-mu);  // P(0)
  double cum = pn;
  pmf.prob.push_back(pn);
  int n = 0;
  while ((1.0 - cum > tail_tol || n < mu) && n < kMaxSupport) {
    ++n;
    pn *= mu / n;
    cum += pn;
    pmf.prob.push_back(pn);
  }
  return pmf;
}

OutputPmf OutputPmf::gamma_poisson_mixture(double shape, double scale,
                                           double tail_tol) {
  if (shape <= 0.0 || scale <= 0.0)
    throw std::invalid_argument("OutputPmf: gamma parameters must be positive");
  // Negative binomial with r = shape, success prob 1/(1+scale):
  //   P(n) = C(n+r-1, n) (1/(1+scale))^r (scale/(1+scale))^n
  OutputPmf pmf;
  double q = scale / (1.0 + scale);
  double pn = std::pow(1.0 + scale, -shape);  // P(0)
  double cum = pn;
  pmf.prob.push_back(pn);
  double mean = shape * scale;
  int n = 0;
  while ((1.0 - cum > tail_tol || n < mean) && n < kMaxSupport) {
    ++n;
    pn *= q * (static_cast<double>(n) - 1.0 + shape) / static_cast<double>(n);
    cum += pn;
    pmf.prob.push_back(pn);
  }
  return pmf;
}

OutputPmf OutputPmf::poisson_mixture(const std::vector<double>& mus,
                                     double tail_tol) {
  if (mus.empty())
    throw std::invalid_argument("OutputPmf::poisson_mixture: empty mean list");
  std::vector<OutputPmf> parts;
  std::size_t n_max = 0;
  for (double mu : mus) {
    parts.push_back(poisson(mu, tail_tol));
    n_max = std::max(n_max, parts.back().prob.size());
  }
  OutputPmf pmf;
  pmf.prob.assign(n_max, 0.0);
  double w = 1.0 / static_cast<double>(mus.size());
  for (const OutputPmf& part : parts)
    for (std::size_t n = 0; n < part.prob.size(); ++n)
      pmf.prob[n] += w * part.prob[n];
  return pmf;
}

OutputPmf OutputPmf::from_probabilities(std::vector<double> probs) {
  double sum = 0.0;
  for (double v : probs) {
    if (v < 0.0)
      throw std::invalid_argument("OutputPmf: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw std::invalid_argument("OutputPmf: probabilities must sum to 1");
  OutputPmf pmf;
  pmf.prob = std::move(probs);
  return pmf;
}

OutputPmf OutputPmf::from_mean_distribution(const MeanDistribution& means,
                                            double tail_tol) {
  switch (means.kind) {
    case MeanDistribution::Kind::Constant:
      return poisson(means.mu, tail_tol);
    case MeanDistribution::Kind::Gamma:
      return gamma_poisson_mixture(means.shape, means.scale, tail_tol);
    case MeanDistribution::Kind::Empirical:
      return poisson_mixture(means.values, tail_tol);
  }
  throw std::logic_error("OutputPmf: unknown mean distribution");
}

NullPath gamma_null_general(const OutputPmf& pmf, double p) {
  check_p(p);
  if (pmf.prob.empty())
    throw std::invalid_argument("gamma_null_general: empty pmf");

  double mu = 0.0, Eq = 0.0, Eyq = 0.0, Ew = 0.0, Eyw = 0.0;
  double log1mp = std::log1p(-p);
  for (std::size_t n = 0; n < pmf.prob.size(); ++n) {
    double P = pmf.prob[n];
    if (P == 0.0) continue;
    double nn = static_cast<double>(n);
    double w = std::exp(nn * log1mp);  // (1-p)^n
    double q = 1.0 - w;
    mu += nn * P;
    Eq += q * P;
    Eyq += nn * q * P;
    Ew += w * P;
    Eyw += nn * w * P;
  }

  NullPath path;
  path.mean_post = mu;
  if (pmf.variance() <= 0.0 || Eq <= 0.0) {
    // Point-mass output or no detection mass: no selection, flat path.
    path.mean_k0 = mu;
    path.mean_kminus1 = mu;
    path.degenerate = true;
    return path;
  }
  path.mean_k0 = Eyq / Eq;
  path.mean_kminus1 = Eyw / Ew;
  path.gamma0 = std::log(path.mean_k0 / path.mean_kminus1);
  path.gamma_plus = std::log(mu / path.mean_kminus1);
  return path;
}

NullPath gamma_null_poisson(double mu, double p) {
  check_p(p);
  if (mu <= 0.0) throw std::domain_error("gamma_null_poisson: mu <= 0");
  NullPath path;
  // E[(1-p)^y] = exp(-mu p), E[y (1-p)^y] = (1-p) mu exp(-mu p).
  double em = -std::expm1(-mu * p);  // 1 - exp(-mu p)
  path.mean_post = mu;
  path.mean_kminus1 = mu * (1.0 - p);
  path.mean_k0 = mu * (em + p * std::exp(-mu * p)) / em;
  path.gamma_plus = -std::log1p(-p);
  path.gamma0 = std::log((em + p * std::exp(-mu * p)) / ((1.0 - p) * em));
  return path;
}

double conditional_event_time_mean(const AuthorPanel& panel,
                                   const TreatmentAssignment& assignment,
                                   int k) {
  if (assignment.n_authors() != panel.n_authors)
    throw std::invalid_argument("conditional_event_time_mean: size mismatch");
  long long sum = 0;
  long long n = 0;
  for (int i = 0; i < panel.n_authors; ++i) {
    if (!assignment.is_treated(i)) continue;
    int t = assignment.cohort[i] + k;
    if (t < 0 || t >= panel.n_months) continue;
    sum += panel.at(i, t);
    ++n;
  }
  if (n == 0)
    throw std::runtime_error("conditional_event_time_mean: no observations at k");
  return static_cast<double>(sum) / static_cast<double>(n);
}

}  // namespace didsim
