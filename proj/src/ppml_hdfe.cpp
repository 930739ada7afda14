#include "didsim/ppml_hdfe.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>

namespace didsim {

namespace {

constexpr double kEtaMin = -575.0;  // exp() stays a normal double
constexpr double kEtaMax = 34.5;

double poisson_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0)
      dev += y[i] * std::log(y[i] / mu[i]) - (y[i] - mu[i]);
    else
      dev += mu[i];
  }
  return 2.0 * dev;
}

int n_levels(const std::vector<int>& factor) {
  int n = 0;
  for (int v : factor) n = std::max(n, v + 1);
  return n;
}

}  // namespace

int demean_weighted(Eigen::Ref<Eigen::MatrixXd> m, const Eigen::VectorXd& w,
                    const std::vector<std::vector<int>>& factors, double tol,
                    int max_sweeps) {
  const Eigen::Index n = m.rows();
  const Eigen::Index p = m.cols();
  if (factors.empty() || p == 0) return 0;

  std::vector<int> levels;
  std::vector<std::vector<double>> group_w(factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (static_cast<Eigen::Index>(factors[f].size()) != n)
      throw std::invalid_argument("demean_weighted: factor length mismatch");
    int lf = n_levels(factors[f]);
    levels.push_back(lf);
    group_w[f].assign(lf, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) group_w[f][factors[f][i]] += w[i];
  }

  std::vector<double> scale(p);
  for (Eigen::Index j = 0; j < p; ++j)
    scale[j] = std::max(1.0, m.col(j).cwiseAbs().maxCoeff());
  std::vector<char> done(p, 0);
  std::vector<double> sums;
  Eigen::VectorXd prev(n);

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool all_done = true;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (done[j]) continue;
      auto col = m.col(j);
      prev = col;
      for (std::size_t f = 0; f < factors.size(); ++f) {
        const std::vector<int>& idx = factors[f];
        sums.assign(levels[f], 0.0);
        for (Eigen::Index i = 0; i < n; ++i) sums[idx[i]] += w[i] * col[i];
        for (int g = 0; g < levels[f]; ++g)
          sums[g] = group_w[f][g] > 0.0 ? sums[g] / group_w[f][g] : 0.0;
        for (Eigen::Index i = 0; i < n; ++i) col[i] -= sums[idx[i]];
      }
      double delta = (col - prev).cwiseAbs().maxCoeff();
      if (delta <= tol * scale[j]) done[j] = 1;
      all_done = all_done && done[j];
    }
    if (all_done) return sweep + 1;
  }
  return sweep;
}

Eigen::MatrixXd cluster_vcov(const Eigen::VectorXd& residual,
                             const Eigen::VectorXd& weights,
                             const Eigen::MatrixXd& x_demeaned,
                             const std::vector<int>& cluster) {
  const Eigen::Index n = x_demeaned.rows();
  const Eigen::Index p = x_demeaned.cols();
  if (residual.size() != n || weights.size() != n ||
      static_cast<Eigen::Index>(cluster.size()) != n)
    throw std::invalid_argument("cluster_vcov: size mismatch");

  int g_count = n_levels(cluster);
  int g_used = 0;
  {
    std::vector<char> seen(g_count, 0);
    for (int g : cluster)
      if (!seen[g]) {
        seen[g] = 1;
        ++g_used;
      }
  }
  if (g_used < 2) throw std::invalid_argument("cluster_vcov: fewer than 2 clusters");

  Eigen::MatrixXd bread = x_demeaned.transpose() *
                          weights.asDiagonal() * x_demeaned;
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(g_count, p);
  for (Eigen::Index i = 0; i < n; ++i)
    scores.row(cluster[i]) += residual[i] * x_demeaned.row(i);
  Eigen::MatrixXd meat = scores.transpose() * scores;

  Eigen::MatrixXd bread_inv =
      bread.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  double adj = static_cast<double>(g_used) / (g_used - 1.0);
  Eigen::MatrixXd v = adj * bread_inv * meat * bread_inv;
  // Symmetrize away solver round-off.
  return 0.5 * (v + v.transpose());
}

double critical_value(double level, int df) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("critical_value: level outside (0,1)");
  if (df > 0) {
    boost::math::students_t dist(static_cast<double>(df));
    return boost::math::quantile(dist, 1.0 - level / 2.0);
  }
  boost::math::normal dist;
  return boost::math::quantile(dist, 1.0 - level / 2.0);
}

PpmlFit fit_ppml(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                 const FeSpec& fe, const std::vector<int>& cluster,
                 const PpmlOptions& opt) {
  const Eigen::Index n_all = y.size();
  const Eigen::Index p = x.cols();
  if (x.rows() != n_all || static_cast<Eigen::Index>(cluster.size()) != n_all)
    throw std::invalid_argument("fit_ppml: size mismatch");
  for (Eigen::Index i = 0; i < n_all; ++i)
    if (!(y[i] >= 0.0) || !std::isfinite(y[i]))
      throw std::invalid_argument("fit_ppml: outcomes must be finite and >= 0");
  for (const auto& f : fe.factors)
    if (static_cast<Eigen::Index>(f.size()) != n_all)
      throw std::invalid_argument("fit_ppml: factor length mismatch");

  PpmlFit out;

  // Iteratively drop rows of FE groups whose outcomes are all zero.
  std::vector<char> keep(n_all, 1);
  if (opt.drop_zero_groups && !fe.factors.empty()) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t f = 0; f < fe.factors.size(); ++f) {
        const std::vector<int>& idx = fe.factors[f];
        std::vector<double> group_y(n_levels(idx), 0.0);
        std::vector<char> group_seen(group_y.size(), 0);
        for (Eigen::Index i = 0; i < n_all; ++i)
          if (keep[i]) {
            group_y[idx[i]] += y[i];
            group_seen[idx[i]] = 1;
          }
        int dropped_groups = 0;
        for (Eigen::Index i = 0; i < n_all; ++i) {
          if (keep[i] && group_seen[idx[i]] && group_y[idx[i]] == 0.0) keep[i] = 0;
        }
        for (std::size_t g = 0; g < group_y.size(); ++g)
          if (group_seen[g] && group_y[g] == 0.0) ++dropped_groups;
        if (dropped_groups > 0) {
          changed = true;
          if (f == 0) out.n_dropped_units += dropped_groups;
        }
      }
    }
  }

  std::vector<int> rows;
  rows.reserve(n_all);
  for (Eigen::Index i = 0; i < n_all; ++i)
    if (keep[i]) rows.push_back(static_cast<int>(i));
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  out.n_obs = static_cast<int>(n);
  out.n_dropped_rows = static_cast<int>(n_all - n);
  out.retained_rows = rows;
  if (n == 0) throw std::invalid_argument("fit_ppml: no usable observations");

  Eigen::VectorXd yv(n);
  Eigen::MatrixXd xv(n, p);
  for (Eigen::Index r = 0; r < n; ++r) {
    yv[r] = y[rows[r]];
    xv.row(r) = x.row(rows[r]);
  }

  // Compact factor levels and clusters over retained rows.
  std::vector<std::vector<int>> factors(fe.factors.size());
  for (std::size_t f = 0; f < fe.factors.size(); ++f) {
    std::vector<int> remap(n_levels(fe.factors[f]), -1);
    int next = 0;
    factors[f].resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      int lev = fe.factors[f][rows[r]];
      if (remap[lev] < 0) remap[lev] = next++;
      factors[f][r] = remap[lev];
    }
  }
  std::vector<int> clus(n);
  {
    std::vector<int> remap(n_levels(cluster), -1);
    int next = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      int c = cluster[rows[r]];
      if (remap[c] < 0) remap[c] = next++;
      clus[r] = remap[c];
    }
    out.n_clusters = next;
  }

  // Starting values: beta = 0, offsets from first-factor group means
  // (floored at 0.1); without fixed effects, the overall mean.
  Eigen::VectorXd eta(n);
  if (!factors.empty()) {
    const std::vector<int>& idx = factors[0];
    int lf = n_levels(idx);
    std::vector<double> sum(lf, 0.0), cnt(lf, 0.0);
    for (Eigen::Index r = 0; r < n; ++r) {
      sum[idx[r]] += yv[r];
      cnt[idx[r]] += 1.0;
    }
    for (Eigen::Index r = 0; r < n; ++r)
      eta[r] = std::log(std::max(sum[idx[r]] / cnt[idx[r]], 0.1));
  } else {
    eta.setConstant(std::log(std::max(yv.mean(), 0.1)));
  }

  Eigen::VectorXd mu = eta.array().exp();
  double dev = poisson_deviance(yv, mu);
  out.deviance_trace.push_back(dev);

  std::vector<int> active;  // retained column indices, fixed after iter 1
  for (Eigen::Index j = 0; j < p; ++j) active.push_back(static_cast<int>(j));
  Eigen::VectorXd beta_active;
  Eigen::MatrixXd work(n, p + 1);
  Eigen::MatrixXd xt;  // demeaned active regressors at current weights

  bool converged = false;
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    Eigen::VectorXd w = mu;
    Eigen::VectorXd z = eta.array() + (yv - mu).array() / mu.array();

    const Eigen::Index pa = static_cast<Eigen::Index>(active.size());
    work.resize(n, pa + 1);
    work.col(0) = z;
    for (Eigen::Index j = 0; j < pa; ++j) work.col(j + 1) = xv.col(active[j]);
    demean_weighted(work, w, factors, opt.proj_tol, opt.proj_max_sweeps);
    Eigen::VectorXd zt = work.col(0);
    xt = work.rightCols(pa);

    if (iter == 0 && pa > 0) {
      // Rank-revealing pass on the weighted cross-product; collinear
      // columns are dropped once and stay dropped.
      Eigen::MatrixXd s = xt.transpose() * w.asDiagonal() * xt;
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s);
      qr.setThreshold(1e-10);
      Eigen::Index rank = qr.rank();
      if (rank < pa) {
        std::vector<int> kept_idx(
            qr.colsPermutation().indices().data(),
            qr.colsPermutation().indices().data() + rank);
        std::sort(kept_idx.begin(), kept_idx.end());
        std::vector<int> new_active;
        Eigen::MatrixXd xt_new(n, rank);
        for (Eigen::Index j = 0; j < rank; ++j) {
          new_active.push_back(active[kept_idx[j]]);
          xt_new.col(j) = xt.col(kept_idx[j]);
        }
        for (int col : active)
          if (std::find(new_active.begin(), new_active.end(), col) ==
              new_active.end())
            out.warnings.push_back("column " + std::to_string(col) +
                                   " dropped: collinear with the remaining design");
        active = std::move(new_active);
        xt = std::move(xt_new);
      }
    }

    Eigen::VectorXd eta_cand;
    if (!active.empty()) {
      Eigen::MatrixXd s = xt.transpose() * w.asDiagonal() * xt;
      Eigen::VectorXd b = xt.transpose() * (w.cwiseProduct(zt));
      beta_active = s.ldlt().solve(b);
      eta_cand = z - (zt - xt * beta_active);
    } else {
      eta_cand = z - zt;
    }
    eta_cand = eta_cand.cwiseMax(kEtaMin).cwiseMin(kEtaMax);

    // Step-halve if the candidate raises the deviance.
    double dev_new = 0.0;
    Eigen::VectorXd eta_new, mu_new;
    double step = 1.0;
    for (int h = 0; h < 40; ++h) {
      eta_new = eta + step * (eta_cand - eta);
      mu_new = eta_new.array().exp();
      dev_new = poisson_deviance(yv, mu_new);
      if (std::isfinite(dev_new) && dev_new <= dev * (1.0 + 1e-12) + 1e-12) break;
      step *= 0.5;
    }

    double dev_prev = dev;
    eta = eta_new;
    mu = mu_new;
    dev = dev_new;
    out.deviance_trace.push_back(dev);
    if (std::abs(dev - dev_prev) / (0.1 + std::abs(dev)) < opt.dev_tol) {
      converged = true;
      ++iter;
      break;
    }
  }

  out.converged = converged;
  out.iterations = iter;
  out.deviance = dev;
  out.mu = mu;
  if (!converged && opt.require_convergence)
    throw PpmlConvergenceError(
        "fit_ppml: no convergence after " + std::to_string(iter) +
            " iterations (relative deviance change above tolerance)",
        out.deviance_trace);

  // Final pass at the converged weights: re-demean [z, X], re-solve the
  // coefficients so they match the converged mean function exactly, and
  // build the sandwich from the same demeaned design.
  const Eigen::Index pa = static_cast<Eigen::Index>(active.size());
  out.beta = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  out.kept.assign(p, 0);
  out.vcov = Eigen::MatrixXd::Zero(p, p);
  out.se.assign(p, std::numeric_limits<double>::quiet_NaN());
  if (pa > 0) {
    Eigen::VectorXd w = mu;
    Eigen::MatrixXd fin(n, pa + 1);
    fin.col(0) = eta.array() + (yv - mu).array() / mu.array();
    for (Eigen::Index j = 0; j < pa; ++j) fin.col(j + 1) = xv.col(active[j]);
    demean_weighted(fin, w, factors, opt.proj_tol, opt.proj_max_sweeps);
    Eigen::MatrixXd xfin = fin.rightCols(pa);
    Eigen::MatrixXd s = xfin.transpose() * w.asDiagonal() * xfin;
    beta_active = s.ldlt().solve(xfin.transpose() * (w.cwiseProduct(fin.col(0))));

    Eigen::VectorXd resid = yv - mu;
    Eigen::MatrixXd vc = cluster_vcov(resid, w, xfin, clus);
    for (Eigen::Index j = 0; j < pa; ++j) {
      out.beta[active[j]] = beta_active[j];
      out.kept[active[j]] = 1;
      out.se[active[j]] = std::sqrt(std::max(vc(j, j), 0.0));
      for (Eigen::Index l = 0; l < pa; ++l)
        out.vcov(active[j], active[l]) = vc(j, l);
    }
  }
  return out;
}

bool EventStudyFit::has_k(int k) const {
  int col = layout.col_of_k(k);
  return col >= 0 && fit.kept[col];
}

double EventStudyFit::gamma_at(int k) const {
  int col = layout.col_of_k(k);
  if (col < 0 || !fit.kept[col])
    throw std::out_of_range("EventStudyFit: no coefficient for k=" +
                            std::to_string(k));
  return fit.beta[col];
}

double EventStudyFit::se_at(int k) const {
  int col = layout.col_of_k(k);
  if (col < 0 || !fit.kept[col])
    throw std::out_of_range("EventStudyFit: no standard error for k=" +
                            std::to_string(k));
  return fit.se[col];
}

EventStudyFit fit_event_study(const StackedDataset& data,
                              const StackConfig& stack_config,
                              const EstimatorConfig& config) {
  EventStudyFit out;
  out.layout = regressor_layout(data, stack_config);
  out.retained_cohorts = data.retained_cohorts;

  const Eigen::Index n = static_cast<Eigen::Index>(data.n_rows());
  if (n == 0) throw std::invalid_argument("fit_event_study: empty dataset");
  const int p = out.layout.n_cols();

  Eigen::VectorXd y(n);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, p);

  // Dense stack index so month-by-stack cells enumerate densely.
  int max_stack = 0;
  for (Eigen::Index r = 0; r < n; ++r)
    max_stack = std::max(max_stack, static_cast<int>(data.stack[r]));
  std::vector<int> stack_index_of(max_stack + 1, -1);
  {
    int next = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      int& s = stack_index_of[data.stack[r]];
      if (s < 0) s = next++;
    }
  }

  FeSpec fe;
  fe.factors.resize(2);
  fe.factors[0].resize(n);  // author
  fe.factors[1].resize(n);  // month x stack
  std::vector<int> cluster(n);

  std::vector<int> author_remap(data.author_ids.size(), -1);
  int next_author = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    y[r] = data.y[r];
    int col = out.layout.row_col(data.treated[r] != 0, data.k[r]);
    if (col >= 0) x(r, col) = 1.0;
    int a = data.author[r];
    if (author_remap[a] < 0) author_remap[a] = next_author++;
    fe.factors[0][r] = author_remap[a];
    fe.factors[1][r] =
        stack_index_of[data.stack[r]] * data.n_months + data.month[r];
    cluster[r] = author_remap[a];
  }
  // Compact the month x stack levels (cells are dense already, but keep the
  // estimator contract of dense level indices).
  {
    std::vector<int> remap(
        static_cast<std::size_t>(data.retained_cohorts.size()) * data.n_months,
        -1);
    int next = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      int& m = remap[fe.factors[1][r]];
      if (m < 0) m = next++;
      fe.factors[1][r] = m;
    }
  }

  out.fit = fit_ppml(y, x, fe, cluster, config.ppml);
  return out;
}

WaldResult wald_test(const EventStudyFit& fit, int k, double null_value,
                     double level, bool t_critical) {
  int col = fit.layout.col_of_k(k);
  if (col < 0 || !fit.fit.kept[col])
    throw std::out_of_range("wald_test: no estimate at k=" + std::to_string(k));
  double se = fit.fit.se[col];
  if (!(se > 0.0)) throw std::runtime_error("wald_test: non-positive SE");
  WaldResult r;
  r.t = (fit.fit.beta[col] - null_value) / se;
  double crit =
      critical_value(level, t_critical ? fit.fit.n_clusters - 1 : 0);
  r.reject = std::abs(r.t) > crit;
  r.reject_positive = r.reject && fit.fit.beta[col] > null_value;
  return r;
}

}  // namespace didsim
