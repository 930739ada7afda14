#include "didsim/panel_dgp.hpp"

#include <cstdio>
#include <stdexcept>

namespace didsim {

MeanDistribution MeanDistribution::gamma(double shape, double scale) {
  MeanDistribution d;
  d.kind = Kind::Gamma;
  d.shape = shape;
  d.scale = scale;
  return d;
}

MeanDistribution MeanDistribution::constant(double mu) {
  MeanDistribution d;
  d.kind = Kind::Constant;
  d.mu = mu;
  return d;
}

MeanDistribution MeanDistribution::empirical(std::vector<double> values) {
  MeanDistribution d;
  d.kind = Kind::Empirical;
  d.values = std::move(values);
  return d;
}

double MeanDistribution::population_mean() const {
  switch (kind) {
    case Kind::Gamma:
      return shape * scale;
    case Kind::Constant:
      return mu;
    case Kind::Empirical: {
      double s = 0.0;
      for (double v : values) s += v;
      return values.empty() ? 0.0 : s / static_cast<double>(values.size());
    }
  }
  return 0.0;
}

void DgpConfig::validate() const {
  if (n_authors < 1) throw std::invalid_argument("DgpConfig: n_authors must be >= 1");
  if (n_months < 2) throw std::invalid_argument("DgpConfig: n_months must be >= 2");
  switch (means.kind) {
    case MeanDistribution::Kind::Gamma:
      if (means.shape <= 0.0 || means.scale <= 0.0)
        throw std::invalid_argument("DgpConfig: gamma shape and scale must be positive");
      break;
    case MeanDistribution::Kind::Constant:
      if (means.mu <= 0.0)
        throw std::invalid_argument("DgpConfig: constant mean must be positive");
      break;
    case MeanDistribution::Kind::Empirical:
      if (means.values.empty())
        throw std::invalid_argument("DgpConfig: empirical mean list is empty");
      for (double v : means.values)
        if (v <= 0.0)
          throw std::invalid_argument("DgpConfig: empirical means must be positive");
      break;
  }
}

long long AuthorPanel::author_total(int author) const {
  long long s = 0;
  for (int t = 0; t < n_months; ++t) s += at(author, t);
  return s;
}

std::uint64_t AuthorPanel::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  mix(static_cast<std::uint64_t>(n_authors));
  mix(static_cast<std::uint64_t>(n_months));
  for (long long c : counts) mix(static_cast<std::uint64_t>(c));
  return h;
}

AuthorMeanVector draw_author_means(const DgpConfig& config, Rng& rng) {
  config.validate();
  AuthorMeanVector out;
  out.mu.resize(config.n_authors);
  switch (config.means.kind) {
    case MeanDistribution::Kind::Gamma:
      for (int i = 0; i < config.n_authors; ++i) {
        double v = 0.0;
        // Zero draws are possible only through underflow; redraw to keep
        // every mean strictly positive.
        do {
          v = rng.gamma(config.means.shape, config.means.scale);
        } while (v <= 0.0);
        out.mu[i] = v;
      }
      break;
    case MeanDistribution::Kind::Constant:
      for (int i = 0; i < config.n_authors; ++i) out.mu[i] = config.means.mu;
      break;
    case MeanDistribution::Kind::Empirical:
      for (int i = 0; i < config.n_authors; ++i)
        out.mu[i] = config.means.values[i % config.means.values.size()];
      break;
  }
  return out;
}

AuthorPanel simulate_panel(const AuthorMeanVector& means, int n_months, Rng& rng) {
  if (n_months < 1) throw std::invalid_argument("simulate_panel: n_months must be >= 1");
  AuthorPanel panel;
  panel.n_authors = static_cast<int>(means.mu.size());
  panel.n_months = n_months;
  panel.counts.resize(static_cast<std::size_t>(panel.n_authors) * n_months);
  panel.author_ids.resize(panel.n_authors);
  char buf[24];
  for (int i = 0; i < panel.n_authors; ++i) {
    if (means.mu[i] <= 0.0)
      throw std::invalid_argument("simulate_panel: author mean must be positive");
    for (int t = 0; t < n_months; ++t) panel.at(i, t) = rng.poisson(means.mu[i]);
    std::snprintf(buf, sizeof buf, "a%06d", i);
    panel.author_ids[i] = buf;
  }
  return panel;
}

std::vector<PaperEvent> expand_to_papers(const AuthorPanel& panel) {
  std::size_t total = 0;
  for (long long c : panel.counts) total += static_cast<std::size_t>(c);
  std::vector<PaperEvent> papers;
  papers.reserve(total);
  char buf[24];
  long long next_id = 0;
  for (int i = 0; i < panel.n_authors; ++i) {
    for (int t = 0; t < panel.n_months; ++t) {
      for (long long j = 0; j < panel.at(i, t); ++j) {
        std::snprintf(buf, sizeof buf, "p%09lld", next_id++);
        papers.push_back(PaperEvent::make(buf, i, t));
      }
    }
  }
  return papers;
}

AuthorPanel aggregate_papers(const std::vector<PaperEvent>& papers,
                             const std::vector<std::string>& author_ids,
                             int n_months) {
  AuthorPanel panel;
  panel.n_authors = static_cast<int>(author_ids.size());
  panel.n_months = n_months;
  panel.author_ids = author_ids;
  panel.counts.assign(static_cast<std::size_t>(panel.n_authors) * n_months, 0);
  for (const PaperEvent& e : papers) {
    if (e.author < 0 || e.author >= panel.n_authors)
      throw std::invalid_argument("aggregate_papers: author index out of range");
    if (e.month < 0 || e.month >= n_months)
      throw std::invalid_argument("aggregate_papers: month out of range");
    ++panel.at(e.author, e.month);
  }
  return panel;
}

}  // namespace didsim
