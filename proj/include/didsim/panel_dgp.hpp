// panel_dgp.hpp — null data-generating process: author-specific productivity
// means and i.i.d. monthly Poisson counts. There is no treatment effect
// anywhere in this module by construction.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "didsim/paper_event.hpp"
#include "didsim/rng.hpp"

namespace didsim {

// Distribution of the author-specific mean monthly output.
struct MeanDistribution {
  enum class Kind { Gamma, Constant, Empirical };
  Kind kind = Kind::Gamma;
  double shape = 2.0;   // Gamma
  double scale = 0.5;   // Gamma
  double mu = 1.0;      // Constant
  std::vector<double> values;  // Empirical, recycled over authors

  static MeanDistribution gamma(double shape, double scale);
  static MeanDistribution constant(double mu);
  static MeanDistribution empirical(std::vector<double> values);

  double population_mean() const;
};

struct DgpConfig {
  int n_authors = 2000;
  int n_months = 30;
  MeanDistribution means;

  void validate() const;  // throws std::invalid_argument
};

struct AuthorMeanVector {
  std::vector<double> mu;  // strictly positive, one per author
};

// Rectangular author x month count matrix, row-major by author.
struct AuthorPanel {
  int n_authors = 0;
  int n_months = 0;
  std::vector<long long> counts;          // size n_authors * n_months
  std::vector<std::string> author_ids;    // dense index -> opaque id

  long long at(int author, int month) const {
    return counts[static_cast<std::size_t>(author) * n_months + month];
  }
  long long& at(int author, int month) {
    return counts[static_cast<std::size_t>(author) * n_months + month];
  }
  long long author_total(int author) const;

  // Order-sensitive content hash; used to assert that paired scenarios
  // consume identical outcome data.
  std::uint64_t content_hash() const;
};

AuthorMeanVector draw_author_means(const DgpConfig& config, Rng& rng);

AuthorPanel simulate_panel(const AuthorMeanVector& means, int n_months, Rng& rng);

// One PaperEvent per simulated manuscript, ordered author-major,
// month-minor, intra-month index ascending. Paper ids are sequential in
// this canonical order, so flag draws keyed on ids are reproducible.
std::vector<PaperEvent> expand_to_papers(const AuthorPanel& panel);

// Aggregates papers back into an author x month matrix (test/oracle path
// and the ingestion path both use it).
AuthorPanel aggregate_papers(const std::vector<PaperEvent>& papers,
                             const std::vector<std::string>& author_ids,
                             int n_months);

}  // namespace didsim
