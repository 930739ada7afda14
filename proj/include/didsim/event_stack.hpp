// event_stack.hpp — stacked DiD dataset construction. One stack per cohort
// (calendar month of first detection); never-treated authors are assigned a
// pseudo-treatment month and serve as that cohort's controls. Each author
// appears in exactly one stack.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "didsim/flag_rules.hpp"
#include "didsim/panel_dgp.hpp"

namespace didsim {

struct StackConfig {
  MonthWindow pseudo_window{10, 29};  // uniform pseudo-treatment draws
  int min_cohort_size = 2;            // treated authors per retained cohort
  int k_lo = -11;                     // reported event-time range
  int k_hi = 17;
  // Event times outside [k_lo, k_hi] keep their rows but load on a shared
  // endpoint dummy per side; without binning such rows carry no regressor.
  bool bin_endpoints = true;

  void validate() const;
};

// Gives every never-treated author an independent uniform pseudo date from
// config.pseudo_window; treated authors are untouched. Draws are keyed on
// (seed, author index).
TreatmentAssignment assign_pseudo_dates(TreatmentAssignment assignment,
                                        const StackConfig& config,
                                        std::uint64_t seed);

// Long-form stacked observations (struct of arrays). cluster_id equals the
// author index; every retained author contributes one row per panel month.
struct StackedDataset {
  std::vector<std::int32_t> stack;    // cohort month c
  std::vector<std::int32_t> author;   // dense author index
  std::vector<std::int32_t> month;    // calendar month t
  std::vector<std::int32_t> k;        // event time t - c
  std::vector<std::uint8_t> treated;
  std::vector<double> y;
  std::vector<std::string> author_ids;  // dense index -> id (panel order)

  int n_months = 0;
  int k_min = 0, k_max = 0;                 // range present in the rows
  std::vector<int> retained_cohorts;
  std::vector<std::string> drop_log;        // one line per dropped cohort

  std::size_t n_rows() const { return y.size(); }
};

// Emits, for each cohort with >= min_cohort_size treated authors and at
// least one control, all panel months for its treated and control authors.
// Cohorts failing either requirement are dropped and logged. Throws if no
// cohort survives.
StackedDataset build_stacks(const AuthorPanel& panel,
                            const TreatmentAssignment& assignment,
                            const StackConfig& config);

// Regressor columns for the estimator: D_k = treated x 1{event time = k}
// for every k in [k_lo, k_hi] except the k = -1 reference, plus endpoint
// bins when enabled and out-of-range treated rows exist.
struct RegressorLayout {
  std::vector<int> ks;     // event times with their own column, ascending
  bool has_pre_bin = false;   // treated x 1{k < k_lo}
  bool has_post_bin = false;  // treated x 1{k > k_hi}
  int k_lo = 0, k_hi = 0;

  int n_cols() const {
    return static_cast<int>(ks.size()) + (has_pre_bin ? 1 : 0) +
           (has_post_bin ? 1 : 0);
  }
  int pre_bin_col() const { return has_pre_bin ? static_cast<int>(ks.size()) : -1; }
  int post_bin_col() const {
    return has_post_bin ? static_cast<int>(ks.size()) + (has_pre_bin ? 1 : 0) : -1;
  }
  // Column index for event time k, or -1 if k has no own column.
  int col_of_k(int k) const;
  std::string col_name(int col) const;

  // Column hit by a row, or -1 (controls, reference period, unbinned
  // out-of-range rows).
  int row_col(bool treated, int k) const;
};

RegressorLayout regressor_layout(const StackedDataset& data,
                                 const StackConfig& config);

}  // namespace didsim
