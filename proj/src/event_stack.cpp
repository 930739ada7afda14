#include "didsim/event_stack.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace didsim {

void StackConfig::validate() const {
  if (pseudo_window.length() < 1)
    throw std::invalid_argument("StackConfig: empty pseudo window");
  if (min_cohort_size < 1)
    throw std::invalid_argument("StackConfig: min_cohort_size must be >= 1");
  if (k_lo > k_hi) throw std::invalid_argument("StackConfig: k_lo > k_hi");
  if (!(k_lo <= -1 && -1 <= k_hi))
    throw std::invalid_argument(
        "StackConfig: reported range must contain the k = -1 reference");
}

TreatmentAssignment assign_pseudo_dates(TreatmentAssignment assignment,
                                        const StackConfig& config,
                                        std::uint64_t seed) {
  config.validate();
  const MonthWindow& w = config.pseudo_window;
  for (int i = 0; i < assignment.n_authors(); ++i) {
    if (assignment.is_treated(i)) continue;
    double u = uniform_from_key(seed, static_cast<std::uint64_t>(i));
    int offset = static_cast<int>(u * w.length());
    if (offset >= w.length()) offset = w.length() - 1;
    assignment.pseudo_cohort[i] = w.first + offset;
  }
  return assignment;
}

StackedDataset build_stacks(const AuthorPanel& panel,
                            const TreatmentAssignment& assignment,
                            const StackConfig& config) {
  config.validate();
  if (assignment.n_authors() != panel.n_authors)
    throw std::invalid_argument("build_stacks: assignment/panel size mismatch");

  // Cohort -> member authors, treated first so a stack's rows are grouped.
  std::map<int, std::vector<int>> treated_by_cohort;
  std::map<int, std::vector<int>> controls_by_cohort;
  for (int i = 0; i < panel.n_authors; ++i) {
    int c = assignment.effective_cohort(i);
    if (c == kNeverTreated)
      throw std::invalid_argument(
          "build_stacks: author without a real or pseudo cohort date");
    if (c < 0 || c >= panel.n_months)
      throw std::invalid_argument("build_stacks: cohort month outside panel");
    (assignment.is_treated(i) ? treated_by_cohort : controls_by_cohort)[c]
        .push_back(i);
  }

  StackedDataset data;
  data.n_months = panel.n_months;
  data.author_ids = panel.author_ids;

  auto emit_author = [&](int cohort, int i, bool is_treated) {
    for (int t = 0; t < panel.n_months; ++t) {
      data.stack.push_back(cohort);
      data.author.push_back(i);
      data.month.push_back(t);
      data.k.push_back(t - cohort);
      data.treated.push_back(is_treated ? 1 : 0);
      data.y.push_back(static_cast<double>(panel.at(i, t)));
    }
  };

  for (const auto& [cohort, treated_authors] : treated_by_cohort) {
    auto ctrl_it = controls_by_cohort.find(cohort);
    std::size_t n_controls =
        ctrl_it == controls_by_cohort.end() ? 0 : ctrl_it->second.size();
    if (static_cast<int>(treated_authors.size()) < config.min_cohort_size) {
      data.drop_log.push_back("cohort " + std::to_string(cohort) + ": " +
                              std::to_string(treated_authors.size()) +
                              " treated below min size " +
                              std::to_string(config.min_cohort_size));
      continue;
    }
    if (n_controls == 0) {
      data.drop_log.push_back("cohort " + std::to_string(cohort) +
                              ": no never-treated controls assigned");
      continue;
    }
    data.retained_cohorts.push_back(cohort);
    for (int i : treated_authors) emit_author(cohort, i, true);
    for (int i : ctrl_it->second) emit_author(cohort, i, false);
  }

  if (data.retained_cohorts.empty())
    throw std::runtime_error("build_stacks: no valid cohorts");

  data.k_min = *std::min_element(data.k.begin(), data.k.end());
  data.k_max = *std::max_element(data.k.begin(), data.k.end());
  return data;
}

int RegressorLayout::col_of_k(int k) const {
  if (k == -1 || k < k_lo || k > k_hi) return -1;
  auto it = std::lower_bound(ks.begin(), ks.end(), k);
  if (it == ks.end() || *it != k) return -1;
  return static_cast<int>(it - ks.begin());
}

std::string RegressorLayout::col_name(int col) const {
  if (col < static_cast<int>(ks.size()))
    return "k=" + std::to_string(ks[col]);
  if (col == pre_bin_col()) return "k<=" + std::to_string(k_lo - 1);
  return "k>=" + std::to_string(k_hi + 1);
}

int RegressorLayout::row_col(bool is_treated, int k) const {
  if (!is_treated || k == -1) return -1;
  if (k < k_lo) return pre_bin_col();
  if (k > k_hi) return post_bin_col();
  return col_of_k(k);
}

RegressorLayout regressor_layout(const StackedDataset& data,
                                 const StackConfig& config) {
  config.validate();
  RegressorLayout layout;
  layout.k_lo = config.k_lo;
  layout.k_hi = config.k_hi;
  for (int k = config.k_lo; k <= config.k_hi; ++k)
    if (k != -1) layout.ks.push_back(k);
  if (config.bin_endpoints) {
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
      if (!data.treated[r]) continue;
      if (data.k[r] < config.k_lo) layout.has_pre_bin = true;
      if (data.k[r] > config.k_hi) layout.has_post_bin = true;
      if (layout.has_pre_bin && layout.has_post_bin) break;
    }
  }
  return layout;
}

}  // namespace didsim
