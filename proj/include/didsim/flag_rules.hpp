// flag_rules.hpp — flagging rules (Bernoulli, keyword) and the conversion of
// paper-level flags into treatment timing: the first-detection stopping time
// and its random-timing comparator.
//
// Rules take the paper list by value and return a fresh flagged copy, so one
// simulated world can feed several scenarios without cross-contamination.
// Flag draws are keyed on (seed, paper_key) and are therefore independent of
// list order and safe to parallelize.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "didsim/paper_event.hpp"

namespace didsim {

struct HazardParams {
  double p = 0.2;       // per-paper flag probability
  int start_month = 10; // first month at which flags may occur

  void validate() const;
};

// Inclusive month range.
struct MonthWindow {
  int first = 0;
  int last = 0;
  int length() const { return last - first + 1; }
  bool contains(int m) const { return m >= first && m <= last; }
};

// q(n) = 1 - (1-p)^n, the probability that a month with n papers contains at
// least one flag. Evaluated as -expm1(n*log1p(-p)) so small p keeps precision.
double detection_hazard(long long n, double p);

// Each paper with month >= params.start_month is independently flagged with
// probability p; earlier papers are never flagged.
std::vector<PaperEvent> bernoulli_flags(std::vector<PaperEvent> papers,
                                        const HazardParams& params,
                                        std::uint64_t seed);

// Flagged iff month >= start_month and the token list intersects `keywords`
// (case-insensitive exact-token match; callers tokenize). Throws if any
// paper lacks tokens.
std::vector<PaperEvent> keyword_flags(std::vector<PaperEvent> papers,
                                      const std::set<std::string>& keywords,
                                      int start_month);

inline constexpr int kNeverTreated = -1;

struct TreatmentAssignment {
  // Per-author first-detection month, or kNeverTreated.
  std::vector<int> cohort;
  // Pseudo-treatment month for never-treated authors, kNeverTreated
  // elsewhere; filled by assign_pseudo_dates.
  std::vector<int> pseudo_cohort;
  MonthWindow eligible_window;

  int n_authors() const { return static_cast<int>(cohort.size()); }
  int n_treated() const;
  double treated_share() const;
  bool is_treated(int author) const { return cohort[author] != kNeverTreated; }
  // Real cohort for treated authors, pseudo date for the rest.
  int effective_cohort(int author) const {
    return is_treated(author) ? cohort[author] : pseudo_cohort[author];
  }
};

// t* = earliest month in `window` with at least one flagged paper; authors
// with no flagged paper are never-treated. Flags must already be applied.
TreatmentAssignment first_detection_timing(const std::vector<PaperEvent>& papers,
                                           int n_authors, MonthWindow window);

// Each author independently treated with probability treated_share, dates
// uniform over `window`; draws keyed on (seed, author) only, so assignment
// is independent of any panel.
TreatmentAssignment random_timing(int n_authors, double treated_share,
                                  MonthWindow window, std::uint64_t seed);

}  // namespace didsim
