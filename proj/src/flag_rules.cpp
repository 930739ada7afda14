#include "didsim/flag_rules.hpp"

#include <cmath>
#include <stdexcept>

namespace didsim {

void HazardParams::validate() const {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("HazardParams: p must lie in (0,1)");
}

double detection_hazard(long long n, double p) {
  if (p < 0.0 || p > 1.0)
    throw std::domain_error("detection_hazard: p outside [0,1]");
  if (n < 0) throw std::domain_error("detection_hazard: n must be >= 0");
  if (n == 0) return 0.0;
  if (p == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-p));
}

std::vector<PaperEvent> bernoulli_flags(std::vector<PaperEvent> papers,
                                        const HazardParams& params,
                                        std::uint64_t seed) {
  if (params.p < 0.0 || params.p > 1.0)
    throw std::invalid_argument("bernoulli_flags: p outside [0,1]");
  for (PaperEvent& e : papers) {
    e.flagged = e.month >= params.start_month &&
                uniform_from_key(seed, e.paper_key) < params.p;
  }
  return papers;
}

std::vector<PaperEvent> keyword_flags(std::vector<PaperEvent> papers,
                                      const std::set<std::string>& keywords,
                                      int start_month) {
  for (PaperEvent& e : papers) {
    if (!e.has_tokens)
      throw std::invalid_argument("keyword_flags: paper " + e.paper_id +
                                  " has no token list");
    bool hit = false;
    if (e.month >= start_month) {
      for (const std::string& w : e.tokens) {
        if (keywords.count(w)) {
          hit = true;
          break;
        }
      }
    }
    e.flagged = hit;
  }
  return papers;
}

int TreatmentAssignment::n_treated() const {
  int n = 0;
  for (int c : cohort) n += c != kNeverTreated;
  return n;
}

double TreatmentAssignment::treated_share() const {
  return cohort.empty() ? 0.0
                        : static_cast<double>(n_treated()) / cohort.size();
}

TreatmentAssignment first_detection_timing(const std::vector<PaperEvent>& papers,
                                           int n_authors, MonthWindow window) {
  TreatmentAssignment a;
  a.eligible_window = window;
  a.cohort.assign(n_authors, kNeverTreated);
  a.pseudo_cohort.assign(n_authors, kNeverTreated);
  for (const PaperEvent& e : papers) {
    if (!e.flagged || !window.contains(e.month)) continue;
    int& c = a.cohort[e.author];
    if (c == kNeverTreated || e.month < c) c = e.month;
  }
  return a;
}

TreatmentAssignment random_timing(int n_authors, double treated_share,
                                  MonthWindow window, std::uint64_t seed) {
  if (!(treated_share > 0.0 && treated_share <= 1.0))
    throw std::invalid_argument("random_timing: treated_share outside (0,1]");
  if (window.length() < 1)
    throw std::invalid_argument("random_timing: empty eligible window");
  TreatmentAssignment a;
  a.eligible_window = window;
  a.cohort.assign(n_authors, kNeverTreated);
  a.pseudo_cohort.assign(n_authors, kNeverTreated);
  for (int i = 0; i < n_authors; ++i) {
    std::uint64_t key = static_cast<std::uint64_t>(i);
    if (uniform_from_key(seed, 2 * key) < treated_share) {
      double u = uniform_from_key(seed, 2 * key + 1);
      int offset = static_cast<int>(u * window.length());
      if (offset >= window.length()) offset = window.length() - 1;
      a.cohort[i] = window.first + offset;
    }
  }
  return a;
}

}  // namespace didsim
