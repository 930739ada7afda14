#include "didsim/text_mixture.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace didsim {

TokenList tokenize(std::string_view text) {
  TokenList out;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Document split_sentences(std::string_view text) {
  Document out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    bool boundary = i == text.size() || text[i] == '.' || text[i] == '?' ||
                    text[i] == '!';
    if (!boundary) continue;
    TokenList toks = tokenize(text.substr(start, i - start));
    if (!toks.empty()) out.push_back(std::move(toks));
    start = i + 1;
  }
  return out;
}

namespace {

std::unordered_map<std::string, long long> unigram_counts(const Corpus& corpus,
                                                          long long& total) {
  std::unordered_map<std::string, long long> counts;
  total = 0;
  for (const TokenList& doc : corpus) {
    for (const std::string& w : doc) {
      ++counts[w];
      ++total;
    }
  }
  return counts;
}

}  // namespace

WordLlrTable fit_word_llr(const Corpus& human, const Corpus& llm) {
  long long total_h = 0, total_l = 0;
  auto counts_h = unigram_counts(human, total_h);
  auto counts_l = unigram_counts(llm, total_l);
  if (total_h == 0) throw std::invalid_argument("fit_word_llr: empty human corpus");
  if (total_l == 0) throw std::invalid_argument("fit_word_llr: empty llm corpus");

  WordLlrTable table;
  table.llr.reserve(std::min(counts_h.size(), counts_l.size()));
  double log_totals = std::log(static_cast<double>(total_h)) -
                      std::log(static_cast<double>(total_l));
  for (const auto& [word, ch] : counts_h) {
    auto it = counts_l.find(word);
    if (it == counts_l.end()) continue;  // retain words observed in both
    table.llr[word] = std::log(static_cast<double>(it->second)) -
                      std::log(static_cast<double>(ch)) + log_totals;
  }
  return table;
}

std::vector<double> sentence_llrs(const Document& sentences,
                                  const WordLlrTable& table) {
  std::vector<double> out;
  out.reserve(sentences.size());
  for (const TokenList& sentence : sentences) {
    double sum = 0.0;
    for (const std::string& w : sentence) {
      auto it = table.llr.find(w);
      if (it != table.llr.end()) sum += it->second;
    }
    out.push_back(sum);
  }
  return out;
}

double mixture_loglik(const std::vector<double>& llrs, double alpha) {
  double ll = 0.0;
  for (double L : llrs) {
    // log(alpha e^L + 1 - alpha), factoring out the dominant term.
    if (L > 0.0) {
      ll += L + std::log(alpha + (1.0 - alpha) * std::exp(-L));
    } else {
      ll += std::log(alpha * std::exp(L) + (1.0 - alpha));
    }
  }
  return ll;
}

double mixture_score(const std::vector<double>& llrs, double alpha) {
  double s = 0.0;
  for (double L : llrs) {
    if (L > 0.0) {
      double w = std::exp(-L);
      s += (1.0 - w) / (alpha + (1.0 - alpha) * w);
    } else {
      s += std::expm1(L) / (alpha * std::exp(L) + (1.0 - alpha));
    }
  }
  return s;
}

MixtureEstimate estimate_alpha(const std::vector<double>& llrs, double cutoff) {
  for (double L : llrs) {
    if (!std::isfinite(L))
      throw std::invalid_argument("estimate_alpha: non-finite sentence LLR");
  }

  MixtureEstimate est;
  est.n_sentences = static_cast<int>(llrs.size());
  if (llrs.empty()) {
    est.classified_llm = classify(est, cutoff);
    return est;
  }

  constexpr double tol = 1e-6;
  double alpha = 0.0;
  // Concavity makes the score monotone decreasing: boundary checks first,
  // ties resolved toward 0.
  if (mixture_score(llrs, 0.0) <= 0.0) {
    alpha = 0.0;
  } else if (mixture_score(llrs, 1.0) >= 0.0) {
    alpha = 1.0;
  } else {
    // Golden-section bracket of the maximum.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = 1.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = mixture_loglik(llrs, x1);
    double f2 = mixture_loglik(llrs, x2);
    while (b - a > 64.0 * tol) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = mixture_loglik(llrs, x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = mixture_loglik(llrs, x1);
      }
    }
    // Refine on the derivative sign.
    double lo = a, hi = b;
    if (mixture_score(llrs, lo) <= 0.0) lo = 0.0;
    if (mixture_score(llrs, hi) >= 0.0) hi = 1.0;
    while (hi - lo > tol) {
      double mid = 0.5 * (lo + hi);
      if (mixture_score(llrs, mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    alpha = 0.5 * (lo + hi);
  }

  est.alpha_hat = alpha;
  est.log_likelihood = mixture_loglik(llrs, alpha);
  est.classified_llm = classify(est, cutoff);
  return est;
}

bool classify(const MixtureEstimate& estimate, double cutoff) {
  if (cutoff < 0.0 || cutoff > 1.0)
    throw std::invalid_argument("classify: cutoff outside [0,1]");
  return estimate.alpha_hat > cutoff;
}

void UnigramDist::validate() const {
  if (words.size() != probs.size() || words.empty())
    throw std::invalid_argument("UnigramDist: words/probs size mismatch");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("UnigramDist: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("UnigramDist: probabilities must sum to 1");
}

Document synth_paired_corpus(const UnigramDist& human, const UnigramDist& llm,
                             double alpha, int n_sentences,
                             int sentence_length, Rng& rng) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("synth_paired_corpus: alpha outside [0,1]");
  if (n_sentences < 0 || sentence_length < 1)
    throw std::invalid_argument("synth_paired_corpus: bad dimensions");
  human.validate();
  llm.validate();

  auto draw_word = [&rng](const UnigramDist& dist) -> const std::string& {
    double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      cum += dist.probs[i];
      if (u < cum) return dist.words[i];
    }
    return dist.words.back();
  };

  Document doc;
  doc.reserve(n_sentences);
  for (int s = 0; s < n_sentences; ++s) {
    const UnigramDist& src = rng.uniform() < alpha ? llm : human;
    TokenList sentence;
    sentence.reserve(sentence_length);
    for (int w = 0; w < sentence_length; ++w) sentence.push_back(draw_word(src));
    doc.push_back(std::move(sentence));
  }
  return doc;
}

}  // namespace didsim
