// text_mixture.hpp — unigram mixture detector. Word-level log-likelihood
// ratios are fit from paired corpora, summed within sentences, and each
// document's mixture share alpha is estimated by maximizing
//   l(alpha) = sum_s log(alpha * exp(L_s) + 1 - alpha),
// a concave function on [0,1]. Documents with alpha above the cutoff are
// classified as LLM-assisted.
#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "didsim/rng.hpp"

namespace didsim {

using TokenList = std::vector<std::string>;
// One token list per document (training) or per sentence (scoring).
using Corpus = std::vector<TokenList>;
using Document = std::vector<TokenList>;

// Lowercase, split on non-alphanumeric bytes, drop empties.
TokenList tokenize(std::string_view text);
// Sentences split on [.?!], then tokenized.
Document split_sentences(std::string_view text);

struct WordLlrTable {
  // word -> log(f_llm(word) / f_human(word)); only words seen in both
  // corpora are retained, so every entry is finite.
  std::unordered_map<std::string, double> llr;

  std::size_t vocabulary_size() const { return llr.size(); }
};

WordLlrTable fit_word_llr(const Corpus& human, const Corpus& llm);

// Sum of in-vocabulary word LLRs per sentence; out-of-vocabulary tokens
// contribute 0.
std::vector<double> sentence_llrs(const Document& sentences,
                                  const WordLlrTable& table);

struct MixtureEstimate {
  double alpha_hat = 0.0;
  double log_likelihood = 0.0;
  int n_sentences = 0;
  bool classified_llm = false;
};

// Maximizes l(alpha) over [0,1] by golden-section search refined with
// bisection on the derivative; tolerance 1e-6 in alpha. Flat likelihoods
// (all L_s = 0) and empty inputs resolve to alpha = 0.
MixtureEstimate estimate_alpha(const std::vector<double>& llrs,
                               double cutoff = 0.1);

// Strict threshold: true iff alpha_hat > cutoff.
bool classify(const MixtureEstimate& estimate, double cutoff = 0.1);

// Stable evaluation of l(alpha) and l'(alpha) for a given LLR vector;
// exposed for the grid-search oracle in tests.
double mixture_loglik(const std::vector<double>& llrs, double alpha);
double mixture_score(const std::vector<double>& llrs, double alpha);

struct UnigramDist {
  std::vector<std::string> words;
  std::vector<double> probs;  // sums to 1

  void validate() const;
};

// Synthetic document: each sentence comes from `llm` with probability alpha,
// else from `human`; words drawn i.i.d. within a sentence.
Document synth_paired_corpus(const UnigramDist& human, const UnigramDist& llm,
                             double alpha, int n_sentences,
                             int sentence_length, Rng& rng);

}  // namespace didsim
