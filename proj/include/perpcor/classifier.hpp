#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace perpcor {

struct Page {
  std::string domain_id;
  std::string page_id;
  std::string text;
  std::int64_t token_count = 0;
};

// Hashed-bag-of-ngrams logistic regression over unigrams and bigrams of
// lowercased whitespace-split words, mean-normalized per page.
struct ClassifierModel {
  std::uint32_t feature_dim = 1u << 21;  // power of two
  std::uint64_t hash_seed = 0;
  std::vector<float> weights;  // feature_dim
  float bias = 0.0f;
  // training meta
  std::uint64_t seed = 42;
  std::int64_t epochs = 5;
  double learning_rate = 0.1;
  std::vector<double> epoch_losses;  // mean weighted loss per epoch, not serialized

  void save(std::ostream& out) const;
  static ClassifierModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static ClassifierModel load_file(const std::string& path);
};

struct TrainOptions {
  std::uint32_t feature_dim = 1u << 21;
  std::uint64_t hash_seed = 0;
  std::uint64_t seed = 42;
  std::int64_t epochs = 5;
  double learning_rate = 0.1;  // decays linearly to 0 over all updates
};

// Logistic SGD, single-threaded, inverse-frequency class weights, examples
// shuffled each epoch with a seed-derived generator. Both classes must be
// non-empty; deterministic given (options, input order).
ClassifierModel train_classifier(const std::vector<Page>& positives,
                                 const std::vector<Page>& negatives,
                                 const TrainOptions& opts = {});

// P(positive) in (0, 1). Text with no tokens scores 0.5.
double score_page(const ClassifierModel& model, const std::string& text);

struct FilterResult {
  std::vector<std::string> kept_page_ids;  // descending score order
  std::vector<double> kept_scores;
  std::int64_t tokens_kept = 0;
};

// Scores every page, sorts by descending score (ties by ascending page_id),
// keeps pages until cumulative token_count first reaches `token_budget`;
// the crossing page is included. If the pages run out first, keeps all.
// Requires token_budget >= 1.
FilterResult filter_pages(const ClassifierModel& model,
                          const std::vector<Page>& pages,
                          std::int64_t token_budget);

// Exposed for tests: hashed unigram+bigram feature indices of `text` under
// (feature_dim, hash_seed).
std::vector<std::uint32_t> hash_features(const std::string& text,
                                         std::uint32_t feature_dim,
                                         std::uint64_t hash_seed);

}  // namespace perpcor
