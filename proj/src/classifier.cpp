#include "perpcor/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "perpcor/error.hpp"

namespace perpcor {

namespace {

constexpr char kMagic[4] = {'P', 'C', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

bool is_unicode_space(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

// Splits UTF-8 text on Unicode whitespace, lowercasing ASCII letters.
// Malformed bytes are kept verbatim inside tokens.
std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char b = static_cast<unsigned char>(text[i]);
    char32_t cp = b;
    std::size_t len = 1;
    if (b >= 0xF0 && i + 3 < text.size()) {
      cp = (b & 0x07u) << 18 | (text[i + 1] & 0x3Fu) << 12 |
           (text[i + 2] & 0x3Fu) << 6 | (text[i + 3] & 0x3Fu);
      len = 4;
    } else if (b >= 0xE0 && i + 2 < text.size()) {
      cp = (b & 0x0Fu) << 12 | (text[i + 1] & 0x3Fu) << 6 |
           (text[i + 2] & 0x3Fu);
      len = 3;
    } else if (b >= 0xC0 && i + 1 < text.size()) {
      cp = (b & 0x1Fu) << 6 | (text[i + 1] & 0x3Fu);
      len = 2;
    }
    if (is_unicode_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      for (std::size_t k = 0; k < len; ++k) {
        char c = text[i + k];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        current.push_back(c);
      }
    }
    i += len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ValidationError("model file truncated");
  return v;
}

// (index, count/total) pairs of a page, the mean-of-one-hots feature vector.
std::vector<std::pair<std::uint32_t, float>> feature_vector(
    const std::string& text, std::uint32_t feature_dim,
    std::uint64_t hash_seed) {
  std::vector<std::uint32_t> idx = hash_features(text, feature_dim, hash_seed);
  if (idx.empty()) return {};
  std::sort(idx.begin(), idx.end());
  std::vector<std::pair<std::uint32_t, float>> out;
  const float total = static_cast<float>(idx.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && idx[j + 1] == idx[i]) ++j;
    out.emplace_back(idx[i], static_cast<float>(j - i + 1) / total);
    i = j + 1;
  }
  return out;
}

double dot_score(const ClassifierModel& model,
                 const std::vector<std::pair<std::uint32_t, float>>& features) {
  double z = model.bias;
  for (const auto& [idx, val] : features)
    z += static_cast<double>(model.weights[idx]) * val;
  return z;
}

}  // namespace

std::vector<std::uint32_t> hash_features(const std::string& text,
                                         std::uint32_t feature_dim,
                                         std::uint64_t hash_seed) {
  if (feature_dim == 0 || (feature_dim & (feature_dim - 1)) != 0)
    throw ValidationError("feature_dim must be a power of two");
  const std::vector<std::string> tokens = tokenize(text);
  std::vector<std::uint32_t> out;
  out.reserve(tokens.size() * 2);
  const std::uint32_t mask = feature_dim - 1;
  for (const auto& tok : tokens)
    out.push_back(static_cast<std::uint32_t>(fnv1a(tok, hash_seed)) & mask);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const std::string bigram = tokens[i] + '\x1f' + tokens[i + 1];
    out.push_back(static_cast<std::uint32_t>(fnv1a(bigram, hash_seed)) & mask);
  }
  return out;
}

ClassifierModel train_classifier(const std::vector<Page>& positives,
                                 const std::vector<Page>& negatives,
                                 const TrainOptions& opts) {
  if (positives.empty() || negatives.empty())
    throw ValidationError("both classes must be non-empty");
  if (opts.epochs < 1) throw ValidationError("epochs < 1");
  if (opts.learning_rate <= 0.0) throw ValidationError("learning rate <= 0");

  struct Example {
    std::vector<std::pair<std::uint32_t, float>> features;
    float label;
    float class_weight;
  };
  const std::size_t n_pos = positives.size();
  const std::size_t n_neg = negatives.size();
  const double total = static_cast<double>(n_pos + n_neg);
  const float w_pos = static_cast<float>(total / (2.0 * n_pos));
  const float w_neg = static_cast<float>(total / (2.0 * n_neg));

  std::vector<Example> examples;
  examples.reserve(n_pos + n_neg);
  for (const Page& p : positives)
    examples.push_back(
        {feature_vector(p.text, opts.feature_dim, opts.hash_seed), 1.0f,
         w_pos});
  for (const Page& p : negatives)
    examples.push_back(
        {feature_vector(p.text, opts.feature_dim, opts.hash_seed), 0.0f,
         w_neg});

  ClassifierModel model;
  model.feature_dim = opts.feature_dim;
  model.hash_seed = opts.hash_seed;
  model.seed = opts.seed;
  model.epochs = opts.epochs;
  model.learning_rate = opts.learning_rate;
  model.weights.assign(opts.feature_dim, 0.0f);

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(opts.seed);

  const double total_updates =
      static_cast<double>(opts.epochs) * static_cast<double>(examples.size());
  double step = 0.0;
  for (std::int64_t epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0, weight_sum = 0.0;
    for (std::size_t pos : order) {
      const Example& ex = examples[pos];
      const double lr = opts.learning_rate * (1.0 - step / total_updates);
      step += 1.0;
      const double z = dot_score(model, ex.features);
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
      loss_sum -= ex.class_weight *
                  (ex.label > 0.5f ? std::log(pc) : std::log(1.0 - pc));
      weight_sum += ex.class_weight;
      const float g =
          static_cast<float>(lr * (p - ex.label) * ex.class_weight);
      for (const auto& [idx, val] : ex.features)
        model.weights[idx] -= g * val;
      model.bias -= g;
    }
    model.epoch_losses.push_back(loss_sum / weight_sum);
  }
  return model;
}

double score_page(const ClassifierModel& model, const std::string& text) {
  const auto features =
      feature_vector(text, model.feature_dim, model.hash_seed);
  if (features.empty()) return 0.5;
  return 1.0 / (1.0 + std::exp(-dot_score(model, features)));
}

FilterResult filter_pages(const ClassifierModel& model,
                          const std::vector<Page>& pages,
                          std::int64_t token_budget) {
  if (token_budget < 1) throw ValidationError("token_budget < 1");
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(pages.size());
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (pages[i].token_count < 1)
      throw ValidationError("page with token_count < 1: " + pages[i].page_id);
    scored.emplace_back(score_page(model, pages[i].text), i);
  }
  std::sort(scored.begin(), scored.end(),
            [&](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return pages[a.second].page_id < pages[b.second].page_id;
            });

  FilterResult out;
  for (const auto& [score, idx] : scored) {
    out.kept_page_ids.push_back(pages[idx].page_id);
    out.kept_scores.push_back(score);
    out.tokens_kept += pages[idx].token_count;
    if (out.tokens_kept >= token_budget) break;
  }
  return out;
}

void ClassifierModel::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  write_raw(out, kVersion);
  write_raw(out, feature_dim);
  write_raw(out, hash_seed);
  write_raw(out, seed);
  write_raw(out, epochs);
  write_raw(out, learning_rate);
  write_raw(out, bias);
  out.write(reinterpret_cast<const char*>(weights.data()),
            static_cast<std::streamsize>(weights.size() * sizeof(float)));
  if (!out) throw ValidationError("failed to write model");
}

ClassifierModel ClassifierModel::load(std::istream& in) {
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ValidationError("not a classifier model file (bad magic)");
  const auto version = read_raw<std::uint32_t>(in);
  if (version != kVersion)
    throw ValidationError("unsupported model version " +
                          std::to_string(version));
  ClassifierModel model;
  model.weights.clear();
  model.feature_dim = read_raw<std::uint32_t>(in);
  if (model.feature_dim == 0 ||
      (model.feature_dim & (model.feature_dim - 1)) != 0)
    throw ValidationError("model feature_dim is not a power of two");
  model.hash_seed = read_raw<std::uint64_t>(in);
  model.seed = read_raw<std::uint64_t>(in);
  model.epochs = read_raw<std::int64_t>(in);
  model.learning_rate = read_raw<double>(in);
  model.bias = read_raw<float>(in);
  model.weights.resize(model.feature_dim);
  in.read(reinterpret_cast<char*>(model.weights.data()),
          static_cast<std::streamsize>(model.weights.size() * sizeof(float)));
  if (!in) throw ValidationError("model file truncated");
  for (float w : model.weights)
    if (!std::isfinite(w)) throw ValidationError("non-finite model weight");
  return model;
}

void ClassifierModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  save(out);
}

ClassifierModel ClassifierModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open: " + path);
  return load(in);
}

}  // namespace perpcor
