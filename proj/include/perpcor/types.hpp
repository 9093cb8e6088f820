#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace perpcor {

// N models x D domains of bits-per-byte values, row-major.
// Values must be finite and strictly positive unless `relaxed` is set
// (synthetic matrices from the simulator carry standard-normal draws,
// which may be negative).
struct LossMatrix {
  std::vector<std::string> model_ids;   // length N
  std::vector<std::string> domain_ids;  // length D
  std::vector<double> values;           // N*D, row-major
  bool relaxed = false;

  std::size_t n_models() const { return model_ids.size(); }
  std::size_t n_domains() const { return domain_ids.size(); }
  double at(std::size_t model, std::size_t domain) const {
    return values[model * domain_ids.size() + domain];
  }
  double& at(std::size_t model, std::size_t domain) {
    return values[model * domain_ids.size() + domain];
  }
  std::vector<double> column(std::size_t domain) const;
  std::vector<double> row(std::size_t model) const;

  // Validates invariants: N >= 2, D >= 1, finite values (> 0 unless
  // relaxed), no duplicate ids. Throws ValidationError.
  static LossMatrix create(std::vector<std::string> model_ids,
                           std::vector<std::string> domain_ids,
                           std::vector<double> values, bool relaxed = false);
};

enum class Orientation { as_is, negated, one_minus };
enum class BenchmarkKind { error, accuracy, log_perplexity };

// Per-model benchmark scores in canonical "error" orientation: lower is
// always better.
struct BenchmarkScores {
  std::vector<std::string> model_ids;
  std::vector<double> errors;
  Orientation orientation_applied = Orientation::as_is;
};

// kind=accuracy is stored as 1 - accuracy; error and log_perplexity are
// stored as-is. Throws ValidationError on non-finite input.
BenchmarkScores normalize_benchmark(std::vector<std::string> model_ids,
                                    const std::vector<double>& raw,
                                    BenchmarkKind kind);

// Reorders `scores` rows to match the model order of `X`. Throws
// ValidationError if the id sets differ.
BenchmarkScores align_to(const BenchmarkScores& scores, const LossMatrix& X);

// Throws ValidationError unless scores.model_ids == X.model_ids elementwise.
void require_aligned(const LossMatrix& X, const BenchmarkScores& scores);

// One 512-token-style chunk of one page, with its mean token cross-entropy
// in nats.
struct ChunkLossRecord {
  std::string domain_id;
  std::string page_id;
  std::int64_t chunk_index = 0;
  std::int64_t token_count = 0;  // L_T
  std::int64_t byte_count = 0;   // L_B, UTF-8 bytes
  double mean_token_ce = 0.0;    // l, nats per token

  // Throws ValidationError naming the offending field.
  void validate() const;
};

// Available token counts per domain.
struct DomainInventory {
  std::vector<std::string> domain_ids;
  std::vector<std::int64_t> tokens;  // a_i >= 1

  static DomainInventory create(std::vector<std::string> domain_ids,
                                std::vector<std::int64_t> tokens);
};

const char* to_string(Orientation o);
const char* to_string(BenchmarkKind k);
BenchmarkKind benchmark_kind_from_string(const std::string& s);

}  // namespace perpcor
