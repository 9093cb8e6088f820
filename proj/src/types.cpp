#include "perpcor/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "perpcor/error.hpp"

namespace perpcor {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw ValidationError(std::string("empty ") + what);
    if (!seen.insert(id).second)
      throw ValidationError(std::string("duplicate ") + what + ": " + id);
  }
}

}  // namespace

std::vector<double> LossMatrix::column(std::size_t domain) const {
  std::vector<double> out(n_models());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, domain);
  return out;
}

std::vector<double> LossMatrix::row(std::size_t model) const {
  return {values.begin() + model * n_domains(),
          values.begin() + (model + 1) * n_domains()};
}

LossMatrix LossMatrix::create(std::vector<std::string> model_ids,
                              std::vector<std::string> domain_ids,
                              std::vector<double> values, bool relaxed) {
  if (model_ids.size() < 2)
    throw ValidationError("loss matrix needs at least 2 models");
  if (domain_ids.empty())
    throw ValidationError("loss matrix needs at least 1 domain");
  if (values.size() != model_ids.size() * domain_ids.size())
    throw ValidationError("loss matrix shape mismatch: expected " +
                          std::to_string(model_ids.size() * domain_ids.size()) +
                          " values, got " + std::to_string(values.size()));
  require_unique(model_ids, "model_id");
  require_unique(domain_ids, "domain_id");
  for (double v : values) {
    if (!std::isfinite(v))
      throw ValidationError("non-finite loss value");
    if (!relaxed && v <= 0.0)
      throw ValidationError("non-positive loss value: " + std::to_string(v));
  }
  LossMatrix X;
  X.model_ids = std::move(model_ids);
  X.domain_ids = std::move(domain_ids);
  X.values = std::move(values);
  X.relaxed = relaxed;
  return X;
}

BenchmarkScores normalize_benchmark(std::vector<std::string> model_ids,
                                    const std::vector<double>& raw,
                                    BenchmarkKind kind) {
  if (model_ids.size() != raw.size())
    throw ValidationError("benchmark ids/scores length mismatch");
  if (model_ids.size() < 2)
    throw ValidationError("benchmark needs at least 2 models");
  require_unique(model_ids, "model_id");
  BenchmarkScores out;
  out.model_ids = std::move(model_ids);
  out.errors.reserve(raw.size());
  for (double v : raw) {
    if (!std::isfinite(v)) throw ValidationError("non-finite benchmark score");
    out.errors.push_back(kind == BenchmarkKind::accuracy ? 1.0 - v : v);
  }
  out.orientation_applied = kind == BenchmarkKind::accuracy
                                ? Orientation::one_minus
                                : Orientation::as_is;
  return out;
}

BenchmarkScores align_to(const BenchmarkScores& scores, const LossMatrix& X) {
  if (scores.model_ids.size() != X.n_models())
    throw ValidationError("benchmark covers " +
                          std::to_string(scores.model_ids.size()) +
                          " models, loss matrix has " +
                          std::to_string(X.n_models()));
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < scores.model_ids.size(); ++i)
    pos.emplace(scores.model_ids[i], i);
  BenchmarkScores out;
  out.orientation_applied = scores.orientation_applied;
  out.model_ids = X.model_ids;
  out.errors.reserve(X.n_models());
  for (const auto& id : X.model_ids) {
    auto it = pos.find(id);
    if (it == pos.end())
      throw ValidationError("model missing from benchmark: " + id);
    out.errors.push_back(scores.errors[it->second]);
  }
  return out;
}

void require_aligned(const LossMatrix& X, const BenchmarkScores& scores) {
  if (scores.model_ids != X.model_ids)
    throw ValidationError("benchmark model order does not match loss matrix");
}

void ChunkLossRecord::validate() const {
  if (domain_id.empty()) throw ValidationError("chunk record: empty domain");
  if (page_id.empty()) throw ValidationError("chunk record: empty page_id");
  if (chunk_index < 0)
    throw ValidationError("chunk record: negative chunk_index in page " +
                          page_id);
  if (token_count < 1)
    throw ValidationError("chunk record: token_count < 1 in page " + page_id);
  if (byte_count < 1)
    throw ValidationError("chunk record: byte_count < 1 in page " + page_id);
  if (!std::isfinite(mean_token_ce) || mean_token_ce < 0.0)
    throw ValidationError("chunk record: bad mean_token_ce in page " +
                          page_id);
}

DomainInventory DomainInventory::create(std::vector<std::string> domain_ids,
                                        std::vector<std::int64_t> tokens) {
  if (domain_ids.size() != tokens.size())
    throw ValidationError("inventory ids/tokens length mismatch");
  if (domain_ids.empty()) throw ValidationError("empty inventory");
  require_unique(domain_ids, "domain_id");
  for (std::int64_t t : tokens)
    if (t < 1) throw ValidationError("inventory token count < 1");
  DomainInventory inv;
  inv.domain_ids = std::move(domain_ids);
  inv.tokens = std::move(tokens);
  return inv;
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::as_is: return "as-is";
    case Orientation::negated: return "negated";
    case Orientation::one_minus: return "one-minus";
  }
  return "?";
}

const char* to_string(BenchmarkKind k) {
  switch (k) {
    case BenchmarkKind::error: return "error";
    case BenchmarkKind::accuracy: return "accuracy";
    case BenchmarkKind::log_perplexity: return "log_perplexity";
  }
  return "?";
}

BenchmarkKind benchmark_kind_from_string(const std::string& s) {
  if (s == "error") return BenchmarkKind::error;
  if (s == "accuracy") return BenchmarkKind::accuracy;
  if (s == "log_perplexity") return BenchmarkKind::log_perplexity;
  throw ValidationError("unknown benchmark kind: " + s);
}

}  // namespace perpcor
