#include "perpcor/bpb.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "perpcor/error.hpp"

namespace perpcor {

double compute_bpb(std::int64_t token_count, std::int64_t byte_count,
                   double mean_token_ce) {
  if (token_count < 1) throw ValidationError("compute_bpb: token_count < 1");
  if (byte_count < 1) throw ValidationError("compute_bpb: byte_count < 1");
  if (!std::isfinite(mean_token_ce) || mean_token_ce < 0.0)
    throw ValidationError("compute_bpb: bad mean_token_ce");
  return static_cast<double>(token_count) * mean_token_ce /
         (static_cast<double>(byte_count) * std::numbers::ln2);
}

std::vector<DomainBpb> aggregate_domain_bpb(
    const std::vector<ChunkLossRecord>& records, std::int64_t max_pages) {
  if (max_pages < 1) throw ValidationError("max_pages < 1");
  if (records.empty()) throw ValidationError("no chunk records");

  // domain -> page -> (sum of chunk BPBs, count). Ordered maps give the
  // lexicographic page cutoff and stable domain output for free.
  std::map<std::string, std::map<std::string, std::pair<double, std::int64_t>>>
      acc;
  for (const auto& rec : records) {
    rec.validate();
    auto& cell = acc[rec.domain_id][rec.page_id];
    cell.first += compute_bpb(rec.token_count, rec.byte_count,
                              rec.mean_token_ce);
    cell.second += 1;
  }

  std::vector<DomainBpb> out;
  out.reserve(acc.size());
  for (const auto& [domain, pages] : acc) {
    double sum = 0.0;
    std::int64_t used = 0;
    for (const auto& [page, cell] : pages) {
      if (used == max_pages) break;
      sum += cell.first / static_cast<double>(cell.second);
      ++used;
    }
    out.push_back({domain, sum / static_cast<double>(used), used});
  }
  return out;
}

}  // namespace perpcor
