#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perpcor/types.hpp"

namespace perpcor {

// bits-per-byte for one chunk: token_count * mean_ce / (byte_count * ln 2).
double compute_bpb(std::int64_t token_count, std::int64_t byte_count,
                   double mean_token_ce);

struct DomainBpb {
  std::string domain_id;
  double bpb = 0.0;
  std::int64_t pages_used = 0;
};

// Per-page mean of chunk BPBs, then unweighted mean over the first
// `max_pages` pages in lexicographic page_id order. Records may arrive in
// any order. Throws ValidationError on invalid records or zero pages.
std::vector<DomainBpb> aggregate_domain_bpb(
    const std::vector<ChunkLossRecord>& records, std::int64_t max_pages = 25);

}  // namespace perpcor
