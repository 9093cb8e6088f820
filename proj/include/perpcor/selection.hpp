#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perpcor/estimators.hpp"
#include "perpcor/types.hpp"

namespace perpcor {

struct SelectionRow {
  std::string domain_id;
  double gamma = 0.0;
  std::int64_t rank = 0;  // 1 = most correlated
  std::int64_t tokens_available = 0;
  std::int64_t tokens_selected = 0;
};

struct SelectionPlan {
  std::vector<SelectionRow> rows;  // rank order
  std::int64_t budget = 0;
  std::int64_t total_selected = 0;  // = min(budget, sum available)
};

// Greedy token-budget fill: visit domains by descending score (ties by
// ascending domain_id), take t_i = min(a_i, b - counter), advance the
// counter by a_i (not t_i), stop once counter >= b. Domains past the stop
// point get zero. Scores and inventory are joined by domain_id; a budget
// above the total inventory selects everything. Requires budget >= 1.
SelectionPlan select_domains(const WeightVector& scores,
                             const DomainInventory& inventory,
                             std::int64_t budget);

}  // namespace perpcor
