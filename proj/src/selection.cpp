#include "perpcor/selection.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "perpcor/error.hpp"

namespace perpcor {

SelectionPlan select_domains(const WeightVector& scores,
                             const DomainInventory& inventory,
                             std::int64_t budget) {
  if (budget < 1) throw ValidationError("budget < 1");
  if (scores.domain_ids.size() != inventory.domain_ids.size())
    throw ValidationError("scores and inventory cover different domain counts");
  std::unordered_map<std::string, std::int64_t> avail;
  for (std::size_t i = 0; i < inventory.domain_ids.size(); ++i)
    avail.emplace(inventory.domain_ids[i], inventory.tokens[i]);

  std::vector<std::size_t> order(scores.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores.values[a] != scores.values[b])
      return scores.values[a] > scores.values[b];
    return scores.domain_ids[a] < scores.domain_ids[b];
  });

  SelectionPlan plan;
  plan.budget = budget;
  plan.rows.reserve(order.size());
  // The counter advances by the full availability a_i rather than the
  // clipped take, so the final selected domain can push the counter past
  // the budget while its own take is clipped to the remainder.
  std::int64_t counter = 0;
  bool done = false;
  std::int64_t rank = 1;
  for (std::size_t idx : order) {
    const auto it = avail.find(scores.domain_ids[idx]);
    if (it == avail.end())
      throw ValidationError("domain missing from inventory: " +
                            scores.domain_ids[idx]);
    SelectionRow row;
    row.domain_id = scores.domain_ids[idx];
    row.gamma = scores.values[idx];
    row.rank = rank++;
    row.tokens_available = it->second;
    if (!done) {
      row.tokens_selected = std::min(row.tokens_available, budget - counter);
      counter += row.tokens_available;
      plan.total_selected += row.tokens_selected;
      if (counter >= budget) done = true;
    }
    plan.rows.push_back(std::move(row));
  }
  return plan;
}

}  // namespace perpcor
