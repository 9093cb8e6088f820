#include "perpcor/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "perpcor/error.hpp"

namespace perpcor {

namespace {

// Caps reordered to the weights' domain order; validates values and the
// feasibility sum.
std::vector<double> joined_caps(const WeightVector& weights,
                                const CapVector& caps) {
  if (weights.domain_ids.size() != caps.domain_ids.size())
    throw ValidationError("weights and caps cover different domain counts");
  std::unordered_map<std::string, double> by_id;
  for (std::size_t i = 0; i < caps.domain_ids.size(); ++i) {
    const double t = caps.tau[i];
    if (!std::isfinite(t) || t <= 0.0)
      throw ValidationError("cap must be a positive real: " +
                            caps.domain_ids[i]);
    if (!by_id.emplace(caps.domain_ids[i], t).second)
      throw ValidationError("duplicate cap domain: " + caps.domain_ids[i]);
  }
  std::vector<double> tau;
  tau.reserve(weights.domain_ids.size());
  for (const auto& id : weights.domain_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw ValidationError("domain missing from caps: " + id);
    tau.push_back(it->second);
  }
  if (std::accumulate(tau.begin(), tau.end(), 0.0) < 1.0)
    throw ValidationError("caps sum to less than 1; no feasible mixture");
  return tau;
}

// Descending weight, ties broken by ascending domain_id.
std::vector<std::size_t> descending_order(const WeightVector& w) {
  std::vector<std::size_t> order(w.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (w.values[a] != w.values[b]) return w.values[a] > w.values[b];
    return w.domain_ids[a] < w.domain_ids[b];
  });
  return order;
}

}  // namespace

CapVector compute_tau(const DomainInventory& inventory,
                      std::int64_t total_budget) {
  if (total_budget < 1) throw ValidationError("total_budget < 1");
  CapVector caps;
  caps.domain_ids = inventory.domain_ids;
  caps.tau.reserve(inventory.tokens.size());
  double total = 0.0;
  for (std::int64_t a : inventory.tokens) {
    const double t = static_cast<double>(a) / static_cast<double>(total_budget);
    caps.tau.push_back(t);
    total += t;
  }
  caps.infeasible = total < 1.0;
  return caps;
}

WeightVector linear_project(const WeightVector& weights,
                            const CapVector& caps) {
  const std::vector<double> tau = joined_caps(weights, caps);

  WeightVector out;
  out.domain_ids = weights.domain_ids;
  out.tag = WeightTag::theta_proj;

  if (std::accumulate(tau.begin(), tau.end(), 0.0) == 1.0) {
    out.values = tau;
    return out;
  }

  out.values.assign(weights.values.size(), 0.0);
  double remaining = 1.0;
  for (std::size_t idx : descending_order(weights)) {
    const double take = std::min(tau[idx], remaining);
    out.values[idx] = take;
    remaining -= take;
    if (remaining <= 0.0) break;
  }
  return out;
}

WeightVector quadratic_project(const WeightVector& weights,
                               const CapVector& caps, double tol) {
  const std::vector<double> tau = joined_caps(weights, caps);
  const std::vector<double>& w = weights.values;

  WeightVector out;
  out.domain_ids = weights.domain_ids;
  out.tag = WeightTag::theta_proj;

  // Caps summing to exactly 1 leave a single feasible point.
  if (std::accumulate(tau.begin(), tau.end(), 0.0) == 1.0) {
    out.values = tau;
    return out;
  }

  // A point already in the constraint set projects to itself; returning it
  // untouched also makes the projection exactly idempotent.
  const bool in_box = std::equal(
      w.begin(), w.end(), tau.begin(),
      [](double wi, double ti) { return wi >= 0.0 && wi <= ti; });
  if (in_box &&
      std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= tol) {
    out.values = w;
    return out;
  }

  const auto clipped = [&](double lambda) {
    std::vector<double> theta(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      theta[i] = std::clamp(w[i] - lambda, 0.0, tau[i]);
    return theta;
  };
  const auto mass = [&](const std::vector<double>& theta) {
    return std::accumulate(theta.begin(), theta.end(), 0.0);
  };

  // The clipped sum is nonincreasing in lambda; the bracket pins
  // mass(lo) = sum(tau) >= 1 and mass(hi) = 0.
  double lo = *std::min_element(w.begin(), w.end()) -
              *std::max_element(tau.begin(), tau.end());
  double hi = *std::max_element(w.begin(), w.end());

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    std::vector<double> theta = clipped(mid);
    const double m = mass(theta);
    if (std::abs(m - 1.0) <= tol) {
      out.values = std::move(theta);
      return out;
    }
    if (m > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  throw NumericalError("quadratic_project: bisection did not converge");
}

}  // namespace perpcor
