#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perpcor/estimators.hpp"
#include "perpcor/types.hpp"

namespace perpcor {

struct CapVector {
  std::vector<std::string> domain_ids;
  std::vector<double> tau;        // > 0; may exceed 1
  bool infeasible = false;        // sum(tau) < 1: no simplex point fits
};

// tau_i = available_tokens_i / total_budget. Values above 1 are kept (the
// simplex constraint dominates). Marks the result infeasible when the
// inventory cannot fill the budget; selection may still run, projection
// refuses.
CapVector compute_tau(const DomainInventory& inventory,
                      std::int64_t total_budget);

// Greedy order-statistics maximizer of <theta, weights>: walk domains by
// descending weight (ties by ascending domain_id), assign tau_i until the
// cumulative cap reaches 1, give the boundary domain the remainder, zero
// the rest. Depends only on the rank order of `weights`. Caps are joined
// to weights by domain_id. Throws ValidationError if sum(tau) < 1 or the
// id sets differ.
WeightVector linear_project(const WeightVector& weights, const CapVector& caps);

// Euclidean projection onto {0 <= theta <= tau, sum(theta) = 1}:
// theta_i = clamp(w_i - lambda, 0, tau_i), lambda found by bisection on the
// monotone nonincreasing sum over the bracket [min(w) - max(tau), max(w)]
// until |sum - 1| <= tol. sum(tau) == 1 short-circuits to tau. Throws
// ValidationError if sum(tau) < 1, NumericalError if 200 iterations do not
// converge.
WeightVector quadratic_project(const WeightVector& weights,
                               const CapVector& caps, double tol = 1e-10);

}  // namespace perpcor
