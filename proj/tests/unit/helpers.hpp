#pragma once

// Shared builders and independent reference implementations ("oracles") used
// by both the unit and acceptance suites.  The oracles deliberately use the
// most literal formulation available (all ordered pairs, full vertex
// enumeration, breakpoint scans) so they share no code path with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "perpcor/types.hpp"

namespace testutil {

inline std::vector<std::string> seq_ids(const std::string& prefix,
                                        std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string n = std::to_string(i);
    while (n.size() < 3) n.insert(n.begin(), '0');
    ids.push_back(prefix + n);
  }
  return ids;
}

inline perpcor::LossMatrix make_matrix(std::size_t n_models,
                                       std::size_t n_domains,
                                       std::vector<double> values,
                                       bool relaxed = false) {
  return perpcor::LossMatrix::create(seq_ids("m", n_models),
                                     seq_ids("d", n_domains),
                                     std::move(values), relaxed);
}

inline perpcor::BenchmarkScores make_scores(std::size_t n_models,
                                            std::vector<double> errors) {
  perpcor::BenchmarkScores s;
  s.model_ids = seq_ids("m", n_models);
  s.errors = std::move(errors);
  s.orientation_applied = perpcor::Orientation::as_is;
  return s;
}

inline double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Average ranks with ties, 1-based, by direct counting.
inline std::vector<double> oracle_ranks(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t less = 0, equal = 0;
    for (std::size_t l = 0; l < n; ++l) {
      if (x[l] < x[k]) ++less;
      if (x[l] == x[k]) ++equal;
    }
    r[k] = static_cast<double>(less) + (static_cast<double>(equal) - 1.0) / 2.0 +
           1.0;
  }
  return r;
}

// gamma_raw over all ordered pairs, straight from the definition.
inline double oracle_gamma_raw(const std::vector<double>& x,
                               const std::vector<double>& y) {
  const std::vector<double> r = oracle_ranks(x);
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    for (std::size_t l = 0; l < x.size(); ++l)
      if (k != l) total += sign_of(y[k] - y[l]) * (r[k] - r[l]);
  return total;
}

inline double oracle_gamma_normalized(const std::vector<double>& x,
                                      const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> e = oracle_ranks(x);
  for (double& v : e) v /= static_cast<double>(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      if (k != l) total += sign_of(y[k] - y[l]) * (e[k] - e[l]);
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

// Maximizes <w, theta> over {0 <= theta <= tau, sum theta = 1} by
// enumerating vertices: a saturated subset plus at most one fractional
// coordinate.  Exponential in D, fine for D <= 6.
struct LpSolution {
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<double> theta;
  int optima = 0;  // count of distinct vertex support patterns within 1e-12
};

inline LpSolution oracle_linear(const std::vector<double>& w,
                                const std::vector<double>& tau) {
  const std::size_t d = w.size();
  LpSolution best;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    double sat = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (1u << i)) sat += tau[i];
    const double slack = 1.0 - sat;
    auto consider = [&](const std::vector<double>& theta) {
      double obj = 0.0;
      for (std::size_t i = 0; i < d; ++i) obj += w[i] * theta[i];
      if (obj > best.objective + 1e-12) {
        best.objective = obj;
        best.theta = theta;
        best.optima = 1;
      } else if (std::abs(obj - best.objective) <= 1e-12) {
        ++best.optima;
      }
    };
    if (std::abs(slack) <= 1e-15) {
      std::vector<double> theta(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        if (mask & (1u << i)) theta[i] = tau[i];
      consider(theta);
      continue;
    }
    if (slack < 0.0) continue;
    for (std::size_t frac = 0; frac < d; ++frac) {
      if (mask & (1u << frac)) continue;
      if (slack > tau[frac] + 1e-15) continue;
      std::vector<double> theta(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        if (mask & (1u << i)) theta[i] = tau[i];
      theta[frac] = std::min(slack, tau[frac]);
      consider(theta);
    }
  }
  return best;
}

// Exact Euclidean projection onto the capped simplex via the piecewise
// linear map g(lambda) = sum clamp(w - lambda, 0, tau).  The crossing
// segment is located by scanning breakpoints, then lambda* is solved on it
// in closed form.
inline std::vector<double> oracle_quadratic(const std::vector<double>& w,
                                            const std::vector<double>& tau) {
  const std::size_t d = w.size();
  auto g = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      s += std::clamp(w[i] - lambda, 0.0, tau[i]);
    return s;
  };
  std::vector<double> bp;
  bp.reserve(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    bp.push_back(w[i]);
    bp.push_back(w[i] - tau[i]);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  double lo = bp.front() - 1.0, hi = bp.back() + 1.0;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    if (g(bp[k]) >= 1.0 && g(bp[k + 1]) <= 1.0) {
      lo = bp[k];
      hi = bp[k + 1];
      break;
    }
  }
  if (g(lo) < 1.0) {  // crossing below all breakpoints on the saturated side
    hi = bp.front();
  } else if (g(hi) > 1.0) {
    lo = bp.back();
  }
  // On (lo, hi): active set fixed, g(lambda) = sum_active(w) - |active|*lambda
  //                                           + sum_saturated(tau).
  const double mid = 0.5 * (lo + hi);
  double active_w = 0.0, saturated = 0.0;
  std::size_t active_n = 0;
  for (std::size_t i = 0; i < d; ++i) {
    const double v = w[i] - mid;
    if (v >= tau[i]) {
      saturated += tau[i];
    } else if (v > 0.0) {
      active_w += w[i];
      ++active_n;
    }
  }
  double lambda;
  if (active_n == 0) {
    lambda = lo;  // flat segment; any point works, g(lo) == 1 here
  } else {
    lambda = (active_w + saturated - 1.0) / static_cast<double>(active_n);
  }
  std::vector<double> theta(d);
  for (std::size_t i = 0; i < d; ++i)
    theta[i] = std::clamp(w[i] - lambda, 0.0, tau[i]);
  return theta;
}

// KKT residual for the quadratic projection: feasibility plus stationarity
// of w - theta = lambda on the active set, w - theta <= lambda where clipped
// at 0, w - theta >= lambda where clipped at tau.
inline double kkt_residual(const std::vector<double>& w,
                           const std::vector<double>& tau,
                           const std::vector<double>& theta) {
  const std::size_t d = w.size();
  double sum = 0.0;
  double residual = 0.0;
  double lambda = 0.0;
  std::size_t active = 0;
  for (std::size_t i = 0; i < d; ++i) {
    sum += theta[i];
    residual = std::max(residual, std::max(0.0, -theta[i]));
    residual = std::max(residual, std::max(0.0, theta[i] - tau[i]));
    if (theta[i] > 1e-9 && theta[i] < tau[i] - 1e-9) {
      lambda += w[i] - theta[i];
      ++active;
    }
  }
  residual = std::max(residual, std::abs(sum - 1.0));
  if (active == 0) return residual;
  lambda /= static_cast<double>(active);
  for (std::size_t i = 0; i < d; ++i) {
    if (theta[i] > 1e-9 && theta[i] < tau[i] - 1e-9)
      residual = std::max(residual, std::abs(w[i] - theta[i] - lambda));
    else if (theta[i] <= 1e-9)
      residual = std::max(residual, std::max(0.0, (w[i] - theta[i]) - lambda));
    else
      residual = std::max(residual, std::max(0.0, lambda - (w[i] - theta[i])));
  }
  return residual;
}

// Random caps with sum >= 1 + margin so the feasible set has interior.
inline std::vector<double> random_caps(std::mt19937_64& rng, std::size_t d,
                                       double margin = 0.05) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<double> tau(d);
  double total = 0.0;
  for (double& t : tau) total += (t = unif(rng));
  if (total < 1.0 + margin) {
    // scale up so the box always contains a unit-mass point
    const double factor = (1.0 + margin) / total * 1.02;
    for (double& t : tau) t *= factor;
  }
  return tau;
}

// Random point of the capped simplex: start at the scaled cap vector and
// apply random mass transfers that respect the box.
inline std::vector<double> random_feasible(std::mt19937_64& rng,
                                           const std::vector<double>& tau) {
  const std::size_t d = tau.size();
  double total = 0.0;
  for (double t : tau) total += t;
  std::vector<double> theta(d);
  for (std::size_t i = 0; i < d; ++i) theta[i] = tau[i] / total;
  std::uniform_int_distribution<std::size_t> pick(0, d - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int step = 0; step < 32; ++step) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const double room = std::min(theta[a], tau[b] - theta[b]);
    if (room <= 0.0) continue;
    const double delta = room * unif(rng);
    theta[a] -= delta;
    theta[b] += delta;
  }
  return theta;
}

}  // namespace testutil
