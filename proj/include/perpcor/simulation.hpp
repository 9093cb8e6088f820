#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perpcor/types.hpp"

namespace perpcor {

enum class LinkFn { identity, sigmoid, cube_plus_linear };

struct SimConfig {
  std::int64_t n_models = 100;
  std::int64_t n_domains = 1;
  std::vector<double> theta_star;  // ||.||_2 = 1 within 1e-9; empty = e_1
  double sigma = 0.0;
  // Distinct per-model noise scales for the two members of each Monte Carlo
  // pair; negative means "use sigma for both".
  double sigma1 = -1.0;
  double sigma2 = -1.0;
  LinkFn link = LinkFn::identity;
  std::uint64_t seed = 0;

  std::vector<double> resolved_theta() const;  // validates the norm
  double noise1() const { return sigma1 >= 0.0 ? sigma1 : sigma; }
  double noise2() const { return sigma2 >= 0.0 ? sigma2 : sigma; }
};

struct SimData {
  LossMatrix X;            // relaxed; entries ~ N(0, 1)
  BenchmarkScores scores;  // y_i = f(<theta*, x_i> + eps_i)
};

// Draws X row-major first, then the noise vector, from one mt19937_64
// stream, so configs differing only in the link share X and eps exactly.
SimData generate(const SimConfig& cfg);

double apply_link(LinkFn f, double z);

// Standard-normal CDF via erfc; absolute error below 1e-12.
double normal_cdf(double x);

struct TheoremCell {
  std::size_t domain = 0;
  double empirical = 0.0;
  double analytic = 0.0;
  double std_err = 0.0;
  double deviation_se = 0.0;  // |empirical - analytic| / std_err
  bool pass = false;          // deviation <= 3 SE
};

struct TheoremReport {
  std::vector<TheoremCell> cells;  // one per domain
  std::int64_t trials = 0;
  bool all_pass = false;
};

// Monte Carlo check of the pairwise identity: over independent model pairs
// with noise scales (noise1, noise2), the mean of
//   sign(y_a - y_b) * (Phi(x_{a,j}) - Phi(x_{b,j}))
// with Phi the standard-normal CDF matches
//   (2/pi) * asin(theta*_j / sqrt(4 + 2*s1^2 + 2*s2^2))
// per domain; equal noise reduces the denominator to 2*sqrt(1 + sigma^2).
TheoremReport mc_check_theorem1(const SimConfig& cfg, std::int64_t trials,
                                int threads = 1);

struct CorollaryReport {
  double mean_low = 0.0;    // E[<theta, Phi(x)> | <theta, x> smaller]
  double mean_high = 0.0;
  double diff = 0.0;        // mean_high - mean_low
  double std_err = 0.0;     // of the per-pair difference
  std::int64_t pairs = 0;
  bool vacuous = false;     // zero theta: conditioning event is empty
  bool pass = false;        // diff > 3 * std_err
};

// Conditional-mean ordering: among pairs ordered so <theta, x_a> is the
// smaller score, the mean of <theta, Phi(x)> is strictly larger on the
// other side, at 3-SE confidence. theta comes from cfg.theta_star and may
// be the zero vector, which is reported vacuous.
CorollaryReport mc_check_corollary1(const SimConfig& cfg, std::int64_t trials,
                                    int threads = 1);

struct RecoveryReport {
  double rho = 0.0;        // Spearman(estimate, theta*), mean over repeats
  double ell2_error = 0.0; // ||sin-inverted estimate - theta*/(2 sqrt(1+s^2))||_2
  bool rho_defined = true; // false when theta* is all-tied
  std::int64_t repeats = 1;
};

// End-to-end recovery on generated data: estimator (gamma arcsine-inverted,
// or Spearman) against the generating theta*, averaged over `repeats`
// derived seeds.
RecoveryReport recovery_report(const SimConfig& cfg, bool use_spearman = false,
                               std::int64_t repeats = 1);

const char* to_string(LinkFn f);
LinkFn link_from_string(const std::string& s);

}  // namespace perpcor
