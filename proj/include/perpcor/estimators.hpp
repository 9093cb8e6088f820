#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perpcor/types.hpp"

namespace perpcor {

// Tag records which transform produced a weight vector.
enum class WeightTag { gamma_raw, gamma_normalized, theta_hat, theta_proj };

struct WeightVector {
  std::vector<std::string> domain_ids;
  std::vector<double> values;
  WeightTag tag = WeightTag::gamma_raw;
};

// Average ranks of one column, 1-based; ties get the mean of the rank
// positions they span. ecdf = rank / N, in (0, 1].
struct RankColumn {
  std::vector<double> ranks;
  std::vector<double> ecdf;
};

RankColumn rank_transform(const std::vector<double>& column);

struct GammaEstimate {
  WeightVector raw;         // tag gamma_raw
  WeightVector normalized;  // tag gamma_normalized, values in [-1, 1]
};

// Pairwise rank-correlation over all ordered pairs (k, l), k != l:
//   gamma_j = sum sign(err_k - err_l) * (rank_j(x_k) - rank_j(x_l))
// raw uses 1-based average ranks; normalized replaces ranks with ecdf and
// divides by N*(N-1). Ranks are half-integers, so the raw pair sum is exact
// and the normalized value is the raw one scaled by 1/(N^2*(N-1)).
// sign(0) = 0, so benchmark ties contribute nothing. Scores must be aligned
// to X's model order.
GammaEstimate gamma_estimate(const LossMatrix& X, const BenchmarkScores& scores);

// Per-domain Spearman correlation between the loss column and the errors,
// values in [-1, 1]. Zero-variance columns (or all-tied errors) get rho = 0
// and a set flag in `degenerate` when provided.
WeightVector spearman_estimate(const LossMatrix& X,
                               const BenchmarkScores& scores,
                               std::vector<std::uint8_t>* degenerate = nullptr);

// Arcsine inversion: theta_j = sin(pi/2 * g_j). Input tag must be
// gamma_normalized with values in [-1 - 1e-12, 1 + 1e-12] (clamped before
// the sine). Output tag theta_hat.
WeightVector theta_from_gamma(const WeightVector& gamma);

// Baseline predictor: per-model mean loss across domains; lower score
// predicts lower error.
std::vector<double> mean_loss_predictor(const LossMatrix& X);

const char* to_string(WeightTag t);
WeightTag weight_tag_from_string(const std::string& s);

}  // namespace perpcor
