#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perpcor/estimators.hpp"
#include "perpcor/projection.hpp"
#include "perpcor/types.hpp"

namespace perpcor {

// Empirical-CDF embedding of one model's losses against a reference matrix:
// an exact match takes the reference point's average-rank/N; a value
// strictly between reference points takes (count_less + 0.5)/N; outside the
// range it clamps to 1/(N+1) or N/(N+1). Returns <theta, phi(losses)>;
// higher predicts higher error.
double predict_rank_score(const WeightVector& theta,
                          const std::vector<double>& losses,
                          const LossMatrix& reference);

enum class Estimator { gamma, spearman };
enum class Projection { linear, quadratic };

struct EvalOptions {
  std::int64_t kfold = 5;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::gamma;
  // Quadratic keeps relative weight magnitudes; the linear projection is
  // rank-degenerate under loose caps (everything lands on the top domain),
  // so evaluation defaults to quadratic.
  Projection projection = Projection::quadratic;
};

struct EvalReport {
  double r2_rank = 0.0;     // pooled, on ranks assembled across folds
  double r2_pearson = 0.0;  // pooled, on raw assembled predictions vs errors
  std::vector<double> fold_r2;  // per fold, ranks within the fold
  std::int64_t kfold = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::vector<std::string> model_ids;  // X's order
  std::vector<double> predicted;       // assembled across folds
  std::vector<double> predicted_rank;  // 1-based, over the full set
  std::vector<double> actual_rank;     // 1-based ranks of errors
  std::vector<int> fold_of_model;
};

// Deterministic fold assignment: sort model ids, shuffle with mt19937_64
// seeded by `seed`, fold = position % k. A pure function of
// (seed, model_ids).
std::vector<int> fold_assignment(const std::vector<std::string>& model_ids,
                                 std::int64_t k, std::uint64_t seed);

// K-fold held-out rank prediction: per fold, fit the estimator on the
// remaining models, arcsine-invert, project under `caps`, then score the
// held-out models with predict_rank_score against the training submatrix.
// Pooled R^2 compares ranks of assembled predictions with ranks of errors
// over the full model set.
EvalReport kfold_rank_r2(const LossMatrix& X, const BenchmarkScores& scores,
                         const CapVector& caps, const EvalOptions& opts = {});

// Same fold protocol scored by mean_loss_predictor (no fitting).
EvalReport baseline_rank_r2(const LossMatrix& X, const BenchmarkScores& scores,
                            const EvalOptions& opts = {});

// R^2 of predictions against targets around the target mean.
double r_squared(const std::vector<double>& predicted,
                 const std::vector<double>& actual);

double pearson_r2(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace perpcor
