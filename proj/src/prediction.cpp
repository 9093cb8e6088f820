#include "perpcor/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "perpcor/error.hpp"

namespace perpcor {

namespace {

// Empirical-CDF value of `v` against a sorted reference column: exact
// matches take the tied block's average rank / N, interior values take the
// midpoint (count_less + 0.5)/N, and values outside the range clamp to
// 1/(N+1) and N/(N+1).
double ecdf_value(const std::vector<double>& sorted, double v) {
  const double n = static_cast<double>(sorted.size());
  if (v < sorted.front()) return 1.0 / (n + 1.0);
  if (v > sorted.back()) return n / (n + 1.0);
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), v);
  const auto hi = std::upper_bound(lo, sorted.end(), v);
  const double count_less = static_cast<double>(lo - sorted.begin());
  if (lo != hi) {
    const double count_eq = static_cast<double>(hi - lo);
    return (count_less + (count_eq + 1.0) / 2.0) / n;
  }
  return (count_less + 0.5) / n;
}

struct FittedTheta {
  WeightVector proj;
};

FittedTheta fit_theta(const LossMatrix& X, const BenchmarkScores& y,
                      const CapVector& caps, const EvalOptions& opts) {
  WeightVector normalized = opts.estimator == Estimator::spearman
                                ? spearman_estimate(X, y)
                                : gamma_estimate(X, y).normalized;
  const WeightVector theta = theta_from_gamma(normalized);
  FittedTheta fit;
  fit.proj = opts.projection == Projection::linear
                 ? linear_project(theta, caps)
                 : quadratic_project(theta, caps);
  return fit;
}

LossMatrix submatrix(const LossMatrix& X, const std::vector<std::size_t>& rows) {
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(rows.size());
  values.reserve(rows.size() * X.n_domains());
  for (std::size_t i : rows) {
    ids.push_back(X.model_ids[i]);
    const auto row = X.row(i);
    values.insert(values.end(), row.begin(), row.end());
  }
  return LossMatrix::create(std::move(ids), X.domain_ids, std::move(values),
                            X.relaxed);
}

std::vector<double> fold_rank_r2s(const std::vector<double>& predicted,
                                  const std::vector<double>& errors,
                                  const std::vector<int>& fold_of_model,
                                  std::int64_t k) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::int64_t f = 0; f < k; ++f) {
    std::vector<double> p, e;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (fold_of_model[i] == f) {
        p.push_back(predicted[i]);
        e.push_back(errors[i]);
      }
    }
    if (p.size() < 2) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    out.push_back(r_squared(rank_transform(p).ranks, rank_transform(e).ranks));
  }
  return out;
}

EvalReport assemble_report(const LossMatrix& X, const BenchmarkScores& scores,
                           std::vector<double> predicted,
                           std::vector<int> fold_of_model,
                           const EvalOptions& opts, std::string method) {
  EvalReport report;
  report.kfold = opts.kfold;
  report.seed = opts.seed;
  report.method = std::move(method);
  report.model_ids = X.model_ids;
  report.predicted_rank = rank_transform(predicted).ranks;
  report.actual_rank = rank_transform(scores.errors).ranks;
  report.r2_rank = r_squared(report.predicted_rank, report.actual_rank);
  report.r2_pearson = pearson_r2(predicted, scores.errors);
  report.fold_r2 =
      fold_rank_r2s(predicted, scores.errors, fold_of_model, opts.kfold);
  report.predicted = std::move(predicted);
  report.fold_of_model = std::move(fold_of_model);
  return report;
}

}  // namespace

double predict_rank_score(const WeightVector& theta,
                          const std::vector<double>& losses,
                          const LossMatrix& reference) {
  if (theta.domain_ids.size() != reference.n_domains())
    throw ValidationError("theta and reference cover different domain counts");
  if (losses.size() != reference.n_domains())
    throw ValidationError("loss vector length does not match reference");
  std::unordered_map<std::string, double> weight;
  for (std::size_t j = 0; j < theta.domain_ids.size(); ++j)
    if (!weight.emplace(theta.domain_ids[j], theta.values[j]).second)
      throw ValidationError("duplicate theta domain: " + theta.domain_ids[j]);

  double score = 0.0;
  for (std::size_t j = 0; j < reference.n_domains(); ++j) {
    const auto it = weight.find(reference.domain_ids[j]);
    if (it == weight.end())
      throw ValidationError("domain missing from theta: " +
                            reference.domain_ids[j]);
    std::vector<double> column = reference.column(j);
    std::sort(column.begin(), column.end());
    score += it->second * ecdf_value(column, losses[j]);
  }
  return score;
}

std::vector<int> fold_assignment(const std::vector<std::string>& model_ids,
                                 std::int64_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("kfold must be at least 2");
  if (static_cast<std::size_t>(k) > model_ids.size())
    throw ValidationError("kfold exceeds the number of models");
  std::vector<std::string> sorted = model_ids;
  std::sort(sorted.begin(), sorted.end());
  std::mt19937_64 rng(seed);
  std::shuffle(sorted.begin(), sorted.end(), rng);
  std::unordered_map<std::string, int> fold;
  for (std::size_t pos = 0; pos < sorted.size(); ++pos)
    fold.emplace(sorted[pos], static_cast<int>(pos % k));
  std::vector<int> out;
  out.reserve(model_ids.size());
  for (const auto& id : model_ids) out.push_back(fold.at(id));
  return out;
}

EvalReport kfold_rank_r2(const LossMatrix& X, const BenchmarkScores& scores,
                         const CapVector& caps, const EvalOptions& opts) {
  require_aligned(X, scores);
  const std::vector<int> folds = fold_assignment(X.model_ids, opts.kfold,
                                                 opts.seed);

  std::vector<double> predicted(X.n_models(), 0.0);
  for (std::int64_t f = 0; f < opts.kfold; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < X.n_models(); ++i)
      (folds[i] == f ? test_rows : train_rows).push_back(i);
    if (train_rows.size() < 2)
      throw ValidationError("fold leaves fewer than 2 training models");
    if (test_rows.empty()) continue;

    const LossMatrix train_X = submatrix(X, train_rows);
    BenchmarkScores train_y;
    train_y.orientation_applied = scores.orientation_applied;
    for (std::size_t i : train_rows) {
      train_y.model_ids.push_back(scores.model_ids[i]);
      train_y.errors.push_back(scores.errors[i]);
    }

    const FittedTheta fit = fit_theta(train_X, train_y, caps, opts);
    for (std::size_t i : test_rows)
      predicted[i] = predict_rank_score(fit.proj, X.row(i), train_X);
  }

  const char* estimator =
      opts.estimator == Estimator::spearman ? "spearman" : "gamma";
  const char* projection =
      opts.projection == Projection::linear ? "linear" : "quadratic";
  return assemble_report(X, scores, std::move(predicted), folds, opts,
                         std::string(estimator) + "+" + projection);
}

EvalReport baseline_rank_r2(const LossMatrix& X, const BenchmarkScores& scores,
                            const EvalOptions& opts) {
  require_aligned(X, scores);
  const std::vector<int> folds = fold_assignment(X.model_ids, opts.kfold,
                                                 opts.seed);
  return assemble_report(X, scores, mean_loss_predictor(X), folds, opts,
                         "mean-loss");
}

double r_squared(const std::vector<double>& predicted,
                 const std::vector<double>& actual) {
  if (predicted.size() != actual.size() || actual.empty())
    throw ValidationError("r_squared: length mismatch");
  const double mean =
      std::accumulate(actual.begin(), actual.end(), 0.0) /
      static_cast<double>(actual.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_res += (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
  }
  if (ss_tot == 0.0) return 0.0;
  return 1.0 - ss_res / ss_tot;
}

double pearson_r2(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ValidationError("pearson_r2: need two equal-length vectors");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov * cov / (va * vb);
}

}  // namespace perpcor
