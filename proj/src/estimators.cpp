#include "perpcor/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "perpcor/error.hpp"

namespace perpcor {

namespace {

double sign_of(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

}  // namespace

RankColumn rank_transform(const std::vector<double>& column) {
  const std::size_t n = column.size();
  if (n < 2) throw ValidationError("rank_transform: need at least 2 values");
  for (double v : column)
    if (!std::isfinite(v))
      throw ValidationError("rank_transform: non-finite value");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });

  RankColumn out;
  out.ranks.assign(n, 0.0);
  out.ecdf.assign(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && column[order[j + 1]] == column[order[i]]) ++j;
    // Tied block spans sorted positions i..j; the average 1-based rank
    // (i + j)/2 + 1 is a half-integer, exact in floating point.
    const double avg =
        (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = avg;
    i = j + 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    out.ecdf[k] = out.ranks[k] / static_cast<double>(n);
  return out;
}

GammaEstimate gamma_estimate(const LossMatrix& X,
                             const BenchmarkScores& scores) {
  require_aligned(X, scores);
  const std::size_t n = X.n_models();
  const std::size_t d = X.n_domains();

  std::vector<std::vector<double>> ranks(d);
  for (std::size_t j = 0; j < d; ++j)
    ranks[j] = rank_transform(X.column(j)).ranks;

  // Ordered-pair sum over raw ranks. Each unordered pair contributes the
  // same value twice, and rank differences are half-integers, so summing
  // k < l and doubling is exact.
  std::vector<double> raw(d, 0.0);
  const std::vector<double>& y = scores.errors;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      const double s = sign_of(y[k] - y[l]);
      if (s == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j)
        raw[j] += s * (ranks[j][k] - ranks[j][l]);
    }
  }
  for (double& v : raw) v *= 2.0;

  GammaEstimate out;
  out.raw.domain_ids = X.domain_ids;
  out.raw.values = raw;
  out.raw.tag = WeightTag::gamma_raw;
  out.normalized.domain_ids = X.domain_ids;
  out.normalized.tag = WeightTag::gamma_normalized;
  // ecdf = rank/N scales every term by 1/N, and the U-statistic divides by
  // N*(N-1); both fold into one exact-in-real-arithmetic factor.
  const double denom = static_cast<double>(n) * static_cast<double>(n) *
                       static_cast<double>(n - 1);
  out.normalized.values.reserve(d);
  for (double v : raw) out.normalized.values.push_back(v / denom);
  return out;
}

WeightVector spearman_estimate(const LossMatrix& X,
                               const BenchmarkScores& scores,
                               std::vector<std::uint8_t>* degenerate) {
  require_aligned(X, scores);
  const std::size_t n = X.n_models();
  const std::size_t d = X.n_domains();

  if (degenerate) degenerate->assign(d, 0);
  const std::vector<double> yr = rank_transform(scores.errors).ranks;
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double yvar = 0.0;
  for (double r : yr) yvar += (r - mean) * (r - mean);

  WeightVector out;
  out.domain_ids = X.domain_ids;
  out.values.assign(d, 0.0);
  out.tag = WeightTag::gamma_normalized;
  for (std::size_t j = 0; j < d; ++j) {
    const std::vector<double> xr = rank_transform(X.column(j)).ranks;
    double xvar = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cov += (xr[i] - mean) * (yr[i] - mean);
      xvar += (xr[i] - mean) * (xr[i] - mean);
    }
    if (xvar == 0.0 || yvar == 0.0) {
      out.values[j] = 0.0;
      if (degenerate) (*degenerate)[j] = 1;
    } else {
      out.values[j] = cov / std::sqrt(xvar * yvar);
    }
  }
  return out;
}

WeightVector theta_from_gamma(const WeightVector& gamma) {
  if (gamma.tag != WeightTag::gamma_normalized)
    throw ValidationError("arcsine inversion expects a gamma_normalized input");
  WeightVector out;
  out.domain_ids = gamma.domain_ids;
  out.tag = WeightTag::theta_hat;
  out.values.reserve(gamma.values.size());
  for (double g : gamma.values) {
    if (g < -1.0 - 1e-12 || g > 1.0 + 1e-12)
      throw ValidationError("normalized gamma outside [-1, 1]: " +
                            std::to_string(g));
    out.values.push_back(
        std::sin(std::numbers::pi / 2.0 * std::clamp(g, -1.0, 1.0)));
  }
  return out;
}

std::vector<double> mean_loss_predictor(const LossMatrix& X) {
  std::vector<double> out(X.n_models(), 0.0);
  for (std::size_t i = 0; i < X.n_models(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < X.n_domains(); ++j) sum += X.at(i, j);
    out[i] = sum / static_cast<double>(X.n_domains());
  }
  return out;
}

const char* to_string(WeightTag t) {
  switch (t) {
    case WeightTag::gamma_raw: return "gamma_raw";
    case WeightTag::gamma_normalized: return "gamma_normalized";
    case WeightTag::theta_hat: return "theta_hat";
    case WeightTag::theta_proj: return "theta_proj";
  }
  return "?";
}

WeightTag weight_tag_from_string(const std::string& s) {
  if (s == "gamma_raw") return WeightTag::gamma_raw;
  if (s == "gamma_normalized") return WeightTag::gamma_normalized;
  if (s == "theta_hat") return WeightTag::theta_hat;
  if (s == "theta_proj") return WeightTag::theta_proj;
  throw ValidationError("unknown weight tag: " + s);
}

}  // namespace perpcor
