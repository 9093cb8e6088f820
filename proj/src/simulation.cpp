#include "perpcor/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "perpcor/error.hpp"
#include "perpcor/estimators.hpp"

namespace perpcor {

namespace {

// splitmix64: decorrelates derived seeds from sequential inputs.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string padded_id(char prefix, std::int64_t i, std::int64_t count) {
  std::string digits = std::to_string(count - 1);
  std::string s = std::to_string(i);
  return prefix + std::string(digits.size() - s.size(), '0') + s;
}

// Fixed-size block decomposition of a trial range: each block owns one
// derived RNG and a deterministic slice, so results are identical at any
// thread count.
constexpr std::int64_t kBlocks = 64;

template <typename Fn>
void run_blocks(std::int64_t trials, int threads, Fn&& block_fn) {
  const std::int64_t n_blocks = std::min<std::int64_t>(kBlocks, trials);
  if (threads <= 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) block_fn(b, n_blocks);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next.fetch_add(1); b < n_blocks;
         b = next.fetch_add(1))
      block_fn(b, n_blocks);
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<std::int64_t>(threads, n_blocks);
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<double> SimConfig::resolved_theta() const {
  if (n_domains < 1) throw ValidationError("n_domains < 1");
  std::vector<double> theta = theta_star;
  if (theta.empty()) {
    theta.assign(static_cast<std::size_t>(n_domains), 0.0);
    theta[0] = 1.0;
  }
  if (theta.size() != static_cast<std::size_t>(n_domains))
    throw ValidationError("theta_star length does not match n_domains");
  double norm2 = 0.0;
  for (double t : theta) {
    if (!std::isfinite(t)) throw ValidationError("non-finite theta_star");
    norm2 += t * t;
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9)
    throw ValidationError("theta_star must have unit L2 norm (within 1e-9)");
  return theta;
}

double apply_link(LinkFn f, double z) {
  switch (f) {
    case LinkFn::identity: return z;
    case LinkFn::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case LinkFn::cube_plus_linear: return z * z * z + z;
  }
  return z;
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

SimData generate(const SimConfig& cfg) {
  if (cfg.n_models < 2) throw ValidationError("n_models < 2");
  const std::vector<double> theta = cfg.resolved_theta();
  if (cfg.sigma < 0.0) throw ValidationError("sigma < 0");

  const std::size_t n = static_cast<std::size_t>(cfg.n_models);
  const std::size_t d = static_cast<std::size_t>(cfg.n_domains);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // X first, then noise, from one stream: configs differing only in the
  // link or sigma see identical draws.
  std::vector<double> values(n * d);
  for (double& v : values) v = normal(rng);
  std::vector<double> eps(n);
  for (double& e : eps) e = normal(rng);

  std::vector<std::string> model_ids, domain_ids;
  model_ids.reserve(n);
  domain_ids.reserve(d);
  for (std::size_t i = 0; i < n; ++i)
    model_ids.push_back(padded_id('m', static_cast<std::int64_t>(i),
                                  cfg.n_models));
  for (std::size_t j = 0; j < d; ++j)
    domain_ids.push_back(padded_id('d', static_cast<std::int64_t>(j),
                                   cfg.n_domains));

  SimData out;
  out.X = LossMatrix::create(model_ids, domain_ids, std::move(values),
                             /*relaxed=*/true);
  out.scores.model_ids = model_ids;
  out.scores.orientation_applied = Orientation::as_is;
  out.scores.errors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = cfg.sigma * eps[i];
    for (std::size_t j = 0; j < d; ++j) z += theta[j] * out.X.at(i, j);
    out.scores.errors[i] = apply_link(cfg.link, z);
  }
  return out;
}

TheoremReport mc_check_theorem1(const SimConfig& cfg, std::int64_t trials,
                                int threads) {
  if (trials < 1) throw ValidationError("trials < 1");
  const std::vector<double> theta = cfg.resolved_theta();
  const std::size_t d = theta.size();
  const double s1 = cfg.noise1();
  const double s2 = cfg.noise2();

  struct Acc {
    std::vector<double> sum, sumsq;
    std::int64_t count = 0;
  };
  std::vector<Acc> acc(kBlocks);
  for (auto& a : acc) {
    a.sum.assign(d, 0.0);
    a.sumsq.assign(d, 0.0);
  }

  run_blocks(trials, threads, [&](std::int64_t block, std::int64_t n_blocks) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(block)));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::int64_t lo = trials * block / n_blocks;
    const std::int64_t hi = trials * (block + 1) / n_blocks;
    Acc& a = acc[block];
    std::vector<double> xa(d), xb(d);
    for (std::int64_t t = lo; t < hi; ++t) {
      double za = 0.0, zb = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        xa[j] = normal(rng);
        xb[j] = normal(rng);
        za += theta[j] * xa[j];
        zb += theta[j] * xb[j];
      }
      za += s1 * normal(rng);
      zb += s2 * normal(rng);
      const double ya = apply_link(cfg.link, za);
      const double yb = apply_link(cfg.link, zb);
      const double s = ya > yb ? 1.0 : (ya < yb ? -1.0 : 0.0);
      for (std::size_t j = 0; j < d; ++j) {
        const double stat = s * (normal_cdf(xa[j]) - normal_cdf(xb[j]));
        a.sum[j] += stat;
        a.sumsq[j] += stat * stat;
      }
      ++a.count;
    }
  });

  std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
  std::int64_t count = 0;
  for (const auto& a : acc) {
    for (std::size_t j = 0; j < d; ++j) {
      sum[j] += a.sum[j];
      sumsq[j] += a.sumsq[j];
    }
    count += a.count;
  }

  TheoremReport report;
  report.trials = count;
  report.all_pass = true;
  const double denom = std::sqrt(4.0 + 2.0 * s1 * s1 + 2.0 * s2 * s2);
  for (std::size_t j = 0; j < d; ++j) {
    TheoremCell cell;
    cell.domain = j;
    cell.empirical = sum[j] / static_cast<double>(count);
    cell.analytic =
        2.0 / std::numbers::pi * std::asin(theta[j] / denom);
    const double var =
        count > 1 ? (sumsq[j] - sum[j] * sum[j] / static_cast<double>(count)) /
                        static_cast<double>(count - 1)
                  : 0.0;
    cell.std_err = std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
    const double dev = std::abs(cell.empirical - cell.analytic);
    cell.deviation_se = cell.std_err > 0.0
                            ? dev / cell.std_err
                            : (dev == 0.0 ? 0.0
                                          : std::numeric_limits<double>::infinity());
    cell.pass = dev <= 3.0 * cell.std_err;
    report.all_pass = report.all_pass && cell.pass;
    report.cells.push_back(cell);
  }
  return report;
}

CorollaryReport mc_check_corollary1(const SimConfig& cfg, std::int64_t trials,
                                    int threads) {
  if (trials < 1) throw ValidationError("trials < 1");
  if (cfg.n_domains < 1) throw ValidationError("n_domains < 1");
  std::vector<double> theta = cfg.theta_star;
  if (theta.empty()) {
    theta.assign(static_cast<std::size_t>(cfg.n_domains), 0.0);
    theta[0] = 1.0;
  }
  if (theta.size() != static_cast<std::size_t>(cfg.n_domains))
    throw ValidationError("theta_star length does not match n_domains");
  const std::size_t d = theta.size();

  CorollaryReport report;
  if (std::all_of(theta.begin(), theta.end(),
                  [](double t) { return t == 0.0; })) {
    // The conditioning event <theta, x_i> < <theta, x_j> never fires.
    report.vacuous = true;
    report.pass = true;
    return report;
  }

  struct Acc {
    double low = 0.0, high = 0.0, dsum = 0.0, dsumsq = 0.0;
    std::int64_t count = 0;
  };
  std::vector<Acc> acc(kBlocks);

  run_blocks(trials, threads, [&](std::int64_t block, std::int64_t n_blocks) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(block)));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::int64_t lo = trials * block / n_blocks;
    const std::int64_t hi = trials * (block + 1) / n_blocks;
    Acc& a = acc[block];
    std::vector<double> xa(d), xb(d);
    for (std::int64_t t = lo; t < hi; ++t) {
      double za = 0.0, zb = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        xa[j] = normal(rng);
        xb[j] = normal(rng);
        za += theta[j] * xa[j];
        zb += theta[j] * xb[j];
      }
      if (za == zb) continue;
      if (za > zb) std::swap(xa, xb);
      double ua = 0.0, ub = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        ua += theta[j] * normal_cdf(xa[j]);
        ub += theta[j] * normal_cdf(xb[j]);
      }
      const double diff = ub - ua;
      a.low += ua;
      a.high += ub;
      a.dsum += diff;
      a.dsumsq += diff * diff;
      ++a.count;
    }
  });

  double low = 0.0, high = 0.0, dsum = 0.0, dsumsq = 0.0;
  std::int64_t count = 0;
  for (const auto& a : acc) {
    low += a.low;
    high += a.high;
    dsum += a.dsum;
    dsumsq += a.dsumsq;
    count += a.count;
  }
  report.pairs = count;
  if (count < 2) {
    report.vacuous = true;
    report.pass = true;
    return report;
  }
  report.mean_low = low / static_cast<double>(count);
  report.mean_high = high / static_cast<double>(count);
  report.diff = dsum / static_cast<double>(count);
  const double var = (dsumsq - dsum * dsum / static_cast<double>(count)) /
                     static_cast<double>(count - 1);
  report.std_err = std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
  report.pass = report.diff > 3.0 * report.std_err;
  return report;
}

RecoveryReport recovery_report(const SimConfig& cfg, bool use_spearman,
                               std::int64_t repeats) {
  if (repeats < 1) throw ValidationError("repeats < 1");
  const std::vector<double> theta = cfg.resolved_theta();
  const bool all_tied =
      std::all_of(theta.begin(), theta.end(),
                  [&](double t) { return t == theta[0]; });

  const double scale = 2.0 * std::sqrt(1.0 + cfg.sigma * cfg.sigma);
  double rho_sum = 0.0, l2_sum = 0.0;
  for (std::int64_t r = 0; r < repeats; ++r) {
    SimConfig run = cfg;
    run.seed = repeats == 1 ? cfg.seed
                            : mix_seed(cfg.seed, static_cast<std::uint64_t>(r));
    const SimData data = generate(run);
    WeightVector estimate;
    if (use_spearman) {
      estimate = spearman_estimate(data.X, data.scores);
    } else {
      estimate = gamma_estimate(data.X, data.scores).normalized;
    }
    const WeightVector inverted = theta_from_gamma(estimate);

    double l2 = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double dlt = inverted.values[j] - theta[j] / scale;
      l2 += dlt * dlt;
    }
    l2_sum += std::sqrt(l2);

    if (!all_tied) {
      const std::vector<double> er = rank_transform(estimate.values).ranks;
      const std::vector<double> tr = rank_transform(theta).ranks;
      const double mean = (static_cast<double>(theta.size()) + 1.0) / 2.0;
      double cov = 0.0, ev = 0.0, tv = 0.0;
      for (std::size_t j = 0; j < theta.size(); ++j) {
        cov += (er[j] - mean) * (tr[j] - mean);
        ev += (er[j] - mean) * (er[j] - mean);
        tv += (tr[j] - mean) * (tr[j] - mean);
      }
      rho_sum += ev > 0.0 ? cov / std::sqrt(ev * tv) : 0.0;
    }
  }

  RecoveryReport report;
  report.repeats = repeats;
  report.rho_defined = !all_tied;
  report.rho = all_tied ? 0.0 : rho_sum / static_cast<double>(repeats);
  report.ell2_error = l2_sum / static_cast<double>(repeats);
  return report;
}

const char* to_string(LinkFn f) {
  switch (f) {
    case LinkFn::identity: return "identity";
    case LinkFn::sigmoid: return "sigmoid";
    case LinkFn::cube_plus_linear: return "cube-plus-linear";
  }
  return "?";
}

LinkFn link_from_string(const std::string& s) {
  if (s == "identity") return LinkFn::identity;
  if (s == "sigmoid") return LinkFn::sigmoid;
  if (s == "cube-plus-linear" || s == "cube_plus_linear")
    return LinkFn::cube_plus_linear;
  throw ValidationError("unknown link function: " + s);
}

}  // namespace perpcor
