#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "perpcor/bpb.hpp"
#include "perpcor/classifier.hpp"
#include "perpcor/error.hpp"
#include "perpcor/estimators.hpp"
#include "perpcor/io.hpp"
#include "perpcor/pca.hpp"
#include "perpcor/prediction.hpp"
#include "perpcor/projection.hpp"
#include "perpcor/selection.hpp"
#include "perpcor/simulation.hpp"
#include "perpcor/types.hpp"

namespace {

using nlohmann::json;
using namespace perpcor;

constexpr const char* kToolVersion = "1.0.0";
constexpr const char* kModelFileVersion = "1";

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

int effective_threads(const GlobalOpts& g) {
  if (g.threads > 0) return g.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::ofstream checked_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  return out;
}

CapVector unit_caps(const std::vector<std::string>& domain_ids) {
  CapVector caps;
  caps.domain_ids = domain_ids;
  caps.tau.assign(domain_ids.size(), 1.0);
  return caps;
}

WeightVector run_estimate(const LossMatrix& X, const BenchmarkScores& aligned,
                          const std::string& method, bool normalized,
                          bool arcsine) {
  if (method == "spearman") {
    WeightVector w = spearman_estimate(X, aligned);
    return arcsine ? theta_from_gamma(w) : w;
  }
  if (method != "gamma") throw ValidationError("unknown method: " + method);
  const GammaEstimate est = gamma_estimate(X, aligned);
  if (arcsine) return theta_from_gamma(est.normalized);
  return normalized ? est.normalized : est.raw;
}

json eval_to_json(const EvalReport& report) {
  json models = json::array();
  for (std::size_t i = 0; i < report.model_ids.size(); ++i) {
    models.push_back({{"id", report.model_ids[i]},
                      {"true_rank", report.actual_rank[i]},
                      {"predicted_rank", report.predicted_rank[i]},
                      {"predicted_score", report.predicted[i]},
                      {"held_out_fold", report.fold_of_model[i]}});
  }
  return json{{"method", report.method},
              {"r2_rank", report.r2_rank},
              {"r2_pearson", report.r2_pearson},
              {"fold_r2", report.fold_r2},
              {"models", models}};
}

json sim_config_to_json(const SimConfig& cfg) {
  return json{{"n_models", cfg.n_models},
              {"n_domains", cfg.n_domains},
              {"theta_star", cfg.theta_star},
              {"sigma", cfg.sigma},
              {"sigma1", cfg.noise1()},
              {"sigma2", cfg.noise2()},
              {"link", to_string(cfg.link)},
              {"seed", cfg.seed}};
}

// Key-value pipeline config: one `key = value` pair per line, '#' comments.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  std::map<std::string, std::string> cfg;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + " line " + std::to_string(line_no) +
                            ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ValidationError(path + " line " + std::to_string(line_no) +
                            ": empty key");
    cfg[key] = value;
  }
  return cfg;
}

std::string require_key(const std::map<std::string, std::string>& cfg,
                        const std::string& key, const std::string& path) {
  const auto it = cfg.find(key);
  if (it == cfg.end())
    throw ValidationError(path + ": missing config key '" + key + "'");
  return it->second;
}

void split_pages_by_plan(const std::vector<Page>& pages,
                         const SelectionPlan& plan,
                         std::vector<Page>* positives,
                         std::vector<Page>* negatives) {
  std::map<std::string, bool> selected;
  for (const auto& row : plan.rows)
    selected[row.domain_id] = row.tokens_selected > 0;
  for (const Page& p : pages) {
    const auto it = selected.find(p.domain_id);
    if (it == selected.end())
      throw ValidationError("page domain not in plan: " + p.domain_id);
    (it->second ? positives : negatives)->push_back(p);
  }
}

void write_pages_jsonl(const std::string& path,
                       const std::vector<Page>& pages) {
  auto out = checked_output(path);
  for (const Page& p : pages) {
    const json obj = {{"domain", p.domain_id},
                      {"page_id", p.page_id},
                      {"text", p.text},
                      {"token_count", p.token_count}};
    out << obj.dump() << '\n';
  }
}

int cmd_bpb_aggregate(const std::string& chunks_path,
                      const std::string& output, std::int64_t max_pages) {
  const auto records = read_chunks_jsonl_file(chunks_path);
  const auto domains = aggregate_domain_bpb(records, max_pages);
  auto out = checked_output(output);
  out << "domain_id,bpb,pages_used\n";
  for (const auto& d : domains)
    out << d.domain_id << ',' << format_double(d.bpb) << ',' << d.pages_used
        << '\n';
  return 0;
}

int cmd_estimate(const std::string& loss_path, const std::string& bench_path,
                 const std::string& method, bool normalized, bool arcsine,
                 const std::string& output) {
  const LossMatrix X = read_loss_csv_file(loss_path);
  const BenchmarkScores aligned =
      align_to(read_benchmark_csv_file(bench_path), X);
  write_weights_csv_file(output,
                         run_estimate(X, aligned, method, normalized, arcsine));
  return 0;
}

int cmd_project(const std::string& weights_path, const std::string& caps_path,
                const std::string& inventory_path, std::int64_t budget,
                const std::string& method, double tol,
                const std::string& output) {
  const WeightVector weights = read_weights_csv_file(weights_path);
  CapVector caps;
  if (!caps_path.empty()) {
    caps = read_caps_csv_file(caps_path);
  } else if (!inventory_path.empty()) {
    if (budget < 1)
      throw ValidationError("--budget is required with --inventory");
    caps = compute_tau(read_inventory_csv_file(inventory_path), budget);
  } else {
    throw ValidationError("project needs --caps or --inventory");
  }
  WeightVector projected;
  if (method == "linear")
    projected = linear_project(weights, caps);
  else if (method == "quadratic")
    projected = quadratic_project(weights, caps, tol);
  else
    throw ValidationError("unknown projection method: " + method);
  write_weights_csv_file(output, projected);
  return 0;
}

int cmd_select(const std::string& weights_path,
               const std::string& inventory_path, std::int64_t budget,
               const std::string& output) {
  const WeightVector weights = read_weights_csv_file(weights_path);
  const DomainInventory inventory = read_inventory_csv_file(inventory_path);
  write_plan_csv_file(output, select_domains(weights, inventory, budget));
  return 0;
}

SelectionPlan read_plan_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("plan CSV: empty file");
  if (line != "domain_id,gamma,rank,tokens_available,tokens_selected")
    throw ValidationError("plan CSV: unexpected header");
  SelectionPlan plan;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(field);
        field.clear();
      } else if (c != '\r') {
        field.push_back(c);
      }
    }
    fields.push_back(field);
    if (fields.size() != 5)
      throw ValidationError("plan CSV line " + std::to_string(line_no) +
                            ": expected 5 fields");
    SelectionRow row;
    row.domain_id = fields[0];
    row.gamma = std::stod(fields[1]);
    row.rank = std::stoll(fields[2]);
    row.tokens_available = std::stoll(fields[3]);
    row.tokens_selected = std::stoll(fields[4]);
    plan.total_selected += row.tokens_selected;
    plan.rows.push_back(std::move(row));
  }
  if (plan.rows.empty()) throw ValidationError("plan CSV: no rows");
  return plan;
}

int cmd_train_classifier(const std::string& pages_path,
                         const std::string& plan_path,
                         const std::string& positive_path,
                         const std::string& negative_path,
                         const TrainOptions& opts, const std::string& output) {
  std::vector<Page> positives, negatives;
  if (!positive_path.empty() && !negative_path.empty()) {
    positives = read_pages_jsonl_file(positive_path);
    negatives = read_pages_jsonl_file(negative_path);
  } else if (!pages_path.empty() && !plan_path.empty()) {
    const auto pages = read_pages_jsonl_file(pages_path);
    split_pages_by_plan(pages, read_plan_csv_file(plan_path), &positives,
                        &negatives);
  } else {
    throw ValidationError(
        "train-classifier needs --pages with --plan, or --positive with "
        "--negative");
  }
  train_classifier(positives, negatives, opts).save_file(output);
  return 0;
}

int cmd_filter_pages(const std::string& model_path,
                     const std::string& pages_path, std::int64_t budget,
                     const std::string& output) {
  const ClassifierModel model = ClassifierModel::load_file(model_path);
  const auto pages = read_pages_jsonl_file(pages_path);
  const FilterResult result = filter_pages(model, pages, budget);

  std::map<std::string, const Page*> by_id;
  for (const Page& p : pages) by_id[p.page_id] = &p;
  std::vector<Page> kept;
  kept.reserve(result.kept_page_ids.size());
  for (const auto& id : result.kept_page_ids) kept.push_back(*by_id.at(id));
  write_pages_jsonl(output, kept);
  std::cout << "kept " << kept.size() << " pages, " << result.tokens_kept
            << " tokens\n";
  return 0;
}

int cmd_evaluate(const std::string& loss_path, const std::string& bench_path,
                 const std::string& caps_path, const EvalOptions& opts,
                 bool with_baseline, const std::string& output) {
  const LossMatrix X = read_loss_csv_file(loss_path);
  const BenchmarkScores aligned =
      align_to(read_benchmark_csv_file(bench_path), X);
  const CapVector caps = caps_path.empty() ? unit_caps(X.domain_ids)
                                           : read_caps_csv_file(caps_path);

  json report = {{"schema_version", kReportSchemaVersion},
                 {"command", "evaluate"},
                 {"kfold", opts.kfold},
                 {"seed", opts.seed},
                 {"caps", caps_path.empty() ? "unit" : caps_path},
                 {"model", eval_to_json(kfold_rank_r2(X, aligned, caps, opts))}};
  if (with_baseline)
    report["baseline"] = eval_to_json(baseline_rank_r2(X, aligned, opts));
  auto out = checked_output(output);
  out << report.dump(2) << '\n';
  return 0;
}

int cmd_simulate(const SimConfig& cfg, const std::string& check,
                 std::int64_t trials, std::int64_t repeats, bool use_spearman,
                 const std::string& emit_loss, const std::string& emit_bench,
                 bool positivize, const std::string& output, int threads) {
  json report = {{"schema_version", kReportSchemaVersion},
                 {"command", "simulate"},
                 {"config", sim_config_to_json(cfg)}};

  if (!emit_loss.empty() || !emit_bench.empty()) {
    SimData data = generate(cfg);
    if (positivize) {
      // exp keeps every column's order, so rank statistics are unchanged
      // while the values become valid strictly positive losses.
      for (double& v : data.X.values) v = std::exp(v);
      data.X.relaxed = false;
    }
    if (!emit_loss.empty()) write_loss_csv_file(emit_loss, data.X);
    if (!emit_bench.empty()) {
      auto out = checked_output(emit_bench);
      out << "model_id,score,kind\n";
      for (std::size_t i = 0; i < data.scores.model_ids.size(); ++i)
        out << data.scores.model_ids[i] << ','
            << format_double(data.scores.errors[i]) << ",error\n";
    }
  }

  if (check == "theorem1") {
    const TheoremReport rep = mc_check_theorem1(cfg, trials, threads);
    json cells = json::array();
    for (const auto& c : rep.cells)
      cells.push_back({{"domain", c.domain},
                       {"empirical", c.empirical},
                       {"analytic", c.analytic},
                       {"std_err", c.std_err},
                       {"deviation_se", c.deviation_se},
                       {"pass", c.pass}});
    report["check"] = "theorem1";
    report["trials"] = rep.trials;
    report["cells"] = cells;
    report["all_pass"] = rep.all_pass;
  } else if (check == "corollary1") {
    const CorollaryReport rep = mc_check_corollary1(cfg, trials, threads);
    report["check"] = "corollary1";
    report["pairs"] = rep.pairs;
    report["mean_low"] = rep.mean_low;
    report["mean_high"] = rep.mean_high;
    report["diff"] = rep.diff;
    report["std_err"] = rep.std_err;
    report["vacuous"] = rep.vacuous;
    report["pass"] = rep.pass;
  } else if (check == "recovery") {
    const RecoveryReport rep = recovery_report(cfg, use_spearman, repeats);
    report["check"] = "recovery";
    report["estimator"] = use_spearman ? "spearman" : "gamma";
    report["repeats"] = rep.repeats;
    report["rho"] = rep.rho;
    report["rho_defined"] = rep.rho_defined;
    report["ell2_error"] = rep.ell2_error;
  } else if (!check.empty()) {
    throw ValidationError("unknown check: " + check);
  }

  if (!output.empty()) {
    auto out = checked_output(output);
    out << report.dump(2) << '\n';
  }
  return 0;
}

int cmd_pca(const std::string& loss_path, const PcaOptions& opts,
            const std::string& eigen_output, const std::string& scores_output) {
  const LossMatrix X = read_loss_csv_file(loss_path);
  const PcaResult result = pca(X, opts);
  if (!eigen_output.empty()) {
    auto out = checked_output(eigen_output);
    out << "component,eigenvalue\n";
    for (std::size_t k = 0; k < result.eigenvalues.size(); ++k)
      out << (k + 1) << ',' << format_double(result.eigenvalues[k]) << '\n';
  }
  if (!scores_output.empty()) {
    auto out = checked_output(scores_output);
    out << "id";
    for (std::size_t k = 1; k <= result.n_components; ++k) out << ",pc" << k;
    out << '\n';
    for (std::size_t i = 0; i < result.example_ids.size(); ++i) {
      out << result.example_ids[i];
      for (std::size_t k = 0; k < result.n_components; ++k)
        out << ','
            << format_double(result.scores[i * result.n_components + k]);
      out << '\n';
    }
  }
  return 0;
}

int cmd_pipeline(const std::string& config_path, const GlobalOpts& g,
                 bool seed_from_flag) {
  const auto cfg = read_config(config_path);
  const auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
  };

  const LossMatrix X =
      read_loss_csv_file(require_key(cfg, "loss", config_path));
  const BenchmarkScores aligned = align_to(
      read_benchmark_csv_file(require_key(cfg, "benchmark", config_path)), X);
  const DomainInventory inventory =
      read_inventory_csv_file(require_key(cfg, "inventory", config_path));
  const std::int64_t budget =
      std::stoll(require_key(cfg, "budget", config_path));

  const std::string method = get("method", "gamma");
  const bool arcsine = get("arcsine", "true") == "true";
  const std::string projection = get("projection", "linear");

  // estimate
  const WeightVector normalized =
      run_estimate(X, aligned, method, /*normalized=*/true, /*arcsine=*/false);
  const WeightVector theta = arcsine ? theta_from_gamma(normalized) : normalized;
  if (cfg.count("weights_output"))
    write_weights_csv_file(cfg.at("weights_output"), normalized);

  // project
  const CapVector caps = compute_tau(inventory, budget);
  if (caps.infeasible)
    throw ValidationError("inventory cannot fill the budget (sum tau < 1)");
  WeightVector projected;
  if (projection == "linear")
    projected = linear_project(theta, caps);
  else if (projection == "quadratic")
    projected = quadratic_project(theta, caps);
  else
    throw ValidationError("unknown projection method: " + projection);
  if (cfg.count("projected_output"))
    write_weights_csv_file(cfg.at("projected_output"), projected);

  // select
  const SelectionPlan plan = select_domains(normalized, inventory, budget);
  if (cfg.count("plan_output"))
    write_plan_csv_file(cfg.at("plan_output"), plan);

  // train-classifier
  if (cfg.count("pages") && cfg.count("model_output")) {
    TrainOptions topts;
    topts.seed = seed_from_flag
                     ? g.seed
                     : std::stoull(get("seed", std::to_string(g.seed)));
    topts.epochs = std::stoll(get("epochs", "5"));
    topts.learning_rate = std::stod(get("learning_rate", "0.1"));
    topts.feature_dim =
        static_cast<std::uint32_t>(std::stoul(get("feature_dim", "2097152")));
    topts.hash_seed = std::stoull(get("hash_seed", "0"));
    std::vector<Page> positives, negatives;
    split_pages_by_plan(read_pages_jsonl_file(cfg.at("pages")), plan,
                        &positives, &negatives);
    train_classifier(positives, negatives, topts)
        .save_file(cfg.at("model_output"));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pretraining data selection from loss-benchmark correlations"};
  app.require_subcommand(0, 1);

  GlobalOpts g;
  bool show_version = false;
  app.add_flag("--version", show_version, "print schema versions and exit");
  app.add_option("--seed", g.seed, "seed for seeded operations")
      ->capture_default_str();
  app.add_option("--threads", g.threads,
                 "worker threads (default: available cores)");

  // bpb-aggregate
  auto* bpb = app.add_subcommand("bpb-aggregate",
                                 "aggregate chunk losses to domain BPB");
  std::string bpb_chunks, bpb_output;
  std::int64_t bpb_max_pages = 25;
  bpb->add_option("--chunks", bpb_chunks, "chunk losses JSONL")->required();
  bpb->add_option("--output", bpb_output, "domain BPB CSV")->required();
  bpb->add_option("--max-pages", bpb_max_pages, "pages per domain")
      ->capture_default_str();

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate domain weights");
  std::string est_loss, est_bench, est_output, est_method = "gamma";
  bool est_normalized = false, est_arcsine = false;
  est->add_option("--loss", est_loss, "loss matrix CSV")->required();
  est->add_option("--benchmark", est_bench, "benchmark CSV")->required();
  est->add_option("--method", est_method, "gamma|spearman")
      ->capture_default_str();
  est->add_flag("--normalized", est_normalized,
                "emit gamma_normalized instead of gamma_raw");
  est->add_flag("--arcsine", est_arcsine,
                "apply the arcsine inversion (emits theta_hat)");
  est->add_option("--output", est_output, "weights CSV")->required();

  // project
  auto* proj = app.add_subcommand("project",
                                  "project weights onto the capped simplex");
  std::string proj_weights, proj_caps, proj_inventory, proj_output,
      proj_method = "linear";
  std::int64_t proj_budget = 0;
  double proj_tol = 1e-10;
  proj->add_option("--weights", proj_weights, "weights CSV")->required();
  proj->add_option("--caps", proj_caps, "caps CSV");
  proj->add_option("--inventory", proj_inventory,
                   "inventory CSV (with --budget, computes caps)");
  proj->add_option("--budget", proj_budget, "total token budget");
  proj->add_option("--method", proj_method, "linear|quadratic")
      ->capture_default_str();
  proj->add_option("--tol", proj_tol, "bisection tolerance")
      ->capture_default_str();
  proj->add_option("--output", proj_output, "projected weights CSV")
      ->required();

  // select
  auto* sel = app.add_subcommand("select", "greedy token-budget selection");
  std::string sel_weights, sel_inventory, sel_output;
  std::int64_t sel_budget = 0;
  sel->add_option("--weights", sel_weights, "weights CSV")->required();
  sel->add_option("--inventory", sel_inventory, "inventory CSV")->required();
  sel->add_option("--budget", sel_budget, "token budget")->required();
  sel->add_option("--output", sel_output, "plan CSV")->required();

  // train-classifier
  auto* train = app.add_subcommand("train-classifier",
                                   "train the page quality classifier");
  std::string train_pages, train_plan, train_pos, train_neg, train_output;
  TrainOptions topts;
  train->add_option("--pages", train_pages, "pages JSONL (with --plan)");
  train->add_option("--plan", train_plan, "plan CSV labeling domains");
  train->add_option("--positive", train_pos, "positive pages JSONL");
  train->add_option("--negative", train_neg, "negative pages JSONL");
  train->add_option("--epochs", topts.epochs, "SGD epochs")
      ->capture_default_str();
  train->add_option("--lr", topts.learning_rate, "initial learning rate")
      ->capture_default_str();
  train->add_option("--feature-dim", topts.feature_dim,
                    "hashed feature dimension (power of two)")
      ->capture_default_str();
  train->add_option("--hash-seed", topts.hash_seed, "feature hash seed")
      ->capture_default_str();
  train->add_option("--output", train_output, "model file")->required();

  // filter-pages
  auto* filter = app.add_subcommand("filter-pages",
                                    "score and budget-filter pages");
  std::string filter_model, filter_pages_path, filter_output;
  std::int64_t filter_budget = 0;
  filter->add_option("--model", filter_model, "model file")->required();
  filter->add_option("--pages", filter_pages_path, "pages JSONL")->required();
  filter->add_option("--budget", filter_budget, "token budget")->required();
  filter->add_option("--output", filter_output, "kept pages JSONL")
      ->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "k-fold held-out rank R^2");
  std::string eval_loss, eval_bench, eval_caps, eval_output,
      eval_estimator = "gamma", eval_projection = "quadratic";
  EvalOptions eopts;
  bool eval_baseline = false;
  eval->add_option("--loss", eval_loss, "loss matrix CSV")->required();
  eval->add_option("--benchmark", eval_bench, "benchmark CSV")->required();
  eval->add_option("--caps", eval_caps, "caps CSV (default: unit caps)");
  eval->add_option("--kfold", eopts.kfold, "number of folds")
      ->capture_default_str();
  eval->add_option("--estimator", eval_estimator, "gamma|spearman")
      ->capture_default_str();
  eval->add_option("--projection", eval_projection, "linear|quadratic")
      ->capture_default_str();
  eval->add_flag("--baseline", eval_baseline,
                 "also report the mean-loss baseline");
  eval->add_option("--output", eval_output, "report JSON")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate",
                                 "synthetic model zoos and Monte Carlo checks");
  SimConfig scfg;
  std::string sim_check, sim_link = "identity", sim_theta, sim_output,
              sim_emit_loss, sim_emit_bench;
  std::int64_t sim_trials = 100000, sim_repeats = 1;
  bool sim_spearman = false, sim_positivize = false;
  sim->add_option("--check", sim_check, "theorem1|corollary1|recovery");
  sim->add_option("--n-models", scfg.n_models, "models N")
      ->capture_default_str();
  sim->add_option("--n-domains", scfg.n_domains, "domains D")
      ->capture_default_str();
  sim->add_option("--sigma", scfg.sigma, "noise std")->capture_default_str();
  sim->add_option("--sigma1", scfg.sigma1, "first pair-member noise std");
  sim->add_option("--sigma2", scfg.sigma2, "second pair-member noise std");
  sim->add_option("--link", sim_link, "identity|sigmoid|cube-plus-linear")
      ->capture_default_str();
  sim->add_option("--theta", sim_theta,
                  "comma-separated theta* (default: e_1)");
  sim->add_option("--trials", sim_trials, "Monte Carlo trials")
      ->capture_default_str();
  sim->add_option("--repeats", sim_repeats, "recovery repeats")
      ->capture_default_str();
  sim->add_flag("--spearman", sim_spearman, "recovery with Spearman");
  sim->add_option("--emit-loss", sim_emit_loss, "write generated loss CSV");
  sim->add_option("--emit-benchmark", sim_emit_bench,
                  "write generated benchmark CSV");
  sim->add_flag("--positivize", sim_positivize,
                "exp-transform emitted losses to positive values");
  sim->add_option("--output", sim_output, "report JSON");

  // pca
  auto* pca_cmd = app.add_subcommand("pca", "PCA of the loss matrix");
  std::string pca_loss, pca_axis = "models", pca_eigen, pca_scores;
  PcaOptions popts;
  pca_cmd->add_option("--loss", pca_loss, "loss matrix CSV")->required();
  pca_cmd->add_option("--axis", pca_axis, "models|domains")
      ->capture_default_str();
  pca_cmd->add_option("--components", popts.n_components,
                      "number of components")
      ->capture_default_str();
  bool pca_no_center = false;
  pca_cmd->add_flag("--no-center", pca_no_center, "skip feature centering");
  pca_cmd->add_flag("--standardize", popts.standardize,
                    "scale features to unit variance");
  pca_cmd->add_flag("--normalize-rows", popts.normalize_rows,
                    "subtract per-model means first");
  pca_cmd->add_option("--eigenvalues-output", pca_eigen, "eigenvalue CSV");
  pca_cmd->add_option("--scores-output", pca_scores, "per-example scores CSV");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline",
                                  "estimate -> project -> select -> train");
  std::string pipe_config;
  pipe->add_option("--config", pipe_config, "key = value config file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (show_version) {
      std::cout << "perpcor " << kToolVersion << '\n'
                << "loss-csv-schema " << kLossSchemaVersion << '\n'
                << "report-schema " << kReportSchemaVersion << '\n'
                << "model-file-version " << kModelFileVersion << '\n';
      return 0;
    }
    if (bpb->parsed())
      return cmd_bpb_aggregate(bpb_chunks, bpb_output, bpb_max_pages);
    if (est->parsed())
      return cmd_estimate(est_loss, est_bench, est_method, est_normalized,
                          est_arcsine, est_output);
    if (proj->parsed())
      return cmd_project(proj_weights, proj_caps, proj_inventory, proj_budget,
                         proj_method, proj_tol, proj_output);
    if (sel->parsed())
      return cmd_select(sel_weights, sel_inventory, sel_budget, sel_output);
    if (train->parsed()) {
      topts.seed = g.seed == 0 ? topts.seed : g.seed;
      return cmd_train_classifier(train_pages, train_plan, train_pos,
                                  train_neg, topts, train_output);
    }
    if (filter->parsed())
      return cmd_filter_pages(filter_model, filter_pages_path, filter_budget,
                              filter_output);
    if (eval->parsed()) {
      eopts.seed = g.seed;
      eopts.estimator = eval_estimator == "spearman" ? Estimator::spearman
                                                     : Estimator::gamma;
      if (eval_estimator != "gamma" && eval_estimator != "spearman")
        throw ValidationError("unknown estimator: " + eval_estimator);
      eopts.projection = eval_projection == "linear" ? Projection::linear
                                                     : Projection::quadratic;
      if (eval_projection != "linear" && eval_projection != "quadratic")
        throw ValidationError("unknown projection method: " + eval_projection);
      return cmd_evaluate(eval_loss, eval_bench, eval_caps, eopts,
                          eval_baseline, eval_output);
    }
    if (sim->parsed()) {
      scfg.seed = g.seed;
      scfg.link = link_from_string(sim_link);
      if (!sim_theta.empty()) {
        scfg.theta_star.clear();
        std::string token;
        for (char c : sim_theta + ",") {
          if (c == ',') {
            if (!token.empty()) scfg.theta_star.push_back(std::stod(token));
            token.clear();
          } else {
            token.push_back(c);
          }
        }
        scfg.n_domains = static_cast<std::int64_t>(scfg.theta_star.size());
      }
      return cmd_simulate(scfg, sim_check, sim_trials, sim_repeats,
                          sim_spearman, sim_emit_loss, sim_emit_bench,
                          sim_positivize, sim_output, effective_threads(g));
    }
    if (pca_cmd->parsed()) {
      popts.center = !pca_no_center;
      if (pca_axis == "models")
        popts.axis = PcaAxis::models_as_examples;
      else if (pca_axis == "domains")
        popts.axis = PcaAxis::domains_as_examples;
      else
        throw ValidationError("unknown pca axis: " + pca_axis);
      return cmd_pca(pca_loss, popts, pca_eigen, pca_scores);
    }
    if (pipe->parsed())
      return cmd_pipeline(pipe_config, g,
                          app.count("--seed") > 0);
    std::cout << app.help();
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
