#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "perpcor/bpb.hpp"
#include "perpcor/classifier.hpp"
#include "perpcor/error.hpp"
#include "perpcor/estimators.hpp"
#include "perpcor/pca.hpp"
#include "perpcor/prediction.hpp"
#include "perpcor/projection.hpp"
#include "perpcor/selection.hpp"
#include "perpcor/simulation.hpp"
#include "perpcor/types.hpp"

namespace py = pybind11;
using namespace perpcor;

PYBIND11_MODULE(_perpcor, m) {
  m.doc() = "Perplexity-correlation data selection core";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  py::class_<LossMatrix>(m, "LossMatrix")
      .def(py::init(&LossMatrix::create), py::arg("model_ids"),
           py::arg("domain_ids"), py::arg("values"),
           py::arg("relaxed") = false)
      .def_readonly("model_ids", &LossMatrix::model_ids)
      .def_readonly("domain_ids", &LossMatrix::domain_ids)
      .def_readonly("values", &LossMatrix::values)
      .def_readonly("relaxed", &LossMatrix::relaxed)
      .def("at", py::overload_cast<std::size_t, std::size_t>(
                     &LossMatrix::at, py::const_))
      .def("column", &LossMatrix::column)
      .def("row", &LossMatrix::row);

  py::enum_<BenchmarkKind>(m, "BenchmarkKind")
      .value("error", BenchmarkKind::error)
      .value("accuracy", BenchmarkKind::accuracy)
      .value("log_perplexity", BenchmarkKind::log_perplexity);

  py::class_<BenchmarkScores>(m, "BenchmarkScores")
      .def_readonly("model_ids", &BenchmarkScores::model_ids)
      .def_readonly("errors", &BenchmarkScores::errors);

  m.def("normalize_benchmark", &normalize_benchmark, py::arg("model_ids"),
        py::arg("raw"), py::arg("kind"));
  m.def("align_to", &align_to, py::arg("scores"), py::arg("matrix"));

  m.def("compute_bpb", &compute_bpb, py::arg("token_count"),
        py::arg("byte_count"), py::arg("mean_token_ce"));

  py::class_<DomainBpb>(m, "DomainBpb")
      .def_readonly("domain_id", &DomainBpb::domain_id)
      .def_readonly("bpb", &DomainBpb::bpb)
      .def_readonly("pages_used", &DomainBpb::pages_used);

  py::class_<ChunkLossRecord>(m, "ChunkLossRecord")
      .def(py::init([](std::string domain_id, std::string page_id,
                       std::int64_t chunk_index, std::int64_t token_count,
                       std::int64_t byte_count, double mean_token_ce) {
             ChunkLossRecord rec{std::move(domain_id), std::move(page_id),
                                 chunk_index, token_count, byte_count,
                                 mean_token_ce};
             rec.validate();
             return rec;
           }),
           py::arg("domain_id"), py::arg("page_id"), py::arg("chunk_index"),
           py::arg("token_count"), py::arg("byte_count"),
           py::arg("mean_token_ce"));

  m.def("aggregate_domain_bpb", &aggregate_domain_bpb, py::arg("records"),
        py::arg("max_pages") = 25);

  py::class_<DomainInventory>(m, "DomainInventory")
      .def(py::init(&DomainInventory::create), py::arg("domain_ids"),
           py::arg("tokens"))
      .def_readonly("domain_ids", &DomainInventory::domain_ids)
      .def_readonly("tokens", &DomainInventory::tokens);

  py::enum_<WeightTag>(m, "WeightTag")
      .value("gamma_raw", WeightTag::gamma_raw)
      .value("gamma_normalized", WeightTag::gamma_normalized)
      .value("theta_hat", WeightTag::theta_hat)
      .value("theta_proj", WeightTag::theta_proj);

  py::class_<WeightVector>(m, "WeightVector")
      .def(py::init([](std::vector<std::string> ids, std::vector<double> vals,
                       WeightTag tag) {
             return WeightVector{std::move(ids), std::move(vals), tag};
           }),
           py::arg("domain_ids"), py::arg("values"),
           py::arg("tag") = WeightTag::gamma_raw)
      .def_readonly("domain_ids", &WeightVector::domain_ids)
      .def_readonly("values", &WeightVector::values)
      .def_readonly("tag", &WeightVector::tag);

  py::class_<GammaEstimate>(m, "GammaEstimate")
      .def_readonly("raw", &GammaEstimate::raw)
      .def_readonly("normalized", &GammaEstimate::normalized);

  m.def("gamma_estimate", &gamma_estimate, py::arg("matrix"),
        py::arg("scores"));
  m.def(
      "spearman_estimate",
      [](const LossMatrix& X, const BenchmarkScores& y) {
        return spearman_estimate(X, y);
      },
      py::arg("matrix"), py::arg("scores"));
  m.def("theta_from_gamma", &theta_from_gamma, py::arg("gamma"));
  m.def("mean_loss_predictor", &mean_loss_predictor, py::arg("matrix"));
  m.def("rank_transform", [](const std::vector<double>& column) {
    const RankColumn rc = rank_transform(column);
    return py::make_tuple(rc.ranks, rc.ecdf);
  });

  py::class_<CapVector>(m, "CapVector")
      .def(py::init([](std::vector<std::string> ids, std::vector<double> tau) {
             return CapVector{std::move(ids), std::move(tau), false};
           }),
           py::arg("domain_ids"), py::arg("tau"))
      .def_readonly("domain_ids", &CapVector::domain_ids)
      .def_readonly("tau", &CapVector::tau)
      .def_readonly("infeasible", &CapVector::infeasible);

  m.def("compute_tau", &compute_tau, py::arg("inventory"),
        py::arg("total_budget"));
  m.def("linear_project", &linear_project, py::arg("weights"),
        py::arg("caps"));
  m.def("quadratic_project", &quadratic_project, py::arg("weights"),
        py::arg("caps"), py::arg("tol") = 1e-10);

  py::class_<SelectionRow>(m, "SelectionRow")
      .def_readonly("domain_id", &SelectionRow::domain_id)
      .def_readonly("gamma", &SelectionRow::gamma)
      .def_readonly("rank", &SelectionRow::rank)
      .def_readonly("tokens_available", &SelectionRow::tokens_available)
      .def_readonly("tokens_selected", &SelectionRow::tokens_selected);

  py::class_<SelectionPlan>(m, "SelectionPlan")
      .def_readonly("rows", &SelectionPlan::rows)
      .def_readonly("budget", &SelectionPlan::budget)
      .def_readonly("total_selected", &SelectionPlan::total_selected);

  m.def("select_domains", &select_domains, py::arg("scores"),
        py::arg("inventory"), py::arg("budget"));

  py::class_<Page>(m, "Page")
      .def(py::init([](std::string domain_id, std::string page_id,
                       std::string text, std::int64_t token_count) {
             return Page{std::move(domain_id), std::move(page_id),
                         std::move(text), token_count};
           }),
           py::arg("domain_id"), py::arg("page_id"), py::arg("text"),
           py::arg("token_count"))
      .def_readonly("domain_id", &Page::domain_id)
      .def_readonly("page_id", &Page::page_id)
      .def_readonly("text", &Page::text)
      .def_readonly("token_count", &Page::token_count);

  py::class_<TrainOptions>(m, "TrainOptions")
      .def(py::init<>())
      .def_readwrite("feature_dim", &TrainOptions::feature_dim)
      .def_readwrite("hash_seed", &TrainOptions::hash_seed)
      .def_readwrite("seed", &TrainOptions::seed)
      .def_readwrite("epochs", &TrainOptions::epochs)
      .def_readwrite("learning_rate", &TrainOptions::learning_rate);

  py::class_<ClassifierModel>(m, "ClassifierModel")
      .def_readonly("feature_dim", &ClassifierModel::feature_dim)
      .def_readonly("bias", &ClassifierModel::bias)
      .def_readonly("epoch_losses", &ClassifierModel::epoch_losses)
      .def("save", &ClassifierModel::save_file, py::arg("path"))
      .def_static("load", &ClassifierModel::load_file, py::arg("path"));

  m.def("train_classifier", &train_classifier, py::arg("positives"),
        py::arg("negatives"), py::arg("options") = TrainOptions{});
  m.def("score_page", &score_page, py::arg("model"), py::arg("text"));

  py::class_<FilterResult>(m, "FilterResult")
      .def_readonly("kept_page_ids", &FilterResult::kept_page_ids)
      .def_readonly("kept_scores", &FilterResult::kept_scores)
      .def_readonly("tokens_kept", &FilterResult::tokens_kept);

  m.def("filter_pages", &filter_pages, py::arg("model"), py::arg("pages"),
        py::arg("token_budget"));

  py::enum_<Estimator>(m, "Estimator")
      .value("gamma", Estimator::gamma)
      .value("spearman", Estimator::spearman);
  py::enum_<Projection>(m, "Projection")
      .value("linear", Projection::linear)
      .value("quadratic", Projection::quadratic);

  py::class_<EvalOptions>(m, "EvalOptions")
      .def(py::init<>())
      .def_readwrite("kfold", &EvalOptions::kfold)
      .def_readwrite("seed", &EvalOptions::seed)
      .def_readwrite("estimator", &EvalOptions::estimator)
      .def_readwrite("projection", &EvalOptions::projection);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("r2_rank", &EvalReport::r2_rank)
      .def_readonly("r2_pearson", &EvalReport::r2_pearson)
      .def_readonly("fold_r2", &EvalReport::fold_r2)
      .def_readonly("kfold", &EvalReport::kfold)
      .def_readonly("seed", &EvalReport::seed)
      .def_readonly("method", &EvalReport::method)
      .def_readonly("model_ids", &EvalReport::model_ids)
      .def_readonly("predicted", &EvalReport::predicted)
      .def_readonly("predicted_rank", &EvalReport::predicted_rank)
      .def_readonly("actual_rank", &EvalReport::actual_rank)
      .def_readonly("fold_of_model", &EvalReport::fold_of_model);

  m.def("predict_rank_score", &predict_rank_score, py::arg("theta"),
        py::arg("losses"), py::arg("reference"));
  m.def("fold_assignment", &fold_assignment, py::arg("model_ids"),
        py::arg("k"), py::arg("seed"));
  m.def("kfold_rank_r2", &kfold_rank_r2, py::arg("matrix"), py::arg("scores"),
        py::arg("caps"), py::arg("options") = EvalOptions{});
  m.def("baseline_rank_r2", &baseline_rank_r2, py::arg("matrix"),
        py::arg("scores"), py::arg("options") = EvalOptions{});

  py::enum_<LinkFn>(m, "LinkFn")
      .value("identity", LinkFn::identity)
      .value("sigmoid", LinkFn::sigmoid)
      .value("cube_plus_linear", LinkFn::cube_plus_linear);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_models", &SimConfig::n_models)
      .def_readwrite("n_domains", &SimConfig::n_domains)
      .def_readwrite("theta_star", &SimConfig::theta_star)
      .def_readwrite("sigma", &SimConfig::sigma)
      .def_readwrite("sigma1", &SimConfig::sigma1)
      .def_readwrite("sigma2", &SimConfig::sigma2)
      .def_readwrite("link", &SimConfig::link)
      .def_readwrite("seed", &SimConfig::seed);

  py::class_<SimData>(m, "SimData")
      .def_readonly("X", &SimData::X)
      .def_readonly("scores", &SimData::scores);

  m.def("generate", &generate, py::arg("config"));

  py::class_<TheoremCell>(m, "TheoremCell")
      .def_readonly("domain", &TheoremCell::domain)
      .def_readonly("empirical", &TheoremCell::empirical)
      .def_readonly("analytic", &TheoremCell::analytic)
      .def_readonly("std_err", &TheoremCell::std_err)
      .def_readonly("deviation_se", &TheoremCell::deviation_se)
      .def_readonly("pass_", &TheoremCell::pass);

  py::class_<TheoremReport>(m, "TheoremReport")
      .def_readonly("cells", &TheoremReport::cells)
      .def_readonly("trials", &TheoremReport::trials)
      .def_readonly("all_pass", &TheoremReport::all_pass);

  m.def("mc_check_theorem1", &mc_check_theorem1, py::arg("config"),
        py::arg("trials"), py::arg("threads") = 1);

  py::class_<CorollaryReport>(m, "CorollaryReport")
      .def_readonly("mean_low", &CorollaryReport::mean_low)
      .def_readonly("mean_high", &CorollaryReport::mean_high)
      .def_readonly("diff", &CorollaryReport::diff)
      .def_readonly("std_err", &CorollaryReport::std_err)
      .def_readonly("pairs", &CorollaryReport::pairs)
      .def_readonly("vacuous", &CorollaryReport::vacuous)
      .def_readonly("pass_", &CorollaryReport::pass);

  m.def("mc_check_corollary1", &mc_check_corollary1, py::arg("config"),
        py::arg("trials"), py::arg("threads") = 1);

  py::class_<RecoveryReport>(m, "RecoveryReport")
      .def_readonly("rho", &RecoveryReport::rho)
      .def_readonly("ell2_error", &RecoveryReport::ell2_error)
      .def_readonly("rho_defined", &RecoveryReport::rho_defined)
      .def_readonly("repeats", &RecoveryReport::repeats);

  m.def("recovery_report", &recovery_report, py::arg("config"),
        py::arg("use_spearman") = false, py::arg("repeats") = 1);

  py::enum_<PcaAxis>(m, "PcaAxis")
      .value("models_as_examples", PcaAxis::models_as_examples)
      .value("domains_as_examples", PcaAxis::domains_as_examples);

  py::class_<PcaOptions>(m, "PcaOptions")
      .def(py::init<>())
      .def_readwrite("axis", &PcaOptions::axis)
      .def_readwrite("n_components", &PcaOptions::n_components)
      .def_readwrite("center", &PcaOptions::center)
      .def_readwrite("standardize", &PcaOptions::standardize)
      .def_readwrite("normalize_rows", &PcaOptions::normalize_rows);

  py::class_<PcaResult>(m, "PcaResult")
      .def_readonly("example_ids", &PcaResult::example_ids)
      .def_readonly("feature_ids", &PcaResult::feature_ids)
      .def_readonly("n_components", &PcaResult::n_components)
      .def_readonly("components", &PcaResult::components)
      .def_readonly("eigenvalues", &PcaResult::eigenvalues)
      .def_readonly("scores", &PcaResult::scores);

  m.def("pca", &pca, py::arg("matrix"), py::arg("options") = PcaOptions{});
}
