#include "perpcor/pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "perpcor/error.hpp"

namespace perpcor {

PcaResult pca(const LossMatrix& X, const PcaOptions& opts) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(X.n_models()),
                    static_cast<Eigen::Index>(X.n_domains()));
  for (std::size_t i = 0; i < X.n_models(); ++i)
    for (std::size_t j = 0; j < X.n_domains(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          X.at(i, j);

  if (opts.normalize_rows)
    M.colwise() -= M.rowwise().mean();

  Eigen::MatrixXd A = opts.axis == PcaAxis::models_as_examples
                          ? M
                          : Eigen::MatrixXd(M.transpose());
  const Eigen::Index n = A.rows();  // examples
  const Eigen::Index f = A.cols();  // features
  if (n < 2) throw ValidationError("pca: need at least 2 examples");
  if (opts.n_components < 1 || opts.n_components > std::min(n, f))
    throw ValidationError("pca: n_components must be in [1, min(N, D)]");

  if (opts.center) A.rowwise() -= A.colwise().mean();
  if (opts.standardize) {
    for (Eigen::Index j = 0; j < f; ++j) {
      const double sd = std::sqrt(A.col(j).squaredNorm() /
                                  static_cast<double>(n - 1));
      if (sd > 0.0) A.col(j) /= sd;
    }
  }

  const Eigen::Index spectrum = std::min(n, f);
  Eigen::VectorXd eigenvalues(spectrum);
  Eigen::MatrixXd components(opts.n_components, f);

  if (f <= n) {
    // Feature-side covariance: eigenvectors live directly in feature space.
    const Eigen::MatrixXd cov = A.transpose() * A / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
      throw NumericalError("pca: eigendecomposition failed");
    for (Eigen::Index k = 0; k < spectrum; ++k) {
      eigenvalues(k) = std::max(solver.eigenvalues()(f - 1 - k), 0.0);
      if (k < opts.n_components)
        components.row(k) = solver.eigenvectors().col(f - 1 - k).transpose();
    }
  } else {
    // Gram trick: the example-side matrix shares the nonzero spectrum;
    // feature-space eigenvectors are recovered as A^T u / sqrt((n-1) λ).
    const Eigen::MatrixXd gram = A * A.transpose() / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success)
      throw NumericalError("pca: eigendecomposition failed");
    for (Eigen::Index k = 0; k < spectrum; ++k)
      eigenvalues(k) = std::max(solver.eigenvalues()(n - 1 - k), 0.0);
    for (Eigen::Index k = 0; k < opts.n_components; ++k) {
      Eigen::VectorXd v =
          A.transpose() * solver.eigenvectors().col(n - 1 - k);
      const double norm = v.norm();
      if (norm > 1e-12)
        v /= norm;
      else
        v.setZero();
      components.row(k) = v.transpose();
    }
  }

  // Orient each component so its largest-magnitude entry is positive.
  for (Eigen::Index k = 0; k < opts.n_components; ++k) {
    Eigen::Index arg = 0;
    components.row(k).cwiseAbs().maxCoeff(&arg);
    if (components(k, arg) < 0.0) components.row(k) = -components.row(k);
  }

  const Eigen::MatrixXd scores = A * components.transpose();

  PcaResult out;
  out.example_ids = opts.axis == PcaAxis::models_as_examples ? X.model_ids
                                                             : X.domain_ids;
  out.feature_ids = opts.axis == PcaAxis::models_as_examples ? X.domain_ids
                                                             : X.model_ids;
  out.n_components = static_cast<std::size_t>(opts.n_components);
  out.eigenvalues.assign(eigenvalues.data(),
                         eigenvalues.data() + eigenvalues.size());
  out.components.reserve(static_cast<std::size_t>(components.size()));
  for (Eigen::Index k = 0; k < components.rows(); ++k)
    for (Eigen::Index j = 0; j < components.cols(); ++j)
      out.components.push_back(components(k, j));
  out.scores.reserve(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i)
    for (Eigen::Index k = 0; k < scores.cols(); ++k)
      out.scores.push_back(scores(i, k));
  return out;
}

}  // namespace perpcor
