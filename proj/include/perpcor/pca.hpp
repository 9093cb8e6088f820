#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perpcor/types.hpp"

namespace perpcor {

enum class PcaAxis { models_as_examples, domains_as_examples };

struct PcaOptions {
  PcaAxis axis = PcaAxis::models_as_examples;
  std::int64_t n_components = 2;
  bool center = true;
  bool standardize = false;      // divide centered features by sample std
  bool normalize_rows = false;   // subtract per-model mean from X first
};

struct PcaResult {
  std::vector<std::string> example_ids;  // models or domains, per axis
  std::vector<std::string> feature_ids;  // the other axis
  std::size_t n_components = 0;
  std::vector<double> components;   // n_components x n_features, row-major
  std::vector<double> eigenvalues;  // full spectrum, descending, >= 0
  std::vector<double> scores;       // n_examples x n_components, row-major
};

// PCA via eigendecomposition of the smaller-dimension sample covariance
// (1/(n-1) convention). Components are orthonormal rows oriented so each
// one's largest-magnitude entry is positive; scores = centered data times
// components. Requires 2 <= n_examples and
// n_components <= min(n_examples, n_features).
PcaResult pca(const LossMatrix& X, const PcaOptions& opts = {});

}  // namespace perpcor
