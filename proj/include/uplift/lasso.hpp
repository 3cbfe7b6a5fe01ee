#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uplift/dataset.hpp"
#include "uplift/estimators.hpp"

namespace uplift {

struct LassoOptions {
  int nb_lambda = 100;
  double lambda_min_ratio = 1e-4;
  // When non-empty, replaces the automatic log-spaced grid.
  std::vector<double> lambda_grid;
};

struct LassoPath {
  std::vector<std::string> design_columns;  // interaction design, intercept first
  std::vector<double> lambdas;              // decreasing
  // One coefficient vector per lambda, aligned with design_columns, on the
  // original covariate scale.
  std::vector<std::vector<double>> coefficient_sets;
  // Names of the nonzero penalized columns per lambda.
  std::vector<std::vector<std::string>> active_sets;
  std::vector<std::string> warnings;
};

// L1-penalized logistic regression on the interaction design
// (intercept + predictors + treatment + treatment:predictor products), the
// intercept unpenalized. Columns are standardized internally; the grid runs
// from lambda_max (smallest lambda with an all-zero penalized solution) down
// by the given ratio, with warm starts.
LassoPath lasso_path(const UpliftDataset& train,
                     std::span<const std::string> predictors,
                     const LassoOptions& options = {});

struct BestFeaturesOptions {
  int nb_lambda = 100;
  int nb_group = 10;
  // When true, a stratified (treat, outcome) split leaves fraction p of the
  // data out of the penalized fits and scores the path on that holdout.
  bool validation = false;
  double p = 0.3;
  std::uint64_t seed = 0;
  std::vector<double> lambda_grid;
};

struct QiniScan {
  std::vector<double> lambdas;
  std::vector<double> q_values;
  std::vector<std::size_t> active_sizes;
  double best_lambda = 0.0;
  double best_q = 0.0;
  std::vector<std::string> selected_terms;
  std::vector<std::string> warnings;
};

// Scores every lambda on the path by the Qini coefficient of its interaction
// model and keeps the argmax (ties go to the larger lambda).
QiniScan best_features(const UpliftDataset& ds,
                       std::span<const std::string> predictors,
                       const BestFeaturesOptions& options = {});

// Unpenalized interaction model restricted to the selected terms.
InteractionFit refit_selected(const UpliftDataset& train,
                              std::span<const std::string> selected_terms);

}  // namespace uplift
