#include "uplift/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "uplift/errors.hpp"
#include "uplift/kernels.hpp"
#include "uplift/qini.hpp"
#include "uplift/stats.hpp"

namespace uplift {

namespace {

constexpr int kMaxOuter = 60;
constexpr int kMaxPasses = 2000;
constexpr double kKktTol = 1e-8;
constexpr double kInnerTol = 1e-11;
constexpr double kWeightFloor = 1e-10;

double soft_threshold(double u, double lambda) {
  if (u > lambda) return u - lambda;
  if (u < -lambda) return u + lambda;
  return 0.0;
}

// Numerator of the coordinate update. lambda_max is derived from this exact
// expression at the warm-start point, which is what makes the lambda_max
// solution all-zero without a tolerance.
double coord_numerator(const Matrix& Xs, std::span<const double> w,
                       std::span<const double> e, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i < Xs.rows(); ++i) s += w[i] * Xs(i, j) * e[i];
  return s;
}

struct Standardized {
  Matrix X;                    // column 0 is the intercept
  std::vector<double> mean;    // per design column (0 for the intercept)
  std::vector<double> scale;   // population sd; 0 marks an excluded column
};

Standardized standardize(const DesignMatrix& design) {
  const Matrix& X = design.values;
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  Standardized s;
  s.X = Matrix(n, d);
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) s.X(i, 0) = 1.0;
  s.scale[0] = 1.0;
  for (std::size_t j = 1; j < d; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += X(i, j);
    mu /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dlt = X(i, j) - mu;
      ss += dlt * dlt;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[j] = mu;
    s.scale[j] = sd;
    if (sd > 0.0) {
      for (std::size_t i = 0; i < n; ++i) s.X(i, j) = (X(i, j) - mu) / sd;
    }
  }
  return s;
}

}  // namespace

LassoPath lasso_path(const UpliftDataset& train,
                     std::span<const std::string> predictors,
                     const LassoOptions& options) {
  if (options.lambda_grid.empty() && options.nb_lambda < 2) {
    throw ArgError("lasso_path: nb_lambda must be at least 2");
  }
  for (double l : options.lambda_grid) {
    if (!(l > 0.0)) throw ArgError("lasso_path: lambda values must be positive");
  }

  const DesignMatrix design = build_design(train, predictors, true);
  const std::size_t n = design.values.rows();
  const std::size_t d = design.values.cols();
  const auto& y = train.outcome01();

  LassoPath path;
  path.design_columns = design.column_names;

  Standardized std_design = standardize(design);
  const Matrix& Xs = std_design.X;
  std::vector<bool> included(d, false);
  for (std::size_t j = 1; j < d; ++j) {
    included[j] = std_design.scale[j] > 0.0;
    if (!included[j]) {
      path.warnings.push_back("column '" + design.column_names[j] +
                              "' is constant and cannot enter the model");
    }
  }

  std::size_t ones = 0;
  for (std::uint8_t v : y) ones += v;
  if (ones == 0 || ones == n) {
    throw ValidationError("lasso_path: outcome is constant");
  }
  const double ybar = static_cast<double>(ones) / static_cast<double>(n);

  std::vector<double> b(d, 0.0);
  b[0] = stats::logit(ybar);

  std::vector<double> eta(n), p(n), w(n), e(n), resid(n), grad(d), v(d);

  auto refresh = [&]() {
    kernels::linear_predictor(Xs, b, eta);
    kernels::logistic_probs(eta, p);
    for (std::size_t i = 0; i < n; ++i) resid[i] = static_cast<double>(y[i]) - p[i];
    kernels::column_dots(Xs, resid, grad);
    for (std::size_t j = 0; j < d; ++j) grad[j] /= static_cast<double>(n);
  };

  auto quadratic = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::max(p[i] * (1.0 - p[i]), kWeightFloor);
      e[i] = resid[i] / w[i];
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (j > 0 && !included[j]) continue;
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) ss += w[i] * Xs(i, j) * Xs(i, j);
      v[j] = ss / static_cast<double>(n);
    }
  };

  std::vector<double> lambdas = options.lambda_grid;
  if (lambdas.empty()) {
    refresh();
    quadratic();
    double lambda_max = 0.0;
    for (std::size_t j = 1; j < d; ++j) {
      if (!included[j]) continue;
      lambda_max = std::max(
          lambda_max, std::abs(coord_numerator(Xs, w, e, j) / static_cast<double>(n)));
    }
    if (lambda_max <= 0.0) {
      lambda_max = 1e-12;
      path.warnings.push_back("lambda_max is zero; the grid is degenerate");
    }
    const int L = options.nb_lambda;
    for (int k = 0; k < L; ++k) {
      lambdas.push_back(lambda_max * std::pow(options.lambda_min_ratio,
                                              static_cast<double>(k) /
                                                  static_cast<double>(L - 1)));
    }
  } else {
    std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());
  }
  path.lambdas = lambdas;

  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lambda = lambdas[k];
    bool converged = false;
    for (int outer = 0; outer < kMaxOuter; ++outer) {
      refresh();
      double viol = std::abs(grad[0]);
      for (std::size_t j = 1; j < d; ++j) {
        if (!included[j]) continue;
        if (b[j] == 0.0) {
          viol = std::max(viol, std::abs(grad[j]) - lambda);
        } else {
          viol = std::max(viol, std::abs(grad[j] - lambda * (b[j] > 0 ? 1.0 : -1.0)));
        }
      }
      if (viol <= kKktTol) {
        converged = true;
        break;
      }

      quadratic();
      for (int pass = 0; pass < kMaxPasses; ++pass) {
        double max_delta = 0.0;
        for (std::size_t j = 1; j < d; ++j) {
          if (!included[j]) continue;
          const double u =
              coord_numerator(Xs, w, e, j) / static_cast<double>(n) + v[j] * b[j];
          const double bj = soft_threshold(u, lambda) / v[j];
          if (bj != b[j]) {
            const double delta = bj - b[j];
            for (std::size_t i = 0; i < n; ++i) e[i] -= Xs(i, j) * delta;
            max_delta = std::max(max_delta, std::abs(delta));
            b[j] = bj;
          }
        }
        const double u0 =
            coord_numerator(Xs, w, e, 0) / static_cast<double>(n) + v[0] * b[0];
        const double b0 = u0 / v[0];
        if (b0 != b[0]) {
          const double delta = b0 - b[0];
          for (std::size_t i = 0; i < n; ++i) e[i] -= delta;
          max_delta = std::max(max_delta, std::abs(delta));
          b[0] = b0;
        }
        if (max_delta < kInnerTol) break;
      }
    }
    if (!converged) {
      path.warnings.push_back("lambda " + format_double(lambda) +
                              ": coordinate descent did not meet the KKT tolerance");
    }

    std::vector<double> coef(d, 0.0);
    double intercept = b[0];
    for (std::size_t j = 1; j < d; ++j) {
      if (!included[j] || b[j] == 0.0) continue;
      coef[j] = b[j] / std_design.scale[j];
      intercept -= b[j] * std_design.mean[j] / std_design.scale[j];
    }
    coef[0] = intercept;
    std::vector<std::string> active;
    for (std::size_t j = 1; j < d; ++j) {
      if (coef[j] != 0.0) active.push_back(design.column_names[j]);
    }
    path.coefficient_sets.push_back(std::move(coef));
    path.active_sets.push_back(std::move(active));
  }
  return path;
}

QiniScan best_features(const UpliftDataset& ds,
                       std::span<const std::string> predictors,
                       const BestFeaturesOptions& options) {
  if (options.nb_group < 2) {
    throw ArgError("best_features: nb_group must be at least 2");
  }

  QiniScan scan;
  const UpliftDataset* fit_ds = &ds;
  const UpliftDataset* score_ds = &ds;
  std::optional<SplitResult> split;
  if (options.validation) {
    if (!(options.p > 0.0 && options.p < 1.0)) {
      throw ArgError("best_features: holdout fraction p must be in (0, 1)");
    }
    split = split_uplift(
        ds, SplitConfig{1.0 - options.p,
                        {ds.treat_name(), ds.outcome_name()},
                        options.seed});
    for (const std::string& wmsg : split->warnings) scan.warnings.push_back(wmsg);
    fit_ds = &split->train;
    score_ds = &split->valid;
  }

  LassoOptions lasso_opt;
  lasso_opt.nb_lambda = options.nb_lambda;
  lasso_opt.lambda_grid = options.lambda_grid;
  const LassoPath path = lasso_path(*fit_ds, predictors, lasso_opt);
  for (const std::string& wmsg : path.warnings) scan.warnings.push_back(wmsg);

  scan.lambdas = path.lambdas;
  const auto& y = score_ds->outcome01();
  const auto& t = score_ds->treat01();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < path.lambdas.size(); ++k) {
    InteractionFit fit;
    fit.model.columns = path.design_columns;
    fit.model.coefficients = path.coefficient_sets[k];
    fit.model.converged = true;
    const std::vector<double> scores = inter_uplift_scores(fit, *score_ds);
    const double q = qini_area(qini_table(y, t, scores, options.nb_group)).q;
    scan.q_values.push_back(q);
    scan.active_sizes.push_back(path.active_sets[k].size());
    if (q > scan.q_values[best_k]) best_k = k;
  }

  scan.best_lambda = scan.lambdas[best_k];
  scan.best_q = scan.q_values[best_k];
  scan.selected_terms = path.active_sets[best_k];
  if (scan.selected_terms.empty()) {
    scan.warnings.push_back(
        "the best lambda selects no terms; the model is intercept-only");
  }
  return scan;
}

InteractionFit refit_selected(const UpliftDataset& train,
                              std::span<const std::string> selected_terms) {
  return inter_uplift_fit_terms(train, selected_terms);
}

}  // namespace uplift
