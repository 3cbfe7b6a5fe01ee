#include "uplift/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "uplift/errors.hpp"
#include "uplift/kernels.hpp"
#include "uplift/stats.hpp"

namespace uplift {

namespace {

constexpr int kMaxIter = 100;
constexpr int kMaxHalvings = 30;
constexpr double kCoefTol = 1e-8;
constexpr double kWeightFloor = 1e-10;
constexpr double kDivergedCoef = 1e10;

// Least squares min ||A x - b|| via Householder QR on the weighted design.
// Throws when a pivot collapses relative to the column's entry norm.
std::vector<double> qr_solve(Matrix A, std::vector<double> b,
                             const std::vector<std::string>& names) {
  const std::size_t n = A.rows();
  const std::size_t d = A.cols();
  std::vector<double> colnorm(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += A(i, j) * A(i, j);
    colnorm[j] = std::sqrt(s);
  }

  for (std::size_t k = 0; k < d; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += A(i, k) * A(i, k);
    norm = std::sqrt(norm);
    const double scale = colnorm[k] > 0.0 ? colnorm[k] : 1.0;
    if (norm <= 1e-10 * scale) {
      throw NumericError("design column '" + names[k] +
                         "' is collinear with earlier columns");
    }
    const double alpha = A(k, k) >= 0.0 ? -norm : norm;
    std::vector<double> v(n - k);
    v[0] = A(k, k) - alpha;
    for (std::size_t i = k + 1; i < n; ++i) v[i - k] = A(i, k);
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    A(k, k) = alpha;
    for (std::size_t i = k + 1; i < n; ++i) A(i, k) = 0.0;
    if (vnorm2 == 0.0) continue;

    for (std::size_t j = k + 1; j < d; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i - k] * A(i, j);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < n; ++i) A(i, j) -= f * v[i - k];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < n; ++i) dot += v[i - k] * b[i];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t i = k; i < n; ++i) b[i] -= f * v[i - k];
  }

  std::vector<double> x(d, 0.0);
  for (std::size_t k = d; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < d; ++j) s -= A(k, j) * x[j];
    x[k] = s / A(k, k);
  }
  return x;
}

double deviance_at(std::span<const std::uint8_t> y, std::span<const double> eta) {
  return -2.0 * kernels::bernoulli_loglik(y, eta);
}

}  // namespace

double FittedLogistic::coefficient(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return coefficients[j];
  }
  throw ArgError("model has no coefficient '" + name + "'");
}

bool FittedLogistic::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

FittedLogistic fit_logistic(const DesignMatrix& design,
                            std::span<const std::uint8_t> y) {
  const Matrix& X = design.values;
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (y.size() != n) {
    throw ArgError("fit_logistic: outcome length " + std::to_string(y.size()) +
                   " does not match " + std::to_string(n) + " design rows");
  }
  if (n <= d) {
    throw ArgError("fit_logistic: " + std::to_string(n) + " rows cannot identify " +
                   std::to_string(d) + " coefficients");
  }

  FittedLogistic fit;
  fit.columns = design.column_names;
  fit.n_obs = n;

  std::size_t ones = 0;
  for (std::uint8_t v : y) ones += v;
  const double ybar = static_cast<double>(ones) / static_cast<double>(n);
  if (ones == 0 || ones == n) {
    throw ValidationError("fit_logistic: outcome is constant");
  }
  fit.null_deviance = -2.0 * static_cast<double>(n) *
                      (ybar * std::log(ybar) + (1.0 - ybar) * std::log1p(-ybar));

  std::vector<double> beta(d, 0.0);
  std::vector<double> eta(n, 0.0), p(n), w(n), z(n);
  double dev = deviance_at(y, eta);

  for (int it = 1; it <= kMaxIter; ++it) {
    fit.iterations = it;
    kernels::logistic_probs(eta, p);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::max(p[i] * (1.0 - p[i]), kWeightFloor);
      z[i] = eta[i] + (static_cast<double>(y[i]) - p[i]) / w[i];
    }

    Matrix Aw(n, d);
    std::vector<double> bw(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::sqrt(w[i]);
      for (std::size_t j = 0; j < d; ++j) Aw(i, j) = s * X(i, j);
      bw[i] = s * z[i];
    }
    const std::vector<double> target = qr_solve(std::move(Aw), std::move(bw),
                                                design.column_names);

    std::vector<double> candidate(d);
    double newdev = 0.0;
    double step = 1.0;
    bool improved = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (std::size_t j = 0; j < d; ++j) {
        candidate[j] = beta[j] + step * (target[j] - beta[j]);
      }
      kernels::linear_predictor(X, candidate, eta);
      newdev = deviance_at(y, eta);
      if (newdev <= dev + 1e-12) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      fit.warning = "IRLS stalled: step halving failed to reduce the deviance";
      kernels::linear_predictor(X, beta, eta);
      break;
    }

    double delta = 0.0, maxcoef = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      delta = std::max(delta, std::abs(candidate[j] - beta[j]));
      maxcoef = std::max(maxcoef, std::abs(candidate[j]));
    }
    beta = candidate;
    dev = newdev;

    if (maxcoef > kDivergedCoef) {
      fit.warning =
          "coefficients diverged; data are likely separated and the MLE does not exist";
      break;
    }
    if (delta < kCoefTol) {
      fit.converged = true;
      break;
    }
    if (it == kMaxIter) {
      fit.warning = "IRLS did not converge within " + std::to_string(kMaxIter) +
                    " iterations";
    }
  }

  fit.coefficients = std::move(beta);
  fit.deviance = dev;
  return fit;
}

double predict_prob(const FittedLogistic& fit, std::span<const double> row,
                    std::span<const std::string> row_columns) {
  if (row.size() != row_columns.size()) {
    throw ArgError("predict_prob: row has " + std::to_string(row.size()) +
                   " values for " + std::to_string(row_columns.size()) + " names");
  }
  std::map<std::string, double> given;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (!given.emplace(row_columns[j], row[j]).second) {
      throw ArgError("predict_prob: duplicate row column '" + row_columns[j] + "'");
    }
  }
  std::string missing, extra;
  for (const std::string& c : fit.columns) {
    if (!given.count(c)) missing += missing.empty() ? c : ", " + c;
  }
  for (const auto& [name, _] : given) {
    if (!fit.has_column(name)) extra += extra.empty() ? name : ", " + name;
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "predict_prob: row columns do not match the model";
    if (!missing.empty()) msg += "; missing: " + missing;
    if (!extra.empty()) msg += "; extra: " + extra;
    throw ArgError(msg);
  }

  double eta = 0.0;
  for (std::size_t j = 0; j < fit.columns.size(); ++j) {
    eta += fit.coefficients[j] * given.at(fit.columns[j]);
  }
  return stats::logistic(eta);
}

nlohmann::ordered_json to_json(const FittedLogistic& fit) {
  nlohmann::ordered_json j;
  j["columns"] = fit.columns;
  j["coefficients"] = fit.coefficients;
  j["converged"] = fit.converged;
  j["deviance"] = fit.deviance;
  return j;
}

FittedLogistic fitted_logistic_from_json(const nlohmann::json& j) {
  FittedLogistic fit;
  fit.columns = j.at("columns").get<std::vector<std::string>>();
  fit.coefficients = j.at("coefficients").get<std::vector<double>>();
  fit.converged = j.at("converged").get<bool>();
  fit.deviance = j.at("deviance").get<double>();
  if (fit.columns.size() != fit.coefficients.size()) {
    throw ValidationError("model JSON: columns and coefficients differ in length");
  }
  return fit;
}

}  // namespace uplift
