#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uplift/design.hpp"

namespace uplift {

struct FittedLogistic {
  std::vector<std::string> columns;
  std::vector<double> coefficients;
  bool converged = false;
  double deviance = 0.0;
  double null_deviance = 0.0;
  int iterations = 0;
  std::size_t n_obs = 0;
  std::optional<std::string> warning;

  double coefficient(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

// Maximum-likelihood logistic regression via iteratively reweighted least
// squares. Each weighted solve goes through Householder QR with a
// rank-deficiency check that names the first collinear column. Steps that
// would increase the deviance are halved; separation surfaces as
// converged=false plus a warning, with coefficients as of the last iterate.
FittedLogistic fit_logistic(const DesignMatrix& design,
                            std::span<const std::uint8_t> y);

// P(y=1) for a single covariate row; row_columns must carry exactly the
// fitted column set (any order).
double predict_prob(const FittedLogistic& fit, std::span<const double> row,
                    std::span<const std::string> row_columns);

// Serialization: {"columns", "coefficients", "converged", "deviance"} with
// round-trip-exact doubles.
nlohmann::ordered_json to_json(const FittedLogistic& fit);
FittedLogistic fitted_logistic_from_json(const nlohmann::json& j);

}  // namespace uplift
