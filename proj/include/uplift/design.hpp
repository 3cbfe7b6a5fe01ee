#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uplift/dataset.hpp"
#include "uplift/matrix.hpp"

namespace uplift {

// Term structure of a design: main-effect columns, the treatment indicator,
// and the features interacted with it, in design order.
struct TermSpec {
  std::vector<std::string> mains;
  std::optional<std::string> treat;
  std::vector<std::string> interactions;
};

struct DesignMatrix {
  std::vector<std::string> column_names;  // first entry is "(Intercept)"
  Matrix values;
  TermSpec terms;
};

// Intercept + the given numeric predictors; with_treat_interactions adds the
// treatment column and one <treat>:<predictor> product per predictor.
DesignMatrix build_design(const UpliftDataset& ds,
                          std::span<const std::string> predictors,
                          bool with_treat_interactions);

// Intercept + an explicit term list. Terms are feature names, the treatment
// column name, or "<treat>:<feature>" interactions, kept in the given order.
DesignMatrix build_design_terms(const UpliftDataset& ds,
                                std::span<const std::string> terms);

}  // namespace uplift
