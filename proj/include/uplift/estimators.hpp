#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uplift/dataset.hpp"
#include "uplift/logistic.hpp"

namespace uplift {

inline constexpr const char* kPredictionColumn = "uplift_prediction";

// Two separate logistic models, one per treatment arm, sharing the same
// intercept + predictors design. The uplift estimate is the difference of
// the treated-model and control-model probabilities.
struct TwoModelFit {
  FittedLogistic control;
  FittedLogistic treated;
  std::vector<std::string> predictors;
};

// One logistic model on intercept + predictors + treatment + treatment
// interactions. The uplift estimate contrasts the same model with the
// treatment indicator forced to 1 and to 0.
struct InteractionFit {
  FittedLogistic model;
  TermSpec terms;
};

TwoModelFit dual_uplift_fit(const UpliftDataset& train,
                            std::span<const std::string> predictors);

// mode=all: every predictor enters with a main effect and an interaction.
InteractionFit inter_uplift_fit(const UpliftDataset& train,
                                std::span<const std::string> predictors);

// mode=best: fit exactly the given terms (typically a selected subset).
InteractionFit inter_uplift_fit_terms(const UpliftDataset& train,
                                      std::span<const std::string> terms);

std::vector<double> dual_uplift_scores(const TwoModelFit& fit, const UpliftDataset& ds);
std::vector<double> inter_uplift_scores(const InteractionFit& fit,
                                        const UpliftDataset& ds);

// Scores the dataset and appends (or replaces) the uplift_prediction column.
UpliftDataset dual_predict(const TwoModelFit& fit, const UpliftDataset& ds);
UpliftDataset inter_predict(const InteractionFit& fit, const UpliftDataset& ds);

// Tagged envelope for model files: kind "dual" or "interaction".
struct UpliftModel {
  std::optional<TwoModelFit> dual;
  std::optional<InteractionFit> inter;

  std::string kind() const { return dual ? "dual" : "interaction"; }
  std::vector<double> scores(const UpliftDataset& ds) const;
  UpliftDataset predict(const UpliftDataset& ds) const;
};

nlohmann::ordered_json to_json(const UpliftModel& model);
UpliftModel uplift_model_from_json(const nlohmann::json& j);

}  // namespace uplift
