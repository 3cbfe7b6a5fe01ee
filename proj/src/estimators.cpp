#include "uplift/estimators.hpp"

#include <numeric>

#include "uplift/errors.hpp"
#include "uplift/kernels.hpp"

namespace uplift {

namespace {

std::vector<double> probabilities(const FittedLogistic& fit, const DesignMatrix& X) {
  std::vector<double> eta(X.values.rows()), p(X.values.rows());
  kernels::linear_predictor(X.values, fit.coefficients, eta);
  kernels::logistic_probs(eta, p);
  return p;
}

std::vector<std::string> non_intercept_columns(const FittedLogistic& fit) {
  if (fit.columns.empty() || fit.columns.front() != "(Intercept)") {
    throw ValidationError("model does not start with an intercept column");
  }
  return {fit.columns.begin() + 1, fit.columns.end()};
}

UpliftDataset force_treatment(const UpliftDataset& ds, double value) {
  return ds.with_column(
      Column::num(ds.treat_name(), std::vector<double>(ds.n(), value)));
}

}  // namespace

TwoModelFit dual_uplift_fit(const UpliftDataset& train,
                            std::span<const std::string> predictors) {
  const auto& t = train.treat01();
  std::vector<std::size_t> control_rows, treated_rows;
  for (std::size_t i = 0; i < train.n(); ++i) {
    (t[i] ? treated_rows : control_rows).push_back(i);
  }
  if (control_rows.empty()) {
    throw ValidationError("dual_uplift_fit: the control group is empty");
  }
  if (treated_rows.empty()) {
    throw ValidationError("dual_uplift_fit: the treated group is empty");
  }
  const std::size_t ncol = 1 + predictors.size();
  if (control_rows.size() <= ncol || treated_rows.size() <= ncol) {
    throw ArgError("dual_uplift_fit: a treatment group has too few rows for " +
                   std::to_string(ncol) + " design columns (control " +
                   std::to_string(control_rows.size()) + ", treated " +
                   std::to_string(treated_rows.size()) + ")");
  }

  TwoModelFit fit;
  fit.predictors.assign(predictors.begin(), predictors.end());
  const UpliftDataset control = train.subset(control_rows);
  const UpliftDataset treated = train.subset(treated_rows);
  fit.control = fit_logistic(build_design(control, predictors, false),
                             control.outcome01());
  fit.treated = fit_logistic(build_design(treated, predictors, false),
                             treated.outcome01());
  return fit;
}

InteractionFit inter_uplift_fit(const UpliftDataset& train,
                                std::span<const std::string> predictors) {
  const DesignMatrix design = build_design(train, predictors, true);
  InteractionFit fit;
  fit.terms = design.terms;
  fit.model = fit_logistic(design, train.outcome01());
  return fit;
}

InteractionFit inter_uplift_fit_terms(const UpliftDataset& train,
                                      std::span<const std::string> terms) {
  const DesignMatrix design = build_design_terms(train, terms);
  InteractionFit fit;
  fit.terms = design.terms;
  fit.model = fit_logistic(design, train.outcome01());
  return fit;
}

std::vector<double> dual_uplift_scores(const TwoModelFit& fit, const UpliftDataset& ds) {
  const std::vector<std::string> predictors = non_intercept_columns(fit.control);
  const DesignMatrix X = build_design(ds, predictors, false);
  const std::vector<double> p1 = probabilities(fit.treated, X);
  const std::vector<double> p0 = probabilities(fit.control, X);
  std::vector<double> u(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) u[i] = p1[i] - p0[i];
  return u;
}

std::vector<double> inter_uplift_scores(const InteractionFit& fit,
                                        const UpliftDataset& ds) {
  const std::vector<std::string> terms = non_intercept_columns(fit.model);
  const DesignMatrix X1 = build_design_terms(force_treatment(ds, 1.0), terms);
  const DesignMatrix X0 = build_design_terms(force_treatment(ds, 0.0), terms);
  const std::vector<double> p1 = probabilities(fit.model, X1);
  const std::vector<double> p0 = probabilities(fit.model, X0);
  std::vector<double> u(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) u[i] = p1[i] - p0[i];
  return u;
}

UpliftDataset dual_predict(const TwoModelFit& fit, const UpliftDataset& ds) {
  return ds.with_column(Column::num(kPredictionColumn, dual_uplift_scores(fit, ds)));
}

UpliftDataset inter_predict(const InteractionFit& fit, const UpliftDataset& ds) {
  return ds.with_column(Column::num(kPredictionColumn, inter_uplift_scores(fit, ds)));
}

std::vector<double> UpliftModel::scores(const UpliftDataset& ds) const {
  if (dual) return dual_uplift_scores(*dual, ds);
  if (inter) return inter_uplift_scores(*inter, ds);
  throw ValidationError("empty uplift model");
}

UpliftDataset UpliftModel::predict(const UpliftDataset& ds) const {
  return ds.with_column(Column::num(kPredictionColumn, scores(ds)));
}

nlohmann::ordered_json to_json(const UpliftModel& model) {
  nlohmann::ordered_json j;
  j["kind"] = model.kind();
  if (model.dual) {
    j["model_control"] = to_json(model.dual->control);
    j["model_treated"] = to_json(model.dual->treated);
  } else if (model.inter) {
    j["model"] = to_json(model.inter->model);
  } else {
    throw ValidationError("empty uplift model");
  }
  return j;
}

UpliftModel uplift_model_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  UpliftModel model;
  if (kind == "dual") {
    TwoModelFit fit;
    fit.control = fitted_logistic_from_json(j.at("model_control"));
    fit.treated = fitted_logistic_from_json(j.at("model_treated"));
    if (fit.control.columns != fit.treated.columns) {
      throw ValidationError("dual model: control and treated column sets differ");
    }
    fit.predictors = non_intercept_columns(fit.control);
    model.dual = std::move(fit);
  } else if (kind == "interaction") {
    InteractionFit fit;
    fit.model = fitted_logistic_from_json(j.at("model"));
    model.inter = std::move(fit);
  } else {
    throw ValidationError("unknown model kind '" + kind + "'");
  }
  return model;
}

}  // namespace uplift
