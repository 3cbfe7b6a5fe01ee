#include "uplift/design.hpp"

#include <set>

#include "uplift/errors.hpp"

namespace uplift {

namespace {

void check_unique(std::span<const std::string> names, const char* what) {
  std::set<std::string> seen;
  for (const std::string& n : names) {
    if (!seen.insert(n).second) {
      throw ArgError(std::string(what) + " '" + n + "' listed twice");
    }
  }
}

void fill_column(Matrix& X, std::size_t j, std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) X(i, j) = v[i];
}

}  // namespace

DesignMatrix build_design(const UpliftDataset& ds,
                          std::span<const std::string> predictors,
                          bool with_treat_interactions) {
  check_unique(predictors, "predictor");
  const std::string& treat = ds.treat_name();
  if (with_treat_interactions) {
    for (const std::string& p : predictors) {
      if (p == treat) {
        throw ArgError("predictor '" + p + "' is the treatment column");
      }
    }
  }

  const std::size_t d = predictors.size();
  const std::size_t ncol = 1 + d + (with_treat_interactions ? 1 + d : 0);
  DesignMatrix out;
  out.values = Matrix(ds.n(), ncol);
  out.column_names.reserve(ncol);
  out.column_names.push_back("(Intercept)");
  for (std::size_t i = 0; i < ds.n(); ++i) out.values(i, 0) = 1.0;

  std::size_t j = 1;
  for (const std::string& p : predictors) {
    fill_column(out.values, j, ds.numeric(p));
    out.column_names.push_back(p);
    out.terms.mains.push_back(p);
    ++j;
  }
  if (with_treat_interactions) {
    const auto& t = ds.treat01();
    for (std::size_t i = 0; i < ds.n(); ++i) out.values(i, j) = t[i];
    out.column_names.push_back(treat);
    out.terms.treat = treat;
    ++j;
    for (const std::string& p : predictors) {
      const auto v = ds.numeric(p);
      for (std::size_t i = 0; i < ds.n(); ++i) {
        out.values(i, j) = t[i] ? v[i] : 0.0;
      }
      out.column_names.push_back(treat + ":" + p);
      out.terms.interactions.push_back(p);
      ++j;
    }
  }
  return out;
}

DesignMatrix build_design_terms(const UpliftDataset& ds,
                                std::span<const std::string> terms) {
  check_unique(terms, "term");
  const std::string& treat = ds.treat_name();
  const std::string prefix = treat + ":";

  DesignMatrix out;
  out.values = Matrix(ds.n(), 1 + terms.size());
  out.column_names.reserve(1 + terms.size());
  out.column_names.push_back("(Intercept)");
  for (std::size_t i = 0; i < ds.n(); ++i) out.values(i, 0) = 1.0;

  const auto& t = ds.treat01();
  std::size_t j = 1;
  for (const std::string& term : terms) {
    if (term == treat) {
      for (std::size_t i = 0; i < ds.n(); ++i) out.values(i, j) = t[i];
      out.terms.treat = treat;
    } else if (term.rfind(prefix, 0) == 0) {
      const std::string feature = term.substr(prefix.size());
      const auto v = ds.numeric(feature);
      for (std::size_t i = 0; i < ds.n(); ++i) {
        out.values(i, j) = t[i] ? v[i] : 0.0;
      }
      out.terms.interactions.push_back(feature);
    } else {
      fill_column(out.values, j, ds.numeric(term));
      out.terms.mains.push_back(term);
    }
    out.column_names.push_back(term);
    ++j;
  }
  return out;
}

}  // namespace uplift
