#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace uplift::cli {

// One parsed invocation. Defaults mirror the reference signatures:
// nb_group=10, nb_lambda=100, alpha=0.05, n_min=30 (binning),
// p=0.3 (selection holdout).
struct RunConfig {
  std::string subcommand;
  std::string data;
  std::string outcome = "outcome";
  std::string treat = "treat";
  std::vector<std::string> predictors;
  std::string estimator = "dual";
  int nb_group = 10;
  int nb_lambda = 100;
  double alpha = 0.05;
  int n_split = 10;
  int n_min = 30;
  double p = 0.3;
  bool validation = false;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  std::string model_path;
  std::string prediction_column;
  std::string x;
  std::string var1, var2;
  std::string apply_path;
  std::vector<std::string> strata;
};

// Entry point used by main() and the tests. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uplift::cli
