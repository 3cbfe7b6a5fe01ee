#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uplift/dataset.hpp"

namespace uplift {

struct QiniRow {
  double phi = 0.0;  // targeted fraction at this grid point
  std::uint64_t treated = 0;       // cumulative counts among the top phi*n rows
  std::uint64_t treated_resp = 0;
  std::uint64_t control = 0;
  std::uint64_t control_resp = 0;
  double h = 0.0;  // incremental responders, control arm rescaled
  double g = 0.0;  // h relative to the total number of treated
  double group_uplift = 0.0;  // observed uplift inside this panel alone
};

struct QiniTable {
  int nb_group = 0;
  std::vector<QiniRow> rows;
  std::uint64_t total_treated = 0;
  std::uint64_t total_control = 0;
  std::vector<std::string> warnings;
};

struct QiniResult {
  double q = 0.0;      // area between the curve and the random-targeting diagonal
  double q_raw = 0.0;  // trapezoid area under the curve alone
  std::vector<std::pair<double, double>> curve_points;  // (phi, 100*g), from (0,0)
  std::vector<double> bar_values;                       // per-panel uplift * 100
};

// Overall observed uplift: treated response rate minus control response rate.
double overall_uplift(const UpliftDataset& ds);
double overall_uplift(std::span<const std::uint8_t> y, std::span<const std::uint8_t> t);

// Rows are ranked by the prediction column, descending, ties kept in dataset
// order, and cut into nb_group panels at boundaries ceil(j*n/J).
QiniTable qini_table(const UpliftDataset& ds, const std::string& prediction_column,
                     int nb_group);
QiniTable qini_table(std::span<const std::uint8_t> y, std::span<const std::uint8_t> t,
                     std::span<const double> pred, int nb_group);

QiniResult qini_area(const QiniTable& table);

// Percent-scale curve for plotting: (100*phi, 100*g) points plus the straight
// benchmark from the origin to (100, 100*g(1)).
struct QiniCurve {
  std::vector<std::pair<double, double>> points;
  std::pair<double, double> benchmark_end;
};

QiniCurve qini_curve_points(const QiniTable& table);

// Per-panel observed uplift series, panel 1 first.
std::vector<double> qini_bar_data(const QiniTable& table);

}  // namespace uplift
