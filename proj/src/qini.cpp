#include "uplift/qini.hpp"

#include <algorithm>
#include <numeric>

#include "uplift/errors.hpp"

namespace uplift {

double overall_uplift(std::span<const std::uint8_t> y, std::span<const std::uint8_t> t) {
  std::uint64_t nt = 0, nc = 0, rt = 0, rc = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (t[i]) {
      ++nt;
      rt += y[i];
    } else {
      ++nc;
      rc += y[i];
    }
  }
  if (nt == 0) throw ValidationError("overall_uplift: the treated group is empty");
  if (nc == 0) throw ValidationError("overall_uplift: the control group is empty");
  return static_cast<double>(rt) / static_cast<double>(nt) -
         static_cast<double>(rc) / static_cast<double>(nc);
}

double overall_uplift(const UpliftDataset& ds) {
  return overall_uplift(ds.outcome01(), ds.treat01());
}

QiniTable qini_table(std::span<const std::uint8_t> y, std::span<const std::uint8_t> t,
                     std::span<const double> pred, int nb_group) {
  const std::size_t n = y.size();
  if (nb_group < 2) throw ArgError("qini_table: nb_group must be at least 2");
  if (n < static_cast<std::size_t>(nb_group)) {
    throw ArgError("qini_table: " + std::to_string(n) + " rows cannot form " +
                   std::to_string(nb_group) + " panels");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pred[a] > pred[b]; });

  QiniTable table;
  table.nb_group = nb_group;
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i]) {
      ++table.total_treated;
    } else {
      ++table.total_control;
    }
  }
  if (table.total_treated == 0) {
    throw ValidationError("qini_table: the treated group is empty");
  }
  if (table.total_control == 0) {
    throw ValidationError("qini_table: the control group is empty");
  }
  const double total_treated = static_cast<double>(table.total_treated);

  const std::size_t J = static_cast<std::size_t>(nb_group);
  std::uint64_t ct = 0, crt = 0, cc = 0, crc = 0;
  std::size_t pos = 0;
  std::uint64_t prev_rt = 0, prev_rc = 0, prev_nt = 0, prev_nc = 0;
  for (std::size_t j = 1; j <= J; ++j) {
    const std::size_t boundary = (j * n + J - 1) / J;
    for (; pos < boundary; ++pos) {
      const std::size_t i = order[pos];
      if (t[i]) {
        ++ct;
        crt += y[i];
      } else {
        ++cc;
        crc += y[i];
      }
    }
    QiniRow row;
    row.phi = static_cast<double>(boundary) / static_cast<double>(n);
    row.treated = ct;
    row.treated_resp = crt;
    row.control = cc;
    row.control_resp = crc;
    double ratio = 0.0;
    if (cc > 0) {
      ratio = static_cast<double>(ct) / static_cast<double>(cc);
    } else {
      table.warnings.push_back("panel " + std::to_string(j) +
                               ": no control rows among the targeted fraction; the "
                               "rescaling ratio is taken as 0");
    }
    row.h = static_cast<double>(crt) - static_cast<double>(crc) * ratio;
    row.g = row.h / total_treated;

    const std::uint64_t gt = ct - prev_nt, gc = cc - prev_nc;
    const std::uint64_t grt = crt - prev_rt, grc = crc - prev_rc;
    if (gt == 0 || gc == 0) {
      table.warnings.push_back("panel " + std::to_string(j) +
                               ": a treatment arm is empty; its panel uplift is 0");
      row.group_uplift = 0.0;
    } else {
      row.group_uplift = static_cast<double>(grt) / static_cast<double>(gt) -
                         static_cast<double>(grc) / static_cast<double>(gc);
    }
    prev_nt = ct;
    prev_nc = cc;
    prev_rt = crt;
    prev_rc = crc;
    table.rows.push_back(row);
  }
  return table;
}

QiniTable qini_table(const UpliftDataset& ds, const std::string& prediction_column,
                     int nb_group) {
  return qini_table(ds.outcome01(), ds.treat01(), ds.numeric(prediction_column),
                    nb_group);
}

QiniResult qini_area(const QiniTable& table) {
  if (table.rows.empty()) throw ArgError("qini_area: empty table");
  QiniResult res;
  res.curve_points.emplace_back(0.0, 0.0);
  for (const QiniRow& row : table.rows) {
    res.curve_points.emplace_back(row.phi, 100.0 * row.g);
    res.bar_values.push_back(100.0 * row.group_uplift);
  }
  double area = 0.0;
  for (std::size_t k = 1; k < res.curve_points.size(); ++k) {
    const auto& [x0, y0] = res.curve_points[k - 1];
    const auto& [x1, y1] = res.curve_points[k];
    area += 0.5 * (x1 - x0) * (y0 + y1);
  }
  res.q_raw = area;
  res.q = area - 0.5 * res.curve_points.back().second;
  return res;
}

QiniCurve qini_curve_points(const QiniTable& table) {
  QiniCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  for (const QiniRow& row : table.rows) {
    curve.points.emplace_back(100.0 * row.phi, 100.0 * row.g);
  }
  curve.benchmark_end = {100.0, 100.0 * table.rows.back().g};
  return curve;
}

std::vector<double> qini_bar_data(const QiniTable& table) {
  std::vector<double> out;
  for (const QiniRow& row : table.rows) out.push_back(row.group_uplift);
  return out;
}

}  // namespace uplift
