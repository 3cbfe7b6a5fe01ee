#include "uplift/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "uplift/errors.hpp"
#include "uplift/kernels.hpp"
#include "uplift/qini.hpp"
#include "uplift/stats.hpp"

namespace uplift {

std::optional<SplitTest> uplift_split_test(const GroupCounts& c) {
  for (int g = 0; g < 4; ++g) {
    if (c.n[g] == 0) {
      throw ArgError("uplift_split_test: every cell needs at least one row");
    }
    if (c.resp[g] > c.n[g]) {
      throw ArgError("uplift_split_test: responders exceed the cell size");
    }
  }
  const double nT = static_cast<double>(c.n[0] + c.n[2]);
  const double nC = static_cast<double>(c.n[1] + c.n[3]);
  const double kT = static_cast<double>(c.resp[0] + c.resp[2]);
  const double kC = static_cast<double>(c.resp[1] + c.resp[3]);
  const double pT = kT / nT;
  const double pC = kC / nC;
  if (pT == 0.0 || pT == 1.0 || pC == 0.0 || pC == 1.0) return std::nullopt;

  const double n1 = static_cast<double>(c.n[0]);
  const double n2 = static_cast<double>(c.n[1]);
  const double vT = nT * nT * pT * (1.0 - pT) / (n1 * (nT - n1) * (nT - 1.0));
  const double vC = nC * nC * pC * (1.0 - pC) / (n2 * (nC - n2) * (nC - 1.0));

  const double left = static_cast<double>(c.resp[0]) / n1 -
                      static_cast<double>(c.resp[1]) / n2;
  const double right = static_cast<double>(c.resp[2]) / static_cast<double>(c.n[2]) -
                       static_cast<double>(c.resp[3]) / static_cast<double>(c.n[3]);

  SplitTest t;
  t.z = (left - right) / std::sqrt(vT + vC);
  t.p = stats::two_sided_p(t.z);
  return t;
}

std::vector<double> split_candidates(double lo, double hi, int n_split) {
  std::vector<double> out;
  out.reserve(n_split);
  const double step = (hi - lo) / static_cast<double>(n_split);
  for (int j = 1; j <= n_split; ++j) {
    out.push_back(lo + static_cast<double>(j) * step);
  }
  return out;
}

namespace {

struct BinContext {
  std::span<const double> x;
  std::span<const std::uint8_t> y;
  std::span<const std::uint8_t> t;
  int n_split;
  double alpha;
  int n_min;
  std::vector<double> cuts;
  std::vector<NodeRecord> trace;
};

void bin_node(BinContext& ctx, const std::vector<std::size_t>& rows) {
  NodeRecord rec;
  rec.rows = rows.size();
  double lo = ctx.x[rows.front()], hi = lo;
  for (std::size_t r : rows) {
    lo = std::min(lo, ctx.x[r]);
    hi = std::max(hi, ctx.x[r]);
    if (ctx.t[r]) {
      ++rec.treated;
    } else {
      ++rec.control;
    }
  }
  rec.lo = lo;
  rec.hi = hi;

  auto leaf = [&](std::string note) {
    rec.note = std::move(note);
    ctx.trace.push_back(rec);
  };

  if (rec.treated < 2 * static_cast<std::uint64_t>(ctx.n_min) ||
      rec.control < 2 * static_cast<std::uint64_t>(ctx.n_min)) {
    return leaf("too few rows per arm to split further");
  }
  if (!(hi > lo)) return leaf("constant value range");

  std::uint64_t rt = 0, rc = 0;
  for (std::size_t r : rows) {
    if (ctx.t[r]) {
      rt += ctx.y[r];
    } else {
      rc += ctx.y[r];
    }
  }
  if (rt == 0 || rt == rec.treated || rc == 0 || rc == rec.control) {
    return leaf("a pooled response rate is degenerate; the test is undefined");
  }

  std::vector<double> values(rows.size());
  std::vector<std::uint8_t> treat(rows.size()), resp(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    values[i] = ctx.x[rows[i]];
    treat[i] = ctx.t[rows[i]];
    resp[i] = ctx.y[rows[i]];
  }
  const std::vector<double> cuts = split_candidates(lo, hi, ctx.n_split);
  std::vector<kernels::SplitCounts> counts(cuts.size());
  kernels::split_scan(values, treat, resp, cuts, counts);

  bool found = false;
  double best_p = 0.0, best_z = 0.0, best_cut = 0.0;
  const auto min_rows = static_cast<std::uint64_t>(ctx.n_min);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const kernels::SplitCounts& sc = counts[k];
    if (sc.n[0] < min_rows || sc.n[1] < min_rows || sc.n[2] < min_rows ||
        sc.n[3] < min_rows) {
      continue;
    }
    GroupCounts gc;
    for (int g = 0; g < 4; ++g) {
      gc.n[g] = sc.n[g];
      gc.resp[g] = sc.resp[g];
    }
    const auto test = uplift_split_test(gc);
    if (!test) continue;
    if (!found || test->p < best_p) {
      found = true;
      best_p = test->p;
      best_z = test->z;
      best_cut = cuts[k];
    }
  }

  if (!found) {
    return leaf("no candidate keeps " + std::to_string(ctx.n_min) +
                " rows per arm on both sides");
  }
  rec.cut = best_cut;
  rec.z = best_z;
  rec.p = best_p;
  if (best_p > ctx.alpha) {
    return leaf("best candidate p-value exceeds alpha");
  }

  rec.split = true;
  ctx.trace.push_back(rec);
  ctx.cuts.push_back(best_cut);
  std::vector<std::size_t> left, right;
  for (std::size_t r : rows) {
    (ctx.x[r] < best_cut ? left : right).push_back(r);
  }
  bin_node(ctx, left);
  bin_node(ctx, right);
}

}  // namespace

BinResult bin_uplift(const UpliftDataset& ds, const std::string& x, int n_split,
                     double alpha, int n_min) {
  if (n_split < 1) throw ArgError("bin_uplift: n_split must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgError("bin_uplift: alpha must be in (0, 1)");
  }
  if (n_min < 1) throw ArgError("bin_uplift: n_min must be at least 1");

  BinContext ctx{ds.numeric(x), ds.outcome01(), ds.treat01(),
                 n_split,       alpha,          n_min,
                 {},            {}};
  std::vector<std::size_t> rows(ds.n());
  std::iota(rows.begin(), rows.end(), 0);
  bin_node(ctx, rows);

  BinResult res;
  res.trace = std::move(ctx.trace);
  if (ctx.cuts.empty()) return res;

  QuantizationTree tree;
  tree.variable = x;
  tree.cuts = std::move(ctx.cuts);
  std::sort(tree.cuts.begin(), tree.cuts.end());

  const std::size_t leaves = tree.cuts.size() + 1;
  std::vector<std::uint64_t> nt(leaves, 0), nc(leaves, 0), rt(leaves, 0), rc(leaves, 0);
  const auto xs = ds.numeric(x);
  const auto& yv = ds.outcome01();
  const auto& tv = ds.treat01();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::size_t leaf = 0;
    while (leaf < tree.cuts.size() && xs[i] >= tree.cuts[leaf]) ++leaf;
    if (tv[i]) {
      ++nt[leaf];
      rt[leaf] += yv[i];
    } else {
      ++nc[leaf];
      rc[leaf] += yv[i];
    }
  }
  tree.leaf_uplift.resize(leaves, 0.0);
  for (std::size_t l = 0; l < leaves; ++l) {
    if (nt[l] > 0 && nc[l] > 0) {
      tree.leaf_uplift[l] = static_cast<double>(rt[l]) / static_cast<double>(nt[l]) -
                            static_cast<double>(rc[l]) / static_cast<double>(nc[l]);
    }
  }
  res.tree = std::move(tree);
  return res;
}

std::vector<int> apply_bins(const QuantizationTree& tree,
                            std::span<const double> values) {
  std::vector<int> codes(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    int code = 0;
    while (code < static_cast<int>(tree.cuts.size()) &&
           values[i] >= tree.cuts[static_cast<std::size_t>(code)]) {
      ++code;
    }
    codes[i] = code;
  }
  return codes;
}

EnhancedResult bin_uplift_enhanced(const UpliftDataset& ds,
                                   std::span<const std::string> variables,
                                   const BinUpliftParams& params) {
  EnhancedResult out{ds, {}};
  for (const std::string& var : variables) {
    VariableBinning vb;
    vb.variable = var;
    vb.result = bin_uplift(ds, var, params.n_split, params.alpha, params.n_min);
    if (vb.result.tree) {
      const std::vector<int> codes = apply_bins(*vb.result.tree, ds.numeric(var));
      std::vector<std::string> labels(codes.size());
      for (std::size_t i = 0; i < codes.size(); ++i) {
        labels[i] = std::to_string(codes[i]);
      }
      out.data = out.data.with_column(Column::cat(var + "_quantized", std::move(labels)));
    }
    out.outcomes.push_back(std::move(vb));
  }
  return out;
}

OrdinalEncoding categorical_to_ordinal(const UpliftDataset& ds, const std::string& x) {
  const Column& col = ds.column(x);
  if (col.numeric) {
    throw ArgError("categorical_to_ordinal: column '" + x + "' is numeric");
  }

  struct Arm {
    std::uint64_t nt = 0, nc = 0, rt = 0, rc = 0;
  };
  std::map<std::string, Arm> arms;
  const auto& yv = ds.outcome01();
  const auto& tv = ds.treat01();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    Arm& a = arms[col.labels[i]];
    if (tv[i]) {
      ++a.nt;
      a.rt += yv[i];
    } else {
      ++a.nc;
      a.rc += yv[i];
    }
  }
  if (arms.size() < 2) {
    throw ValidationError("categorical_to_ordinal: column '" + x +
                          "' has fewer than 2 levels");
  }

  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [level, a] : arms) {
    if (a.nt == 0 || a.nc == 0) {
      throw ValidationError("categorical_to_ordinal: level '" + level +
                            "' lacks a treatment arm");
    }
    const double u = static_cast<double>(a.rt) / static_cast<double>(a.nt) -
                     static_cast<double>(a.rc) / static_cast<double>(a.nc);
    ranked.emplace_back(u, level);
  }
  std::sort(ranked.begin(), ranked.end());

  OrdinalEncoding enc{ds, {}, {}};
  std::map<std::string, double> rank;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    rank[ranked[k].second] = static_cast<double>(k + 1);
    enc.levels.push_back(ranked[k].second);
    enc.level_uplift.push_back(ranked[k].first);
  }
  std::vector<double> values(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) values[i] = rank.at(col.labels[i]);

  std::vector<Column> cols;
  for (const Column& c : ds.columns()) {
    if (c.name == x) {
      cols.push_back(Column::num(x, values));
    } else {
      cols.push_back(c);
    }
  }
  enc.data = UpliftDataset(std::move(cols), ds.outcome_name(), ds.treat_name());
  return enc;
}

SquareResult square_uplift(const UpliftDataset& ds, const std::string& var1,
                           const std::string& var2, int n_split, int n_min,
                           int nb_group) {
  if (n_split < 2) throw ArgError("square_uplift: n_split must be at least 2");
  if (n_min < 1) throw ArgError("square_uplift: n_min must be at least 1");
  if (nb_group < 2) throw ArgError("square_uplift: nb_group must be at least 2");
  if (static_cast<std::size_t>(nb_group) > ds.n()) {
    throw ArgError("square_uplift: nb_group exceeds the number of rows");
  }

  const auto xs = ds.numeric(var1);
  const auto ys = ds.numeric(var2);
  const auto& yv = ds.outcome01();
  const auto& tv = ds.treat01();

  RectGrid grid;
  grid.var1 = var1;
  grid.var2 = var2;
  grid.n_split = n_split;
  grid.n_min = n_min;
  grid.nb_group = nb_group;
  grid.overall = overall_uplift(ds);

  const auto [x_lo_it, x_hi_it] = std::minmax_element(xs.begin(), xs.end());
  const auto [y_lo_it, y_hi_it] = std::minmax_element(ys.begin(), ys.end());
  const double x_lo = *x_lo_it, x_hi = *x_hi_it;
  const double y_lo = *y_lo_it, y_hi = *y_hi_it;
  if (!(x_hi > x_lo)) {
    throw ValidationError("square_uplift: variable '" + var1 + "' is constant");
  }
  if (!(y_hi > y_lo)) {
    throw ValidationError("square_uplift: variable '" + var2 + "' is constant");
  }

  const int b = n_split;
  for (int k = 0; k <= b; ++k) {
    grid.x_edges.push_back(x_lo + (x_hi - x_lo) * static_cast<double>(k) /
                                      static_cast<double>(b));
    grid.y_edges.push_back(y_lo + (y_hi - y_lo) * static_cast<double>(k) /
                                      static_cast<double>(b));
  }

  auto cell = [b](double v, double lo, double hi) {
    int k = static_cast<int>(static_cast<double>(b) * (v - lo) / (hi - lo));
    if (k < 0) k = 0;
    if (k >= b) k = b - 1;
    return k;
  };

  grid.rects.assign(static_cast<std::size_t>(b) * b, Rect{});
  std::vector<std::size_t> rect_of(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const std::size_t idx =
        static_cast<std::size_t>(cell(xs[i], x_lo, x_hi)) * b + cell(ys[i], y_lo, y_hi);
    rect_of[i] = idx;
    Rect& r = grid.rects[idx];
    if (tv[i]) {
      ++r.treated;
      r.treated_resp += yv[i];
    } else {
      ++r.control;
      r.control_resp += yv[i];
    }
  }
  for (Rect& r : grid.rects) {
    r.valid = r.treated >= static_cast<std::uint64_t>(n_min) &&
              r.control >= static_cast<std::uint64_t>(n_min);
    if (r.valid) {
      r.uplift = static_cast<double>(r.treated_resp) / static_cast<double>(r.treated) -
                 static_cast<double>(r.control_resp) / static_cast<double>(r.control);
    }
  }

  std::vector<double> pred(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const Rect& r = grid.rects[rect_of[i]];
    pred[i] = r.valid ? r.uplift : grid.overall;
  }

  std::vector<std::size_t> order(ds.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t c) { return pred[a] > pred[c]; });

  std::vector<int> category(ds.n(), 0);
  const std::size_t n = ds.n();
  std::size_t block_start = 0;
  int block_cat = 1;
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (pos == 0 || pred[order[pos]] != pred[order[pos - 1]]) {
      block_start = pos;
      block_cat = static_cast<int>(block_start * static_cast<std::size_t>(nb_group) / n) + 1;
      if (block_cat > nb_group) block_cat = nb_group;
    }
    category[order[pos]] = block_cat;
  }
  for (std::size_t i = 0; i < ds.n(); ++i) {
    grid.rects[rect_of[i]].category = category[i];
  }

  std::vector<std::string> cat_labels(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    cat_labels[i] = std::to_string(category[i]);
  }

  UpliftDataset data =
      ds.with_column(Column::num("Uplift_" + var1 + "_" + var2, std::move(pred)))
          .with_column(Column::cat("Cat_" + var1 + "_" + var2, std::move(cat_labels)));
  return SquareResult{std::move(grid), std::move(data)};
}

}  // namespace uplift
