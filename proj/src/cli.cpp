#include "uplift/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uplift/errors.hpp"
#include "uplift/estimators.hpp"
#include "uplift/kernels.hpp"
#include "uplift/lasso.hpp"
#include "uplift/qini.hpp"
#include "uplift/quantize.hpp"
#include "uplift/svg.hpp"

namespace uplift::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string sig7(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.7g", v);
  return buf;
}

void ensure_layout(const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "models");
  fs::create_directories(fs::path(out_dir) / "tables");
  fs::create_directories(fs::path(out_dir) / "plots");
}

std::string join_path(const std::string& out_dir, const std::string& rel) {
  return (fs::path(out_dir) / rel).string();
}

void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return ordered_json::parse(in);
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const std::string& w : warnings) err << "warning: " << w << "\n";
}

UpliftDataset load_data(const RunConfig& cfg) {
  if (cfg.data.empty()) throw ArgError("--data is required");
  return load_csv(cfg.data, cfg.outcome, cfg.treat);
}

// Categorical features are expanded into indicator columns so that model
// subcommands can take raw files; an explicit --predictors list is kept as
// given (its entries must already be numeric).
std::vector<std::string> resolve_predictors(const RunConfig& cfg, UpliftDataset& ds) {
  ds = encode_all_dummies(ds);
  if (!cfg.predictors.empty()) return cfg.predictors;
  return ds.feature_names();
}

void write_qini_table_csv(const std::string& path, const QiniTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "group,phi,treated,treated_resp,control,control_resp,group_uplift,h,g\n";
  for (std::size_t j = 0; j < table.rows.size(); ++j) {
    const QiniRow& r = table.rows[j];
    out << (j + 1) << ',' << format_double(r.phi) << ',' << r.treated << ','
        << r.treated_resp << ',' << r.control << ',' << r.control_resp << ','
        << format_double(r.group_uplift) << ',' << format_double(r.h) << ','
        << format_double(r.g) << '\n';
  }
}

struct EvalArtifacts {
  double q = 0.0, q_raw = 0.0, overall = 0.0;
};

// Shared by eval and pipeline: writes the table, both plots, and a summary.
EvalArtifacts emit_eval(const UpliftDataset& scored, const std::string& pred_column,
                        int nb_group, const std::string& out_dir,
                        const std::string& tag, std::ostream& err) {
  const QiniTable table = qini_table(scored, pred_column, nb_group);
  print_warnings(table.warnings, err);
  const QiniResult res = qini_area(table);
  const std::string suffix = tag.empty() ? "" : "_" + tag;

  write_qini_table_csv(join_path(out_dir, "tables/qini_table" + suffix + ".csv"), table);

  const QiniCurve curve = qini_curve_points(table);
  svg::Series model_series{curve.points, "#1f6fb4", false};
  svg::Series benchmark{{{0.0, 0.0}, curve.benchmark_end}, "#888888", true};
  svg::write_text_file(
      join_path(out_dir, "plots/qini_curve" + suffix + ".svg"),
      svg::line_chart("Incremental uplift by targeted fraction" +
                          (tag.empty() ? std::string() : " (" + tag + ")"),
                      "targeted fraction (%)", "incremental uplift (%)",
                      {benchmark, model_series}));
  svg::write_text_file(
      join_path(out_dir, "plots/qini_bars" + suffix + ".svg"),
      svg::bar_chart("Observed uplift by panel" +
                         (tag.empty() ? std::string() : " (" + tag + ")"),
                     "panel (1 = highest predicted uplift)", "observed uplift (%)",
                     res.bar_values));

  EvalArtifacts a;
  a.q = res.q;
  a.q_raw = res.q_raw;
  a.overall = overall_uplift(scored);
  return a;
}

int cmd_split(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  UpliftDataset ds = load_data(cfg);
  SplitConfig sc;
  sc.p = cfg.p;
  sc.seed = cfg.seed;
  sc.strata = cfg.strata.empty()
                  ? std::vector<std::string>{cfg.treat, cfg.outcome}
                  : cfg.strata;
  SplitResult res = split_uplift(ds, sc);
  print_warnings(res.warnings, err);
  ensure_layout(cfg.out_dir);
  write_csv(res.train, join_path(cfg.out_dir, "tables/train.csv"));
  write_csv(res.valid, join_path(cfg.out_dir, "tables/valid.csv"));
  out << "train: " << res.train.n() << " rows\n";
  out << "valid: " << res.valid.n() << " rows\n";
  return 0;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  UpliftDataset ds = load_data(cfg);
  const std::vector<std::string> predictors = resolve_predictors(cfg, ds);
  UpliftModel model;
  if (cfg.estimator == "dual") {
    model.dual = dual_uplift_fit(ds, predictors);
    for (const FittedLogistic* f : {&model.dual->control, &model.dual->treated}) {
      if (f->warning) err << "warning: " << *f->warning << "\n";
    }
  } else if (cfg.estimator == "inter") {
    model.inter = inter_uplift_fit(ds, predictors);
    if (model.inter->model.warning) {
      err << "warning: " << *model.inter->model.warning << "\n";
    }
  } else {
    throw ArgError("unknown estimator '" + cfg.estimator + "' (use dual or inter)");
  }
  ensure_layout(cfg.out_dir);
  const std::string path = join_path(cfg.out_dir, "models/model.json");
  write_json_file(path, to_json(model));
  out << "model: " << path << "\n";
  if (model.dual) {
    out << "control deviance: " << format_double(model.dual->control.deviance)
        << ", treated deviance: " << format_double(model.dual->treated.deviance)
        << "\n";
  } else {
    out << "deviance: " << format_double(model.inter->model.deviance) << "\n";
  }
  return 0;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.model_path.empty()) throw ArgError("--model is required");
  UpliftDataset ds = encode_all_dummies(load_data(cfg));
  const UpliftModel model = uplift_model_from_json(read_json_file(cfg.model_path));
  const UpliftDataset scored = model.predict(ds);
  ensure_layout(cfg.out_dir);
  const std::string path = join_path(cfg.out_dir, "tables/predictions.csv");
  write_csv(scored, path);
  out << "predictions: " << path << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  UpliftDataset ds = encode_all_dummies(load_data(cfg));
  std::string pred_column =
      cfg.prediction_column.empty() ? kPredictionColumn : cfg.prediction_column;
  if (!cfg.model_path.empty()) {
    const UpliftModel model = uplift_model_from_json(read_json_file(cfg.model_path));
    ds = model.predict(ds);
    pred_column = kPredictionColumn;
  }
  ensure_layout(cfg.out_dir);
  const EvalArtifacts a = emit_eval(ds, pred_column, cfg.nb_group, cfg.out_dir, "", err);
  ordered_json j;
  j["qini"] = a.q;
  j["qini_raw"] = a.q_raw;
  j["overall_uplift"] = a.overall;
  write_json_file(join_path(cfg.out_dir, "report.json"), j);
  out << "qini: " << format_double(a.q) << "\n";
  out << "qini_raw: " << format_double(a.q_raw) << "\n";
  out << "overall_uplift: " << format_double(a.overall) << "\n";
  return 0;
}

int cmd_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  UpliftDataset ds = load_data(cfg);
  const std::vector<std::string> predictors = resolve_predictors(cfg, ds);
  BestFeaturesOptions opt;
  opt.nb_lambda = cfg.nb_lambda;
  opt.nb_group = cfg.nb_group;
  opt.validation = cfg.validation;
  opt.p = cfg.p;
  opt.seed = cfg.seed;
  const QiniScan scan = best_features(ds, predictors, opt);
  print_warnings(scan.warnings, err);

  ensure_layout(cfg.out_dir);
  {
    const std::string path = join_path(cfg.out_dir, "tables/lambda_scan.csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << "lambda,active_terms,qini\n";
    for (std::size_t k = 0; k < scan.lambdas.size(); ++k) {
      f << format_double(scan.lambdas[k]) << ',' << scan.active_sizes[k] << ','
        << format_double(scan.q_values[k]) << '\n';
    }
  }
  ordered_json j;
  j["best_lambda"] = scan.best_lambda;
  j["best_q"] = scan.best_q;
  j["selected_terms"] = scan.selected_terms;
  write_json_file(join_path(cfg.out_dir, "selected_terms.json"), j);

  out << "best lambda: " << format_double(scan.best_lambda) << "\n";
  out << "best qini: " << format_double(scan.best_q) << "\n";
  out << "selected terms:";
  for (const std::string& t : scan.selected_terms) out << ' ' << t;
  out << "\n";
  return 0;
}

int cmd_bin(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.x.empty()) throw ArgError("--x is required");
  UpliftDataset ds = load_data(cfg);

  // A categorical variable is first ranked into ordinal levels by observed
  // uplift, then binned on the ranks with one candidate between each level.
  std::string var = cfg.x;
  int n_split = cfg.n_split;
  if (!ds.column(cfg.x).numeric) {
    const OrdinalEncoding enc = categorical_to_ordinal(ds, cfg.x);
    ds = enc.data;
    n_split = static_cast<int>(enc.levels.size()) - 1;
    err << "note: '" << cfg.x << "' is categorical; binning its " << enc.levels.size()
        << " uplift-ranked levels\n";
  }

  const BinResult res = bin_uplift(ds, var, n_split, cfg.alpha, cfg.n_min);
  if (!res.tree) {
    out << "oups..no significant split\n";
    return 0;
  }
  for (const NodeRecord& rec : res.trace) {
    if (!rec.split) continue;
    out << "The variable " << var << " has been cut at:\n";
    out << sig7(rec.cut) << "\n";
  }

  ensure_layout(cfg.out_dir);
  const QuantizationTree& tree = *res.tree;
  {
    const std::string path = join_path(cfg.out_dir, "tables/bin_" + var + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << "bin,lower,upper,uplift\n";
    for (std::size_t l = 0; l < tree.leaf_uplift.size(); ++l) {
      f << l << ',' << (l == 0 ? "-inf" : format_double(tree.cuts[l - 1])) << ','
        << (l == tree.cuts.size() ? "inf" : format_double(tree.cuts[l])) << ','
        << format_double(tree.leaf_uplift[l]) << '\n';
    }
  }
  std::vector<double> bars;
  for (double u : tree.leaf_uplift) bars.push_back(100.0 * u);
  svg::write_text_file(join_path(cfg.out_dir, "plots/bin_" + var + ".svg"),
                       svg::bar_chart("Observed uplift by " + var + " bin",
                                      var + " bin (ascending values)",
                                      "observed uplift (%)", bars));
  return 0;
}

void write_square_outputs(const SquareResult& res, const RunConfig& cfg,
                          std::ostream& out) {
  ensure_layout(cfg.out_dir);
  const std::string stem = res.grid.var1 + "_" + res.grid.var2;
  write_csv(res.data, join_path(cfg.out_dir, "tables/square_" + stem + ".csv"));

  const int b = res.grid.n_split;
  std::vector<double> values(static_cast<std::size_t>(b) * b, 0.0);
  std::vector<bool> valid(static_cast<std::size_t>(b) * b, false);
  for (int ix = 0; ix < b; ++ix) {
    for (int iy = 0; iy < b; ++iy) {
      const Rect& r = res.grid.at(ix, iy);
      values[static_cast<std::size_t>(ix) * b + iy] = r.uplift;
      valid[static_cast<std::size_t>(ix) * b + iy] = r.valid;
    }
  }
  svg::write_text_file(
      join_path(cfg.out_dir, "plots/heatmap_" + stem + ".svg"),
      svg::heatmap("Observed uplift over " + res.grid.var1 + " x " + res.grid.var2,
                   res.grid.var1, res.grid.var2, res.grid.x_edges, res.grid.y_edges,
                   values, valid));
  {
    const std::string path = join_path(cfg.out_dir, "tables/squares_" + stem + ".csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << "ix,iy,treated,control,treated_resp,control_resp,valid,uplift,category\n";
    for (int ix = 0; ix < b; ++ix) {
      for (int iy = 0; iy < b; ++iy) {
        const Rect& r = res.grid.at(ix, iy);
        f << ix << ',' << iy << ',' << r.treated << ',' << r.control << ','
          << r.treated_resp << ',' << r.control_resp << ',' << (r.valid ? 1 : 0) << ','
          << (r.valid ? format_double(r.uplift) : std::string("")) << ','
          << r.category << '\n';
      }
    }
  }
  int valid_count = 0;
  for (const Rect& r : res.grid.rects) valid_count += r.valid ? 1 : 0;
  out << "rectangles: " << b * b << " (" << valid_count << " with both arms >= "
      << res.grid.n_min << " rows)\n";
  out << "overall uplift fallback: " << format_double(res.grid.overall) << "\n";
}

int cmd_square(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.var1.empty() || cfg.var2.empty()) {
    throw ArgError("--var1 and --var2 are required");
  }
  UpliftDataset ds = load_data(cfg);
  const SquareResult res =
      square_uplift(ds, cfg.var1, cfg.var2, cfg.n_split, cfg.n_min, cfg.nb_group);
  write_square_outputs(res, cfg, out);
  return 0;
}

// Rectangle assignment for data the grid was not built on: coordinates are
// clamped into the grid, invalid rectangles fall back to the overall uplift
// of the fitting data, and rows landing in rectangles that were empty during
// fitting inherit the category of the fallback uplift value.
int cmd_squarecv(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.var1.empty() || cfg.var2.empty()) {
    throw ArgError("--var1 and --var2 are required");
  }
  if (cfg.apply_path.empty()) throw ArgError("--apply is required");
  UpliftDataset train = load_data(cfg);
  const SquareResult res =
      square_uplift(train, cfg.var1, cfg.var2, cfg.n_split, cfg.n_min, cfg.nb_group);
  write_square_outputs(res, cfg, out);

  const RectGrid& grid = res.grid;
  int fallback_cat = 0;
  for (const Rect& r : grid.rects) {
    if (!r.valid && r.category > 0) {
      fallback_cat = r.category;
      break;
    }
  }
  if (fallback_cat == 0) {
    double best = 0.0;
    for (const Rect& r : grid.rects) {
      if (!r.valid) continue;
      const double d = std::abs(r.uplift - grid.overall);
      if (fallback_cat == 0 || d < best) {
        best = d;
        fallback_cat = r.category;
      }
    }
  }

  UpliftDataset apply = load_csv(cfg.apply_path, cfg.outcome, cfg.treat);
  const auto xs = apply.numeric(grid.var1);
  const auto ys = apply.numeric(grid.var2);
  const int b = grid.n_split;
  auto cell = [b](double v, double lo, double hi) {
    int k = static_cast<int>(static_cast<double>(b) * (v - lo) / (hi - lo));
    if (k < 0) k = 0;
    if (k >= b) k = b - 1;
    return k;
  };
  std::vector<double> pred(apply.n());
  std::vector<std::string> cat(apply.n());
  for (std::size_t i = 0; i < apply.n(); ++i) {
    const Rect& r = grid.at(cell(xs[i], grid.x_edges.front(), grid.x_edges.back()),
                            cell(ys[i], grid.y_edges.front(), grid.y_edges.back()));
    pred[i] = r.valid ? r.uplift : grid.overall;
    const int c = r.category > 0 ? (r.valid ? r.category : fallback_cat) : fallback_cat;
    cat[i] = std::to_string(c);
  }
  const std::string stem = grid.var1 + "_" + grid.var2;
  UpliftDataset scored =
      apply.with_column(Column::num("Uplift_" + stem, std::move(pred)))
          .with_column(Column::cat("Cat_" + stem, std::move(cat)));
  const std::string path = join_path(cfg.out_dir, "tables/square_" + stem + "_applied.csv");
  write_csv(scored, path);
  out << "applied: " << path << "\n";
  return 0;
}

int cmd_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  UpliftDataset ds = load_data(cfg);
  const std::vector<std::string> predictors = resolve_predictors(cfg, ds);
  ensure_layout(cfg.out_dir);

  SplitConfig sc;
  sc.p = 0.7;
  sc.seed = cfg.seed;
  sc.strata = {cfg.treat, cfg.outcome};
  SplitResult split = split_uplift(ds, sc);
  print_warnings(split.warnings, err);
  write_csv(split.train, join_path(cfg.out_dir, "tables/train.csv"));
  write_csv(split.valid, join_path(cfg.out_dir, "tables/valid.csv"));
  out << "split: " << split.train.n() << " train / " << split.valid.n()
      << " valid rows\n";

  struct Entry {
    std::string name;
    double q, q_raw;
  };
  std::vector<Entry> entries;

  UpliftModel dual;
  dual.dual = dual_uplift_fit(split.train, predictors);
  write_json_file(join_path(cfg.out_dir, "models/dual_baseline.json"), to_json(dual));
  {
    const EvalArtifacts a = emit_eval(dual.predict(split.valid), kPredictionColumn,
                                      cfg.nb_group, cfg.out_dir, "dual", err);
    entries.push_back({"two-model baseline", a.q, a.q_raw});
  }

  UpliftModel inter;
  inter.inter = inter_uplift_fit(split.train, predictors);
  write_json_file(join_path(cfg.out_dir, "models/inter_baseline.json"), to_json(inter));
  {
    const EvalArtifacts a = emit_eval(inter.predict(split.valid), kPredictionColumn,
                                      cfg.nb_group, cfg.out_dir, "inter", err);
    entries.push_back({"interaction baseline", a.q, a.q_raw});
  }

  BestFeaturesOptions opt;
  opt.nb_lambda = cfg.nb_lambda;
  opt.nb_group = cfg.nb_group;
  opt.validation = cfg.validation;
  opt.p = cfg.p;
  opt.seed = cfg.seed;
  const QiniScan scan = best_features(split.train, predictors, opt);
  print_warnings(scan.warnings, err);
  {
    const std::string path = join_path(cfg.out_dir, "tables/lambda_scan.csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << "lambda,active_terms,qini\n";
    for (std::size_t k = 0; k < scan.lambdas.size(); ++k) {
      f << format_double(scan.lambdas[k]) << ',' << scan.active_sizes[k] << ','
        << format_double(scan.q_values[k]) << '\n';
    }
  }
  ordered_json sel;
  sel["best_lambda"] = scan.best_lambda;
  sel["best_q"] = scan.best_q;
  sel["selected_terms"] = scan.selected_terms;
  write_json_file(join_path(cfg.out_dir, "selected_terms.json"), sel);
  out << "selected terms:";
  for (const std::string& t : scan.selected_terms) out << ' ' << t;
  out << "\n";

  UpliftModel selected;
  selected.inter = refit_selected(split.train, scan.selected_terms);
  write_json_file(join_path(cfg.out_dir, "models/inter_selected.json"),
                  to_json(selected));
  {
    const EvalArtifacts a = emit_eval(selected.predict(split.valid), kPredictionColumn,
                                      cfg.nb_group, cfg.out_dir, "selected", err);
    entries.push_back({"interaction selected", a.q, a.q_raw});
  }

  {
    const std::string path = join_path(cfg.out_dir, "tables/comparison.csv");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << "model,qini,qini_raw\n";
    for (const Entry& e : entries) {
      f << e.name << ',' << format_double(e.q) << ',' << format_double(e.q_raw) << '\n';
    }
  }
  ordered_json rep;
  rep["overall_uplift_train"] = overall_uplift(split.train);
  rep["overall_uplift_valid"] = overall_uplift(split.valid);
  rep["best_lambda"] = scan.best_lambda;
  rep["selected_terms"] = scan.selected_terms;
  ordered_json models = ordered_json::array();
  for (const Entry& e : entries) {
    ordered_json m;
    m["model"] = e.name;
    m["qini"] = e.q;
    m["qini_raw"] = e.q_raw;
    models.push_back(m);
  }
  rep["models"] = models;
  write_json_file(join_path(cfg.out_dir, "report.json"), rep);

  out << "model comparison (validation qini):\n";
  for (const Entry& e : entries) {
    out << "  " << e.name << ": " << sig7(e.q) << "\n";
  }
  return 0;
}

void apply_thread_cap() {
  if (const char* env = std::getenv("UPLIFTKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) kernels::set_threads(n);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  apply_thread_cap();

  CLI::App app{"regression-based uplift modeling: estimation, validation, feature "
               "selection, and supervised quantization"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--data", cfg.data, "input CSV")->required();
    sub->add_option("--outcome", cfg.outcome, "binary outcome column");
    sub->add_option("--treat", cfg.treat, "binary treatment column");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--seed", cfg.seed, "random seed");
  };

  CLI::App* split = app.add_subcommand("split", "stratified train/validation split");
  add_io(split);
  split->add_option("--p", cfg.p, "train fraction per stratum (default 0.7)");
  split->add_option("--strata", cfg.strata, "stratification columns")->delimiter(',');

  CLI::App* fit = app.add_subcommand("fit", "fit an uplift model");
  add_io(fit);
  fit->add_option("--estimator", cfg.estimator, "dual | inter")->required();
  fit->add_option("--predictors", cfg.predictors, "comma-separated predictor columns")
      ->delimiter(',');

  CLI::App* predict = app.add_subcommand("predict", "score a dataset with a model");
  add_io(predict);
  predict->add_option("--model", cfg.model_path, "model JSON")->required();

  CLI::App* eval = app.add_subcommand("eval", "Qini table, coefficient, and plots");
  add_io(eval);
  eval->add_option("--model", cfg.model_path, "score with this model JSON first");
  eval->add_option("--prediction-column", cfg.prediction_column,
                   "existing prediction column");
  eval->add_option("--nb-group", cfg.nb_group, "number of panels");

  CLI::App* select = app.add_subcommand("select", "Qini-maximizing lasso scan");
  add_io(select);
  select->add_option("--predictors", cfg.predictors, "comma-separated predictors")
      ->delimiter(',');
  select->add_option("--nb-lambda", cfg.nb_lambda, "grid size");
  select->add_option("--nb-group", cfg.nb_group, "Qini panels");
  select->add_flag("--validation", cfg.validation, "score on a stratified holdout");
  select->add_option("--p", cfg.p, "holdout fraction");

  CLI::App* bin = app.add_subcommand("bin", "supervised univariate quantization");
  add_io(bin);
  bin->add_option("--x", cfg.x, "variable to quantize")->required();
  bin->add_option("--n-split", cfg.n_split, "candidate cuts per node");
  bin->add_option("--alpha", cfg.alpha, "significance level");
  bin->add_option("--n-min", cfg.n_min, "minimum rows per arm per child");

  CLI::App* square = app.add_subcommand("square", "bivariate uplift grid");
  add_io(square);
  square->add_option("--var1", cfg.var1, "first variable")->required();
  square->add_option("--var2", cfg.var2, "second variable")->required();
  square->add_option("--n-split", cfg.n_split, "cells per axis (default 3)");
  square->add_option("--n-min", cfg.n_min, "minimum rows per arm per cell (default 1)");
  square->add_option("--nb-group", cfg.nb_group, "prediction categories (default 3)");

  CLI::App* squarecv = app.add_subcommand(
      "squarecv", "bivariate grid fitted on --data, applied to --apply");
  add_io(squarecv);
  squarecv->add_option("--var1", cfg.var1, "first variable")->required();
  squarecv->add_option("--var2", cfg.var2, "second variable")->required();
  squarecv->add_option("--apply", cfg.apply_path, "CSV to apply the grid to")
      ->required();
  squarecv->add_option("--n-split", cfg.n_split, "cells per axis (default 3)");
  squarecv->add_option("--n-min", cfg.n_min,
                       "minimum rows per arm per cell (default 1)");
  squarecv->add_option("--nb-group", cfg.nb_group, "prediction categories (default 3)");

  CLI::App* pipeline = app.add_subcommand(
      "pipeline", "split, fit baselines, select, refit, evaluate, compare");
  add_io(pipeline);
  pipeline->add_option("--predictors", cfg.predictors, "comma-separated predictors")
      ->delimiter(',');
  pipeline->add_option("--nb-lambda", cfg.nb_lambda, "lasso grid size");
  pipeline->add_option("--nb-group", cfg.nb_group, "Qini panels");
  pipeline->add_flag("--validation", cfg.validation,
                     "use a holdout inside the selection stage");
  pipeline->add_option("--p", cfg.p, "selection holdout fraction");

  std::vector<std::string> argv_storage = args;
  std::vector<const char*> argv;
  argv.push_back("upliftkit");
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, msg, msg);
    (code == 0 ? out : err) << msg.str();
    return code;
  }

  // Per-subcommand defaults that differ from the shared ones.
  if (split->parsed() && split->count("--p") == 0) cfg.p = 0.7;
  for (CLI::App* sq : {square, squarecv}) {
    if (!sq->parsed()) continue;
    if (sq->count("--n-split") == 0) cfg.n_split = 3;
    if (sq->count("--n-min") == 0) cfg.n_min = 1;
    if (sq->count("--nb-group") == 0) cfg.nb_group = 3;
  }

  try {
    if (split->parsed()) {
      cfg.subcommand = "split";
      return cmd_split(cfg, out, err);
    }
    if (fit->parsed()) {
      cfg.subcommand = "fit";
      return cmd_fit(cfg, out, err);
    }
    if (predict->parsed()) {
      cfg.subcommand = "predict";
      return cmd_predict(cfg, out, err);
    }
    if (eval->parsed()) {
      cfg.subcommand = "eval";
      return cmd_eval(cfg, out, err);
    }
    if (select->parsed()) {
      cfg.subcommand = "select";
      return cmd_select(cfg, out, err);
    }
    if (bin->parsed()) {
      cfg.subcommand = "bin";
      return cmd_bin(cfg, out, err);
    }
    if (square->parsed()) {
      cfg.subcommand = "square";
      return cmd_square(cfg, out, err);
    }
    if (squarecv->parsed()) {
      cfg.subcommand = "squarecv";
      return cmd_squarecv(cfg, out, err);
    }
    if (pipeline->parsed()) {
      cfg.subcommand = "pipeline";
      return cmd_pipeline(cfg, out, err);
    }
    err << "error: no subcommand\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace uplift::cli
