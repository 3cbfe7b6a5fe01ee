#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "uplift/dataset.hpp"
#include "uplift/errors.hpp"
#include "uplift/quantize.hpp"
#include "uplift/rng.hpp"

using uplift::Column;
using uplift::GroupCounts;
using uplift::UpliftDataset;

namespace {

GroupCounts make_counts(std::initializer_list<std::uint64_t> n,
                        std::initializer_list<std::uint64_t> resp) {
  GroupCounts c;
  std::copy(n.begin(), n.end(), c.n);
  std::copy(resp.begin(), resp.end(), c.resp);
  return c;
}

// Three value regions with uplifts +0.6, -0.6, +0.6; region boundaries at 10
// and 20. Per region 200 treated and 200 control; responses are spread evenly
// across the region so the uplift is flat between the planted boundaries.
UpliftDataset three_region() {
  std::vector<double> y, t, x;
  auto region = [&](double x0, int treated_resp, int control_resp) {
    for (int arm = 1; arm >= 0; --arm) {
      int resp = arm ? treated_resp : control_resp;
      for (int i = 0; i < 200; ++i) {
        y.push_back((i + 1) * resp / 200 > i * resp / 200 ? 1.0 : 0.0);
        t.push_back(arm);
        x.push_back(x0 + static_cast<double>(i) * 10.0 / 200.0);
      }
    }
  };
  region(0.0, 140, 20);
  region(10.0, 20, 140);
  region(20.0, 140, 20);
  return UpliftDataset({Column::num("y", y), Column::num("treat", t),
                        Column::num("x", x)},
                       "y", "treat");
}

}  // namespace

TEST_SUITE("quantize") {

TEST_CASE("split test worked example") {
  GroupCounts c = make_counts({10, 10, 10, 10}, {7, 5, 3, 5});
  auto t = uplift::uplift_split_test(c);
  REQUIRE(t.has_value());
  // z^2 = (0.2 - (-0.2))^2 / (1/19 + 1/19) = 1.52
  CHECK(t->z == doctest::Approx(std::sqrt(1.52)).epsilon(1e-12));
  CHECK(t->z == doctest::Approx(1.2328828).epsilon(1e-6));
  CHECK(t->p == doctest::Approx(0.2176).epsilon(2e-3));
  CHECK(t->p == std::erfc(std::abs(t->z) / std::sqrt(2.0)));
}

TEST_CASE("split test symmetry and randomized formula check") {
  GroupCounts even = make_counts({10, 10, 10, 10}, {5, 5, 5, 5});
  auto t = uplift::uplift_split_test(even);
  REQUIRE(t.has_value());
  CHECK(t->z == 0.0);
  CHECK(t->p == 1.0);

  uplift::Rng rng(606);
  int tested = 0;
  while (tested < 50) {
    GroupCounts c;
    for (int g = 0; g < 4; ++g) {
      c.n[g] = 2 + rng.below(28);
      c.resp[g] = rng.below(c.n[g] + 1);
    }
    auto res = uplift::uplift_split_test(c);
    if (!res) continue;
    ++tested;

    double nT = static_cast<double>(c.n[0] + c.n[2]);
    double nC = static_cast<double>(c.n[1] + c.n[3]);
    double pT = static_cast<double>(c.resp[0] + c.resp[2]) / nT;
    double pC = static_cast<double>(c.resp[1] + c.resp[3]) / nC;
    double n1 = static_cast<double>(c.n[0]);
    double n2 = static_cast<double>(c.n[1]);
    double vT = nT * nT * pT * (1 - pT) / (n1 * (nT - n1) * (nT - 1));
    double vC = nC * nC * pC * (1 - pC) / (n2 * (nC - n2) * (nC - 1));
    double diff = (static_cast<double>(c.resp[0]) / n1 -
                   static_cast<double>(c.resp[1]) / n2) -
                  (static_cast<double>(c.resp[2]) / static_cast<double>(c.n[2]) -
                   static_cast<double>(c.resp[3]) / static_cast<double>(c.n[3]));
    CHECK(res->z == doctest::Approx(diff / std::sqrt(vT + vC)).epsilon(1e-12));
    CHECK(res->p >= 0.0);
    CHECK(res->p <= 1.0);
  }
}

TEST_CASE("split test moments match exhaustive enumeration") {
  // the normal approximation is centered on the exact hypergeometric moments
  for (int N : {7, 12, 19}) {
    for (int K = 1; K < N; ++K) {
      for (int n = 1; n < N; ++n) {
        oracle::Moments m = oracle::hypergeometric_moments(N, K, n);
        double mean = static_cast<double>(n) * K / N;
        double var = static_cast<double>(n) * K / N * (N - K) /
                     static_cast<double>(N) * (N - n) / (N - 1.0);
        CHECK(std::abs(m.mean - mean) <= 1e-12);
        CHECK(std::abs(m.var - var) <= 1e-12);
      }
    }
  }
}

TEST_CASE("split test degeneracies") {
  auto none = uplift::uplift_split_test(make_counts({5, 5, 5, 5}, {0, 3, 0, 2}));
  CHECK_FALSE(none.has_value());
  auto all = uplift::uplift_split_test(make_counts({5, 5, 5, 5}, {5, 3, 5, 2}));
  CHECK_FALSE(all.has_value());

  CHECK_THROWS_AS(uplift::uplift_split_test(make_counts({5, 0, 5, 5}, {1, 0, 1, 1})),
                  uplift::ArgError);
  CHECK_THROWS_AS(uplift::uplift_split_test(make_counts({5, 5, 5, 5}, {6, 1, 1, 1})),
                  uplift::ArgError);
}

TEST_CASE("split candidates cover the range in equal steps") {
  std::vector<double> cand = uplift::split_candidates(1.0, 12.0, 12);
  REQUIRE(cand.size() == 12);
  CHECK(cand[0] == doctest::Approx(1.0 + 11.0 / 12.0).epsilon(1e-12));
  CHECK(cand[10] == doctest::Approx(133.0 / 12.0).epsilon(1e-12));
  CHECK(cand.back() == doctest::Approx(12.0).epsilon(1e-12));

  std::vector<double> one = uplift::split_candidates(0.0, 10.0, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 10.0);
}

TEST_CASE("recursive binning recovers planted boundaries") {
  UpliftDataset ds = three_region();
  uplift::BinResult res = uplift::bin_uplift(ds, "x", 30, 0.001, 30);
  REQUIRE(res.tree.has_value());
  const uplift::QuantizationTree& tree = *res.tree;
  CHECK(tree.variable == "x");
  REQUIRE(tree.cuts.size() == 2);
  CHECK(std::is_sorted(tree.cuts.begin(), tree.cuts.end()));
  CHECK(tree.cuts[0] == doctest::Approx(10.0).epsilon(0.15));
  CHECK(tree.cuts[1] == doctest::Approx(20.0).epsilon(0.08));

  REQUIRE(tree.leaf_uplift.size() == 3);
  CHECK(tree.leaf_uplift[0] == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(tree.leaf_uplift[1] == doctest::Approx(-0.6).epsilon(1e-9));
  CHECK(tree.leaf_uplift[2] == doctest::Approx(0.6).epsilon(1e-9));

  // splits recorded in trace order with their statistics
  int splits = 0;
  for (const uplift::NodeRecord& rec : res.trace) {
    if (rec.split) {
      ++splits;
      CHECK(rec.p <= 0.001);
      CHECK(rec.note.empty());
    } else {
      CHECK_FALSE(rec.note.empty());
    }
  }
  CHECK(splits == 2);
}

TEST_CASE("flat uplift produces no tree") {
  std::vector<double> y, t, x;
  for (int i = 0; i < 400; ++i) {
    y.push_back((i / 2) % 4 == 0 ? 1.0 : 0.0);  // same rate in both arms
    t.push_back(i % 2 ? 1.0 : 0.0);
    x.push_back(static_cast<double>(i));
  }
  UpliftDataset ds({Column::num("y", y), Column::num("treat", t),
                    Column::num("x", x)},
                   "y", "treat");
  uplift::BinResult res = uplift::bin_uplift(ds, "x", 10, 0.05, 30);
  CHECK_FALSE(res.tree.has_value());
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].note == "best candidate p-value exceeds alpha");
}

TEST_CASE("leaf notes explain why recursion stopped") {
  // arms too small to even consider a split
  std::vector<double> y, t, x;
  for (int i = 0; i < 50; ++i) {
    y.push_back(i % 3 == 0 ? 1.0 : 0.0);
    t.push_back(i < 30 ? 1.0 : 0.0);
    x.push_back(static_cast<double>(i));
  }
  UpliftDataset small({Column::num("y", y), Column::num("treat", t),
                       Column::num("x", x)},
                      "y", "treat");
  uplift::BinResult res = uplift::bin_uplift(small, "x", 5, 0.05, 20);
  CHECK_FALSE(res.tree.has_value());
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].note == "too few rows per arm to split further");
  CHECK(res.trace[0].treated == 30);
  CHECK(res.trace[0].control == 20);

  // constant values cannot be cut
  UpliftDataset flat({Column::num("y", y), Column::num("treat", t),
                      Column::num("x", std::vector<double>(50, 3.0))},
                     "y", "treat");
  uplift::BinResult res2 = uplift::bin_uplift(flat, "x", 5, 0.05, 10);
  CHECK_FALSE(res2.tree.has_value());
  CHECK(res2.trace[0].note == "constant value range");

  // a degenerate pooled response rate leaves the test undefined
  UpliftDataset allresp({Column::num("y", std::vector<double>(50, 1.0)),
                         Column::num("treat", t), Column::num("x", x)},
                        "y", "treat");
  uplift::BinResult res3 = uplift::bin_uplift(allresp, "x", 5, 0.05, 10);
  CHECK_FALSE(res3.tree.has_value());
  CHECK(res3.trace[0].note ==
        "a pooled response rate is degenerate; the test is undefined");

  // an outlier pushes every candidate cut outside the n_min gate
  std::vector<double> xo = x;
  xo[49] = 1e4;
  UpliftDataset outlier({Column::num("y", y), Column::num("treat", t),
                         Column::num("x", xo)},
                        "y", "treat");
  uplift::BinResult res4 = uplift::bin_uplift(outlier, "x", 10, 0.05, 10);
  CHECK_FALSE(res4.tree.has_value());
  CHECK(res4.trace[0].note.find("no candidate keeps") != std::string::npos);
}

TEST_CASE("bin_uplift validates its parameters") {
  UpliftDataset ds = three_region();
  CHECK_THROWS_AS(uplift::bin_uplift(ds, "x", 0, 0.05, 30), uplift::ArgError);
  CHECK_THROWS_AS(uplift::bin_uplift(ds, "x", 10, 0.0, 30), uplift::ArgError);
  CHECK_THROWS_AS(uplift::bin_uplift(ds, "x", 10, 1.0, 30), uplift::ArgError);
  CHECK_THROWS_AS(uplift::bin_uplift(ds, "x", 10, 0.05, 0), uplift::ArgError);
  CHECK_THROWS_AS(uplift::bin_uplift(ds, "nope", 10, 0.05, 30), uplift::ArgError);
}

TEST_CASE("apply_bins sends values below a cut to the left") {
  uplift::QuantizationTree tree;
  tree.cuts = {2.0, 5.0};
  std::vector<double> values{1.9, 2.0, 3.0, 5.0, 7.0, -100.0, 1e9};
  std::vector<int> codes = uplift::apply_bins(tree, values);
  CHECK(codes == std::vector<int>{0, 1, 1, 2, 2, 0, 2});
}

TEST_CASE("leaf uplifts match a recount through apply_bins") {
  UpliftDataset ds = three_region();
  uplift::BinResult res = uplift::bin_uplift(ds, "x", 30, 0.001, 30);
  REQUIRE(res.tree.has_value());
  std::vector<int> codes = uplift::apply_bins(*res.tree, ds.numeric("x"));

  for (std::size_t leaf = 0; leaf < res.tree->leaf_uplift.size(); ++leaf) {
    std::uint64_t nt = 0, nc = 0, rt = 0, rc = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (static_cast<std::size_t>(codes[i]) != leaf) continue;
      if (ds.treat01()[i]) {
        ++nt;
        rt += ds.outcome01()[i];
      } else {
        ++nc;
        rc += ds.outcome01()[i];
      }
    }
    REQUIRE(nt > 0);
    REQUIRE(nc > 0);
    double uplift = static_cast<double>(rt) / static_cast<double>(nt) -
                    static_cast<double>(rc) / static_cast<double>(nc);
    CHECK(res.tree->leaf_uplift[leaf] == uplift);
  }
}

TEST_CASE("binning is deterministic") {
  UpliftDataset ds = three_region();
  uplift::BinResult a = uplift::bin_uplift(ds, "x", 30, 0.001, 30);
  uplift::BinResult b = uplift::bin_uplift(ds, "x", 30, 0.001, 30);
  REQUIRE(a.tree.has_value());
  REQUIRE(b.tree.has_value());
  CHECK(a.tree->cuts == b.tree->cuts);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].cut == b.trace[k].cut);
    CHECK(a.trace[k].p == b.trace[k].p);
  }
}

TEST_CASE("bin_uplift_enhanced appends one column per split variable") {
  UpliftDataset ds = three_region();
  UpliftDataset with_flat =
      ds.with_column(Column::num("z", std::vector<double>(ds.n(), 1.0)));
  std::vector<std::string> vars{"x", "z"};
  uplift::BinUpliftParams params;
  params.n_split = 30;
  params.alpha = 0.001;
  params.n_min = 30;
  uplift::EnhancedResult res = uplift::bin_uplift_enhanced(with_flat, vars, params);

  REQUIRE(res.outcomes.size() == 2);
  CHECK(res.outcomes[0].result.tree.has_value());
  CHECK_FALSE(res.outcomes[1].result.tree.has_value());
  CHECK(res.data.has_column("x_quantized"));
  CHECK_FALSE(res.data.has_column("z_quantized"));

  const Column& q = res.data.column("x_quantized");
  REQUIRE_FALSE(q.numeric);
  std::vector<int> codes = uplift::apply_bins(*res.outcomes[0].result.tree,
                                              with_flat.numeric("x"));
  for (std::size_t i = 0; i < res.data.n(); ++i) {
    CHECK(q.labels[i] == std::to_string(codes[i]));
  }
}

TEST_CASE("categorical levels rank by observed uplift") {
  std::vector<double> y, t;
  std::vector<std::string> g;
  auto level = [&](const std::string& name, int tr, int cr) {
    for (int arm = 1; arm >= 0; --arm) {
      int resp = arm ? tr : cr;
      for (int i = 0; i < 10; ++i) {
        y.push_back(i < resp ? 1.0 : 0.0);
        t.push_back(arm);
        g.push_back(name);
      }
    }
  };
  level("A", 2, 6);   // uplift -0.4
  level("B", 8, 2);   // uplift +0.6
  level("C", 5, 5);   // uplift 0, ties with D
  level("D", 4, 4);   // uplift 0
  UpliftDataset ds({Column::num("y", y), Column::num("treat", t),
                    Column::cat("g", g)},
                   "y", "treat");

  uplift::OrdinalEncoding enc = uplift::categorical_to_ordinal(ds, "g");
  CHECK(enc.levels == std::vector<std::string>{"A", "C", "D", "B"});
  CHECK(enc.level_uplift[0] == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(enc.level_uplift[3] == doctest::Approx(0.6).epsilon(1e-12));

  const Column& ranked = enc.data.column("g");
  REQUIRE(ranked.numeric);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    double want = g[i] == "A" ? 1.0 : g[i] == "C" ? 2.0 : g[i] == "D" ? 3.0 : 4.0;
    CHECK(ranked.values[i] == want);
  }
  // column position preserved
  CHECK(enc.data.columns()[2].name == "g");
}

TEST_CASE("categorical_to_ordinal errors") {
  UpliftDataset ds({Column::num("y", {1, 0, 1, 0}), Column::num("treat", {1, 0, 1, 0}),
                    Column::cat("g", {"A", "A", "B", "B"}),
                    Column::num("v", {1, 2, 3, 4})},
                   "y", "treat");
  CHECK_THROWS_AS(uplift::categorical_to_ordinal(ds, "v"), uplift::ArgError);

  UpliftDataset single({Column::num("y", {1, 0}), Column::num("treat", {1, 0}),
                        Column::cat("g", {"A", "A"})},
                       "y", "treat");
  CHECK_THROWS_AS(uplift::categorical_to_ordinal(single, "g"),
                  uplift::ValidationError);

  UpliftDataset lopsided({Column::num("y", {1, 0, 1, 0}),
                          Column::num("treat", {1, 0, 1, 1}),
                          Column::cat("g", {"A", "A", "B", "B"})},
                         "y", "treat");
  try {
    uplift::categorical_to_ordinal(lopsided, "g");
    CHECK(false);
  } catch (const uplift::ValidationError& e) {
    CHECK(std::string(e.what()).find("'B'") != std::string::npos);
  }
}

TEST_CASE("square grid categorizes rectangles by uplift") {
  std::vector<double> y, t, xv, zv;
  auto cell = [&](double x0, double z0, int tr, int cr) {
    for (int arm = 1; arm >= 0; --arm) {
      int resp = arm ? tr : cr;
      for (int i = 0; i < 5; ++i) {
        y.push_back(i < resp ? 1.0 : 0.0);
        t.push_back(arm);
        xv.push_back(x0);
        zv.push_back(z0);
      }
    }
  };
  cell(0, 0, 4, 1);  // +0.6
  cell(0, 1, 1, 4);  // -0.6
  cell(1, 0, 3, 2);  // +0.2
  cell(1, 1, 2, 2);  // 0.0
  UpliftDataset ds({Column::num("y", y), Column::num("treat", t),
                    Column::num("x", xv), Column::num("z", zv)},
                   "y", "treat");

  uplift::SquareResult res = uplift::square_uplift(ds, "x", "z", 2, 5, 4);
  const uplift::RectGrid& grid = res.grid;
  CHECK(grid.x_edges == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(grid.overall == doctest::Approx(0.05).epsilon(1e-12));

  CHECK(grid.at(0, 0).valid);
  CHECK(grid.at(0, 0).uplift == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(grid.at(0, 0).category == 1);
  CHECK(grid.at(1, 0).category == 2);
  CHECK(grid.at(1, 1).category == 3);
  CHECK(grid.at(0, 1).category == 4);

  CHECK(res.data.has_column("Uplift_x_z"));
  CHECK(res.data.has_column("Cat_x_z"));
  auto pred = res.data.numeric("Uplift_x_z");
  const Column& cat = res.data.column("Cat_x_z");
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (xv[i] == 0.0 && zv[i] == 0.0) {
      CHECK(pred[i] == doctest::Approx(0.6).epsilon(1e-12));
      CHECK(cat.labels[i] == "1");
    }
    if (xv[i] == 0.0 && zv[i] == 1.0) {
      CHECK(cat.labels[i] == "4");
    }
  }

  std::uint64_t rows = 0;
  for (const uplift::Rect& r : grid.rects) rows += r.treated + r.control;
  CHECK(rows == ds.n());
}

TEST_CASE("sparse rectangles fall back to the overall uplift") {
  std::vector<double> y, t, xv, zv;
  auto add = [&](double x0, double z0, double treat, double out) {
    y.push_back(out);
    t.push_back(treat);
    xv.push_back(x0);
    zv.push_back(z0);
  };
  // a well-populated diagonal and a single stray row at (1, 0)
  for (int i = 0; i < 20; ++i) {
    add(0, 0, i % 2, i % 2 ? (i < 12 ? 1 : 0) : (i < 6 ? 1 : 0));
    add(1, 1, i % 2, i % 2 ? (i < 8 ? 1 : 0) : (i < 10 ? 1 : 0));
  }
  add(1, 0, 1, 1);
  UpliftDataset ds({Column::num("y", y), Column::num("treat", t),
                    Column::num("x", xv), Column::num("z", zv)},
                   "y", "treat");

  uplift::SquareResult res = uplift::square_uplift(ds, "x", "z", 2, 3, 2);
  CHECK_FALSE(res.grid.at(1, 0).valid);
  CHECK(res.grid.at(0, 1).category == 0);  // no rows at all

  auto pred = res.data.numeric("Uplift_x_z");
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (xv[i] == 1.0 && zv[i] == 0.0) {
      CHECK(pred[i] == res.grid.overall);
    }
  }
}

TEST_CASE("square_uplift validates arguments") {
  UpliftDataset ds = three_region();
  UpliftDataset with_z = ds.with_column(
      Column::num("z", std::vector<double>(ds.n(), 1.0)));
  CHECK_THROWS_AS(uplift::square_uplift(ds, "x", "x", 1, 1, 3), uplift::ArgError);
  CHECK_THROWS_AS(uplift::square_uplift(ds, "x", "x", 3, 0, 3), uplift::ArgError);
  CHECK_THROWS_AS(uplift::square_uplift(ds, "x", "x", 3, 1, 1), uplift::ArgError);
  CHECK_THROWS_AS(uplift::square_uplift(with_z, "x", "z", 3, 1, 3),
                  uplift::ValidationError);

  UpliftDataset four({Column::num("y", {1, 0, 1, 0}),
                      Column::num("treat", {1, 0, 1, 0}),
                      Column::num("a", {1, 2, 3, 4}),
                      Column::num("b", {4, 3, 2, 1})},
                     "y", "treat");
  CHECK_THROWS_AS(uplift::square_uplift(four, "a", "b", 2, 1, 5), uplift::ArgError);
}

}  // TEST_SUITE
