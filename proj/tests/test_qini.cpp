#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "uplift/dataset.hpp"
#include "uplift/errors.hpp"
#include "uplift/qini.hpp"
#include "uplift/rng.hpp"

using uplift::Column;
using uplift::UpliftDataset;

namespace {

struct Arrays {
  std::vector<std::uint8_t> y, t;
  std::vector<double> pred;
};

// Two blocks of 200 rows: the first (prediction 2) holds 100 treated with 15
// responders and 100 control with 3; the second (prediction 1) 100 treated
// with 6 and 100 control with 9. Panel sums are g = (0.06, 0.045).
Arrays two_panel_example() {
  Arrays a;
  auto block = [&](double pred, int treated_resp, int control_resp) {
    for (int i = 0; i < 200; ++i) {
      bool treated = i < 100;
      int k = treated ? i : i - 100;
      a.t.push_back(treated ? 1 : 0);
      a.y.push_back(k < (treated ? treated_resp : control_resp) ? 1 : 0);
      a.pred.push_back(pred);
    }
  };
  block(2.0, 15, 3);
  block(1.0, 6, 9);
  return a;
}

Arrays random_arrays(uplift::Rng& rng, std::size_t n, int distinct_preds) {
  Arrays a;
  for (std::size_t i = 0; i < n; ++i) {
    a.y.push_back(static_cast<std::uint8_t>(rng.below(2)));
    a.t.push_back(static_cast<std::uint8_t>(rng.below(2)));
    a.pred.push_back(static_cast<double>(rng.below(distinct_preds)));
  }
  // both arms present
  a.t[0] = 1;
  a.t[n - 1] = 0;
  return a;
}

}  // namespace

TEST_SUITE("qini") {

TEST_CASE("overall_uplift is the difference of response rates") {
  std::vector<std::uint8_t> y{1, 0, 0, 0, 1, 1, 0, 0};
  std::vector<std::uint8_t> t{1, 1, 1, 1, 0, 0, 0, 0};
  CHECK(uplift::overall_uplift(y, t) == 0.25 - 0.5);

  UpliftDataset ds({Column::num("y", {1, 0, 0, 0, 1, 1, 0, 0}),
                    Column::num("treat", {1, 1, 1, 1, 0, 0, 0, 0})},
                   "y", "treat");
  CHECK(uplift::overall_uplift(ds) == -0.25);

  std::vector<std::uint8_t> all_treated(y.size(), 1);
  CHECK_THROWS_AS(uplift::overall_uplift(y, all_treated),
                  uplift::ValidationError);
}

TEST_CASE("two-panel worked example produces exact areas") {
  Arrays a = two_panel_example();
  uplift::QiniTable table = uplift::qini_table(a.y, a.t, a.pred, 2);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.total_treated == 200);
  CHECK(table.total_control == 200);

  const uplift::QiniRow& r1 = table.rows[0];
  CHECK(r1.phi == 0.5);
  CHECK(r1.treated == 100);
  CHECK(r1.treated_resp == 15);
  CHECK(r1.control == 100);
  CHECK(r1.control_resp == 3);
  CHECK(r1.h == 12.0);
  CHECK(r1.g == 0.06);
  CHECK(r1.group_uplift == doctest::Approx(0.12).epsilon(1e-12));

  const uplift::QiniRow& r2 = table.rows[1];
  CHECK(r2.phi == 1.0);
  CHECK(r2.h == 9.0);
  CHECK(r2.g == 0.045);
  CHECK(r2.group_uplift == doctest::Approx(-0.03).epsilon(1e-12));

  uplift::QiniResult res = uplift::qini_area(table);
  CHECK(res.q_raw == 4.125);
  CHECK(res.q == 1.875);
  REQUIRE(res.curve_points.size() == 3);
  CHECK(res.curve_points[0] == std::pair<double, double>(0.0, 0.0));
  CHECK(res.curve_points[1].second == 6.0);
  CHECK(res.curve_points[2].second == 4.5);
  CHECK(res.bar_values[0] == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("cumulative rows match the brute-force prefix oracle") {
  uplift::Rng rng(404);
  for (int rep = 0; rep < 20; ++rep) {
    std::size_t n = 25 + rng.below(40);
    Arrays a = random_arrays(rng, n, 4);
    for (int J : {2, 3, 5}) {
      uplift::QiniTable table;
      try {
        table = uplift::qini_table(a.y, a.t, a.pred, J);
      } catch (const uplift::ValidationError&) {
        continue;  // an arm happened to be empty
      }
      double total_treated = static_cast<double>(table.total_treated);
      for (int j = 1; j <= J; ++j) {
        std::size_t boundary =
            (static_cast<std::size_t>(j) * n + static_cast<std::size_t>(J) - 1) /
            static_cast<std::size_t>(J);
        const uplift::QiniRow& row = table.rows[static_cast<std::size_t>(j - 1)];
        CHECK(row.phi == static_cast<double>(boundary) / static_cast<double>(n));
        double h = oracle::qini_h_prefix(a.y, a.t, a.pred, boundary);
        CHECK(row.h == h);
        CHECK(row.g == h / total_treated);
      }
    }
  }
}

TEST_CASE("tied predictions keep dataset order") {
  uplift::Rng rng(77);
  Arrays a = random_arrays(rng, 30, 1);  // all predictions equal
  uplift::QiniTable table = uplift::qini_table(a.y, a.t, a.pred, 3);
  for (int j = 1; j <= 3; ++j) {
    std::size_t boundary = (static_cast<std::size_t>(j) * 30 + 2) / 3;
    std::uint64_t rt = 0, ct = 0;
    for (std::size_t i = 0; i < boundary; ++i) {
      if (a.t[i]) {
        ++ct;
        rt += a.y[i];
      }
    }
    CHECK(table.rows[static_cast<std::size_t>(j - 1)].treated == ct);
    CHECK(table.rows[static_cast<std::size_t>(j - 1)].treated_resp == rt);
  }
}

TEST_CASE("g at full targeting equals the overall uplift") {
  uplift::Rng rng(909);
  for (int rep = 0; rep < 10; ++rep) {
    Arrays a = random_arrays(rng, 40 + rng.below(60), 6);
    uplift::QiniTable table = uplift::qini_table(a.y, a.t, a.pred, 5);
    double overall = uplift::overall_uplift(a.y, a.t);
    CHECK(std::abs(table.rows.back().g - overall) <= 1e-12);
    uplift::QiniResult res = uplift::qini_area(table);
    CHECK(res.curve_points.front() == std::pair<double, double>(0.0, 0.0));
  }
}

TEST_CASE("monotone transforms of the predictions change nothing") {
  uplift::Rng rng(2718);
  Arrays a = random_arrays(rng, 60, 5);
  uplift::QiniTable base = uplift::qini_table(a.y, a.t, a.pred, 4);

  std::vector<double> scaled(a.pred);
  for (double& v : scaled) v = 3.0 * v + 5.0;
  uplift::QiniTable moved = uplift::qini_table(a.y, a.t, scaled, 4);

  REQUIRE(base.rows.size() == moved.rows.size());
  for (std::size_t k = 0; k < base.rows.size(); ++k) {
    CHECK(base.rows[k].treated == moved.rows[k].treated);
    CHECK(base.rows[k].treated_resp == moved.rows[k].treated_resp);
    CHECK(base.rows[k].control == moved.rows[k].control);
    CHECK(base.rows[k].control_resp == moved.rows[k].control_resp);
    CHECK(base.rows[k].h == moved.rows[k].h);
    CHECK(base.rows[k].g == moved.rows[k].g);
  }
  CHECK(uplift::qini_area(base).q == uplift::qini_area(moved).q);
}

TEST_CASE("a better ordering earns a larger q") {
  std::vector<std::uint8_t> y, t;
  std::vector<double> good, bad;
  uplift::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    bool front = i < 100;
    bool treated = i % 2 == 0;
    double rate = front == treated ? 0.7 : 0.1;
    y.push_back(rng.uniform() < rate ? 1 : 0);
    t.push_back(treated ? 1 : 0);
    good.push_back(front ? 1.0 : 0.0);
    bad.push_back(front ? 0.0 : 1.0);
  }
  double q_good = uplift::qini_area(uplift::qini_table(y, t, good, 4)).q;
  double q_bad = uplift::qini_area(uplift::qini_table(y, t, bad, 4)).q;
  CHECK(q_good > 0.0);
  CHECK(q_bad < q_good);
}

TEST_CASE("one-sided prefixes warn and fall back") {
  // top panel all treated: rescaling ratio treated/control is taken as 0
  std::vector<std::uint8_t> y{1, 1, 0, 1, 0, 1, 0, 0};
  std::vector<std::uint8_t> t{1, 1, 1, 1, 0, 0, 0, 0};
  std::vector<double> pred{8, 7, 6, 5, 4, 3, 2, 1};
  uplift::QiniTable table = uplift::qini_table(y, t, pred, 2);
  CHECK(table.rows[0].h == static_cast<double>(table.rows[0].treated_resp));
  CHECK(table.rows[0].group_uplift == 0.0);
  REQUIRE(table.warnings.size() >= 2);

  // top panel all control
  std::vector<std::uint8_t> t2{0, 0, 0, 0, 1, 1, 1, 1};
  uplift::QiniTable table2 = uplift::qini_table(y, t2, pred, 2);
  CHECK(table2.rows[0].h == 0.0 - static_cast<double>(table2.rows[0].control_resp) * 0.0);
  CHECK_FALSE(table2.warnings.empty());
}

TEST_CASE("argument errors") {
  Arrays a = two_panel_example();
  CHECK_THROWS_AS(uplift::qini_table(a.y, a.t, a.pred, 1), uplift::ArgError);

  std::vector<std::uint8_t> y{1, 0, 1}, t{1, 0, 1};
  std::vector<double> pred{3, 2, 1};
  CHECK_THROWS_AS(uplift::qini_table(y, t, pred, 5), uplift::ArgError);

  std::vector<std::uint8_t> all1{1, 1, 1};
  CHECK_THROWS_AS(uplift::qini_table(y, all1, pred, 2), uplift::ValidationError);

  UpliftDataset ds({Column::num("y", {1, 0, 1, 0}), Column::num("treat", {1, 0, 1, 0}),
                    Column::cat("lab", {"a", "b", "c", "d"})},
                   "y", "treat");
  CHECK_THROWS_AS(uplift::qini_table(ds, "nope", 2), uplift::ArgError);
  CHECK_THROWS_AS(uplift::qini_table(ds, "lab", 2), uplift::ArgError);

  uplift::QiniTable empty;
  CHECK_THROWS_AS(uplift::qini_area(empty), uplift::ArgError);
}

TEST_CASE("dataset overload matches the array overload") {
  Arrays a = two_panel_example();
  std::vector<double> yd(a.y.begin(), a.y.end()), td(a.t.begin(), a.t.end());
  UpliftDataset ds({Column::num("y", yd), Column::num("treat", td),
                    Column::num("score", a.pred)},
                   "y", "treat");
  uplift::QiniTable via_ds = uplift::qini_table(ds, "score", 2);
  uplift::QiniTable via_arrays = uplift::qini_table(a.y, a.t, a.pred, 2);
  CHECK(via_ds.rows[0].h == via_arrays.rows[0].h);
  CHECK(via_ds.rows[1].g == via_arrays.rows[1].g);
}

TEST_CASE("curve and bar projections") {
  Arrays a = two_panel_example();
  uplift::QiniTable table = uplift::qini_table(a.y, a.t, a.pred, 2);

  uplift::QiniCurve curve = uplift::qini_curve_points(table);
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[0] == std::pair<double, double>(0.0, 0.0));
  CHECK(curve.points[1] == std::pair<double, double>(50.0, 6.0));
  CHECK(curve.points[2] == std::pair<double, double>(100.0, 4.5));
  CHECK(curve.benchmark_end == std::pair<double, double>(100.0, 4.5));

  std::vector<double> bars = uplift::qini_bar_data(table);
  REQUIRE(bars.size() == 2);
  CHECK(bars[0] == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(bars[1] == doctest::Approx(-0.03).epsilon(1e-12));
}

}  // TEST_SUITE
