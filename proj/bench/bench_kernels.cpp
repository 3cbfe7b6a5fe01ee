// Timing comparison of the serial reference kernels against the OpenMP
// variants. Results are medians over repeated runs; a checksum guards against
// dead-code elimination and doubles as a bitwise-equality check between the
// two implementations.
//
//   bench_kernels [rows] [cols] [reps]

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "uplift/kernels.hpp"
#include "uplift/matrix.hpp"
#include "uplift/rng.hpp"

using uplift::Matrix;
namespace kernels = uplift::kernels;

namespace {

double median_seconds(const std::function<void()>& fn, int reps) {
  std::vector<double> times;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    times.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

void report(const char* name, double ref_s, double par_s, bool identical) {
  std::printf("%-18s %10.3f ms %10.3f ms %8.2fx   %s\n", name, ref_s * 1e3,
              par_s * 1e3, par_s > 0 ? ref_s / par_s : 0.0,
              identical ? "bitwise equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2'000'000;
  std::size_t d = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 8;
  int reps = argc > 3 ? std::atoi(argv[3]) : 7;
  if (n == 0 || d == 0 || reps <= 0) {
    std::fprintf(stderr, "usage: bench_kernels [rows] [cols] [reps]\n");
    return 1;
  }

  Matrix X(n, d);
  std::vector<double> beta(d);
  std::vector<std::uint8_t> y(n), treated(n), resp(n);
  std::vector<double> v(n), values(n);
  uplift::Rng rng(1);
  for (std::size_t j = 0; j < d; ++j) beta[j] = rng.normal() * 0.5;
  for (std::size_t i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (std::size_t j = 1; j < d; ++j) X(i, j) = rng.normal();
    y[i] = static_cast<std::uint8_t>(rng.below(2));
    treated[i] = static_cast<std::uint8_t>(rng.below(2));
    resp[i] = static_cast<std::uint8_t>(rng.below(2));
    v[i] = rng.normal();
    values[i] = rng.uniform() * 100.0;
  }
  std::vector<double> cuts;
  for (int c = 1; c <= 64; ++c) cuts.push_back(100.0 * c / 65.0);

  std::printf("rows=%zu cols=%zu reps=%d (median)\n\n", n, d, reps);
  std::printf("%-18s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  std::vector<double> eta_ref(n), eta_par(n);
  report("linear_predictor",
         median_seconds([&] { kernels::ref::linear_predictor(X, beta, eta_ref); }, reps),
         median_seconds([&] { kernels::par::linear_predictor(X, beta, eta_par); }, reps),
         eta_ref == eta_par);

  std::vector<double> p_ref(n), p_par(n);
  report("logistic_probs",
         median_seconds([&] { kernels::ref::logistic_probs(eta_ref, p_ref); }, reps),
         median_seconds([&] { kernels::par::logistic_probs(eta_par, p_par); }, reps),
         p_ref == p_par);

  double ll_ref = 0.0, ll_par = 0.0;
  report("bernoulli_loglik",
         median_seconds([&] { ll_ref = kernels::ref::bernoulli_loglik(y, eta_ref); },
                        reps),
         median_seconds([&] { ll_par = kernels::par::bernoulli_loglik(y, eta_par); },
                        reps),
         ll_ref == ll_par);

  std::vector<double> dots_ref(d), dots_par(d);
  report("column_dots",
         median_seconds([&] { kernels::ref::column_dots(X, v, dots_ref); }, reps),
         median_seconds([&] { kernels::par::column_dots(X, v, dots_par); }, reps),
         dots_ref == dots_par);

  std::vector<kernels::SplitCounts> sc_ref(cuts.size()), sc_par(cuts.size());
  const double split_ref =
      median_seconds([&] { kernels::ref::split_scan(values, treated, resp, cuts,
                                                    sc_ref); },
                     reps);
  const double split_par =
      median_seconds([&] { kernels::par::split_scan(values, treated, resp, cuts,
                                                    sc_par); },
                     reps);
  bool same = true;
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    for (int g = 0; g < 4; ++g) {
      same = same && sc_ref[c].n[g] == sc_par[c].n[g] &&
             sc_ref[c].resp[g] == sc_par[c].resp[g];
    }
  }
  report("split_scan", split_ref, split_par, same);

  // keep the results alive
  double sink = ll_ref + ll_par + eta_ref[n / 2] + p_par[n / 3] + dots_ref[0];
  std::printf("\nchecksum %.6g\n", sink);
  return 0;
}
