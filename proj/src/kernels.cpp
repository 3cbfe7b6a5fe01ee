#include "uplift/kernels.hpp"

#include <vector>

#include "uplift/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace uplift::kernels {

namespace {

double row_dot(const Matrix& X, std::size_t i, std::span<const double> beta) {
  const double* row = X.data() + i * X.cols();
  double acc = 0.0;
  for (std::size_t j = 0; j < X.cols(); ++j) acc += row[j] * beta[j];
  return acc;
}

double loglik_chunk(std::span<const std::uint8_t> y, std::span<const double> eta,
                    std::size_t lo, std::size_t hi) {
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    acc += (y[i] ? eta[i] : 0.0) - stats::log1pexp(eta[i]);
  }
  return acc;
}

void count_one_cut(std::span<const double> values, std::span<const std::uint8_t> treated,
                   std::span<const std::uint8_t> resp, double cut, SplitCounts& c) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int side = values[i] < cut ? 0 : 2;
    const int g = side + (treated[i] ? 0 : 1);
    ++c.n[g];
    c.resp[g] += resp[i];
  }
}

}  // namespace

namespace ref {

void linear_predictor(const Matrix& X, std::span<const double> beta,
                      std::span<double> eta) {
  for (std::size_t i = 0; i < X.rows(); ++i) eta[i] = row_dot(X, i, beta);
}

void logistic_probs(std::span<const double> eta, std::span<double> p) {
  for (std::size_t i = 0; i < eta.size(); ++i) p[i] = stats::logistic(eta[i]);
}

double bernoulli_loglik(std::span<const std::uint8_t> y, std::span<const double> eta) {
  const std::size_t nc = chunk_count(y.size());
  std::vector<double> partial(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    const std::size_t lo = c * kChunk;
    partial[c] = loglik_chunk(y, eta, lo, std::min(lo + kChunk, y.size()));
  }
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc;
}

void column_dots(const Matrix& X, std::span<const double> v, std::span<double> out) {
  for (std::size_t j = 0; j < X.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) acc += X(i, j) * v[i];
    out[j] = acc;
  }
}

void split_scan(std::span<const double> values, std::span<const std::uint8_t> treated,
                std::span<const std::uint8_t> resp, std::span<const double> cuts,
                std::span<SplitCounts> out) {
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    out[k] = SplitCounts{};
    count_one_cut(values, treated, resp, cuts[k], out[k]);
  }
}

}  // namespace ref

namespace par {

void linear_predictor(const Matrix& X, std::span<const double> beta,
                      std::span<double> eta) {
  const std::int64_t n = static_cast<std::int64_t>(X.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    eta[static_cast<std::size_t>(i)] = row_dot(X, static_cast<std::size_t>(i), beta);
  }
}

void logistic_probs(std::span<const double> eta, std::span<double> p) {
  const std::int64_t n = static_cast<std::int64_t>(eta.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    p[static_cast<std::size_t>(i)] = stats::logistic(eta[static_cast<std::size_t>(i)]);
  }
}

double bernoulli_loglik(std::span<const std::uint8_t> y, std::span<const double> eta) {
  const std::size_t nc = chunk_count(y.size());
  std::vector<double> partial(nc, 0.0);
  const std::int64_t m = static_cast<std::int64_t>(nc);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < m; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    partial[static_cast<std::size_t>(c)] =
        loglik_chunk(y, eta, lo, std::min(lo + kChunk, y.size()));
  }
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc;
}

void column_dots(const Matrix& X, std::span<const double> v, std::span<double> out) {
  const std::int64_t d = static_cast<std::int64_t>(X.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
      acc += X(i, static_cast<std::size_t>(j)) * v[i];
    }
    out[static_cast<std::size_t>(j)] = acc;
  }
}

void split_scan(std::span<const double> values, std::span<const std::uint8_t> treated,
                std::span<const std::uint8_t> resp, std::span<const double> cuts,
                std::span<SplitCounts> out) {
  const std::int64_t m = static_cast<std::int64_t>(cuts.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < m; ++k) {
    out[static_cast<std::size_t>(k)] = SplitCounts{};
    count_one_cut(values, treated, resp, cuts[static_cast<std::size_t>(k)],
                  out[static_cast<std::size_t>(k)]);
  }
}

}  // namespace par

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace uplift::kernels
