#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "uplift/matrix.hpp"

// Data-parallel inner loops shared by the fitting and scanning code paths.
//
// Every kernel exists twice: kernels::ref holds the serial reference and
// kernels::par the OpenMP variant. Reductions are chunked with a fixed chunk
// size and partials are combined in chunk order, and the remaining kernels
// parallelize over independent output elements, so ref and par produce
// bit-identical results for any thread count. Library code calls the
// dispatchers at namespace scope, which select the OpenMP variant.

namespace uplift::kernels {

inline constexpr std::size_t kChunk = 2048;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

// Cell counts for one candidate split: group order is left-treated,
// left-control, right-treated, right-control.
struct SplitCounts {
  std::uint64_t n[4] = {0, 0, 0, 0};
  std::uint64_t resp[4] = {0, 0, 0, 0};
};

namespace ref {

// eta = X beta
void linear_predictor(const Matrix& X, std::span<const double> beta,
                      std::span<double> eta);

// p_i = logistic(eta_i), clamped
void logistic_probs(std::span<const double> eta, std::span<double> p);

// sum_i [ y_i eta_i - log(1 + exp(eta_i)) ]
double bernoulli_loglik(std::span<const std::uint8_t> y, std::span<const double> eta);

// out_j = sum_i X_ij v_i
void column_dots(const Matrix& X, std::span<const double> v, std::span<double> out);

// Cell counts for every candidate cut; rows go left when value < cut.
void split_scan(std::span<const double> values, std::span<const std::uint8_t> treated,
                std::span<const std::uint8_t> resp, std::span<const double> cuts,
                std::span<SplitCounts> out);

}  // namespace ref

namespace par {

void linear_predictor(const Matrix& X, std::span<const double> beta,
                      std::span<double> eta);
void logistic_probs(std::span<const double> eta, std::span<double> p);
double bernoulli_loglik(std::span<const std::uint8_t> y, std::span<const double> eta);
void column_dots(const Matrix& X, std::span<const double> v, std::span<double> out);
void split_scan(std::span<const double> values, std::span<const std::uint8_t> treated,
                std::span<const std::uint8_t> resp, std::span<const double> cuts,
                std::span<SplitCounts> out);

}  // namespace par

inline void linear_predictor(const Matrix& X, std::span<const double> beta,
                             std::span<double> eta) {
  par::linear_predictor(X, beta, eta);
}

inline void logistic_probs(std::span<const double> eta, std::span<double> p) {
  par::logistic_probs(eta, p);
}

inline double bernoulli_loglik(std::span<const std::uint8_t> y,
                               std::span<const double> eta) {
  return par::bernoulli_loglik(y, eta);
}

inline void column_dots(const Matrix& X, std::span<const double> v,
                        std::span<double> out) {
  par::column_dots(X, v, out);
}

inline void split_scan(std::span<const double> values,
                       std::span<const std::uint8_t> treated,
                       std::span<const std::uint8_t> resp,
                       std::span<const double> cuts, std::span<SplitCounts> out) {
  par::split_scan(values, treated, resp, cuts, out);
}

// Thread cap applied by the CLI (UPLIFTKIT_THREADS) and the benchmark.
void set_threads(int n);

}  // namespace uplift::kernels
