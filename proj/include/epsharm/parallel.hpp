#pragma once

// Deterministic map-reduce kernels over quadrature nodes.
//
// The production kernel evaluates all nodes into an indexed buffer (OpenMP
// parallel) and reduces with a fixed pairwise order, so the result is
// bit-identical no matter how many threads ran the fill. The plain serial
// left-to-right accumulation is kept as the reference implementation for
// testing and benchmarking; it differs from the pairwise result only by
// rounding (~1 ulp per summand).

#include <cstddef>
#include <exception>
#include <vector>

#include "epsharm/common.hpp"

namespace epsharm::par {

// Below this many elements the buffer is filled serially; OpenMP fork/join
// overhead dominates tiny 1D grids. The reduction is the same either way.
constexpr std::size_t kParallelCutoff = 512;

inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

namespace detail {

template <class Fill>
void run_fill(std::size_t n, bool parallel, Fill&& fill) {
  if (!parallel || n < kParallelCutoff) {
    for (std::size_t i = 0; i < n; ++i) fill(i);
    return;
  }
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    if (err) continue;
    try {
      fill(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(epsharm_par_err)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

// Deterministic sum of f(0..n-1).
template <class F>
double sum_map(std::size_t n, F&& f, bool parallel = true) {
  std::vector<double> buf(n);
  detail::run_fill(n, parallel, [&](std::size_t i) { buf[i] = f(i); });
  return pairwise_sum(buf.data(), n);
}

// Reference implementation: straightforward accumulation, no buffer.
template <class F>
double sum_map_serial(std::size_t n, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f(i);
  return s;
}

// Same contract for K simultaneous sums (one node evaluation feeding several
// integrals, e.g. gradient + laplacian + degree in one pass).
template <std::size_t K, class F>
std::array<double, K> sum_map_multi(std::size_t n, F&& f, bool parallel = true) {
  std::vector<std::array<double, K>> buf(n);
  detail::run_fill(n, parallel, [&](std::size_t i) { buf[i] = f(i); });
  std::array<double, K> out{};
  std::vector<double> col(n);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < n; ++i) col[i] = buf[i][k];
    out[k] = pairwise_sum(col.data(), n);
  }
  return out;
}

template <std::size_t K, class F>
std::array<double, K> sum_map_multi_serial(std::size_t n, F&& f) {
  std::array<double, K> out{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::array<double, K> v = f(i);
    for (std::size_t k = 0; k < K; ++k) out[k] += v[k];
  }
  return out;
}

}  // namespace epsharm::par
