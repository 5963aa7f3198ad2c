#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace affgd {

/// Reduction block size. Block partials are combined in index order, so
/// results are bit-identical regardless of thread count.
inline constexpr std::size_t kReduceBlock = 1024;

/// Sum of term(i) for i in [0, n) using a fixed blocked schedule.
template <class F>
double blocked_sum(std::size_t n, F&& term) {
  if (n == 0) return 0.0;
  const std::size_t nblk = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblk, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblk); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(lo + kReduceBlock, n);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Accumulates dim-vector contributions for i in [0, n) into out. The
/// callback adds sample i's contribution into a length-dim scratch slot.
/// Same blocked schedule as blocked_sum, same determinism guarantee.
template <class F>
void blocked_vector_sum(std::size_t n, std::size_t dim, F&& accumulate, double* out) {
  std::fill(out, out + dim, 0.0);
  if (n == 0 || dim == 0) return;
  const std::size_t nblk = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblk * dim, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblk); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(lo + kReduceBlock, n);
    double* acc = &partial[static_cast<std::size_t>(b) * dim];
    for (std::size_t i = lo; i < hi; ++i) accumulate(i, acc);
  }
  for (std::size_t b = 0; b < nblk; ++b) {
    const double* acc = &partial[b * dim];
    for (std::size_t j = 0; j < dim; ++j) out[j] += acc[j];
  }
}

}  // namespace affgd
