// Benchmarks the blocked OpenMP logistic kernels against the serial reference
// implementations and cross-checks their results. Agreement is enforced (the
// binary exits nonzero on mismatch); timings are reported without speedup
// assertions, since the deterministic blocked reduction is expected to help
// only when multiple threads are actually available.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "affgd/dataset.hpp"
#include "affgd/logistic.hpp"
#include "affgd/parallel.hpp"
#include "affgd/rng.hpp"

namespace {

using affgd::LogisticDataset;
using affgd::Rng;
using affgd::Vec;

// Cluster data without the separability screening of make_logistic_dataset;
// the perceptron probe is far too slow at benchmark sizes and irrelevant here.
LogisticDataset synthetic(std::size_t num_samples, std::size_t dim, std::uint64_t seed) {
  LogisticDataset data;
  data.num_samples = num_samples;
  data.dim = dim;
  data.features.resize(num_samples * dim);
  data.labels.resize(num_samples);
  Rng rng(seed);
  const double shift = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t i = 0; i < num_samples; ++i) {
    const double label = (i % 2 == 0) ? 1.0 : -1.0;
    data.labels[i] = label;
    for (std::size_t j = 0; j < dim; ++j)
      data.features[i * dim + j] = label * shift + rng.normal();
  }
  return data;
}

template <class F>
double best_seconds(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

int main() {
  const struct {
    std::size_t n, d;
  } sizes[] = {{2000, 16}, {20000, 32}, {100000, 64}};
  const int reps = 5;
  int failures = 0;

  std::printf("threads=%d  reduce_block=%zu\n", omp_get_max_threads(),
              affgd::kReduceBlock);
  std::printf("%10s %5s | %12s %12s | %12s %12s | %12s\n", "samples", "dim",
              "val serial", "val blocked", "grad serial", "grad blocked", "fused");

  for (const auto& sz : sizes) {
    const LogisticDataset data = synthetic(sz.n, sz.d, 7u);
    Rng rng(11u);
    Vec x(sz.d);
    for (double& xi : x) xi = 0.5 * rng.normal();

    double vs = 0.0, vp = 0.0, vf = 0.0;
    Vec gs, gp, gf(sz.d);
    const double t_vs = best_seconds(reps, [&] { vs = affgd::serial::logistic_value(x, data); });
    const double t_vp = best_seconds(reps, [&] { vp = affgd::logistic_value(x, data); });
    const double t_gs = best_seconds(reps, [&] { gs = affgd::serial::logistic_gradient(x, data); });
    const double t_gp = best_seconds(reps, [&] { gp = affgd::logistic_gradient(x, data); });
    const double t_f = best_seconds(reps, [&] { vf = affgd::logistic_value_gradient(x, data, gf); });

    // Serial and blocked orders differ beyond one block, so compare to a
    // relative tolerance; the fused pass reuses the blocked schedule exactly,
    // so it must agree with the separate blocked kernels bit for bit.
    if (!close(vs, vp)) {
      std::printf("MISMATCH value serial=%.17g blocked=%.17g\n", vs, vp);
      ++failures;
    }
    if (std::memcmp(&vf, &vp, sizeof vf) != 0) {
      std::printf("MISMATCH fused value %.17g != blocked value %.17g\n", vf, vp);
      ++failures;
    }
    for (std::size_t j = 0; j < sz.d; ++j) {
      if (!close(gs[j], gp[j])) {
        std::printf("MISMATCH gradient[%zu] serial=%.17g blocked=%.17g\n", j, gs[j], gp[j]);
        ++failures;
      }
      if (std::memcmp(&gf[j], &gp[j], sizeof(double)) != 0) {
        std::printf("MISMATCH fused gradient[%zu] %.17g != blocked %.17g\n", j, gf[j], gp[j]);
        ++failures;
      }
    }

    std::printf("%10zu %5zu | %9.3f ms %9.3f ms | %9.3f ms %9.3f ms | %9.3f ms\n",
                sz.n, sz.d, 1e3 * t_vs, 1e3 * t_vp, 1e3 * t_gs, 1e3 * t_gp, 1e3 * t_f);
  }

  if (failures != 0) {
    std::printf("%d kernel mismatches\n", failures);
    return 1;
  }
  std::printf("all kernels agree (fused bit-identical to blocked; serial within 1e-12)\n");
  return 0;
}
