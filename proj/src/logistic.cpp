#include "affgd/logistic.hpp"

#include <cmath>
#include <memory>

#include "affgd/errors.hpp"
#include "affgd/parallel.hpp"

namespace affgd {

namespace {

// log(1 + exp(z)) without overflow for large |z|.
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z)) evaluated through exp of a non-positive argument only.
inline double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline void check_point(const Vec& x, const LogisticDataset& data, const char* who) {
  if (x.size() != data.dim)
    throw InvalidArgumentError(std::string(who) + ": point dimension mismatch");
}

}  // namespace

double logistic_value(const Vec& x, const LogisticDataset& data) {
  check_point(x, data, "logistic_value");
  const std::size_t n = data.dim;
  const double sum = blocked_sum(data.num_samples, [&](std::size_t i) {
    const double* s = data.sample(i);
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m += x[j] * s[j];
    return softplus(-data.labels[i] * m);
  });
  return sum / static_cast<double>(data.num_samples);
}

Vec logistic_gradient(const Vec& x, const LogisticDataset& data) {
  check_point(x, data, "logistic_gradient");
  const std::size_t n = data.dim;
  Vec g(n, 0.0);
  blocked_vector_sum(
      data.num_samples, n,
      [&](std::size_t i, double* acc) {
        const double* s = data.sample(i);
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) m += x[j] * s[j];
        const double w = -data.labels[i] * sigmoid(-data.labels[i] * m);
        for (std::size_t j = 0; j < n; ++j) acc[j] += w * s[j];
      },
      g.data());
  const double inv = 1.0 / static_cast<double>(data.num_samples);
  for (double& v : g) v *= inv;
  return g;
}

double logistic_value_gradient(const Vec& x, const LogisticDataset& data, Vec& grad) {
  check_point(x, data, "logistic_value_gradient");
  const std::size_t n = data.dim;
  // One pass: slot n of the accumulator carries the objective value, so the
  // gradient sums combine in exactly the same block order as the
  // gradient-only kernel and the two agree bit for bit.
  Vec acc(n + 1, 0.0);
  blocked_vector_sum(
      data.num_samples, n + 1,
      [&](std::size_t i, double* a) {
        const double* s = data.sample(i);
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) m += x[j] * s[j];
        const double z = -data.labels[i] * m;
        const double w = -data.labels[i] * sigmoid(z);
        for (std::size_t j = 0; j < n; ++j) a[j] += w * s[j];
        a[n] += softplus(z);
      },
      acc.data());
  const double inv = 1.0 / static_cast<double>(data.num_samples);
  grad.assign(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(n));
  for (double& v : grad) v *= inv;
  // Divide rather than multiply by the reciprocal: the value-only kernel
  // divides, and the two must round identically to stay bit-compatible.
  return acc[n] / static_cast<double>(data.num_samples);
}

namespace serial {

double logistic_value(const Vec& x, const LogisticDataset& data) {
  check_point(x, data, "serial::logistic_value");
  const std::size_t n = data.dim;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.num_samples; ++i) {
    const double* s = data.sample(i);
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m += x[j] * s[j];
    sum += softplus(-data.labels[i] * m);
  }
  return sum / static_cast<double>(data.num_samples);
}

Vec logistic_gradient(const Vec& x, const LogisticDataset& data) {
  check_point(x, data, "serial::logistic_gradient");
  const std::size_t n = data.dim;
  Vec g(n, 0.0);
  for (std::size_t i = 0; i < data.num_samples; ++i) {
    const double* s = data.sample(i);
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m += x[j] * s[j];
    const double w = -data.labels[i] * sigmoid(-data.labels[i] * m);
    for (std::size_t j = 0; j < n; ++j) g[j] += w * s[j];
  }
  const double inv = 1.0 / static_cast<double>(data.num_samples);
  for (double& v : g) v *= inv;
  return g;
}

}  // namespace serial

Matrix logistic_gram(const LogisticDataset& data) {
  const std::size_t n = data.dim;
  Matrix gram(n, n);
  // Upper triangle entry by entry; each entry is a deterministic blocked sum
  // over samples, so the result matches across thread counts.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double s = blocked_sum(data.num_samples, [&](std::size_t i) {
        const double* row = data.sample(i);
        return row[a] * row[b];
      });
      gram(a, b) = s;
      gram(b, a) = s;
    }
  }
  return gram;
}

double logistic_smoothness(const LogisticDataset& data) {
  // The sample-mean logistic loss has Hessian (1/N) S^T D S with diagonal
  // weights in (0, 1/4], so lambda_max(S^T S) / (4N) is a global smoothness
  // constant for the gradient.
  return sym_lambda_max(logistic_gram(data)) /
         (4.0 * static_cast<double>(data.num_samples));
}

Objective logistic_objective(LogisticDataset data) {
  data.validate();
  auto shared = std::make_shared<LogisticDataset>(std::move(data));
  Objective obj;
  obj.dim = shared->dim;
  obj.value_fn = [shared](const Vec& x) { return logistic_value(x, *shared); };
  obj.gradient_fn = [shared](const Vec& x) { return logistic_gradient(x, *shared); };
  obj.value_grad_fn = [shared](const Vec& x, Vec& g) {
    return logistic_value_gradient(x, *shared, g);
  };
  obj.smoothness = logistic_smoothness(*shared);
  return obj;
}

}  // namespace affgd
