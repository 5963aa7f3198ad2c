#pragma once

#include "affgd/dataset.hpp"
#include "affgd/objective.hpp"

namespace affgd {

/// Mean logistic loss (1/N) sum_i log(1 + exp(-y_i x^T s_i)), evaluated with
/// the stable softplus form. Blocked OpenMP reduction; see parallel.hpp for
/// the determinism guarantee.
double logistic_value(const Vec& x, const LogisticDataset& data);

/// (1/N) sum_i (-y_i s_i) sigma(-y_i x^T s_i).
Vec logistic_gradient(const Vec& x, const LogisticDataset& data);

/// Fused single pass over the samples; returns the value and fills grad.
double logistic_value_gradient(const Vec& x, const LogisticDataset& data, Vec& grad);

/// Gram matrix S^T S.
Matrix logistic_gram(const LogisticDataset& data);

/// Smallest global smoothness constant sigma_max(S)^2 / (4N).
double logistic_smoothness(const LogisticDataset& data);

/// Objective bundle over a shared copy of the dataset; sets `smoothness`.
Objective logistic_objective(LogisticDataset data);

/// Serial reference implementations kept for testing and benchmarking the
/// parallel kernels: plain left-to-right per-sample summation, no blocking.
namespace serial {
double logistic_value(const Vec& x, const LogisticDataset& data);
Vec logistic_gradient(const Vec& x, const LogisticDataset& data);
}  // namespace serial

}  // namespace affgd
