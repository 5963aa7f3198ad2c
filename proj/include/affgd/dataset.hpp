#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "affgd/linalg.hpp"

namespace affgd {

/// Binary classification sample set. Features are row-major num_samples x dim,
/// labels are exactly -1.0 or +1.0.
struct LogisticDataset {
  std::size_t num_samples = 0;
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<double> labels;

  const double* sample(std::size_t i) const { return &features[i * dim]; }

  bool operator==(const LogisticDataset&) const = default;

  /// Throws InvalidArgumentError on shape/label violations.
  void validate() const;
};

/// Two unit-variance Gaussian clusters with means +/-(1,...,1)/sqrt(n),
/// labeled by cluster, then ceil(flip_fraction*N) labels flipped at seeded
/// positions. The result is checked non-linearly-separable (through the
/// origin); on failure the seed is incremented and generation retried, up to
/// 100 attempts (GenerationError after that).
LogisticDataset make_logistic_dataset(std::size_t num_samples, std::size_t dim,
                                      std::uint64_t seed, double flip_fraction = 0.2);

/// Homogeneous perceptron feasibility probe: returns true when a separating
/// direction is found within max_epochs epochs.
bool perceptron_separable(const LogisticDataset& data, std::size_t max_epochs = 10000);

/// CSV schema: header "label,f1,...,fn"; labels serialized as -1/+1 integers.
std::string dataset_csv(const LogisticDataset& data);
void write_dataset_csv(const LogisticDataset& data, const std::string& path);
LogisticDataset read_dataset_csv(const std::string& path);

}  // namespace affgd
