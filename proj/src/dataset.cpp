#include "affgd/dataset.hpp"

#include <cmath>
#include <sstream>

#include "affgd/errors.hpp"
#include "affgd/io.hpp"
#include "affgd/linalg.hpp"
#include "affgd/rng.hpp"

namespace affgd {

void LogisticDataset::validate() const {
  if (num_samples == 0 || dim == 0)
    throw InvalidArgumentError("dataset: empty shape");
  if (features.size() != num_samples * dim)
    throw InvalidArgumentError("dataset: feature buffer size mismatch");
  if (labels.size() != num_samples)
    throw InvalidArgumentError("dataset: label count mismatch");
  for (double y : labels)
    if (y != 1.0 && y != -1.0)
      throw InvalidArgumentError("dataset: labels must be +1 or -1");
}

bool perceptron_separable(const LogisticDataset& data, std::size_t max_epochs) {
  // Homogeneous perceptron: terminates with a separator iff one exists
  // (within the epoch budget).  Used to reject linearly separable draws,
  // which would push the logistic minimizer to infinity.
  Vec w(data.dim, 0.0);
  for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
    bool updated = false;
    for (std::size_t i = 0; i < data.num_samples; ++i) {
      const double* s = data.sample(i);
      double margin = 0.0;
      for (std::size_t j = 0; j < data.dim; ++j) margin += w[j] * s[j];
      if (data.labels[i] * margin <= 0.0) {
        for (std::size_t j = 0; j < data.dim; ++j) w[j] += data.labels[i] * s[j];
        updated = true;
      }
    }
    if (!updated) return true;
  }
  return false;
}

namespace {

LogisticDataset draw_candidate(std::size_t num_samples, std::size_t dim,
                               std::uint64_t seed, double flip_fraction) {
  LogisticDataset data;
  data.num_samples = num_samples;
  data.dim = dim;
  data.features.resize(num_samples * dim);
  data.labels.resize(num_samples);

  Rng rng(seed);
  const double shift = 1.0 / std::sqrt(static_cast<double>(dim));
  const std::size_t positives = (num_samples + 1) / 2;
  for (std::size_t i = 0; i < num_samples; ++i) {
    const double cluster = (i < positives) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < dim; ++j)
      data.features[i * dim + j] = cluster * shift + rng.normal();
    data.labels[i] = cluster;
  }

  const std::size_t flips = static_cast<std::size_t>(
      std::ceil(flip_fraction * static_cast<double>(num_samples)));
  // Partial Fisher-Yates: the first `flips` slots are a uniform sample
  // of distinct indices, so repeated seeds flip the same labels.
  std::vector<std::size_t> idx(num_samples);
  for (std::size_t i = 0; i < num_samples; ++i) idx[i] = i;
  for (std::size_t i = 0; i < flips && i < num_samples; ++i) {
    const std::size_t j = i + rng.index(num_samples - i);
    std::swap(idx[i], idx[j]);
    data.labels[idx[i]] = -data.labels[idx[i]];
  }
  return data;
}

}  // namespace

LogisticDataset make_logistic_dataset(std::size_t num_samples, std::size_t dim,
                                      std::uint64_t seed, double flip_fraction) {
  if (num_samples == 0 || dim == 0)
    throw InvalidArgumentError("make_logistic_dataset: empty shape");
  if (flip_fraction < 0.0 || flip_fraction > 1.0)
    throw InvalidArgumentError("make_logistic_dataset: flip fraction outside [0,1]");

  for (int attempt = 0; attempt < 100; ++attempt) {
    LogisticDataset data = draw_candidate(num_samples, dim, seed + attempt, flip_fraction);
    data.validate();
    if (!perceptron_separable(data)) return data;
  }
  throw GenerationError(
      "make_logistic_dataset: could not draw a non-separable dataset in 100 attempts");
}

std::string dataset_csv(const LogisticDataset& data) {
  std::ostringstream out;
  out << "label";
  for (std::size_t j = 1; j <= data.dim; ++j) out << ",f" << j;
  out << "\n";
  for (std::size_t i = 0; i < data.num_samples; ++i) {
    out << (data.labels[i] > 0 ? "+1" : "-1");
    const double* s = data.sample(i);
    for (std::size_t j = 0; j < data.dim; ++j) out << "," << fmt_g17(s[j]);
    out << "\n";
  }
  return out.str();
}

void write_dataset_csv(const LogisticDataset& data, const std::string& path) {
  write_file_atomic(path, dataset_csv(data));
}

LogisticDataset read_dataset_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgumentError("read_dataset_csv: empty file");
  const auto header = split(line, ',');
  if (header.empty() || header[0] != "label")
    throw InvalidArgumentError("read_dataset_csv: bad header");
  const std::size_t dim = header.size() - 1;
  if (dim == 0) throw InvalidArgumentError("read_dataset_csv: no feature columns");

  LogisticDataset data;
  data.dim = dim;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != dim + 1)
      throw InvalidArgumentError("read_dataset_csv: ragged row");
    data.labels.push_back(std::stod(cells[0]));
    for (std::size_t j = 0; j < dim; ++j)
      data.features.push_back(std::stod(cells[j + 1]));
  }
  data.num_samples = data.labels.size();
  data.validate();
  return data;
}

}  // namespace affgd
