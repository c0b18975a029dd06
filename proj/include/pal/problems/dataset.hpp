#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "pal/loss_oracle.hpp"

namespace pal::problems {

/// Labelled samples; row i of `features` belongs to `labels[i]`.
struct Dataset {
  Matrix features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  /// 1 + the largest label.
  std::size_t num_classes() const;
};

/// Two unit-variance Gaussian blobs in the plane centred at (-2, 0) (label 0)
/// and (+2, 0) (label 1). Labels alternate so both classes get samples/2
/// points (the extra one goes to class 0 when samples is odd).
Dataset make_two_blobs(std::size_t samples, std::uint64_t seed);

/// Plain text, one sample per line: features separated by spaces, then the
/// integer label. Values are written with round-trip precision.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace pal::problems
