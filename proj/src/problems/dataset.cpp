#include "pal/problems/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "pal/error.hpp"

namespace pal::problems {

std::size_t Dataset::num_classes() const {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
}

Dataset make_two_blobs(std::size_t samples, std::uint64_t seed) {
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(samples), 2);
  data.labels.resize(samples);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < samples; ++i) {
    const int label = static_cast<int>(i % 2);
    const double cx = label == 0 ? -2.0 : 2.0;
    const auto row = static_cast<Eigen::Index>(i);
    data.features(row, 0) = cx + normal(rng);
    data.features(row, 1) = normal(rng);
    data.labels[i] = label;
  }
  return data;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) {
      auto res = std::to_chars(buf, buf + sizeof(buf), data.features(row, j));
      out.write(buf, res.ptr - buf);
      out.put(' ');
    }
    out << data.labels[i] << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      double v = 0.0;
      auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw InvalidArgument("dataset line " + std::to_string(line_no) + ": bad number '" + token + "'");
      }
      values.push_back(v);
    }
    if (values.size() < 2) {
      throw InvalidArgument("dataset line " + std::to_string(line_no) + ": need features and a label");
    }
    const double label = values.back();
    if (label < 0.0 || label != static_cast<double>(static_cast<int>(label))) {
      throw InvalidArgument("dataset line " + std::to_string(line_no) + ": label must be a non-negative integer");
    }
    values.pop_back();
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw InvalidArgument("dataset line " + std::to_string(line_no) + ": inconsistent feature count");
    }
    labels.push_back(static_cast<int>(label));
    rows.push_back(std::move(values));
  }
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  data.labels = std::move(labels);
  return data;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  write_dataset(out, data);
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open dataset " + path.string());
  return read_dataset(in);
}

}  // namespace pal::problems
