#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "shiftscope/rng.hpp"

namespace shiftscope {

/// n x d row-major matrix of finite doubles; ids[i] names row i.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  /// Throws InvalidArgument unless data.size() == ids.size() * dim, dim >= 1
  /// and every value is finite.
  FeatureMatrix(std::vector<std::string> ids, std::vector<double> data, std::size_t dim);

  std::size_t rows() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }

  /// Rows in the given order (indices may repeat).
  FeatureMatrix select(std::span<const std::size_t> indices) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<double> data_;
  std::size_t dim_ = 0;
};

/// Stacks a over b (equal dims required).
FeatureMatrix concat_rows(const FeatureMatrix& a, const FeatureMatrix& b);

/// k rows drawn uniformly without replacement (partial Fisher-Yates).
FeatureMatrix subsample(const FeatureMatrix& m, std::size_t k, RngSeed seed);

enum class FeatureFormat { csv, binary };

/// Binary when the path ends in .dgf or .bin, CSV otherwise.
FeatureFormat format_for_path(const std::filesystem::path& path);

std::string serialize_features_csv(const FeatureMatrix& m);
std::string serialize_features_binary(const FeatureMatrix& m);
/// Detects the binary magic; anything else is parsed as CSV.
FeatureMatrix parse_features(std::string_view bytes);

FeatureMatrix load_features(const std::filesystem::path& path);
void save_features(const FeatureMatrix& m, const std::filesystem::path& path);
void save_features(const FeatureMatrix& m, const std::filesystem::path& path, FeatureFormat format);

}  // namespace shiftscope
