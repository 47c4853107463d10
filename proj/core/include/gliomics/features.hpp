#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "gliomics/histogram.hpp"
#include "gliomics/shape.hpp"
#include "gliomics/volume.hpp"

namespace gliomics {

enum class FeatureKind { V1, V2, V3, Shape };

/// 14, 70, 28 and 20 values respectively.
std::size_t feature_length(FeatureKind kind);
std::string_view to_string(FeatureKind kind);
std::optional<FeatureKind> parse_feature_kind(std::string_view name);

/// Fixed-length feature vector; the constructor enforces the length.
class FeatureVector {
 public:
  FeatureVector(FeatureKind kind, std::vector<double> values);

  FeatureKind kind() const { return kind_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  FeatureKind kind_;
  std::vector<double> values_;
};

/// Intensity block over the union of labels 1..5 (edema included).
FeatureVector build_v1(const Volume& volume, const LabelMap& labels);

/// Intensity blocks for labels 1, 2, 3, 4, 5 in that order; an absent
/// label contributes fourteen zeros.
FeatureVector build_v2(const Volume& volume, const LabelMap& labels);

/// Intensity blocks for label 2 (enhancing) then label 5 (necrosis).
FeatureVector build_v3(const Volume& volume, const LabelMap& labels);

/// For each label 1..5, the area-weighted mean of the shape descriptors of
/// its 26-connected components (zeros when the label is absent).
FeatureVector shape_block(const LabelMap& labels);

/// Dispatches on kind. Shape ignores `volume`.
FeatureVector build_features(FeatureKind kind, const Volume& volume, const LabelMap& labels);

}  // namespace gliomics
