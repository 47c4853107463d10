#include "gliomics/features.hpp"

#include <algorithm>
#include <string>

#include "gliomics/components.hpp"
#include "gliomics/error.hpp"

namespace gliomics {

std::size_t feature_length(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::V1: return kIntensityBlockLength;
    case FeatureKind::V2: return kIntensityBlockLength * kLabelCount;
    case FeatureKind::V3: return kIntensityBlockLength * 2;
    case FeatureKind::Shape: return kShapeBlockLength * kLabelCount;
  }
  return 0;
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::V1: return "V1";
    case FeatureKind::V2: return "V2";
    case FeatureKind::V3: return "V3";
    case FeatureKind::Shape: return "SHAPE";
  }
  return "?";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "V1") return FeatureKind::V1;
  if (upper == "V2") return FeatureKind::V2;
  if (upper == "V3") return FeatureKind::V3;
  if (upper == "SHAPE") return FeatureKind::Shape;
  return std::nullopt;
}

FeatureVector::FeatureVector(FeatureKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.size() != feature_length(kind_)) {
    fail(ErrorCode::InvalidArgument, std::string(to_string(kind_)) + " vector must have " +
                                         std::to_string(feature_length(kind_)) +
                                         " values, got " + std::to_string(values_.size()));
  }
}

namespace {

void require_same_grid(const Volume& volume, const LabelMap& labels) {
  if (!volume.geometry().same_grid(labels.geometry())) {
    fail(ErrorCode::GeometryMismatch, "label map and volume are not on the same grid");
  }
}

void append(std::vector<double>& out, const IntensityBlock& block) {
  const auto v = block.values();
  out.insert(out.end(), v.begin(), v.end());
}

std::vector<double> blocks_for(const Volume& volume, const LabelMap& labels,
                               std::initializer_list<int> which) {
  require_same_grid(volume, labels);
  std::vector<double> out;
  out.reserve(which.size() * kIntensityBlockLength);
  for (int label : which) append(out, intensity_block(volume, label_mask(labels, label)));
  return out;
}

}  // namespace

FeatureVector build_v1(const Volume& volume, const LabelMap& labels) {
  require_same_grid(volume, labels);
  constexpr int tumor[] = {1, 2, 3, 4, 5};
  std::vector<double> out;
  append(out, intensity_block(volume, label_mask(labels, tumor)));
  return FeatureVector(FeatureKind::V1, std::move(out));
}

FeatureVector build_v2(const Volume& volume, const LabelMap& labels) {
  return FeatureVector(FeatureKind::V2, blocks_for(volume, labels, {1, 2, 3, 4, 5}));
}

FeatureVector build_v3(const Volume& volume, const LabelMap& labels) {
  return FeatureVector(FeatureKind::V3, blocks_for(volume, labels, {2, 5}));
}

FeatureVector shape_block(const LabelMap& labels) {
  std::vector<double> out;
  out.reserve(feature_length(FeatureKind::Shape));
  const auto& spacing = labels.geometry().spacing;
  for (int label = 1; label <= kLabelCount; ++label) {
    std::array<double, kShapeBlockLength> sum{};
    double weight = 0.0;
    for (const Component& c : connected_components(label_mask(labels, label))) {
      const ShapeBlock s = shape_features(c, spacing);
      const auto v = s.values();
      for (int k = 0; k < kShapeBlockLength; ++k) sum[k] += s.area_mm2 * v[k];
      weight += s.area_mm2;
    }
    for (int k = 0; k < kShapeBlockLength; ++k) {
      out.push_back(weight > 0.0 ? sum[k] / weight : 0.0);
    }
  }
  return FeatureVector(FeatureKind::Shape, std::move(out));
}

FeatureVector build_features(FeatureKind kind, const Volume& volume, const LabelMap& labels) {
  switch (kind) {
    case FeatureKind::V1: return build_v1(volume, labels);
    case FeatureKind::V2: return build_v2(volume, labels);
    case FeatureKind::V3: return build_v3(volume, labels);
    case FeatureKind::Shape: return shape_block(labels);
  }
  fail(ErrorCode::InvalidArgument, "unknown feature kind");
}

}  // namespace gliomics
