#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "gliomics/mlp.hpp"
#include "gliomics/standardizer.hpp"
#include "gliomics/svm.hpp"

namespace gliomics {

/// A trained classifier as stored on disk: the model, the standardizer its
/// inputs go through, and the seed that produced it.
struct StoredModel {
  std::variant<SvmModel, OvaSvm, MlpModel> model;
  Standardizer standardizer;
  std::uint64_t seed = 0;
};

/// JSON object {type, kernel|activation, hyperparameters, weights|support
/// vectors, standardizer, seed}. Doubles are written with round-trip precision.
std::string to_json(const StoredModel& stored);

/// Throws ParseError on malformed input.
StoredModel model_from_json(std::string_view json);

}  // namespace gliomics
