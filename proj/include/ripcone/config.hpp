#pragma once

#include <string>

#include "json.hpp"

#include "ripcone/norms.hpp"

namespace ripcone {

using Json = nlohmann::json;

/// Model from JSON, e.g.
///   {"family": "group_sparse", "dim": 12, "groups": {"count": 6, "size": 2}, "K": 1}
/// Families: group_sparse, block_sparse, low_rank, half_lines, point_cloud,
/// permutation, subspace. Throws std::invalid_argument on malformed input.
ModelSet parse_model(const Json& j);
Json model_to_json(const ModelSet& model);

/// Regularizer from JSON, e.g. {"type": "group_norm"}. Structure omitted
/// from the regularizer is taken from `model` when given.
/// Types: group_norm, weighted_block_norm, nuclear, model_atomic, birkhoff,
/// subspace_indicator, l1.
Regularizer parse_regularizer(const Json& j, const ModelSet* model = nullptr);
Json regularizer_to_json(const Regularizer& f);

/// Reads a JSON file; throws std::invalid_argument naming the path on failure.
Json load_json(const std::string& path);

}  // namespace ripcone
