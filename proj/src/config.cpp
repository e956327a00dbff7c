#include "ripcone/config.hpp"

#include <fstream>
#include <stdexcept>

namespace ripcone {
namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing key '") + key + "'");
  return j.at(key);
}

Index as_index(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  return v.get<Index>();
}

// Columns are the listed vectors.
Matrix columns(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_array() || v.empty() || !v[0].is_array()) bad(std::string("'") + key + "' must be a list of vectors");
  const Index rows = static_cast<Index>(v[0].size());
  Matrix m(rows, static_cast<Index>(v.size()));
  for (std::size_t c = 0; c < v.size(); ++c) {
    if (static_cast<Index>(v[c].size()) != rows) bad(std::string("vectors in '") + key + "' differ in length");
    for (Index r = 0; r < rows; ++r) m(r, static_cast<Index>(c)) = v[c][static_cast<std::size_t>(r)].get<double>();
  }
  return m;
}

Json columns_json(const Matrix& m) {
  Json out = Json::array();
  for (Index c = 0; c < m.cols(); ++c) {
    Json col = Json::array();
    for (Index r = 0; r < m.rows(); ++r) col.push_back(m(r, c));
    out.push_back(col);
  }
  return out;
}

GroupStructure parse_groups(const Json& g, Index dim) {
  if (g.is_string()) {
    if (g.get<std::string>() == "singletons") return GroupStructure::singletons(dim);
    bad("unknown group shorthand '" + g.get<std::string>() + "'");
  }
  if (g.is_object()) {
    const Index offset = g.contains("offset") ? g.at("offset").get<Index>() : 0;
    return GroupStructure::contiguous(as_index(g, "count"), as_index(g, "size"), dim, offset);
  }
  if (g.is_array()) return GroupStructure(g.get<std::vector<std::vector<Index>>>(), dim);
  bad("groups must be \"singletons\", {count, size[, offset]} or a list of index lists");
}

Index dim_of(const Json& j) {
  const Index d = as_index(j, "dim");
  if (d < 1) bad("dim must be >= 1");
  return d;
}

BlockStructure parse_blocks(const Json& j) {
  const Index dim = dim_of(j);
  const Json& list = need(j, "blocks");
  if (!list.is_array() || list.empty()) bad("blocks must be a non-empty list");
  std::vector<Block> blocks;
  for (const auto& b : list) {
    Block blk;
    blk.groups = parse_groups(need(b, "groups"), dim);
    blk.sparsity = as_index(b, "sparsity");
    blk.weight = b.contains("weight") ? b.at("weight").get<double>() : 1.0;
    blocks.push_back(std::move(blk));
  }
  BlockStructure out(std::move(blocks));
  if (j.contains("weights")) {
    if (j.at("weights") != "balanced") bad("weights may only be \"balanced\"");
    out = out.with_balanced_weights();
  }
  return out;
}

Json groups_json(const GroupStructure& g) { return g.groups(); }

Json blocks_json(const BlockStructure& b) {
  Json out = {{"dim", b.ambient_dim()}, {"blocks", Json::array()}};
  for (const auto& blk : b.blocks())
    out["blocks"].push_back({{"groups", groups_json(blk.groups)}, {"sparsity", blk.sparsity}, {"weight", blk.weight}});
  return out;
}

}  // namespace

ModelSet parse_model_impl(const Json& j) {
  const std::string family = need(j, "family").get<std::string>();
  if (family == "group_sparse") return GroupSparse{parse_groups(need(j, "groups"), dim_of(j)), as_index(j, "K")};
  if (family == "block_sparse") return BlockSparse{parse_blocks(j)};
  if (family == "low_rank") return LowRank{as_index(j, "rows"), as_index(j, "cols"), as_index(j, "r")};
  if (family == "half_lines") return HalfLines{columns(j, "atoms")};
  if (family == "point_cloud") return PointCloudCone{columns(j, "points")};
  if (family == "permutation") return PermutationCone{as_index(j, "n")};
  if (family == "subspace") return Subspace{columns(j, "basis")};
  bad("unknown model family '" + family + "'");
}

Json model_to_json(const ModelSet& model) {
  if (const auto* g = model.get_if<GroupSparse>())
    return {{"family", "group_sparse"}, {"dim", g->groups.ambient_dim()}, {"groups", groups_json(g->groups)}, {"K", g->K}};
  if (const auto* b = model.get_if<BlockSparse>()) {
    Json out = blocks_json(b->blocks);
    out["family"] = "block_sparse";
    return out;
  }
  if (const auto* l = model.get_if<LowRank>()) return {{"family", "low_rank"}, {"rows", l->rows}, {"cols", l->cols}, {"r", l->r}};
  if (const auto* h = model.get_if<HalfLines>()) return {{"family", "half_lines"}, {"atoms", columns_json(h->atoms)}};
  if (const auto* p = model.get_if<PointCloudCone>()) return {{"family", "point_cloud"}, {"points", columns_json(p->points)}};
  if (const auto* p = model.get_if<PermutationCone>()) return {{"family", "permutation"}, {"n", p->n}};
  const auto& s = std::get<Subspace>(model.kind);
  return {{"family", "subspace"}, {"basis", columns_json(s.basis)}};
}

Regularizer parse_regularizer_impl(const Json& j, const ModelSet* model) {
  const std::string type = need(j, "type").get<std::string>();
  if (type == "group_norm") {
    if (j.contains("groups")) return GroupNorm{parse_groups(j.at("groups"), dim_of(j))};
    if (model) {
      if (const auto* g = model->get_if<GroupSparse>()) return GroupNorm{g->groups};
      if (const auto* b = model->get_if<BlockSparse>()) return GroupNorm{b->blocks.flattened()};
    }
    bad("group_norm needs groups or a group model");
  }
  if (type == "weighted_block_norm") {
    if (j.contains("blocks")) return WeightedBlockNorm{parse_blocks(j)};
    if (model)
      if (const auto* b = model->get_if<BlockSparse>()) {
        const bool balanced = j.contains("weights") && j.at("weights") == "balanced";
        return WeightedBlockNorm{balanced ? b->blocks.with_balanced_weights() : b->blocks};
      }
    bad("weighted_block_norm needs blocks or a block model");
  }
  if (type == "nuclear") {
    if (j.contains("rows")) return NuclearNorm{as_index(j, "rows"), as_index(j, "cols")};
    if (model)
      if (const auto* l = model->get_if<LowRank>()) return NuclearNorm{l->rows, l->cols};
    bad("nuclear needs rows/cols or a low-rank model");
  }
  if (type == "model_atomic") {
    if (j.contains("model")) return ModelAtomicNorm{parse_model_impl(j.at("model"))};
    if (model) return ModelAtomicNorm{*model};
    bad("model_atomic needs a model");
  }
  if (type == "birkhoff") {
    if (j.contains("n")) return BirkhoffGauge{as_index(j, "n")};
    if (model)
      if (const auto* p = model->get_if<PermutationCone>()) return BirkhoffGauge{p->n};
    bad("birkhoff needs n or a permutation model");
  }
  if (type == "subspace_indicator") {
    if (j.contains("basis")) return SubspaceIndicator{columns(j, "basis")};
    if (model)
      if (const auto* s = model->get_if<Subspace>()) return SubspaceIndicator{s->basis};
    bad("subspace_indicator needs a basis or a subspace model");
  }
  if (type == "l1") {
    if (j.contains("n")) return L1Norm{as_index(j, "n")};
    if (model) return L1Norm{ambient_dim(*model)};
    bad("l1 needs n or a model");
  }
  bad("unknown regularizer type '" + type + "'");
}

Json regularizer_to_json(const Regularizer& f) {
  if (const auto* g = f.get_if<GroupNorm>())
    return {{"type", "group_norm"}, {"dim", g->groups.ambient_dim()}, {"groups", groups_json(g->groups)}};
  if (const auto* b = f.get_if<WeightedBlockNorm>()) {
    Json out = blocks_json(b->blocks);
    out["type"] = "weighted_block_norm";
    return out;
  }
  if (const auto* n = f.get_if<NuclearNorm>()) return {{"type", "nuclear"}, {"rows", n->rows}, {"cols", n->cols}};
  if (const auto* a = f.get_if<ModelAtomicNorm>()) return {{"type", "model_atomic"}, {"model", model_to_json(a->model)}};
  if (const auto* b = f.get_if<BirkhoffGauge>()) return {{"type", "birkhoff"}, {"n", b->n}};
  if (const auto* s = f.get_if<SubspaceIndicator>()) return {{"type", "subspace_indicator"}, {"basis", columns_json(s->basis)}};
  return {{"type", "l1"}, {"n", std::get<L1Norm>(f.kind).n}};
}

ModelSet parse_model(const Json& j) {
  try {
    return parse_model_impl(j);
  } catch (const Json::exception& e) {
    bad(std::string("malformed model: ") + e.what());
  }
}

Regularizer parse_regularizer(const Json& j, const ModelSet* model) {
  try {
    return parse_regularizer_impl(j, model);
  } catch (const Json::exception& e) {
    bad(std::string("malformed regularizer: ") + e.what());
  }
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace ripcone
