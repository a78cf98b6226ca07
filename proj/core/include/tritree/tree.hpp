#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tritree/data.hpp"
#include "tritree/loss.hpp"
#include "tritree/split.hpp"

namespace tritree {

struct TrainConfig {
  Strategy strategy = Strategy::Trinary;
  int max_depth = 5;
  // Minimum rows per child; Fractional Case reads it as a minimum case
  // weight per child.
  std::size_t min_samples = 5;
  std::size_t max_exhaustive_categories = 10;
  bool fc_fractions_from_weights = false;
  // Optional cap on how many middle edges may be chained below a node.
  // Unset means no cap: middle chains end only when features run out.
  std::optional<std::size_t> max_middle_chain;

  void validate() const;
};

enum class NodeKind { Leaf, Binary, Trinary };

std::string to_string(NodeKind k);

struct TreeNode {
  NodeKind kind = NodeKind::Leaf;
  // Fitted parameter of the rows that reached this node during training.
  LeafValue value;
  std::size_t n_samples = 0;
  double weight = 0.0;
  double loss = 0.0;
  int depth = 0;

  // Internal nodes only.
  Partition partition;
  MissingRoute route = MissingRoute::Right;
  double left_fraction = 0.0;
  double right_fraction = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t middle = -1;

  bool is_leaf() const { return kind == NodeKind::Leaf; }
};

// Feature metadata captured at training time; prediction aligns incoming
// datasets to it by column name.
struct FeatureInfo {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  std::vector<std::string> categories;

  bool operator==(const FeatureInfo&) const = default;
};

class Tree {
 public:
  // Validates structure: child links, node kinds allowed by the strategy,
  // leaf parameters, FC fractions.
  Tree(std::vector<FeatureInfo> features, LossKind loss, Strategy strategy, std::vector<std::string> class_names,
       std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(std::int32_t index) const { return nodes_.at(static_cast<std::size_t>(index)); }
  const std::vector<FeatureInfo>& features() const { return features_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  LossKind loss_kind() const { return loss_; }
  Strategy strategy() const { return strategy_; }

  std::size_t leaf_count() const;
  // Deepest leaf depth; middle edges do not add depth.
  int depth() const;

  // `row` holds one cell per tree feature in the tree's own coding (NaN for
  // missing, category codes into FeatureInfo::categories).
  LeafValue predict(std::span<const double> row) const;

  // Aligns `ds` to the tree's features by name and predicts every row.
  // Categories the tree never saw are treated as missing.
  std::vector<LeafValue> predict(const Dataset& ds) const;

  // Cells of `ds` re-coded into the tree's feature order and category codes.
  std::vector<std::vector<double>> encode(const Dataset& ds) const;

 private:
  LeafValue predict_from(std::int32_t index, std::span<const double> row) const;
  void validate() const;

  std::vector<FeatureInfo> features_;
  LossKind loss_;
  Strategy strategy_;
  std::vector<std::string> class_names_;
  std::vector<TreeNode> nodes_;
};

LossKind loss_kind_for(const Dataset& ds);

// Greedy recursive training. Leaves are produced at max_depth, on pure
// nodes, when fewer than 2*min_samples rows (or weight, for FC) remain, or
// when no feasible split exists. Trinary-style splits always grow a middle
// child on the full row set at unchanged depth with the split feature
// removed for that whole subtree.
Tree train(const Dataset& ds, std::span<const RowRef> rows, const TrainConfig& config);
Tree train(const Dataset& ds, const TrainConfig& config);

// JSON tree document; see docs/tree_format.md.
std::string serialize(const Tree& tree);
// Throws ParseError on malformed documents and ValidationError when a
// document violates a tree invariant.
Tree deserialize(const std::string& text);

// Indented one-line-per-node text rendering.
std::string render(const Tree& tree);

}  // namespace tritree
