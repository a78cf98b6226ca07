#include "tritree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "tritree/csv.hpp"
#include "tritree/errors.hpp"

namespace tritree {

void TrainConfig::validate() const {
  if (max_depth < 0) throw ValidationError("max_depth must be >= 0");
  if (min_samples < 1) throw ValidationError("min_samples must be >= 1");
}

std::string to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Leaf: return "leaf";
    case NodeKind::Binary: return "binary";
    case NodeKind::Trinary: return "trinary";
  }
  return "?";
}

LossKind loss_kind_for(const Dataset& ds) {
  const auto& y = ds.response();
  return y.is_classification() ? LossKind::cross_entropy(y.n_classes()) : LossKind::sse();
}

// ---------------------------------------------------------------- training

namespace {

class Grower {
 public:
  Grower(const Dataset& ds, const TrainConfig& cfg)
      : ds_(ds), cfg_(cfg), kind_(loss_kind_for(ds)) {
    split_cfg_.min_child = cfg.min_samples;
    split_cfg_.min_child_weight = static_cast<double>(cfg.min_samples);
    split_cfg_.max_exhaustive_categories = cfg.max_exhaustive_categories;
    split_cfg_.fractions_from_weights = cfg.fc_fractions_from_weights;
  }

  std::vector<TreeNode> take() { return std::move(nodes_); }

  std::int32_t grow(const RowSet& rows, int depth, const std::vector<std::size_t>& features,
                    std::size_t middle_chain) {
    const auto& y = ds_.response();
    NodeStats stats(kind_);
    for (const RowRef& r : rows) stats.add(y[r.row], r.weight);

    TreeNode node;
    node.value = stats.leaf();
    node.n_samples = rows.size();
    node.weight = stats.weight();
    node.loss = stats.fitted_loss();
    node.depth = depth;
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);

    if (stop_here(rows, stats, depth, features)) return index;
    auto split = best_split(ds_, rows, features, cfg_.strategy, kind_, split_cfg_);
    if (!split) return index;

    const bool middle = split->route == MissingRoute::Middle;
    if (middle && cfg_.max_middle_chain && middle_chain >= *cfg_.max_middle_chain) {
      // Cap reached: fall back to a plain leaf rather than a chain-less
      // three-way node, so every Trinary node keeps its middle child.
      return index;
    }

    {
      TreeNode& n = nodes_[static_cast<std::size_t>(index)];
      n.kind = middle ? NodeKind::Trinary : NodeKind::Binary;
      n.partition = split->partition;
      n.route = split->route;
      n.left_fraction = split->left_fraction;
      n.right_fraction = split->right_fraction;
    }

    RowSet left = std::move(split->left);
    RowSet right = std::move(split->right);
    const std::size_t feature = split->partition.feature;
    split.reset();

    const std::int32_t l = grow(left, depth + 1, features, 0);
    left = RowSet();
    const std::int32_t r = grow(right, depth + 1, features, 0);
    right = RowSet();
    nodes_[static_cast<std::size_t>(index)].left = l;
    nodes_[static_cast<std::size_t>(index)].right = r;

    if (middle) {
      std::vector<std::size_t> remaining;
      for (std::size_t f : features) {
        if (f != feature) remaining.push_back(f);
      }
      const std::int32_t m = grow(rows, depth, remaining, middle_chain + 1);
      nodes_[static_cast<std::size_t>(index)].middle = m;
    }
    return index;
  }

 private:
  bool stop_here(const RowSet& rows, const NodeStats& stats, int depth,
                 const std::vector<std::size_t>& features) const {
    if (depth >= cfg_.max_depth || features.empty()) return true;
    const double two_min = 2.0 * static_cast<double>(cfg_.min_samples);
    if (cfg_.strategy == Strategy::FractionalCase ? stats.weight() < two_min
                                                  : static_cast<double>(rows.size()) < two_min) {
      return true;
    }
    // Pure node: every response equal, so the training loss is zero.
    const auto& y = ds_.response();
    const double first = y[rows.front().row];
    return std::all_of(rows.begin(), rows.end(), [&](const RowRef& r) { return y[r.row] == first; });
  }

  const Dataset& ds_;
  const TrainConfig& cfg_;
  LossKind kind_;
  SplitConfig split_cfg_;
  std::vector<TreeNode> nodes_;
};

std::vector<FeatureInfo> feature_info(const Dataset& ds) {
  std::vector<FeatureInfo> out;
  for (const auto& c : ds.columns()) out.push_back({c.name(), c.kind(), c.categories()});
  return out;
}

}  // namespace

Tree train(const Dataset& ds, std::span<const RowRef> rows, const TrainConfig& config) {
  config.validate();
  if (rows.empty()) throw ValidationError("cannot train a tree on an empty row set");
  std::vector<std::size_t> features(ds.n_features());
  for (std::size_t j = 0; j < features.size(); ++j) features[j] = j;
  Grower grower(ds, config);
  grower.grow(RowSet(rows.begin(), rows.end()), 0, features, 0);
  const auto& y = ds.response();
  return Tree(feature_info(ds), loss_kind_for(ds), config.strategy, y.class_names(), grower.take());
}

Tree train(const Dataset& ds, const TrainConfig& config) {
  const RowSet rows = all_rows(ds.n_rows());
  return train(ds, rows, config);
}

// ---------------------------------------------------------------- tree

Tree::Tree(std::vector<FeatureInfo> features, LossKind loss, Strategy strategy, std::vector<std::string> class_names,
           std::vector<TreeNode> nodes)
    : features_(std::move(features)),
      loss_(loss),
      strategy_(strategy),
      class_names_(std::move(class_names)),
      nodes_(std::move(nodes)) {
  validate();
}

void Tree::validate() const {
  if (nodes_.empty()) throw ValidationError("tree has no nodes");
  if (!loss_.is_sse() && class_names_.size() != static_cast<std::size_t>(loss_.n_classes())) {
    throw ValidationError("tree class names do not match the class count");
  }
  const auto n = static_cast<std::int32_t>(nodes_.size());
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& node = nodes_[i];
    const std::string where = "node " + std::to_string(i) + ": ";
    if (node.value.is_real() != loss_.is_sse()) throw ValidationError(where + "leaf value does not match loss");
    if (!node.value.is_real() && node.value.probs().size() != static_cast<std::size_t>(loss_.n_classes())) {
      throw ValidationError(where + "probability vector has the wrong length");
    }
    if (node.is_leaf()) {
      if (node.left != -1 || node.right != -1 || node.middle != -1) {
        throw ValidationError(where + "leaf with children");
      }
      continue;
    }
    auto check_child = [&](std::int32_t c) {
      if (c <= static_cast<std::int32_t>(i) || c >= n) throw ValidationError(where + "bad child link");
      ++parents[static_cast<std::size_t>(c)];
    };
    check_child(node.left);
    check_child(node.right);
    if (node.partition.feature >= features_.size()) throw ValidationError(where + "split feature out of range");
    const FeatureInfo& f = features_[node.partition.feature];
    if (f.kind != node.partition.kind) throw ValidationError(where + "split kind does not match feature");
    if (f.kind == FeatureKind::Numeric && !std::isfinite(node.partition.threshold)) {
      throw ValidationError(where + "non-finite threshold");
    }
    for (const auto* set : {&node.partition.left_categories, &node.partition.right_categories}) {
      for (int code : *set) {
        if (code < 0 || static_cast<std::size_t>(code) >= f.categories.size()) {
          throw ValidationError(where + "category outside dictionary");
        }
      }
    }
    if (node.kind == NodeKind::Trinary) {
      if (strategy_ != Strategy::Trinary && strategy_ != Strategy::TrinaryMia) {
        throw ValidationError(where + "three-way node in a " + to_string(strategy_) + " tree");
      }
      if (node.route != MissingRoute::Middle) throw ValidationError(where + "three-way node must route middle");
      check_child(node.middle);
    } else {
      if (node.middle != -1) throw ValidationError(where + "binary node with a middle child");
      if (node.route == MissingRoute::Middle) throw ValidationError(where + "binary node routes middle");
    }
    if (node.route == MissingRoute::Fractional) {
      if (strategy_ != Strategy::FractionalCase) throw ValidationError(where + "fractional routing outside FC");
      const double wl = node.left_fraction;
      const double wr = node.right_fraction;
      if (!(wl >= 0.0 && wl <= 1.0 && wr >= 0.0 && wr <= 1.0) || std::abs(wl + wr - 1.0) > 1e-12) {
        throw ValidationError(where + "fractions must lie in [0,1] and sum to 1");
      }
    }
  }
  for (std::size_t i = 1; i < parents.size(); ++i) {
    if (parents[i] != 1) throw ValidationError("node " + std::to_string(i) + " is not reachable exactly once");
  }
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int Tree::depth() const {
  int d = 0;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) d = std::max(d, n.depth);
  }
  return d;
}

LeafValue Tree::predict(std::span<const double> row) const {
  if (row.size() != features_.size()) {
    throw ValidationError("row has " + std::to_string(row.size()) + " cells, tree expects " +
                          std::to_string(features_.size()));
  }
  return predict_from(0, row);
}

LeafValue Tree::predict_from(std::int32_t index, std::span<const double> row) const {
  const TreeNode* node = &nodes_[static_cast<std::size_t>(index)];
  while (!node->is_leaf()) {
    std::int32_t next = -1;
    switch (node->partition.side(row[node->partition.feature])) {
      case Side::Left: next = node->left; break;
      case Side::Right: next = node->right; break;
      case Side::Neither:
        switch (node->route) {
          case MissingRoute::Left: next = node->left; break;
          case MissingRoute::Right: next = node->right; break;
          case MissingRoute::Middle: next = node->middle; break;
          case MissingRoute::Fractional: {
            const LeafValue l = predict_from(node->left, row);
            const LeafValue r = predict_from(node->right, row);
            const double wl = node->left_fraction;
            const double wr = node->right_fraction;
            if (l.is_real()) return LeafValue::real(wl * l.value() + wr * r.value());
            std::vector<double> p(l.probs().size());
            double total = 0.0;
            for (std::size_t k = 0; k < p.size(); ++k) {
              p[k] = wl * l.probs()[k] + wr * r.probs()[k];
              total += p[k];
            }
            for (double& v : p) v /= total;
            return LeafValue::probabilities(std::move(p));
          }
        }
    }
    node = &nodes_[static_cast<std::size_t>(next)];
  }
  return node->value;
}

std::vector<std::vector<double>> Tree::encode(const Dataset& ds) const {
  struct Binding {
    std::size_t column;
    std::vector<double> remap;  // dataset code -> tree code (NaN if unseen)
  };
  std::vector<Binding> bindings;
  for (const FeatureInfo& f : features_) {
    auto j = ds.column_index(f.name);
    if (!j) throw SchemaError("dataset lacks feature column '" + f.name + "' required by the tree");
    const FeatureColumn& col = ds.column(*j);
    if (col.kind() != f.kind) throw SchemaError("column '" + f.name + "' has a different kind than in training");
    Binding b{*j, {}};
    if (f.kind == FeatureKind::Categorical) {
      std::map<std::string, double> code;
      for (std::size_t k = 0; k < f.categories.size(); ++k) code[f.categories[k]] = static_cast<double>(k);
      for (const auto& label : col.categories()) {
        auto it = code.find(label);
        b.remap.push_back(it == code.end() ? kMissing : it->second);
      }
    }
    bindings.push_back(std::move(b));
  }
  std::vector<std::vector<double>> rows(ds.n_rows(), std::vector<double>(features_.size()));
  for (std::size_t f = 0; f < bindings.size(); ++f) {
    const auto& b = bindings[f];
    const FeatureColumn& col = ds.column(b.column);
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
      const double v = col[i];
      rows[i][f] = (b.remap.empty() || is_missing(v)) ? v : b.remap[static_cast<std::size_t>(v)];
    }
  }
  return rows;
}

std::vector<LeafValue> Tree::predict(const Dataset& ds) const {
  const auto rows = encode(ds);
  std::vector<LeafValue> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r));
  return out;
}

// ---------------------------------------------------------------- render

namespace {

std::string condition(const Tree& tree, const TreeNode& node) {
  const FeatureInfo& f = tree.features()[node.partition.feature];
  std::ostringstream ss;
  ss.precision(6);
  if (f.kind == FeatureKind::Numeric) {
    ss << f.name << " <= " << node.partition.threshold;
    return ss.str();
  }
  ss << f.name << " in {";
  for (std::size_t i = 0; i < node.partition.left_categories.size(); ++i) {
    ss << (i ? ", " : "") << f.categories[static_cast<std::size_t>(node.partition.left_categories[i])];
  }
  ss << '}';
  return ss.str();
}

std::string sample_note(const TreeNode& node) {
  std::ostringstream ss;
  ss.precision(6);
  ss << "n=" << node.n_samples;
  if (node.weight != static_cast<double>(node.n_samples)) ss << ", w=" << node.weight;
  return ss.str();
}

void render_node(const Tree& tree, std::int32_t index, const std::string& indent, const std::string& label,
                 std::ostringstream& out) {
  const TreeNode& node = tree.node(index);
  out << indent << label;
  if (node.is_leaf()) {
    out << "leaf δ=" << node.value.to_string() << " (" << sample_note(node) << ")\n";
    return;
  }
  out << "split " << condition(tree, node) << " at depth " << node.depth << " (" << sample_note(node) << ")";
  switch (node.route) {
    case MissingRoute::Left: out << ", missing -> left"; break;
    case MissingRoute::Right: out << ", missing -> right"; break;
    case MissingRoute::Middle: out << ", missing -> middle"; break;
    case MissingRoute::Fractional: {
      std::ostringstream w;
      w.precision(4);
      w << node.left_fraction << '/' << node.right_fraction;
      out << ", missing -> both " << w.str();
      break;
    }
  }
  out << '\n';
  const std::string child_indent = indent + "  ";
  render_node(tree, node.left, child_indent, "left: ", out);
  render_node(tree, node.right, child_indent, "right: ", out);
  if (node.kind == NodeKind::Trinary) render_node(tree, node.middle, child_indent, "missing: ", out);
}

}  // namespace

std::string render(const Tree& tree) {
  std::ostringstream out;
  render_node(tree, 0, "", "", out);
  return out.str();
}

}  // namespace tritree
