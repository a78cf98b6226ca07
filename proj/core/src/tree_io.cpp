#include <nlohmann/json.hpp>

#include "tritree/errors.hpp"
#include "tritree/tree.hpp"

namespace tritree {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "tritree-tree";
constexpr int kVersion = 1;

json leaf_json(const LeafValue& v) {
  if (v.is_real()) return v.value();
  return json(std::vector<double>(v.probs().begin(), v.probs().end()));
}

json node_json(const Tree& tree, std::int32_t index) {
  const TreeNode& node = tree.node(index);
  json j;
  j["kind"] = to_string(node.kind);
  j["value"] = leaf_json(node.value);
  j["n_samples"] = node.n_samples;
  j["weight"] = node.weight;
  j["loss"] = node.loss;
  j["depth"] = node.depth;
  if (node.is_leaf()) return j;

  const FeatureInfo& f = tree.features()[node.partition.feature];
  j["feature"] = f.name;
  if (f.kind == FeatureKind::Numeric) {
    j["threshold"] = node.partition.threshold;
  } else {
    auto names = [&](const std::vector<int>& codes) {
      std::vector<std::string> out;
      for (int c : codes) out.push_back(f.categories[static_cast<std::size_t>(c)]);
      return out;
    };
    j["left_categories"] = names(node.partition.left_categories);
    j["right_categories"] = names(node.partition.right_categories);
  }
  j["missing"] = to_string(node.route);
  if (node.route == MissingRoute::Fractional) j["fractions"] = {node.left_fraction, node.right_fraction};
  j["left"] = node_json(tree, node.left);
  j["right"] = node_json(tree, node.right);
  if (node.kind == NodeKind::Trinary) j["middle"] = node_json(tree, node.middle);
  return j;
}

class Reader {
 public:
  Reader(const std::vector<FeatureInfo>& features, LossKind loss) : features_(features), loss_(loss) {}

  std::int32_t read(const json& j) {
    if (!j.is_object()) throw ParseError("tree node must be an object");
    TreeNode node;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "leaf") {
      node.kind = NodeKind::Leaf;
    } else if (kind == "binary") {
      node.kind = NodeKind::Binary;
    } else if (kind == "trinary") {
      node.kind = NodeKind::Trinary;
    } else {
      throw ParseError("unknown node kind '" + kind + "'");
    }
    node.value = read_value(j.at("value"));
    node.n_samples = j.at("n_samples").get<std::size_t>();
    node.weight = j.at("weight").get<double>();
    node.loss = j.at("loss").get<double>();
    node.depth = j.at("depth").get<int>();

    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    if (node.is_leaf()) return index;

    const std::string name = j.at("feature").get<std::string>();
    auto it = std::find_if(features_.begin(), features_.end(), [&](const FeatureInfo& f) { return f.name == name; });
    if (it == features_.end()) throw ValidationError("split on unknown feature '" + name + "'");
    Partition p;
    p.feature = static_cast<std::size_t>(it - features_.begin());
    p.kind = it->kind;
    if (it->kind == FeatureKind::Numeric) {
      p.threshold = j.at("threshold").get<double>();
    } else {
      p.left_categories = codes(*it, j.at("left_categories"));
      p.right_categories = codes(*it, j.at("right_categories"));
    }
    node.partition = std::move(p);
    node.route = parse_missing_route(j.at("missing").get<std::string>());
    if (node.route == MissingRoute::Fractional) {
      const auto& w = j.at("fractions");
      if (!w.is_array() || w.size() != 2) throw ParseError("fractions must be a two-element array");
      node.left_fraction = w[0].get<double>();
      node.right_fraction = w[1].get<double>();
    }
    node.left = read(j.at("left"));
    node.right = read(j.at("right"));
    if (node.kind == NodeKind::Trinary) node.middle = read(j.at("middle"));
    nodes_[static_cast<std::size_t>(index)] = std::move(node);
    return index;
  }

  std::vector<TreeNode> take() { return std::move(nodes_); }

 private:
  LeafValue read_value(const json& v) const {
    if (loss_.is_sse()) {
      if (!v.is_number()) throw ValidationError("regression node value must be a number");
      return LeafValue::real(v.get<double>());
    }
    if (!v.is_array()) throw ValidationError("classification node value must be a probability array");
    return LeafValue::probabilities(v.get<std::vector<double>>());
  }

  static std::vector<int> codes(const FeatureInfo& f, const json& names) {
    std::vector<int> out;
    for (const auto& n : names) {
      const auto label = n.get<std::string>();
      auto it = std::find(f.categories.begin(), f.categories.end(), label);
      if (it == f.categories.end()) {
        throw ValidationError("category '" + label + "' not in dictionary of '" + f.name + "'");
      }
      out.push_back(static_cast<int>(it - f.categories.begin()));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  const std::vector<FeatureInfo>& features_;
  LossKind loss_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::string serialize(const Tree& tree) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["strategy"] = to_string(tree.strategy());
  doc["loss"] = tree.loss_kind().name();
  if (!tree.loss_kind().is_sse()) doc["class_names"] = tree.class_names();
  json features = json::array();
  for (const auto& f : tree.features()) {
    json jf;
    jf["name"] = f.name;
    jf["kind"] = f.kind == FeatureKind::Numeric ? "numeric" : "categorical";
    if (f.kind == FeatureKind::Categorical) jf["categories"] = f.categories;
    features.push_back(std::move(jf));
  }
  doc["features"] = std::move(features);
  doc["root"] = node_json(tree, 0);
  return doc.dump(1) + "\n";
}

Tree deserialize(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("tree document: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormat) {
      throw ParseError("tree document: missing or wrong \"format\" tag");
    }
    if (doc.at("version").get<int>() != kVersion) throw ParseError("tree document: unsupported version");
    const Strategy strategy = parse_strategy(doc.at("strategy").get<std::string>());
    std::vector<std::string> class_names;
    LossKind loss = LossKind::sse();
    const std::string loss_name = doc.at("loss").get<std::string>();
    if (loss_name == "cross_entropy") {
      class_names = doc.at("class_names").get<std::vector<std::string>>();
      loss = LossKind::cross_entropy(static_cast<int>(class_names.size()));
    } else if (loss_name != "sse") {
      throw ParseError("tree document: unknown loss '" + loss_name + "'");
    }
    std::vector<FeatureInfo> features;
    for (const auto& jf : doc.at("features")) {
      FeatureInfo f;
      f.name = jf.at("name").get<std::string>();
      const std::string kind = jf.at("kind").get<std::string>();
      if (kind == "numeric") {
        f.kind = FeatureKind::Numeric;
      } else if (kind == "categorical") {
        f.kind = FeatureKind::Categorical;
        f.categories = jf.at("categories").get<std::vector<std::string>>();
      } else {
        throw ParseError("tree document: unknown feature kind '" + kind + "'");
      }
      features.push_back(std::move(f));
    }
    Reader reader(features, loss);
    reader.read(doc.at("root"));
    return Tree(std::move(features), loss, strategy, std::move(class_names), reader.take());
  } catch (const json::exception& e) {
    throw ParseError(std::string("tree document: ") + e.what());
  }
}

}  // namespace tritree
