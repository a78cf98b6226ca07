#include "tritree/split.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

#include "tritree/errors.hpp"

namespace tritree {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Majority: return "majority";
    case Strategy::Mia: return "mia";
    case Strategy::FractionalCase: return "fc";
    case Strategy::Trinary: return "trinary";
    case Strategy::TrinaryMia: return "trinary-mia";
  }
  return "?";
}

Strategy parse_strategy(const std::string& text) {
  for (Strategy s : all_strategies()) {
    if (to_string(s) == text) return s;
  }
  if (text == "trinarymia" || text == "trinary_mia") return Strategy::TrinaryMia;
  throw ParseError("unknown strategy '" + text + "' (expected majority, mia, fc, trinary or trinary-mia)");
}

std::span<const Strategy> all_strategies() {
  static constexpr std::array kAll = {Strategy::Majority, Strategy::Mia, Strategy::FractionalCase,
                                      Strategy::Trinary, Strategy::TrinaryMia};
  return kAll;
}

std::string to_string(MissingRoute r) {
  switch (r) {
    case MissingRoute::Left: return "left";
    case MissingRoute::Right: return "right";
    case MissingRoute::Middle: return "middle";
    case MissingRoute::Fractional: return "fractional";
  }
  return "?";
}

MissingRoute parse_missing_route(const std::string& text) {
  if (text == "left") return MissingRoute::Left;
  if (text == "right") return MissingRoute::Right;
  if (text == "middle") return MissingRoute::Middle;
  if (text == "fractional") return MissingRoute::Fractional;
  throw ParseError("unknown missing route '" + text + "'");
}

RowSet all_rows(std::size_t n_rows) {
  RowSet rows(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) rows[i].row = static_cast<std::uint32_t>(i);
  return rows;
}

RowSet as_row_set(std::span<const std::size_t> rows) {
  RowSet out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back({static_cast<std::uint32_t>(r), 1.0});
  return out;
}

Side Partition::side(double cell) const {
  if (is_missing(cell)) return Side::Neither;
  if (kind == FeatureKind::Numeric) return cell <= threshold ? Side::Left : Side::Right;
  const int code = static_cast<int>(cell);
  return std::binary_search(left_categories.begin(), left_categories.end(), code) ? Side::Left : Side::Right;
}

namespace {

// Rows of one node bucketed for a single feature: observed rows grouped by
// distinct value (numeric) or category, plus the missing rows.
struct Group {
  double value = 0.0;
  int code = -1;
  NodeStats stats;
};

struct FeatureScan {
  std::size_t feature = 0;
  FeatureKind kind = FeatureKind::Numeric;
  std::vector<Group> groups;
  NodeStats missing;
  bool subsets = false;

  explicit FeatureScan(LossKind loss) : missing(loss) {}

  std::uint64_t candidate_count() const {
    if (groups.size() < 2) return 0;
    if (subsets) return (std::uint64_t{1} << (groups.size() - 1)) - 1;
    return groups.size() - 1;
  }
};

double midpoint(double lo, double hi) {
  double t = lo + (hi - lo) / 2.0;
  if (!(t < hi)) t = lo;
  return t;
}

FeatureScan build_scan(const Dataset& ds, std::size_t feature, std::span<const RowRef> rows, LossKind kind,
                       std::size_t max_exhaustive) {
  const auto& col = ds.column(feature);
  const auto& y = ds.response();
  FeatureScan scan(kind);
  scan.feature = feature;
  scan.kind = col.kind();

  if (col.kind() == FeatureKind::Numeric) {
    std::vector<RowRef> observed;
    observed.reserve(rows.size());
    for (const RowRef& r : rows) {
      if (col.missing(r.row)) {
        scan.missing.add(y[r.row], r.weight);
      } else {
        observed.push_back(r);
      }
    }
    std::stable_sort(observed.begin(), observed.end(),
                     [&](const RowRef& a, const RowRef& b) { return col[a.row] < col[b.row]; });
    for (const RowRef& r : observed) {
      const double v = col[r.row];
      if (scan.groups.empty() || scan.groups.back().value != v) scan.groups.push_back({v, -1, NodeStats(kind)});
      scan.groups.back().stats.add(y[r.row], r.weight);
    }
    return scan;
  }

  std::vector<std::optional<Group>> by_code(col.categories().size());
  for (const RowRef& r : rows) {
    if (col.missing(r.row)) {
      scan.missing.add(y[r.row], r.weight);
      continue;
    }
    const auto code = static_cast<std::size_t>(col[r.row]);
    if (!by_code[code]) by_code[code] = Group{0.0, static_cast<int>(code), NodeStats(kind)};
    by_code[code]->stats.add(y[r.row], r.weight);
  }
  for (auto& g : by_code) {
    if (g) scan.groups.push_back(std::move(*g));
  }

  if (scan.groups.size() <= max_exhaustive) {
    scan.subsets = true;
    return scan;
  }
  // Ordering trick: sort categories by a scalar key and cut prefixes.
  auto key = [&](const Group& g) -> double {
    if (kind.is_sse()) return g.stats.leaf().value();
    if (kind.n_classes() == 2) return g.stats.leaf().probs()[1];
    return -g.stats.weight();
  };
  std::stable_sort(scan.groups.begin(), scan.groups.end(),
                   [&](const Group& a, const Group& b) { return key(a) < key(b); });
  return scan;
}

// Calls fn(candidate, left, right) for each candidate in scan order.
template <typename Fn>
void for_each_candidate(const FeatureScan& scan, LossKind kind, Fn&& fn) {
  const std::size_t g = scan.groups.size();
  if (g < 2) return;
  if (!scan.subsets) {
    std::vector<NodeStats> suffix(g + 1, NodeStats(kind));
    for (std::size_t i = g; i-- > 0;) {
      suffix[i] = suffix[i + 1];
      suffix[i] += scan.groups[i].stats;
    }
    NodeStats left(kind);
    for (std::size_t cut = 1; cut < g; ++cut) {
      left += scan.groups[cut - 1].stats;
      fn(std::uint64_t{cut}, left, suffix[cut]);
    }
    return;
  }
  const std::uint64_t count = scan.candidate_count();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    NodeStats left = scan.groups[0].stats;
    NodeStats right(kind);
    for (std::size_t i = 1; i < g; ++i) {
      if (mask >> (i - 1) & 1U) {
        left += scan.groups[i].stats;
      } else {
        right += scan.groups[i].stats;
      }
    }
    fn(mask, left, right);
  }
}

Partition make_partition(const FeatureScan& scan, std::uint64_t candidate) {
  Partition p;
  p.feature = scan.feature;
  p.kind = scan.kind;
  const std::size_t g = scan.groups.size();
  if (scan.kind == FeatureKind::Numeric) {
    p.threshold = midpoint(scan.groups[candidate - 1].value, scan.groups[candidate].value);
    return p;
  }
  for (std::size_t i = 0; i < g; ++i) {
    const bool left = scan.subsets ? (i == 0 || (candidate >> (i - 1) & 1U)) : i < candidate;
    (left ? p.left_categories : p.right_categories).push_back(scan.groups[i].code);
  }
  std::sort(p.left_categories.begin(), p.left_categories.end());
  std::sort(p.right_categories.begin(), p.right_categories.end());
  return p;
}

struct Evaluation {
  bool feasible = false;
  double loss = 0.0;
  MissingRoute route = MissingRoute::Right;
  double left_fraction = 0.0;
  double right_fraction = 0.0;
};

MissingRoute larger_side(const NodeStats& left, const NodeStats& right) {
  return left.count() > right.count() ? MissingRoute::Left : MissingRoute::Right;
}

Evaluation routed(const NodeStats& left, const NodeStats& right, const NodeStats& missing, MissingRoute route,
                  std::size_t min_child) {
  NodeStats a = left;
  NodeStats b = right;
  (route == MissingRoute::Left ? a : b) += missing;
  Evaluation e;
  e.route = route;
  e.feasible = a.count() >= min_child && b.count() >= min_child;
  if (e.feasible) e.loss = a.fitted_loss() + b.fitted_loss();
  return e;
}

Evaluation eval_majority(const NodeStats& left, const NodeStats& right, const NodeStats& missing,
                         std::size_t min_child) {
  return routed(left, right, missing, larger_side(left, right), min_child);
}

Evaluation eval_mia(const NodeStats& left, const NodeStats& right, const NodeStats& missing, std::size_t min_child) {
  const Evaluation to_left = routed(left, right, missing, MissingRoute::Left, min_child);
  const Evaluation to_right = routed(left, right, missing, MissingRoute::Right, min_child);
  if (!to_left.feasible) return to_right;
  if (!to_right.feasible) return to_left;
  if (to_left.loss < to_right.loss) return to_left;
  if (to_right.loss < to_left.loss) return to_right;
  return larger_side(left, right) == MissingRoute::Left ? to_left : to_right;
}

Evaluation eval_fractional(const NodeStats& left, const NodeStats& right, const NodeStats& missing,
                           double min_child_weight, bool from_weights) {
  Evaluation e;
  e.route = MissingRoute::Fractional;
  if (from_weights) {
    const double total = left.weight() + right.weight();
    if (!(total > 0.0)) return e;
    e.left_fraction = left.weight() / total;
    e.right_fraction = right.weight() / total;
  } else {
    const auto total = static_cast<double>(left.count() + right.count());
    if (total == 0.0) return e;
    e.left_fraction = static_cast<double>(left.count()) / total;
    e.right_fraction = static_cast<double>(right.count()) / total;
  }
  NodeStats a = left;
  NodeStats b = right;
  a.add_scaled(missing, e.left_fraction);
  b.add_scaled(missing, e.right_fraction);
  e.feasible = a.weight() >= min_child_weight && b.weight() >= min_child_weight;
  if (e.feasible) e.loss = a.fitted_loss() + b.fitted_loss();
  return e;
}

Evaluation eval_trinary(const NodeStats& left, const NodeStats& right, const NodeStats& missing,
                        const LeafValue& mother, std::size_t min_child) {
  Evaluation e;
  e.route = MissingRoute::Middle;
  e.feasible = left.count() >= min_child && right.count() >= min_child;
  if (e.feasible) e.loss = left.fitted_loss() + right.fitted_loss() + missing.loss_at(mother);
  return e;
}

struct Bucketed {
  NodeStats left, right, missing;
  std::size_t n_left = 0, n_right = 0, n_missing = 0;
};

Bucketed bucket(const Dataset& ds, std::span<const RowRef> rows, const Partition& p, LossKind kind) {
  const auto& col = ds.column(p.feature);
  const auto& y = ds.response();
  Bucketed b{NodeStats(kind), NodeStats(kind), NodeStats(kind)};
  for (const RowRef& r : rows) {
    switch (p.side(col[r.row])) {
      case Side::Left: b.left.add(y[r.row], r.weight); break;
      case Side::Right: b.right.add(y[r.row], r.weight); break;
      case Side::Neither: b.missing.add(y[r.row], r.weight); break;
    }
  }
  b.n_left = b.left.count();
  b.n_right = b.right.count();
  b.n_missing = b.missing.count();
  return b;
}

// Fills the child row sets of `split` from its partition and route.
void materialize(const Dataset& ds, std::span<const RowRef> rows, ScoredSplit& split) {
  const auto& col = ds.column(split.partition.feature);
  split.left.clear();
  split.right.clear();
  split.middle.clear();
  for (const RowRef& r : rows) {
    switch (split.partition.side(col[r.row])) {
      case Side::Left: split.left.push_back(r); break;
      case Side::Right: split.right.push_back(r); break;
      case Side::Neither:
        switch (split.route) {
          case MissingRoute::Left: split.left.push_back(r); break;
          case MissingRoute::Right: split.right.push_back(r); break;
          case MissingRoute::Middle: break;
          case MissingRoute::Fractional:
            split.left.push_back({r.row, r.weight * split.left_fraction});
            split.right.push_back({r.row, r.weight * split.right_fraction});
            break;
        }
    }
  }
  if (split.route == MissingRoute::Middle) split.middle.assign(rows.begin(), rows.end());
}

ScoredSplit to_scored(Partition partition, const Evaluation& e, const Bucketed& b) {
  ScoredSplit s;
  s.partition = std::move(partition);
  s.route = e.route;
  s.total_loss = e.loss;
  s.n_left_observed = b.n_left;
  s.n_right_observed = b.n_right;
  s.n_missing = b.n_missing;
  s.left_fraction = e.left_fraction;
  s.right_fraction = e.right_fraction;
  return s;
}

struct Candidate {
  bool found = false;
  double loss = std::numeric_limits<double>::infinity();
  Partition partition;
  Evaluation eval;
  std::size_t n_left = 0, n_right = 0, n_missing = 0;

  void offer(const FeatureScan& scan, std::uint64_t id, const Evaluation& e, const NodeStats& left,
             const NodeStats& right) {
    if (!e.feasible || (found && !(e.loss < loss))) return;
    found = true;
    loss = e.loss;
    eval = e;
    partition = make_partition(scan, id);
    n_left = left.count();
    n_right = right.count();
    n_missing = scan.missing.count();
  }

  ScoredSplit result() const {
    ScoredSplit s;
    s.partition = partition;
    s.route = eval.route;
    s.total_loss = eval.loss;
    s.n_left_observed = n_left;
    s.n_right_observed = n_right;
    s.n_missing = n_missing;
    s.left_fraction = eval.left_fraction;
    s.right_fraction = eval.right_fraction;
    return s;
  }
};

}  // namespace

std::vector<Partition> enumerate_candidates(const Dataset& ds, std::size_t feature, std::span<const RowRef> rows,
                                            LossKind kind, std::size_t max_exhaustive_categories) {
  const FeatureScan scan = build_scan(ds, feature, rows, kind, max_exhaustive_categories);
  std::vector<Partition> out;
  const std::uint64_t count = scan.candidate_count();
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(make_partition(scan, scan.subsets ? i : i + 1));
  return out;
}

std::optional<ScoredSplit> score_binary(const Dataset& ds, std::span<const RowRef> rows, const Partition& partition,
                                        MissingRoute route, LossKind kind, std::size_t min_child) {
  if (route != MissingRoute::Left && route != MissingRoute::Right) {
    throw ValidationError("score_binary: route must be left or right");
  }
  const Bucketed b = bucket(ds, rows, partition, kind);
  const Evaluation e = routed(b.left, b.right, b.missing, route, min_child);
  if (!e.feasible) return std::nullopt;
  ScoredSplit s = to_scored(partition, e, b);
  materialize(ds, rows, s);
  return s;
}

std::optional<ScoredSplit> score_fractional(const Dataset& ds, std::span<const RowRef> rows,
                                            const Partition& partition, LossKind kind, double min_child_weight,
                                            bool fractions_from_weights) {
  const Bucketed b = bucket(ds, rows, partition, kind);
  if (b.n_left + b.n_right == 0) return std::nullopt;
  const Evaluation e = eval_fractional(b.left, b.right, b.missing, min_child_weight, fractions_from_weights);
  if (!e.feasible) return std::nullopt;
  ScoredSplit s = to_scored(partition, e, b);
  materialize(ds, rows, s);
  return s;
}

std::optional<ScoredSplit> score_trinary(const Dataset& ds, std::span<const RowRef> rows,
                                         const Partition& partition, LossKind kind, const LeafValue& mother,
                                         std::size_t min_child) {
  const Bucketed b = bucket(ds, rows, partition, kind);
  const Evaluation e = eval_trinary(b.left, b.right, b.missing, mother, std::max<std::size_t>(min_child, 1));
  if (!e.feasible) return std::nullopt;
  ScoredSplit s = to_scored(partition, e, b);
  materialize(ds, rows, s);
  return s;
}

std::optional<ScoredSplit> best_split(const Dataset& ds, std::span<const RowRef> rows,
                                      std::span<const std::size_t> features, Strategy strategy, LossKind kind,
                                      const SplitConfig& config) {
  if (rows.empty()) return std::nullopt;
  const bool trinary_style = strategy == Strategy::Trinary || strategy == Strategy::TrinaryMia;
  const std::size_t min_child = std::max<std::size_t>(config.min_child, 1);

  LeafValue mother;
  if (trinary_style) {
    NodeStats all(kind);
    const auto& y = ds.response();
    for (const RowRef& r : rows) all.add(y[r.row], r.weight);
    mother = all.leaf();
  }

  Candidate primary;  // Majority, FC, Trinary, or the MIA half of TrinaryMIA
  Candidate trinary;  // Trinary half of TrinaryMIA

  for (std::size_t feature : features) {
    const FeatureScan scan = build_scan(ds, feature, rows, kind, config.max_exhaustive_categories);
    for_each_candidate(scan, kind, [&](std::uint64_t id, const NodeStats& left, const NodeStats& right) {
      switch (strategy) {
        case Strategy::Majority:
          primary.offer(scan, id, eval_majority(left, right, scan.missing, min_child), left, right);
          break;
        case Strategy::Mia:
          primary.offer(scan, id, eval_mia(left, right, scan.missing, min_child), left, right);
          break;
        case Strategy::FractionalCase:
          primary.offer(scan, id,
                        eval_fractional(left, right, scan.missing, config.min_child_weight,
                                        config.fractions_from_weights),
                        left, right);
          break;
        case Strategy::Trinary:
          primary.offer(scan, id, eval_trinary(left, right, scan.missing, mother, min_child), left, right);
          break;
        case Strategy::TrinaryMia:
          primary.offer(scan, id, eval_mia(left, right, scan.missing, min_child), left, right);
          trinary.offer(scan, id, eval_trinary(left, right, scan.missing, mother, min_child), left, right);
          break;
      }
    });
  }

  const Candidate* chosen = &primary;
  if (strategy == Strategy::TrinaryMia) {
    if (trinary.found && (!primary.found || trinary.loss <= primary.loss)) chosen = &trinary;
  }
  if (!chosen->found) return std::nullopt;
  ScoredSplit s = chosen->result();
  materialize(ds, rows, s);
  return s;
}

}  // namespace tritree
