#include "oracle.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace tritree::testkit {

namespace {

using Samples = std::vector<WeightedSample>;

double fitted(const Samples& s, LossKind kind) {
  if (s.empty()) return 0.0;
  return eval_loss(s, fit_leaf(s, kind), kind);
}

double total_weight(const Samples& s) {
  double w = 0.0;
  for (const auto& x : s) w += x.weight;
  return w;
}

Samples concat(Samples a, const Samples& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Samples scaled(Samples s, double factor) {
  for (auto& x : s) x.weight *= factor;
  return s;
}

struct Cut {
  Samples left, right, missing;
};

// All candidate cuts of one feature.
std::vector<Cut> cuts(const Dataset& ds, std::span<const RowRef> rows, std::size_t feature) {
  const FeatureColumn& col = ds.column(feature);
  const ResponseColumn& y = ds.response();
  std::set<double> present;
  for (const RowRef& r : rows) {
    if (!is_missing(col[r.row])) present.insert(col[r.row]);
  }
  std::vector<double> values(present.begin(), present.end());
  std::vector<Cut> out;
  if (values.size() < 2) return out;

  auto build = [&](auto goes_left) {
    Cut c;
    for (const RowRef& r : rows) {
      const WeightedSample s{y[r.row], r.weight};
      const double v = col[r.row];
      if (is_missing(v)) {
        c.missing.push_back(s);
      } else if (goes_left(v)) {
        c.left.push_back(s);
      } else {
        c.right.push_back(s);
      }
    }
    out.push_back(std::move(c));
  };

  if (!col.is_categorical()) {
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
      const double bound = values[t];
      build([bound](double v) { return v <= bound; });
    }
    return out;
  }
  // values[0] is the smallest present code and always sits on the left.
  const std::size_t m = values.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    if (!(mask & 1U)) continue;
    if (mask == (std::size_t{1} << m) - 1) continue;
    build([&, mask](double v) {
      const auto idx = static_cast<std::size_t>(std::find(values.begin(), values.end(), v) - values.begin());
      return (mask >> idx) & 1U;
    });
  }
  return out;
}

std::optional<double> binary_loss(const Samples& l, const Samples& r, std::size_t min_child, LossKind kind) {
  if (l.size() < min_child || r.size() < min_child) return std::nullopt;
  return fitted(l, kind) + fitted(r, kind);
}

void keep_min(std::optional<double>& best, std::optional<double> candidate) {
  if (candidate && (!best || *candidate < *best)) best = candidate;
}

}  // namespace

std::optional<double> oracle_best_loss(const Dataset& ds, std::span<const RowRef> rows,
                                       std::span<const std::size_t> features, Strategy strategy, LossKind kind,
                                       std::size_t min_child, double min_child_weight) {
  Samples all;
  for (const RowRef& r : rows) all.push_back({ds.response()[r.row], r.weight});
  const LeafValue mother = fit_leaf(all, kind);

  std::optional<double> best;
  for (std::size_t feature : features) {
    for (const Cut& c : cuts(ds, rows, feature)) {
      const auto to_left = binary_loss(concat(c.left, c.missing), c.right, min_child, kind);
      const auto to_right = binary_loss(c.left, concat(c.right, c.missing), min_child, kind);
      std::optional<double> trinary;
      if (c.left.size() >= min_child && c.right.size() >= min_child) {
        const double missing_loss = c.missing.empty() ? 0.0 : eval_loss(c.missing, mother, kind);
        trinary = fitted(c.left, kind) + fitted(c.right, kind) + missing_loss;
      }
      switch (strategy) {
        case Strategy::Majority:
          keep_min(best, c.left.size() > c.right.size() ? to_left : to_right);
          break;
        case Strategy::Mia:
          keep_min(best, to_left);
          keep_min(best, to_right);
          break;
        case Strategy::FractionalCase: {
          const double n_obs = static_cast<double>(c.left.size() + c.right.size());
          const Samples l = concat(c.left, scaled(c.missing, static_cast<double>(c.left.size()) / n_obs));
          const Samples r = concat(c.right, scaled(c.missing, static_cast<double>(c.right.size()) / n_obs));
          if (total_weight(l) >= min_child_weight && total_weight(r) >= min_child_weight) {
            keep_min(best, fitted(l, kind) + fitted(r, kind));
          }
          break;
        }
        case Strategy::Trinary:
          keep_min(best, trinary);
          break;
        case Strategy::TrinaryMia:
          keep_min(best, to_left);
          keep_min(best, to_right);
          keep_min(best, trinary);
          break;
      }
    }
  }
  return best;
}

}  // namespace tritree::testkit
