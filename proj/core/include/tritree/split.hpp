#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tritree/data.hpp"
#include "tritree/loss.hpp"

namespace tritree {

// Missing-data strategies.
enum class Strategy { Majority, Mia, FractionalCase, Trinary, TrinaryMia };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& text);
// All strategies in canonical order.
std::span<const Strategy> all_strategies();

// Where rows that are missing the split feature go.
enum class MissingRoute { Left, Right, Middle, Fractional };

std::string to_string(MissingRoute r);
MissingRoute parse_missing_route(const std::string& text);

// A row of the training set together with its case weight. Weights are 1
// except below Fractional Case splits.
struct RowRef {
  std::uint32_t row = 0;
  double weight = 1.0;

  bool operator==(const RowRef&) const = default;
};

using RowSet = std::vector<RowRef>;

RowSet all_rows(std::size_t n_rows);
RowSet as_row_set(std::span<const std::size_t> rows);

enum class Side { Left, Right, Neither };

// Two-set partition of one feature's domain. Numeric: left is
// value <= threshold. Categorical: explicit left/right code sets (sorted);
// a present code in neither set (a category the node never saw in
// training) goes right, like a value above a numeric threshold.
struct Partition {
  std::size_t feature = 0;
  FeatureKind kind = FeatureKind::Numeric;
  double threshold = 0.0;
  std::vector<int> left_categories;
  std::vector<int> right_categories;

  // Side of a cell; Neither only for missing cells.
  Side side(double cell) const;

  bool operator==(const Partition&) const = default;
};

struct ScoredSplit {
  Partition partition;
  MissingRoute route = MissingRoute::Right;
  double total_loss = 0.0;

  // Observed (non-missing) row counts on each side and the missing count.
  std::size_t n_left_observed = 0;
  std::size_t n_right_observed = 0;
  std::size_t n_missing = 0;

  // Fractional Case only: share of missing-row weight sent to each child.
  double left_fraction = 0.0;
  double right_fraction = 0.0;

  // Child row sets; `middle` is filled for Middle routing only and then
  // holds the node's full row set.
  RowSet left;
  RowSet right;
  RowSet middle;
};

struct SplitConfig {
  // Minimum rows per child (Majority, MIA, Trinary).
  std::size_t min_child = 5;
  // Minimum total case weight per child (Fractional Case).
  double min_child_weight = 5.0;
  // Categorical features with at most this many observed categories are
  // searched over every two-set partition; larger ones use the
  // mean-response ordering (regression, binary) or frequency ordering
  // (multiclass) and only test prefix cuts.
  std::size_t max_exhaustive_categories = 10;
  // Fractional Case: derive the missing-row fractions from observed case
  // weights instead of observed row counts.
  bool fractions_from_weights = false;
};

// Candidate partitions of `feature` over `rows`, in scan order. Numeric:
// midpoints between consecutive distinct present values, ascending.
// Categorical: every two-set partition when the observed category count is
// at most `max_exhaustive_categories`, otherwise prefix cuts of the
// ordering described on SplitConfig. Empty when fewer than two distinct
// present values occur.
std::vector<Partition> enumerate_candidates(const Dataset& ds, std::size_t feature, std::span<const RowRef> rows,
                                            LossKind kind, std::size_t max_exhaustive_categories = 10);

// Binary split with missing rows appended to `route` (Left or Right).
// nullopt when either child has fewer than `min_child` rows.
std::optional<ScoredSplit> score_binary(const Dataset& ds, std::span<const RowRef> rows, const Partition& partition,
                                        MissingRoute route, LossKind kind, std::size_t min_child);

// Fractional Case split: missing rows enter both children with their weight
// scaled by the observed share of each side. nullopt when either child's
// total weight is below `min_child_weight` or no row is observed.
std::optional<ScoredSplit> score_fractional(const Dataset& ds, std::span<const RowRef> rows,
                                            const Partition& partition, LossKind kind, double min_child_weight,
                                            bool fractions_from_weights = false);

// Three-way split: left and right are refitted, missing rows are priced at
// `mother` (the fitted parameter of the whole node). Only the observed
// children are subject to `min_child`.
std::optional<ScoredSplit> score_trinary(const Dataset& ds, std::span<const RowRef> rows,
                                         const Partition& partition, LossKind kind, const LeafValue& mother,
                                         std::size_t min_child);

// Greedy split search over `features` under `strategy`. Ties keep the first
// candidate in (feature order, candidate order); Majority and MIA send
// missing rows to the larger observed side (Right on equal sizes) when
// routing does not change the loss; TrinaryMIA prefers the Trinary-style
// split on equal loss. Children are materialized in the result.
std::optional<ScoredSplit> best_split(const Dataset& ds, std::span<const RowRef> rows,
                                      std::span<const std::size_t> features, Strategy strategy, LossKind kind,
                                      const SplitConfig& config);

}  // namespace tritree
