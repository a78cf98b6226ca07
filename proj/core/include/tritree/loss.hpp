#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tritree {

enum class LossType { Sse, CrossEntropy };

class LossKind {
 public:
  static LossKind sse() { return LossKind(LossType::Sse, 0); }
  static LossKind cross_entropy(int n_classes);

  LossType type() const { return type_; }
  bool is_sse() const { return type_ == LossType::Sse; }
  int n_classes() const { return n_classes_; }
  std::string name() const;

  bool operator==(const LossKind&) const = default;

 private:
  LossKind(LossType type, int n_classes) : type_(type), n_classes_(n_classes) {}
  LossType type_;
  int n_classes_;
};

// Probabilities are clamped below at this value before taking logs, so a
// class that never occurred in a leaf still yields a finite loss.
inline constexpr double kProbabilityFloor = 1e-12;

// Loss-minimizing node parameter: a real mean under SSE, a class
// probability vector under cross-entropy.
class LeafValue {
 public:
  LeafValue() : params_{0.0}, real_(true) {}

  static LeafValue real(double value);
  // Entries must be >= 0 and sum to 1 within 1e-9 (ValidationError otherwise).
  static LeafValue probabilities(std::vector<double> probs);

  bool is_real() const { return real_; }
  double value() const;
  std::span<const double> probs() const;
  // Index of the most probable class; ties go to the lower index.
  int predicted_class() const;
  // Scalar used for rendering and prediction output.
  std::string to_string() const;

  bool operator==(const LeafValue&) const = default;

 private:
  LeafValue(std::vector<double> params, bool real) : params_(std::move(params)), real_(real) {}
  std::vector<double> params_;
  bool real_;
};

struct WeightedSample {
  double y = 0.0;
  double weight = 1.0;
};

// Weighted mean (SSE) or weighted class frequencies (cross-entropy).
// Throws ValidationError for an empty list or non-positive total weight.
LeafValue fit_leaf(std::span<const WeightedSample> samples, LossKind kind);

// Sum of w*(y - delta)^2, or sum of -w*log(max(delta_y, floor)).
double eval_loss(std::span<const WeightedSample> samples, const LeafValue& leaf, LossKind kind);

// Loss contribution of a single unit-weight observation.
double point_loss(double y, const LeafValue& leaf, LossKind kind);

// Additive sufficient statistics of a weighted sample set. Supports the
// fitted loss (loss at the set's own minimizer) and the loss at an
// arbitrary fixed parameter in O(1) for SSE and O(K) for cross-entropy.
class NodeStats {
 public:
  explicit NodeStats(LossKind kind);

  void add(double y, double weight = 1.0);
  // Adds every observation of `other` with its weight multiplied by
  // `factor`; row count grows by other.count().
  void add_scaled(const NodeStats& other, double factor);
  NodeStats& operator+=(const NodeStats& other);
  NodeStats& operator-=(const NodeStats& other);

  LossKind kind() const { return kind_; }
  std::size_t count() const { return count_; }
  double weight() const { return weight_; }
  bool empty() const { return count_ == 0; }

  LeafValue leaf() const;
  double fitted_loss() const;
  double loss_at(const LeafValue& leaf) const;

 private:
  LossKind kind_;
  std::size_t count_ = 0;
  double weight_ = 0.0;
  double sum_wy_ = 0.0;
  double sum_wy2_ = 0.0;
  std::vector<double> class_weight_;
};

}  // namespace tritree
