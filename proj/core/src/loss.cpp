#include "tritree/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tritree/csv.hpp"
#include "tritree/errors.hpp"

namespace tritree {

LossKind LossKind::cross_entropy(int n_classes) {
  if (n_classes < 2) throw ValidationError("cross-entropy needs at least 2 classes");
  return LossKind(LossType::CrossEntropy, n_classes);
}

std::string LossKind::name() const { return is_sse() ? "sse" : "cross_entropy"; }

LeafValue LeafValue::real(double value) { return LeafValue({value}, true); }

LeafValue LeafValue::probabilities(std::vector<double> probs) {
  if (probs.size() < 2) throw ValidationError("probability vector needs at least 2 entries");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("probability entries must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("probability vector sums to " + csv::format_double(total) + ", expected 1");
  }
  return LeafValue(std::move(probs), false);
}

double LeafValue::value() const {
  if (!real_) throw ValidationError("leaf holds probabilities, not a real value");
  return params_[0];
}

std::span<const double> LeafValue::probs() const {
  if (real_) throw ValidationError("leaf holds a real value, not probabilities");
  return params_;
}

int LeafValue::predicted_class() const {
  auto p = probs();
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::string LeafValue::to_string() const {
  std::ostringstream ss;
  ss.precision(6);
  if (real_) {
    ss << params_[0];
    return ss.str();
  }
  ss << '(';
  for (std::size_t k = 0; k < params_.size(); ++k) ss << (k ? ", " : "") << params_[k];
  ss << ')';
  return ss.str();
}

// ---------------------------------------------------------------- free functions

LeafValue fit_leaf(std::span<const WeightedSample> samples, LossKind kind) {
  if (samples.empty()) throw ValidationError("cannot fit a leaf on an empty sample");
  NodeStats stats(kind);
  for (const auto& s : samples) stats.add(s.y, s.weight);
  if (!(stats.weight() > 0.0)) throw ValidationError("cannot fit a leaf with zero total weight");
  return stats.leaf();
}

double point_loss(double y, const LeafValue& leaf, LossKind kind) {
  if (kind.is_sse()) {
    const double d = y - leaf.value();
    return d * d;
  }
  const auto probs = leaf.probs();
  if (y < 0 || static_cast<std::size_t>(y) >= probs.size()) {
    throw ValidationError("class label " + csv::format_double(y) + " outside 0.." +
                          std::to_string(probs.size() - 1));
  }
  return -std::log(std::max(probs[static_cast<std::size_t>(y)], kProbabilityFloor));
}

double eval_loss(std::span<const WeightedSample> samples, const LeafValue& leaf, LossKind kind) {
  double total = 0.0;
  for (const auto& s : samples) total += s.weight * point_loss(s.y, leaf, kind);
  return total;
}

// ---------------------------------------------------------------- NodeStats

NodeStats::NodeStats(LossKind kind) : kind_(kind) {
  if (!kind.is_sse()) class_weight_.assign(static_cast<std::size_t>(kind.n_classes()), 0.0);
}

void NodeStats::add(double y, double weight) {
  ++count_;
  weight_ += weight;
  if (kind_.is_sse()) {
    sum_wy_ += weight * y;
    sum_wy2_ += weight * y * y;
  } else {
    if (y < 0 || y >= static_cast<double>(class_weight_.size())) {
      throw ValidationError("class label " + csv::format_double(y) + " outside 0.." +
                            std::to_string(class_weight_.size() - 1));
    }
    class_weight_[static_cast<std::size_t>(y)] += weight;
  }
}

void NodeStats::add_scaled(const NodeStats& other, double factor) {
  count_ += other.count_;
  weight_ += factor * other.weight_;
  sum_wy_ += factor * other.sum_wy_;
  sum_wy2_ += factor * other.sum_wy2_;
  for (std::size_t k = 0; k < class_weight_.size(); ++k) class_weight_[k] += factor * other.class_weight_[k];
}

NodeStats& NodeStats::operator+=(const NodeStats& other) {
  count_ += other.count_;
  weight_ += other.weight_;
  sum_wy_ += other.sum_wy_;
  sum_wy2_ += other.sum_wy2_;
  for (std::size_t k = 0; k < class_weight_.size(); ++k) class_weight_[k] += other.class_weight_[k];
  return *this;
}

NodeStats& NodeStats::operator-=(const NodeStats& other) {
  count_ -= other.count_;
  weight_ -= other.weight_;
  sum_wy_ -= other.sum_wy_;
  sum_wy2_ -= other.sum_wy2_;
  for (std::size_t k = 0; k < class_weight_.size(); ++k) class_weight_[k] -= other.class_weight_[k];
  return *this;
}

LeafValue NodeStats::leaf() const {
  if (!(weight_ > 0.0)) throw ValidationError("cannot fit a leaf with zero total weight");
  if (kind_.is_sse()) return LeafValue::real(sum_wy_ / weight_);
  std::vector<double> p(class_weight_.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = class_weight_[k] / weight_;
  return LeafValue::probabilities(std::move(p));
}

double NodeStats::fitted_loss() const {
  if (!(weight_ > 0.0)) return 0.0;
  if (kind_.is_sse()) return std::max(0.0, sum_wy2_ - sum_wy_ * sum_wy_ / weight_);
  double loss = 0.0;
  for (double c : class_weight_) {
    if (c > 0.0) loss -= c * std::log(c / weight_);
  }
  return std::max(0.0, loss);
}

double NodeStats::loss_at(const LeafValue& leaf) const {
  if (count_ == 0) return 0.0;
  if (kind_.is_sse()) {
    const double d = leaf.value();
    return std::max(0.0, sum_wy2_ - 2.0 * d * sum_wy_ + d * d * weight_);
  }
  const auto probs = leaf.probs();
  double loss = 0.0;
  for (std::size_t k = 0; k < class_weight_.size(); ++k) {
    if (class_weight_[k] > 0.0) loss -= class_weight_[k] * std::log(std::max(probs[k], kProbabilityFloor));
  }
  return loss;
}

}  // namespace tritree
