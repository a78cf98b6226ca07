#include "tritree/biasdemo.hpp"

#include <cmath>
#include <random>

#include "tritree/csv.hpp"
#include "tritree/errors.hpp"
#include "tritree/rng.hpp"

namespace tritree {

void BiasScenario::validate() const {
  if (!(a < b)) throw ValidationError("bias scenario needs a < b");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("bias scenario needs 0 < p < 1");
  if (!(q >= 0.0 && q < 1.0)) throw ValidationError("bias scenario needs 0 <= q < 1");
  if (!(sigma >= 0.0)) throw ValidationError("bias scenario needs sigma >= 0");
  if (n < 2) throw ValidationError("bias scenario needs n >= 2");
  if (reps < 2) throw ValidationError("bias scenario needs at least 2 replications");
}

TheoreticalBounds theoretical_bounds(const BiasScenario& sc, double kappa_hat) {
  if (!(kappa_hat >= 0.0 && kappa_hat <= 1.0)) throw ValidationError("kappa must lie in [0, 1]");
  const double pq = sc.p * sc.q;
  TheoreticalBounds out;
  out.majority = sc.a + (1.0 - kappa_hat) * pq / (1.0 - sc.p + pq) * (sc.b - sc.a);
  out.fractional = sc.a + pq * (sc.b - sc.a);
  out.trinary = sc.a;
  return out;
}

namespace {

// Sufficient statistics of one simulated sample, split by true side and
// observation status.
struct Sample {
  double sum_lo = 0, sum_ro = 0, sum_m = 0;
  double n_lo = 0, n_ro = 0, n_m = 0;
  double sq_lo = 0, sq_ro = 0, sq_m = 0;
};

Sample draw(const BiasScenario& sc, std::size_t rep) {
  Rng rng(derive_seed(sc.seed, {static_cast<std::uint64_t>(rep)}));
  std::normal_distribution<double> noise(0.0, 1.0);
  Sample s;
  for (std::size_t i = 0; i < sc.n; ++i) {
    const bool right = rng.uniform01() < sc.p;
    const double y = (right ? sc.b : sc.a) + sc.sigma * noise(rng.engine());
    const bool missing = rng.uniform01() < sc.q;
    if (missing) {
      s.sum_m += y;
      s.sq_m += y * y;
      s.n_m += 1;
    } else if (right) {
      s.sum_ro += y;
      s.sq_ro += y * y;
      s.n_ro += 1;
    } else {
      s.sum_lo += y;
      s.sq_lo += y * y;
      s.n_lo += 1;
    }
  }
  return s;
}

double sse(double sum, double sq, double n) { return n > 0 ? std::max(0.0, sq - sum * sum / n) : 0.0; }

struct Estimate {
  bool defined = false;
  double a_hat = 0.0;
  double b_hat = 0.0;
  bool missing_left = false;
};

Estimate estimate(const Sample& s, Strategy strategy) {
  Estimate e;
  auto with_missing = [&](bool left) {
    e.missing_left = left;
    const double nl = s.n_lo + (left ? s.n_m : 0.0);
    const double nr = s.n_ro + (left ? 0.0 : s.n_m);
    if (nl == 0 || nr == 0) return;
    e.defined = true;
    e.a_hat = (s.sum_lo + (left ? s.sum_m : 0.0)) / nl;
    e.b_hat = (s.sum_ro + (left ? 0.0 : s.sum_m)) / nr;
  };
  switch (strategy) {
    case Strategy::Majority:
      with_missing(s.n_lo > s.n_ro);
      break;
    case Strategy::Mia: {
      const double to_left = sse(s.sum_lo + s.sum_m, s.sq_lo + s.sq_m, s.n_lo + s.n_m) + sse(s.sum_ro, s.sq_ro, s.n_ro);
      const double to_right = sse(s.sum_lo, s.sq_lo, s.n_lo) + sse(s.sum_ro + s.sum_m, s.sq_ro + s.sq_m, s.n_ro + s.n_m);
      with_missing(to_left < to_right || (to_left == to_right && s.n_lo > s.n_ro));
      break;
    }
    case Strategy::FractionalCase: {
      const double n_obs = s.n_lo + s.n_ro;
      if (s.n_lo == 0 || s.n_ro == 0) return e;
      const double wl = s.n_lo / n_obs;
      const double wr = s.n_ro / n_obs;
      e.defined = true;
      e.a_hat = (s.sum_lo + wl * s.sum_m) / (s.n_lo + wl * s.n_m);
      e.b_hat = (s.sum_ro + wr * s.sum_m) / (s.n_ro + wr * s.n_m);
      break;
    }
    case Strategy::Trinary:
      if (s.n_lo == 0 || s.n_ro == 0) return e;
      e.defined = true;
      e.a_hat = s.sum_lo / s.n_lo;
      e.b_hat = s.sum_ro / s.n_ro;
      break;
    case Strategy::TrinaryMia:
      throw ValidationError("bias simulation covers majority, mia, fc and trinary");
  }
  return e;
}

}  // namespace

BiasEntry simulate(const BiasScenario& sc, Strategy strategy) {
  sc.validate();
  BiasEntry out;
  out.strategy = strategy;
  double sum_a = 0, sq_a = 0, sum_b = 0, sq_b = 0;
  std::size_t away_from_left = 0;
  for (std::size_t r = 0; r < sc.reps; ++r) {
    const Estimate e = estimate(draw(sc, r), strategy);
    if (!e.defined) {
      ++out.skipped_reps;
      continue;
    }
    ++out.used_reps;
    sum_a += e.a_hat;
    sq_a += e.a_hat * e.a_hat;
    sum_b += e.b_hat;
    sq_b += e.b_hat * e.b_hat;
    if (!e.missing_left) ++away_from_left;
  }
  const auto n = static_cast<double>(out.used_reps);
  if (out.used_reps < 2) throw ValidationError("bias simulation: fewer than 2 usable replications");
  out.mean_a_hat = sum_a / n;
  out.se = std::sqrt(std::max(0.0, (sq_a - sum_a * sum_a / n) / (n - 1)) / n);
  out.mean_b_hat = sum_b / n;
  out.se_b = std::sqrt(std::max(0.0, (sq_b - sum_b * sum_b / n) / (n - 1)) / n);

  const bool routed = strategy == Strategy::Majority || strategy == Strategy::Mia;
  out.kappa_hat = routed ? static_cast<double>(away_from_left) / n : std::nan("");
  const TheoreticalBounds bounds = theoretical_bounds(sc, routed ? out.kappa_hat : 0.0);
  switch (strategy) {
    case Strategy::FractionalCase: out.bound = bounds.fractional; break;
    case Strategy::Trinary: out.bound = bounds.trinary; break;
    default: out.bound = bounds.majority;
  }
  return out;
}

std::vector<BiasEntry> simulate_all(const BiasScenario& sc) {
  std::vector<BiasEntry> out;
  for (Strategy s : {Strategy::Majority, Strategy::Mia, Strategy::FractionalCase, Strategy::Trinary}) {
    out.push_back(simulate(sc, s));
  }
  return out;
}

std::string bias_to_csv(const std::vector<BiasEntry>& entries) {
  std::string out = kBiasHeader;
  out += '\n';
  for (const auto& e : entries) {
    out += to_string(e.strategy) + ',' + csv::format_double(e.mean_a_hat) + ',' + csv::format_double(e.se) + ',' +
           (std::isnan(e.kappa_hat) ? std::string() : csv::format_double(e.kappa_hat)) + ',' +
           csv::format_double(e.bound) + '\n';
  }
  return out;
}

}  // namespace tritree
