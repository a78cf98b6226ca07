#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tritree/split.hpp"

namespace tritree {

// Two-region data-generating process: E[Y | X left] = a, E[Y | X right] = b,
// P(X right) = p, each covariate censored independently with probability q.
struct BiasScenario {
  double a = 0.0;
  double b = 1.0;
  double p = 0.5;
  double q = 0.3;
  double sigma = 0.1;
  std::size_t n = 200;
  std::size_t reps = 2000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct BiasEntry {
  Strategy strategy = Strategy::Majority;
  // Mean of the left-leaf estimate over replications and its standard error.
  double mean_a_hat = 0.0;
  double se = 0.0;
  // Same for the right-leaf estimate.
  double mean_b_hat = 0.0;
  double se_b = 0.0;
  // Share of replications whose missing rows were not sent to the left
  // leaf (Majority and MIA); NaN otherwise.
  double kappa_hat = 0.0;
  // Closed-form lower bound on E[a_hat] (exact value a for Trinary).
  double bound = 0.0;
  std::size_t used_reps = 0;
  std::size_t skipped_reps = 0;
};

struct TheoreticalBounds {
  double majority = 0.0;  // also MIA, with its own kappa
  double fractional = 0.0;
  double trinary = 0.0;
};

// Lower bounds on E[a_hat]: a + (1-kappa) p q / (1 - p + p q) (b - a) for
// Majority/MIA, a + p q (b - a) for Fractional Case, and a for Trinary.
TheoreticalBounds theoretical_bounds(const BiasScenario& sc, double kappa_hat);

// Monte Carlo estimate for one strategy at the true split (no search).
// Replication r draws from a stream derived from (seed, r), so every
// strategy sees the same samples. TrinaryMIA is not a separate estimator
// here and is rejected.
BiasEntry simulate(const BiasScenario& sc, Strategy strategy);

// Majority, MIA, FC and Trinary in that order.
std::vector<BiasEntry> simulate_all(const BiasScenario& sc);

inline constexpr const char* kBiasHeader = "strategy,mean_a_hat,se,kappa_hat,bound";
std::string bias_to_csv(const std::vector<BiasEntry>& entries);

}  // namespace tritree
