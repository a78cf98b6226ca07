#pragma once

#include <cstddef>
#include <cstdint>

#include "tritree/data.hpp"

namespace tritree {

struct SyntheticConfig {
  std::size_t n_rows = 2000;
  std::uint64_t seed = 7;
  double noise = 0.5;
};

// Regression data whose mean is a depth-3 tree over three latent factors.
// Each factor is observed through correlated proxies, so a tree that loses
// one proxy to censoring can fall back on another:
//   x1, x2  noisy copies of z1
//   x3, x4  noisy copies of z2
//   x5      categorical (c0..c4), a binned copy of z3
//   x6      pure noise
Dataset make_synthetic(const SyntheticConfig& cfg = {});

}  // namespace tritree
