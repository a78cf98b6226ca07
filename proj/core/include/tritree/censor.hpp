#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "tritree/data.hpp"

namespace tritree {

enum class Scenario {
  Mcar,      // train and test censored completely at random
  McarTest,  // only the test set censored, completely at random
  Im,        // informative: largest values / most frequent categories first
};

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& text);

struct CensorSpec {
  Scenario scenario = Scenario::Mcar;
  double q = 0.0;
  std::uint64_t seed = 0;
};

// Number of cells censored per column: round(q * n_rows).
std::size_t censored_count(double q, std::size_t n_rows);

// Per column, exactly censored_count(q, n) present cells (fewer if the
// column has fewer present cells) become missing, drawn without
// replacement from a stream derived from (seed, column index).
Dataset censor_mcar(const Dataset& ds, double q, std::uint64_t seed);

// Deterministic informative censoring. Numeric: largest values first,
// equal values by ascending row index. Categorical: whole categories in
// order of descending frequency (name breaks ties), the last one partially
// by ascending row index.
Dataset censor_im(const Dataset& ds, double q);

// MCAR: both sets with independent streams; MCARTest: test only; IM: both.
std::pair<Dataset, Dataset> apply_scenario(const Dataset& train, const Dataset& test, const CensorSpec& spec);

}  // namespace tritree
