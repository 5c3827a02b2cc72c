#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtele/channel.hpp"

namespace qtele::verify {

// One line of the invariant battery. `value` is a max residual, or a z-score
// for Monte Carlo rows; the row passes when value <= tolerance.
struct CheckRow {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct BatteryOptions {
  std::vector<int> dims{2, 3};
  // When set, the POVM/engine/dilation checks use this channel only.
  std::optional<SchmidtChannel> channel;
  // When set, replaces the default lambda sweep {0, max/2, max}.
  std::optional<double> lambda;
  std::uint64_t seed = 1;
  int random_channels = 5;
  std::uint64_t mc_runs = 20000;
};

std::vector<CheckRow> run_battery(const BatteryOptions& opts);

// Product-refinement fidelity against the orthogonal-refinement optimum,
// both from the exact engine.
struct DiscrepancyRow {
  int d = 0;
  std::vector<double> coeff_sq;
  double lambda = 0.0;
  double product_engine = 0.0;
  double residual_engine = 0.0;
  double product_formula = 0.0;
  double otaf_formula = 0.0;
  bool coincide = false; // |product - residual| <= 1e-9
};

std::vector<DiscrepancyRow> discrepancy_report();

void print_rows(const std::vector<CheckRow>& rows, std::ostream& out);
void print_discrepancy(const std::vector<DiscrepancyRow>& rows, std::ostream& out);

} // namespace qtele::verify
