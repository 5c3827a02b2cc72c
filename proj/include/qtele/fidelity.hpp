#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qtele/channel.hpp"
#include "qtele/linalg.hpp"
#include "qtele/povm.hpp"
#include "qtele/weyl.hpp"

namespace qtele {

// Linear map from the input amplitudes c to the unnormalized state of the
// receiver's particle after outcome `outcome`. For a rank-one element
// |m><m| on particles 1, 2: B(j, i) = conj(m_ij) a_j.
struct OutcomeChannelMap {
  int outcome = -1;
  Operator map;
};

// Throws DecompositionRequiredError when the element has rank above one.
OutcomeChannelMap outcome_channel(const Operator& element, const SchmidtChannel& ch,
                                  int outcome = -1);
Operator outcome_map_from_ket(const Ket& factor, const SchmidtChannel& ch);

std::vector<OutcomeChannelMap> outcome_channels(const PovmSet& p, const SchmidtChannel& ch);

// Haar-exact averages for one outcome:
//   probability   = Tr(B^dag B) / d
//   fidelity term = (|Tr(V B)|^2 + Tr(B^dag B)) / (d (d + 1))
struct FidelityTerm {
  double probability = 0.0;
  double fidelity_term = 0.0;
};

FidelityTerm avg_fidelity_term(const Operator& map, const Operator& correction);

// Unitary V maximizing |Tr(V B)|: the unitary polar factor of B^dag.
Operator optimal_correction(const Operator& map);

enum class Corrections {
  Auto,  // optimal_correction per outcome
  Paper, // U^alpha for conclusive/residual outcomes, |j> -> |i> shift for product ones
};

std::string to_string(Corrections c);

struct OutcomeReport {
  int index = 0;
  ElementTag tag;
  double probability = 0.0;
  double fidelity_term = 0.0;
  // fidelity_term / probability, 0 when the outcome never occurs
  double conditional_fidelity = 0.0;
};

struct FidelityReport {
  double lambda = 0.0;
  std::string strategy;
  Corrections corrections = Corrections::Auto;
  std::vector<OutcomeReport> outcomes;
  double p_conclusive = 0.0;
  double p_inconclusive = 0.0;
  double f_conclusive = 0.0;
  double f_inconclusive = 0.0;
  double f_total = 0.0;
};

// "product", "residual", "unrefined" or "mixed", read off the element tags.
std::string strategy_name(const PovmSet& p);

std::vector<Operator> correction_unitaries(const PovmSet& p, const SchmidtChannel& ch,
                                           const UnitaryBasis& basis, Corrections mode);

// Exact Haar-averaged report. Every element must be rank one.
FidelityReport report(const PovmSet& p, const SchmidtChannel& ch,
                      const UnitaryBasis& basis, Corrections mode);

// ---------------------------------------------------------------------------
// Monte Carlo

struct TranscriptRecord {
  std::uint64_t run_index = 0;
  int outcome_alpha = 0;
  bool conclusive = false;
  int bits_sent = 0;
};

using TranscriptSink = std::function<void(const TranscriptRecord&)>;

// ceil(log2(n_outcomes)) + 1 flag bit for conclusive/inconclusive.
int classical_bits(int n_outcomes);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct MonteCarloOutcome {
  int index = 0;
  ElementTag tag;
  std::uint64_t count = 0;
  Estimate probability;
  Estimate fidelity_term;
};

struct MonteCarloReport {
  std::uint64_t n_runs = 0;
  std::vector<MonteCarloOutcome> outcomes;
  Estimate p_conclusive;
  Estimate p_inconclusive;
  Estimate f_conclusive;
  Estimate f_inconclusive;
  Estimate f_total;
  // max |fidelity - 1| over all conclusive runs
  double max_conclusive_deviation = 0.0;
};

struct SimulationOptions {
  std::uint64_t n_runs = 0;
  std::uint64_t seed = 0;
  // 0: QTELE_WORKERS from the environment, else hardware concurrency.
  int workers = 0;
  TranscriptSink transcript;
};

// Number of worker threads for `requested` (see SimulationOptions::workers).
int resolve_workers(int requested);

// Result of one protocol run: which outcome fired and the fidelity between
// the input and the corrected output.
struct RunSample {
  int outcome = 0;
  double fidelity = 0.0;
};

using RunKernel = std::function<RunSample(const Ket& input, Rng& rng)>;

// Runs are split into fixed blocks, block b seeded from (seed, b), so the
// result does not depend on the worker count.
MonteCarloReport run_monte_carlo(int local_dim, const std::vector<ElementTag>& tags,
                                 const RunKernel& kernel, const SimulationOptions& opts);

// Haar input, outcome drawn with probability <Psi|M_a|Psi>, correction
// applied, fidelity |<phi|out>|^2 recorded.
MonteCarloReport simulate(const PovmSet& p, const SchmidtChannel& ch,
                          const UnitaryBasis& basis, Corrections mode,
                          const SimulationOptions& opts);

} // namespace qtele
