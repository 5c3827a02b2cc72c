#pragma once

#include <vector>

#include "qtele/fidelity.hpp"
#include "qtele/linalg.hpp"
#include "qtele/povm.hpp"

namespace qtele {

// Orthogonal realization of a POVM on system (x) ancilla. Extended basis
// states |x>|a> are flattened as x * ancilla_dim + a; the ancilla starts in
// |0>, so column x * ancilla_dim of `unitary` is the isometry image of |x>.
struct DilationResult {
  int system_dim = 0;
  int ancilla_dim = 0;
  Operator unitary;
  // Extended basis indices whose projectors together realize element alpha.
  std::vector<std::vector<int>> outcome_map;
  // max |M_alpha - P U^dag Pi_alpha U P| per element
  std::vector<double> residuals;

  int extended_dim() const { return system_dim * ancilla_dim; }
  Operator reconstructed_element(int alpha) const;
  double max_residual() const;
  double unitarity_residual() const;
  // max |sum_alpha reconstructed - 1|
  double completeness_residual() const;
};

// Kraus factors K_a = |e_a><m_a| with M_a = |m_a><m_a| (spectral pieces for
// higher-rank elements), e_a assigned lexicographically in alpha. The
// isometry is completed to a unitary by Gram-Schmidt over the computational
// basis in index order. Throws CapacityError when ancilla_dim < d or the
// element pieces do not fit into d^2 * ancilla_dim slots.
DilationResult dilate(const PovmSet& p, int ancilla_dim);

// Outcome probabilities from projective measurement of U (|Psi_123> (x) |0>)
// where the ancilla joins particles 1 and 2 and particle 3 is a spectator.
std::vector<double> dilated_probabilities(const DilationResult& dil, const Ket& psi123,
                                          int local_dim);

// Monte Carlo routed through the extended unitary.
MonteCarloReport simulate_dilated(const DilationResult& dil, const PovmSet& p,
                                  const SchmidtChannel& ch, const UnitaryBasis& basis,
                                  Corrections mode, const SimulationOptions& opts);

} // namespace qtele
