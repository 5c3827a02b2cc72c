#pragma once

#include <span>
#include <vector>

#include "qtele/linalg.hpp"
#include "qtele/weyl.hpp"

namespace qtele {

// Pure bipartite channel sum_i a_i |ii> with real nonnegative Schmidt
// coefficients. Complex phases must already be absorbed into local bases.
class SchmidtChannel {
public:
  int dim() const { return static_cast<int>(coeffs_.size()); }
  const RealVector& coeffs() const { return coeffs_; }
  double coeff(int i) const { return coeffs_(i); }
  // Index of the smallest coefficient, lowest index on ties.
  int k_min() const { return k_min_; }
  double min_coeff() const { return coeffs_(k_min_); }
  bool full_rank() const { return min_coeff() > 0.0; }

  Ket state() const;
  // -sum a_i^2 log2 a_i^2
  double entropy() const;

private:
  friend SchmidtChannel make_channel(std::span<const double> coeffs);
  explicit SchmidtChannel(RealVector coeffs);

  RealVector coeffs_;
  int k_min_ = 0;
};

// Rejects negative entries and coefficient sets whose squared norm is more
// than 1e-9 away from one; accepted input is renormalized exactly.
SchmidtChannel make_channel(std::span<const double> coeffs);
SchmidtChannel make_channel(std::initializer_list<double> coeffs);

SchmidtChannel maximally_entangled_channel(int dim);

// Qubit channel 2^{-1/2} [sqrt(1 - c)|00> + sqrt(1 + c)|11>], c = cos(theta_c).
SchmidtChannel channel_from_cos_theta(double cos_theta_c);

// Random full-rank channel: |gaussian| amplitudes, normalized.
SchmidtChannel random_channel(int dim, Rng& rng);

// Coefficient tensors of the measurement basis, indexed [alpha](i, j):
//   gamma       = U^a_ij a_j
//   gamma_inv   = conj(U^a_ij) / (d a_j)
//   gamma_tilde = conj(gamma_inv)
struct GammaTriple {
  std::vector<Operator> gamma;
  std::vector<Operator> gamma_inv;
  std::vector<Operator> gamma_tilde;
};

// Throws SingularChannelError unless every coefficient is positive.
GammaTriple gamma_matrices(const SchmidtChannel& ch, const UnitaryBasis& basis);

// |psi_a> = (U^a (x) 1)|psi>, d^2 generally non-orthogonal states.
std::vector<Ket> basis_states(const SchmidtChannel& ch, const UnitaryBasis& basis);

// Unnormalized duals with <dual_a|psi_b> = delta_ab.
std::vector<Ket> dual_states(const SchmidtChannel& ch, const UnitaryBasis& basis);

// Flattens a d x d coefficient matrix M(i, j) into sum_ij M_ij |ij>.
Ket flatten_joint(const Operator& coeffs);

} // namespace qtele
