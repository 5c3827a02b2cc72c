#pragma once

#include <utility>
#include <vector>

#include "qtele/linalg.hpp"

namespace qtele {

// Shift X|j> = |j+1 mod d> raised to `power`.
Operator shift_operator(int dim, int power = 1);
// Clock Z|j> = w^j |j>, w = exp(2 pi i / d), raised to `power`.
Operator clock_operator(int dim, int power = 1);

// An orthogonal set of d^2 unitaries, Tr(U_a^dag U_b) = d delta_ab.
// Element alpha carries the label pair (m, n) with alpha = m * d + n.
class UnitaryBasis {
public:
  // Validates unitarity and trace orthogonality, throws DomainError otherwise.
  UnitaryBasis(int dim, std::vector<Operator> ops);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(ops_.size()); }
  const Operator& op(int alpha) const { return ops_.at(alpha); }
  const std::vector<Operator>& ops() const { return ops_; }

  std::pair<int, int> label(int alpha) const { return {alpha / dim_, alpha % dim_}; }
  int alpha(int m, int n) const { return m * dim_ + n; }

  // max |Tr(U_a^dag U_b) - d delta_ab|
  double trace_orthogonality_residual() const;
  // max |(1/d) sum_a U^a_ij conj(U^a_kl) - delta_ik delta_jl|
  double completeness_residual() const;
  double max_unitarity_residual() const;

private:
  int dim_;
  std::vector<Operator> ops_;
};

// Weyl-Heisenberg basis: ops[m * d + n] = X^m Z^n. Reduces to {I, Z, X, XZ}
// for d = 2, i.e. the Pauli set up to a phase on XZ = -i sigma_y.
UnitaryBasis build_weyl_basis(int dim);

// d^{-1/2} sum_i |ii>
Ket maximally_entangled_state(int dim);

// (U^alpha (x) 1) |psi^m>, for every alpha in basis order.
std::vector<Ket> maximally_entangled_basis(const UnitaryBasis& basis);

} // namespace qtele
