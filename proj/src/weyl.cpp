#include "qtele/weyl.hpp"

#include <cmath>
#include <numbers>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

// Root of unity with exact values at the quarter turns.
Complex root_of_unity(int dim, int k) {
  k = ((k % dim) + dim) % dim;
  if (k == 0)
    return 1.0;
  if (2 * k == dim)
    return -1.0;
  if (4 * k == dim)
    return Complex(0.0, 1.0);
  if (4 * k == 3 * dim)
    return Complex(0.0, -1.0);
  return std::polar(1.0, 2.0 * std::numbers::pi * k / dim);
}

} // namespace

Operator shift_operator(int dim, int power) {
  Operator x = Operator::Zero(dim, dim);
  for (int j = 0; j < dim; ++j)
    x((((j + power) % dim) + dim) % dim, j) = 1.0;
  return x;
}

Operator clock_operator(int dim, int power) {
  Operator z = Operator::Zero(dim, dim);
  for (int j = 0; j < dim; ++j)
    z(j, j) = root_of_unity(dim, j * power);
  return z;
}

UnitaryBasis::UnitaryBasis(int dim, std::vector<Operator> ops)
    : dim_(dim), ops_(std::move(ops)) {
  if (dim_ < 2)
    throw DomainError("unitary basis: dimension must be at least 2");
  if (static_cast<int>(ops_.size()) != dim_ * dim_)
    throw DomainError("unitary basis: need exactly d^2 operators");
  for (const auto& u : ops_)
    if (u.rows() != dim_ || u.cols() != dim_)
      throw ShapeError("unitary basis: operator has wrong shape");
  if (max_unitarity_residual() > 1e-12)
    throw DomainError("unitary basis: element is not unitary");
  if (trace_orthogonality_residual() > 1e-10)
    throw DomainError("unitary basis: elements are not trace-orthogonal");
}

double UnitaryBasis::trace_orthogonality_residual() const {
  double worst = 0.0;
  for (int a = 0; a < size(); ++a)
    for (int b = 0; b < size(); ++b) {
      Complex t = (ops_[a].adjoint() * ops_[b]).trace();
      if (a == b)
        t -= static_cast<double>(dim_);
      worst = std::max(worst, std::abs(t));
    }
  return worst;
}

double UnitaryBasis::completeness_residual() const {
  // Treat each U^a as a length-d^2 column; the relation is (1/d) C C^dag = I.
  Operator cols(dim_ * dim_, size());
  for (int a = 0; a < size(); ++a)
    cols.col(a) = ops_[a].transpose().reshaped();
  Operator gram = cols * cols.adjoint() / static_cast<double>(dim_);
  return max_abs(gram - Operator::Identity(dim_ * dim_, dim_ * dim_));
}

double UnitaryBasis::max_unitarity_residual() const {
  double worst = 0.0;
  for (const auto& u : ops_)
    worst = std::max(worst, unitarity_residual(u));
  return worst;
}

UnitaryBasis build_weyl_basis(int dim) {
  if (dim < 2)
    throw DomainError("build_weyl_basis: dimension must be at least 2");
  std::vector<Operator> ops;
  ops.reserve(dim * dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n)
      ops.push_back(shift_operator(dim, m) * clock_operator(dim, n));
  return UnitaryBasis(dim, std::move(ops));
}

Ket maximally_entangled_state(int dim) {
  Ket psi = Ket::Zero(dim * dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < dim; ++i)
    psi(i * dim + i) = amp;
  return psi;
}

std::vector<Ket> maximally_entangled_basis(const UnitaryBasis& basis) {
  const int d = basis.dim();
  const Ket psi = maximally_entangled_state(d);
  const Operator id = Operator::Identity(d, d);
  std::vector<Ket> out;
  out.reserve(basis.size());
  for (const auto& u : basis.ops())
    out.push_back(tensor(u, id) * psi);
  return out;
}

} // namespace qtele
