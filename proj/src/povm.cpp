#include "qtele/povm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qtele/errors.hpp"

namespace qtele {

std::string ElementTag::str() const {
  std::ostringstream out;
  switch (kind) {
  case ElementKind::Conclusive:
    out << "conclusive_" << first;
    break;
  case ElementKind::InconclusiveProduct:
    out << "product_" << first << "_" << second;
    break;
  case ElementKind::InconclusiveResidual:
    out << "residual_" << first;
    break;
  case ElementKind::Remainder:
    out << "remainder";
    break;
  }
  return out.str();
}

PovmSet::PovmSet(int local_dim, double lambda, std::vector<Operator> elements,
                 std::vector<ElementTag> tags)
    : local_dim_(local_dim), lambda_(lambda), elements_(std::move(elements)),
      tags_(std::move(tags)) {
  if (elements_.size() != tags_.size())
    throw ShapeError("PovmSet: one tag per element required");
  const int n = joint_dim();
  for (const auto& m : elements_)
    if (m.rows() != n || m.cols() != n)
      throw ShapeError("PovmSet: element has wrong shape");
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    if (hermiticity_residual(elements_[k]) > kPsdTol ||
        min_eigenvalue(elements_[k]) < -kPsdTol) {
      std::ostringstream msg;
      msg << "PovmSet: element " << k << " (" << tags_[k].str()
          << ") is not positive semidefinite";
      throw PositivityError(msg.str());
    }
  }
  if (completeness_residual() > kPsdTol)
    throw ConsistencyError("PovmSet: elements do not sum to the identity");
}

int PovmSet::remainder_index() const {
  for (int k = 0; k < size(); ++k)
    if (tags_[k].kind == ElementKind::Remainder)
      return k;
  return -1;
}

double PovmSet::completeness_residual() const {
  Operator sum = Operator::Zero(joint_dim(), joint_dim());
  for (const auto& m : elements_)
    sum += m;
  return max_abs(sum - Operator::Identity(joint_dim(), joint_dim()));
}

double PovmSet::min_element_eigenvalue() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& m : elements_)
    worst = std::min(worst, min_eigenvalue(m));
  return worst;
}

double lambda_max(const SchmidtChannel& ch) {
  // Same rounding as the d a_i^2 - lambda radicands elsewhere, so lambda_max
  // lands exactly on zero there instead of a stray 1e-17.
  const double a = ch.min_coeff();
  return ch.dim() * (a * a);
}

namespace {

// Weights within this distance of zero are treated as exactly zero.
constexpr double kWeightSnap = 1e-12;

Operator hermitian_part(const Operator& m) { return 0.5 * (m + m.adjoint()); }

std::vector<Operator> without_remainder(const PovmSet& p, std::vector<ElementTag>& tags) {
  std::vector<Operator> out;
  for (int k = 0; k < p.size(); ++k) {
    if (p.tag(k).kind == ElementKind::Remainder)
      continue;
    out.push_back(p.element(k));
    tags.push_back(p.tag(k));
  }
  return out;
}

int require_remainder(const PovmSet& p) {
  const int r = p.remainder_index();
  if (r < 0)
    throw DomainError("POVM has no unrefined remainder element");
  return r;
}

} // namespace

PovmSet build_conclusive_povm(const SchmidtChannel& ch, const UnitaryBasis& basis,
                              double lambda) {
  const int d = ch.dim();
  if (!(lambda >= 0.0)) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " is negative";
    throw PositivityError(msg.str());
  }
  for (int j = 0; j < d; ++j) {
    const double bound = d * (ch.coeff(j) * ch.coeff(j));
    if (lambda > bound + kWeightSnap) {
      std::ostringstream msg;
      msg << "lambda = " << lambda << " exceeds d a_" << j << "^2 = " << bound
          << "; inconclusive weight for j = " << j << " would be negative";
      throw PositivityError(msg.str());
    }
  }

  const auto duals = dual_states(ch, basis);
  std::vector<Operator> elements;
  std::vector<ElementTag> tags;
  Operator remainder = Operator::Identity(d * d, d * d);
  for (int a = 0; a < basis.size(); ++a) {
    Operator m = lambda * projector(duals[a]);
    remainder -= m;
    elements.push_back(std::move(m));
    tags.push_back(ElementTag::conclusive(a));
  }
  elements.push_back(hermitian_part(remainder));
  tags.push_back(ElementTag::remainder());
  return PovmSet(d, lambda, std::move(elements), std::move(tags));
}

PovmSet refine_inconclusive_product(const PovmSet& p) {
  const int r = require_remainder(p);
  const int d = p.local_dim();
  const Operator& rem = p.element(r);
  const Operator off = rem - Operator(rem.diagonal().asDiagonal());
  if (max_abs(off) > kPsdTol)
    throw DomainError("refine_inconclusive_product: remainder is not diagonal "
                      "in the product basis");

  std::vector<ElementTag> tags;
  auto elements = without_remainder(p, tags);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      const int flat = i * d + j;
      double w = rem(flat, flat).real();
      if (std::abs(w) < kWeightSnap)
        w = 0.0;
      Operator m = Operator::Zero(d * d, d * d);
      m(flat, flat) = w;
      elements.push_back(std::move(m));
      tags.push_back(ElementTag::product(i, j));
    }
  return PovmSet(d, p.lambda(), std::move(elements), std::move(tags));
}

PovmSet refine_inconclusive_residual(const PovmSet& p, const UnitaryBasis& basis) {
  const int r = require_remainder(p);
  const int d = p.local_dim();
  if (basis.dim() != d)
    throw ShapeError("refine_inconclusive_residual: basis dimension mismatch");
  const Operator root = psd_sqrt(p.element(r));

  std::vector<ElementTag> tags;
  auto elements = without_remainder(p, tags);
  const auto bell = maximally_entangled_basis(basis);
  for (int a = 0; a < basis.size(); ++a) {
    elements.push_back(projector(root * bell[a]));
    tags.push_back(ElementTag::residual(a));
  }
  return PovmSet(d, p.lambda(), std::move(elements), std::move(tags));
}

PovmSet build_theta_povm(const ThetaPovmFamily& fam) {
  const double c = fam.cos_theta;
  if (!(std::abs(c) < 1.0))
    throw DomainError("build_theta_povm: |cos theta| must be < 1");
  if (!(std::abs(fam.cos_theta_c) <= 1.0))
    throw DomainError("build_theta_povm: |cos theta_c| must be <= 1");
  const double bound = 1.0 - std::abs(c);
  if (!(fam.lambda >= 0.0) || fam.lambda > bound + kWeightSnap) {
    std::ostringstream msg;
    msg << "build_theta_povm: lambda = " << fam.lambda
        << " outside [0, 1 - |cos theta|] = [0, " << bound << "]";
    throw PositivityError(msg.str());
  }

  // |00>, |01>, |10>, |11> are flat indices 0..3.
  const double norm = 1.0 / std::sqrt(2.0 - 2.0 * c * c);
  const double big = norm * std::sqrt(1.0 + c);
  const double small = norm * std::sqrt(1.0 - c);
  std::vector<Ket> states(4, Ket::Zero(4));
  states[0](0) = big;
  states[0](3) = small;
  states[1](0) = big;
  states[1](3) = -small;
  states[2](2) = big;
  states[2](1) = small;
  states[3](2) = big;
  states[3](1) = -small;

  std::vector<Operator> elements;
  std::vector<ElementTag> tags;
  for (int a = 0; a < 4; ++a) {
    elements.push_back(fam.lambda * projector(states[a]));
    tags.push_back(ElementTag::conclusive(a));
  }
  // Closed-form remainder: 1 - lambda/(1 - c) on j = 0, 1 - lambda/(1 + c) on j = 1.
  Operator rem = Operator::Zero(4, 4);
  for (int i = 0; i < 2; ++i) {
    double w0 = 1.0 - fam.lambda / (1.0 - c);
    double w1 = 1.0 - fam.lambda / (1.0 + c);
    rem(i * 2 + 0, i * 2 + 0) = std::abs(w0) < kWeightSnap ? 0.0 : w0;
    rem(i * 2 + 1, i * 2 + 1) = std::abs(w1) < kWeightSnap ? 0.0 : w1;
  }
  elements.push_back(rem);
  tags.push_back(ElementTag::remainder());
  return PovmSet(2, fam.lambda, std::move(elements), std::move(tags));
}

double identification_ratio(const PovmSet& p, const std::vector<Ket>& states) {
  std::vector<int> conclusive(states.size(), -1);
  for (int k = 0; k < p.size(); ++k)
    if (p.tag(k).is_conclusive())
      conclusive.at(p.tag(k).first) = k;

  double worst = 0.0;
  for (std::size_t b = 0; b < states.size(); ++b) {
    if (conclusive[b] < 0)
      throw DomainError("identification_ratio: missing conclusive element");
    const Ket& psi = states[b];
    const double own = std::abs(psi.dot(p.element(conclusive[b]) * psi));
    double cross = 0.0;
    for (std::size_t a = 0; a < states.size(); ++a)
      if (a != b)
        cross = std::max(cross, std::abs(psi.dot(p.element(conclusive[a]) * psi)));
    if (own > 0.0)
      worst = std::max(worst, cross / own);
    else if (cross > 1e-14)
      return std::numeric_limits<double>::infinity();
  }
  return worst;
}

} // namespace qtele
