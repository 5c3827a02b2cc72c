#pragma once

#include <string>
#include <vector>

#include "qtele/channel.hpp"
#include "qtele/linalg.hpp"
#include "qtele/weyl.hpp"

namespace qtele {

enum class ElementKind {
  Conclusive,           // identifies basis state alpha
  InconclusiveProduct,  // weight * |ij><ij|
  InconclusiveResidual, // S |psi^m_alpha><psi^m_alpha| S, S = sqrt(remainder)
  Remainder,            // unrefined 1 - sum of conclusive elements
};

struct ElementTag {
  ElementKind kind = ElementKind::Remainder;
  // Conclusive / InconclusiveResidual: first = alpha.
  // InconclusiveProduct: first = i (particle 1), second = j (particle 2).
  int first = -1;
  int second = -1;

  static ElementTag conclusive(int alpha) { return {ElementKind::Conclusive, alpha, -1}; }
  static ElementTag product(int i, int j) { return {ElementKind::InconclusiveProduct, i, j}; }
  static ElementTag residual(int alpha) { return {ElementKind::InconclusiveResidual, alpha, -1}; }
  static ElementTag remainder() { return {}; }

  bool is_conclusive() const { return kind == ElementKind::Conclusive; }
  std::string str() const;

  friend bool operator==(const ElementTag&, const ElementTag&) = default;
};

// Ordered measurement on the d^2-dimensional joint space of particles 1, 2.
// Construction checks positivity and completeness to 1e-10.
class PovmSet {
public:
  PovmSet(int local_dim, double lambda, std::vector<Operator> elements,
          std::vector<ElementTag> tags);

  int local_dim() const { return local_dim_; }
  int joint_dim() const { return local_dim_ * local_dim_; }
  double lambda() const { return lambda_; }
  int size() const { return static_cast<int>(elements_.size()); }

  const Operator& element(int k) const { return elements_.at(k); }
  const ElementTag& tag(int k) const { return tags_.at(k); }
  const std::vector<Operator>& elements() const { return elements_; }
  const std::vector<ElementTag>& tags() const { return tags_; }

  // Index of the unrefined remainder, or -1.
  int remainder_index() const;

  double completeness_residual() const;
  double min_element_eigenvalue() const;

private:
  int local_dim_;
  double lambda_;
  std::vector<Operator> elements_;
  std::vector<ElementTag> tags_;
};

// d * min_i a_i^2: the largest weight that keeps the remainder positive.
double lambda_max(const SchmidtChannel& ch);

// d^2 conclusive elements lambda |dual_a><dual_a| followed by the remainder.
// Throws PositivityError when lambda is negative or exceeds d a_j^2 for some j.
PovmSet build_conclusive_povm(const SchmidtChannel& ch, const UnitaryBasis& basis,
                              double lambda);

// Splits a product-diagonal remainder into d^2 weighted projectors |ij><ij|,
// appended in the order j-major, i-minor (index d^2 + j d + i).
PovmSet refine_inconclusive_product(const PovmSet& p);

// Splits the remainder R into S |psi^m_a><psi^m_a| S with S = sqrt(R).
PovmSet refine_inconclusive_residual(const PovmSet& p, const UnitaryBasis& basis);

// Qubit family with the conclusive states built for angle theta instead of
// the channel angle theta_c. Requires 0 <= lambda <= 1 - |cos theta|.
struct ThetaPovmFamily {
  double cos_theta_c = 0.0;
  double cos_theta = 0.0;
  double lambda = 0.0;

  SchmidtChannel channel() const { return channel_from_cos_theta(cos_theta_c); }
};

PovmSet build_theta_povm(const ThetaPovmFamily& fam);

// max over alpha != beta (both conclusive) of
// <psi_b|M_a|psi_b> / <psi_b|M_b|psi_b>; 0 when every conclusive weight is 0.
double identification_ratio(const PovmSet& p, const std::vector<Ket>& states);

} // namespace qtele
