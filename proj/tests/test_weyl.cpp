#include <doctest.h>

#include <cmath>

#include "qtele/errors.hpp"
#include "qtele/linalg.hpp"
#include "qtele/weyl.hpp"

using namespace qtele;

namespace {

Operator pauli(char which) {
  Operator p = Operator::Zero(2, 2);
  switch (which) {
  case 'x': p(0, 1) = 1; p(1, 0) = 1; break;
  case 'y': p(0, 1) = Complex(0, -1); p(1, 0) = Complex(0, 1); break;
  case 'z': p(0, 0) = 1; p(1, 1) = -1; break;
  default: p = Operator::Identity(2, 2);
  }
  return p;
}

// |<a, b>_HS| = d means equal up to a global phase for unitaries.
bool equal_up_to_phase(const Operator& a, const Operator& b) {
  return std::abs(std::abs((a.adjoint() * b).trace()) - a.rows()) < 1e-12;
}

} // namespace

TEST_CASE("qubit basis is I, Z, X, XZ and covers the Pauli set up to phase") {
  const UnitaryBasis b = build_weyl_basis(2);
  REQUIRE(b.size() == 4);
  CHECK(max_abs(b.op(0) - pauli('i')) == 0.0);
  CHECK(max_abs(b.op(1) - pauli('z')) < 1e-15);
  CHECK(max_abs(b.op(2) - pauli('x')) == 0.0);
  CHECK(max_abs(b.op(3) - Complex(0, -1) * pauli('y')) < 1e-15);
  for (char p : {'i', 'x', 'y', 'z'}) {
    int hits = 0;
    for (int a = 0; a < 4; ++a)
      hits += equal_up_to_phase(b.op(a), pauli(p));
    CHECK(hits == 1);
  }
}

TEST_CASE("qutrit trace Gram matrix is 3 I") {
  const UnitaryBasis b = build_weyl_basis(3);
  Operator gram(9, 9);
  for (int a = 0; a < 9; ++a)
    for (int c = 0; c < 9; ++c)
      gram(a, c) = (b.op(a).adjoint() * b.op(c)).trace();
  CHECK(max_abs(gram - 3.0 * Operator::Identity(9, 9)) < 1e-12);
  CHECK(b.trace_orthogonality_residual() < 1e-12);
}

TEST_CASE("brute-force completeness sum over the qutrit basis") {
  const UnitaryBasis b = build_weyl_basis(3);
  Complex s = 0, off = 0;
  for (int a = 0; a < 9; ++a) {
    s += b.op(a)(0, 1) * std::conj(b.op(a)(0, 1));
    off += b.op(a)(0, 1) * std::conj(b.op(a)(1, 1));
  }
  CHECK(std::abs(s - 3.0) < 1e-12);
  CHECK(std::abs(off) < 1e-12);
  CHECK(b.completeness_residual() < 1e-12);
}

TEST_CASE("every Weyl element is unitary, labels round-trip") {
  for (int d = 2; d <= 5; ++d) {
    const UnitaryBasis b = build_weyl_basis(d);
    CHECK(b.size() == d * d);
    CHECK(b.max_unitarity_residual() < 1e-12);
    CHECK(b.trace_orthogonality_residual() < 1e-10);
    for (int a = 0; a < b.size(); ++a) {
      const auto [m, n] = b.label(a);
      CHECK(b.alpha(m, n) == a);
      CHECK(max_abs(b.op(a) - shift_operator(d, m) * clock_operator(d, n)) < 1e-14);
    }
  }
}

TEST_CASE("shift and clock act as documented") {
  const Operator x = shift_operator(3);
  CHECK(max_abs(x * basis_ket(3, 2) - basis_ket(3, 0)) == 0.0);
  const Operator z = clock_operator(4);
  CHECK(std::abs(z(1, 1) - Complex(0, 1)) == 0.0);
  CHECK(max_abs(shift_operator(3, 3) - Operator::Identity(3, 3)) < 1e-15);
}

TEST_CASE("construction rejects non-orthogonal or non-unitary sets") {
  std::vector<Operator> ops(4, Operator::Identity(2, 2));
  CHECK_THROWS_AS(UnitaryBasis(2, ops), DomainError);
  ops = build_weyl_basis(2).ops();
  ops[3] *= 2.0;
  CHECK_THROWS_AS(UnitaryBasis(2, ops), DomainError);
}

TEST_CASE("qubit maximally entangled basis is the Bell basis") {
  const auto states = maximally_entangled_basis(build_weyl_basis(2));
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Ket> bell(4, Ket::Zero(4));
  bell[0](0) = r; bell[0](3) = r;  // Phi+
  bell[1](0) = r; bell[1](3) = -r; // Phi-
  bell[2](1) = r; bell[2](2) = r;  // Psi+
  bell[3](1) = r; bell[3](2) = -r; // Psi-
  for (const Ket& bs : bell) {
    int hits = 0;
    for (const Ket& s : states)
      hits += std::abs(std::abs(s.dot(bs)) - 1.0) < 1e-12;
    CHECK(hits == 1);
  }
}

TEST_CASE("maximally entangled basis is orthonormal and complete") {
  for (int d : {2, 3}) {
    const auto states = maximally_entangled_basis(build_weyl_basis(d));
    const int n = d * d;
    Operator gram(n, n), sum = Operator::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c)
        gram(a, c) = states[a].dot(states[c]);
      sum += projector(states[a]);
    }
    CHECK(max_abs(gram - Operator::Identity(n, n)) < 1e-12);
    CHECK(max_abs(sum - Operator::Identity(n, n)) < 1e-12);
  }
}

TEST_CASE("basis construction is deterministic") {
  const auto a = build_weyl_basis(4), b = build_weyl_basis(4);
  for (int k = 0; k < 16; ++k)
    CHECK(max_abs(a.op(k) - b.op(k)) == 0.0);
}
