#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qtele/errors.hpp"
#include "qtele/linalg.hpp"
#include "qtele/weyl.hpp"

using namespace qtele;

namespace {

Operator random_psd(int n, Rng& rng) {
  std::normal_distribution<double> g;
  Operator a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = g(rng);
      a(i, j) = Complex(re, g(rng));
    }
  return a.adjoint() * a;
}

} // namespace

TEST_CASE("tensor of basis kets follows the row-major joint index") {
  const Ket k = tensor(basis_ket(2, 0), basis_ket(2, 1));
  Ket expect(4);
  expect << 0, 1, 0, 0;
  CHECK((k - expect).norm() == 0.0);
}

TEST_CASE("tensor of identities is the identity") {
  const Operator i2 = Operator::Identity(2, 2);
  CHECK(max_abs(tensor(i2, i2) -
                Operator::Identity(4, 4)) == 0.0);
}

TEST_CASE("tensor(X, Z) matches the index-wise definition") {
  const Operator x = shift_operator(2), z = clock_operator(2);
  CHECK(max_abs(tensor(x, z) - oracle::kron(x, z)) == 0.0);
  Rng rng(3);
  const Operator a = haar_random_unitary(3, rng), b = haar_random_unitary(2, rng);
  CHECK(max_abs(tensor(a, b) - oracle::kron(a, b)) < 1e-15);
}

TEST_CASE("tensor is associative for random operands") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Operator a = haar_random_unitary(2, rng), b = haar_random_unitary(3, rng),
                   c = haar_random_unitary(2, rng);
    CHECK(max_abs(tensor(tensor(a, b), c) - tensor(a, tensor(b, c))) <= 1e-14);
  }
}

TEST_CASE("tensor refuses results above the capacity cap") {
  const Operator big = Operator::Identity(40, 40); // 1600^2 entries
  CHECK_THROWS_AS(tensor(big, big), CapacityError);
  CHECK_THROWS_AS(tensor(Ket(Ket::Ones(10)), Ket(Ket::Ones(10)), 50), CapacityError);
  CHECK_NOTHROW(tensor(Ket(Ket::Ones(10)), Ket(Ket::Ones(10)), 100));
}

TEST_CASE("partial trace of a product state") {
  const Ket k00 = tensor(basis_ket(2, 0), basis_ket(2, 0));
  const std::vector<int> dims{2, 2};
  const Operator red = partial_trace(projector(k00), 0, dims);
  CHECK(max_abs(red - projector(basis_ket(2, 0))) == 0.0);
}

TEST_CASE("partial trace of the maximally entangled qutrit pair is I/3") {
  const std::vector<int> dims{3, 3};
  const Operator red = partial_trace(projector(maximally_entangled_state(3)), 1, dims);
  CHECK(max_abs(red - Operator::Identity(3, 3) / 3.0) < 1e-15);
}

TEST_CASE("partial trace of a Schmidt state gives its squared coefficients") {
  Ket psi = Ket::Zero(4);
  psi(0) = std::sqrt(0.8);
  psi(3) = std::sqrt(0.2);
  const std::vector<int> dims{2, 2};
  const Operator red = partial_trace(projector(psi), 0, dims);
  const Operator expect = oracle::trace_second(projector(psi), 2, 2);
  CHECK(max_abs(red - expect) < 1e-15);
  CHECK(red(0, 0).real() == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(red(1, 1).real() == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(std::abs(red(0, 1)) == 0.0);
}

TEST_CASE("partial trace preserves the trace on three-party registers") {
  Rng rng(5);
  const std::vector<int> dims{2, 3, 2};
  for (int trial = 0; trial < 10; ++trial) {
    const Operator rho = random_psd(12, rng);
    for (int keep = 0; keep < 3; ++keep)
      CHECK(std::abs(partial_trace(rho, keep, dims).trace() - rho.trace()) <= 1e-12 * rho.trace().real());
  }
  CHECK(max_abs(partial_trace(random_psd(6, rng), 0, std::vector<int>{2, 3})) > 0.0);
}

TEST_CASE("partial trace rejects inconsistent dims") {
  const std::vector<int> dims{2, 3};
  CHECK_THROWS_AS(partial_trace(Operator::Identity(4, 4), 0, dims), ShapeError);
  CHECK_THROWS_AS(partial_trace(Operator::Identity(6, 6), 2, dims), ShapeError);
}

TEST_CASE("psd_sqrt") {
  SUBCASE("identity") { CHECK(max_abs(psd_sqrt(Operator::Identity(3, 3)) - Operator::Identity(3, 3)) < 1e-15); }
  SUBCASE("diagonal") {
    Operator m = Operator::Zero(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 9.0;
    const Operator s = psd_sqrt(m);
    CHECK(std::abs(s(0, 0) - 2.0) < 1e-14);
    CHECK(std::abs(s(1, 1) - 3.0) < 1e-14);
    CHECK(std::abs(s(0, 1)) < 1e-15);
  }
  SUBCASE("random A^dag A squares back and commutes") {
    Rng rng(21);
    for (int n : {2, 3, 5, 9}) {
      const Operator m = random_psd(n, rng);
      const Operator s = psd_sqrt(m);
      CHECK(max_abs(s * s - m) <= 1e-10);
      CHECK(max_abs(s * m - m * s) <= 1e-10);
      CHECK(is_psd(s));
    }
  }
  SUBCASE("rank-deficient input clamps the null space") {
    const Ket v = basis_ket(3, 1);
    const Operator s = psd_sqrt(projector(v));
    CHECK(max_abs(s - projector(v)) < 1e-12);
  }
  SUBCASE("negative eigenvalue is reported") {
    Operator m = Operator::Identity(2, 2);
    m(1, 1) = -0.25;
    try {
      psd_sqrt(m);
      FAIL("expected PositivityError");
    } catch (const PositivityError& e) {
      CHECK(std::string(e.what()).find("-0.25") != std::string::npos);
    }
  }
}

TEST_CASE("Haar ket moments match 1/d and 2/(d(d+1)) within 3 sigma") {
  for (int d : {2, 3, 5}) {
    Rng rng(1000 + d);
    const int n = 100000;
    std::vector<double> p2(n), p4(n);
    double worst_norm = 0;
    for (int k = 0; k < n; ++k) {
      const Ket c = haar_random_ket(d, rng);
      worst_norm = std::max(worst_norm, std::abs(c.squaredNorm() - 1.0));
      // pool one component per sample; component index rotates
      const double p = std::norm(c(k % d));
      p2[k] = p;
      p4[k] = p * p;
    }
    auto check_mean = [n](const std::vector<double>& xs, double exact) {
      double s = 0, s2 = 0;
      for (double x : xs) {
        s += x;
        s2 += x * x;
      }
      const double mean = s / n;
      const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
      CHECK(std::abs(mean - exact) <= 3.0 * se);
    };
    CHECK(worst_norm <= 1e-12);
    check_mean(p2, 1.0 / d);
    check_mean(p4, 2.0 / (d * (d + 1.0)));
  }
}

TEST_CASE("Haar sampler is deterministic for a fixed seed") {
  Rng a(77), b(77);
  CHECK((haar_random_ket(4, a) - haar_random_ket(4, b)).norm() == 0.0);
  CHECK_THROWS_AS(haar_random_ket(1, a), DomainError);
}

TEST_CASE("Haar unitaries are unitary") {
  Rng rng(8);
  for (int d : {2, 3, 6})
    CHECK(is_unitary(haar_random_unitary(d, rng)));
}

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann_entropy(Operator::Identity(2, 2) / 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(von_neumann_entropy(projector(basis_ket(3, 2))) == doctest::Approx(0.0));
  Operator m = Operator::Zero(2, 2);
  m(0, 0) = 0.8;
  m(1, 1) = 0.2;
  const double direct = -0.8 * std::log2(0.8) - 0.2 * std::log2(0.2);
  CHECK(von_neumann_entropy(m) == doctest::Approx(direct).epsilon(1e-13));
  CHECK(von_neumann_entropy(m) == doctest::Approx(0.72193).epsilon(1e-5));
  CHECK(von_neumann_entropy(Operator::Identity(5, 5) / 5.0) == doctest::Approx(std::log2(5.0)));
  CHECK_THROWS_AS(von_neumann_entropy(Operator::Identity(2, 2)), NormalizationError);
}

TEST_CASE("marker predicates") {
  CHECK(is_hermitian(Operator::Identity(3, 3)));
  CHECK_FALSE(is_hermitian(shift_operator(3)));
  CHECK(is_unitary(shift_operator(3)));
  CHECK_FALSE(is_psd(-Operator::Identity(2, 2)));
  CHECK(is_normalized(basis_ket(4, 3)));
  CHECK_FALSE(is_normalized(Ket(Ket::Ones(2))));
}
