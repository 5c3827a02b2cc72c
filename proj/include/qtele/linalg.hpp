#pragma once

// Dense complex linear algebra shared by every other module.
//
// Joint bases are flattened row-major: |i j> of an (d_a x d_b) pair lives at
// index i * d_b + j. All indices are zero-based; a 1-based label k from the
// usual physics notation is index k - 1 here.

#include <complex>
#include <cstddef>
#include <random>
#include <span>

#include <Eigen/Dense>

namespace qtele {

using Complex = std::complex<double>;
using Ket = Eigen::VectorXcd;
using Operator = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Callers own their generator; nothing in the library keeps RNG state.
using Rng = std::mt19937_64;

inline constexpr std::size_t kDefaultTensorCap = 1'000'000;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;

Ket basis_ket(int dim, int index);
Operator projector(const Ket& v);

// Kronecker product; throws CapacityError when the result would hold more
// than `cap` entries.
Ket tensor(const Ket& a, const Ket& b, std::size_t cap = kDefaultTensorCap);
Operator tensor(const Operator& a, const Operator& b,
                std::size_t cap = kDefaultTensorCap);

// Reduced operator on subsystem `keep` of a register with local dims `dims`.
Operator partial_trace(const Operator& rho, int keep, std::span<const int> dims);

struct HermitianSpectrum {
  RealVector values; // ascending
  Operator vectors;  // columns are the matching eigenvectors
};

// The one spectral kernel; input is symmetrized before diagonalization.
HermitianSpectrum hermitian_eigen(const Operator& m);

Operator psd_sqrt(const Operator& m);

// Entropy in bits, 0 log 0 := 0.
double von_neumann_entropy(const Operator& rho);

// Normalized vector of i.i.d. standard complex Gaussians (Haar-distributed).
Ket haar_random_ket(int dim, Rng& rng);
// QR of a Ginibre matrix with the R-diagonal phases divided out.
Operator haar_random_unitary(int dim, Rng& rng);

double max_abs(const Operator& m);
double hermiticity_residual(const Operator& m);
double unitarity_residual(const Operator& m);
double min_eigenvalue(const Operator& m);

bool is_normalized(const Ket& v, double tol = kNormTol);
bool is_hermitian(const Operator& m, double tol = kHermitianTol);
bool is_psd(const Operator& m, double tol = kPsdTol);
bool is_unitary(const Operator& m, double tol = kUnitaryTol);

} // namespace qtele
