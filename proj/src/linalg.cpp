#include "qtele/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

void check_capacity(std::size_t entries, std::size_t cap) {
  if (entries > cap) {
    std::ostringstream msg;
    msg << "tensor product needs " << entries << " entries, cap is " << cap;
    throw CapacityError(msg.str());
  }
}

} // namespace

Ket basis_ket(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim)
    throw ShapeError("basis_ket: index out of range");
  Ket v = Ket::Zero(dim);
  v(index) = 1.0;
  return v;
}

Operator projector(const Ket& v) { return v * v.adjoint(); }

Ket tensor(const Ket& a, const Ket& b, std::size_t cap) {
  const auto na = static_cast<std::size_t>(a.size());
  const auto nb = static_cast<std::size_t>(b.size());
  check_capacity(na * nb, cap);
  Ket out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Operator tensor(const Operator& a, const Operator& b, std::size_t cap) {
  const auto rows = static_cast<std::size_t>(a.rows() * b.rows());
  const auto cols = static_cast<std::size_t>(a.cols() * b.cols());
  if (cols != 0 && rows > cap / cols) {
    std::ostringstream msg;
    msg << "tensor product of shape " << rows << "x" << cols
        << " exceeds cap of " << cap << " entries";
    throw CapacityError(msg.str());
  }
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator partial_trace(const Operator& rho, int keep, std::span<const int> dims) {
  if (dims.empty() || keep < 0 || keep >= static_cast<int>(dims.size()))
    throw ShapeError("partial_trace: kept subsystem out of range");
  long total = 1;
  for (int d : dims) {
    if (d < 1)
      throw ShapeError("partial_trace: subsystem dims must be positive");
    total *= d;
  }
  if (rho.rows() != rho.cols() || rho.rows() != total)
    throw ShapeError("partial_trace: operator shape does not match dims");

  // Split the flat index into (outer, kept, inner) blocks.
  long outer = 1, inner = 1;
  for (int s = 0; s < keep; ++s)
    outer *= dims[s];
  for (std::size_t s = keep + 1; s < dims.size(); ++s)
    inner *= dims[s];
  const long dk = dims[keep];

  Operator out = Operator::Zero(dk, dk);
  for (long o = 0; o < outer; ++o)
    for (long n = 0; n < inner; ++n)
      for (long r = 0; r < dk; ++r)
        for (long c = 0; c < dk; ++c)
          out(r, c) += rho((o * dk + r) * inner + n, (o * dk + c) * inner + n);
  return out;
}

HermitianSpectrum hermitian_eigen(const Operator& m) {
  if (m.rows() != m.cols())
    throw ShapeError("hermitian_eigen: operator is not square");
  const Operator sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
  if (solver.info() != Eigen::Success)
    throw ConsistencyError("hermitian_eigen: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Operator psd_sqrt(const Operator& m) {
  if (hermiticity_residual(m) > kPsdTol)
    throw PositivityError("psd_sqrt: input is not hermitian");
  auto eig = hermitian_eigen(m);
  if (eig.values.size() > 0 && eig.values(0) < -kPsdTol) {
    std::ostringstream msg;
    msg << "psd_sqrt: negative eigenvalue " << eig.values(0);
    throw PositivityError(msg.str());
  }
  RealVector roots = eig.values.unaryExpr(
      [](double x) { return x < 1e-12 ? 0.0 : std::sqrt(x); });
  return eig.vectors * roots.cast<Complex>().asDiagonal() *
         eig.vectors.adjoint();
}

double von_neumann_entropy(const Operator& rho) {
  if (rho.rows() != rho.cols())
    throw ShapeError("von_neumann_entropy: operator is not square");
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "von_neumann_entropy: trace is " << trace;
    throw NormalizationError(msg.str());
  }
  auto eig = hermitian_eigen(rho);
  if (eig.values(0) < -kPsdTol)
    throw PositivityError("von_neumann_entropy: density operator is not psd");
  double s = 0.0;
  for (double p : eig.values)
    if (p > 0.0)
      s -= p * std::log2(p);
  return s < 0.0 ? 0.0 : s;
}

Ket haar_random_ket(int dim, Rng& rng) {
  if (dim < 2)
    throw DomainError("haar_random_ket: dimension must be at least 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Ket v(dim);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < dim; ++i) {
      double re = gauss(rng);
      double im = gauss(rng);
      v(i) = Complex(re, im);
    }
    norm2 = v.squaredNorm();
  } while (norm2 == 0.0);
  return v / std::sqrt(norm2);
}

Operator haar_random_unitary(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Operator g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) {
      double re = gauss(rng);
      double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Operator> qr(g);
  Operator q = qr.householderQ();
  Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0)
      q.col(j) *= r(j, j) / mag;
  }
  return q;
}

double max_abs(const Operator& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_residual(const Operator& m) {
  if (m.rows() != m.cols())
    return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

double unitarity_residual(const Operator& m) {
  if (m.rows() != m.cols())
    return std::numeric_limits<double>::infinity();
  return max_abs(m.adjoint() * m - Operator::Identity(m.rows(), m.cols()));
}

double min_eigenvalue(const Operator& m) {
  return hermitian_eigen(m).values(0);
}

bool is_normalized(const Ket& v, double tol) {
  return std::abs(v.squaredNorm() - 1.0) <= tol;
}

bool is_hermitian(const Operator& m, double tol) {
  return hermiticity_residual(m) <= tol;
}

bool is_psd(const Operator& m, double tol) {
  return is_hermitian(m, tol) && min_eigenvalue(m) >= -tol;
}

bool is_unitary(const Operator& m, double tol) {
  return unitarity_residual(m) <= tol;
}

} // namespace qtele
