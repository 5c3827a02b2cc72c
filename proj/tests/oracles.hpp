#pragma once

// Reference computations used only by tests. None of these call into the
// code paths they are used to check.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Kronecker product straight from the index definition.
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      out(r, c) = a(r / b.rows(), c / b.cols()) * b(r % b.rows(), c % b.cols());
  return out;
}

// Trace out the second factor of a (da x db) register.
inline Mat trace_second(const Mat& rho, int da, int db) {
  Mat out = Mat::Zero(da, da);
  for (int i = 0; i < da; ++i)
    for (int k = 0; k < da; ++k)
      for (int j = 0; j < db; ++j)
        out(i, k) += rho(i * db + j, k * db + j);
  return out;
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0)
    return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Plain bisection on [0, 1/2].
inline double invert_binary_entropy(double s) {
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Haar probability of a joint-space element on the channel with squared
// Schmidt coefficients `a2`: Tr[M (1/d (x) diag(a2))].
inline double haar_probability(const Mat& element, const std::vector<double>& a2) {
  const int d = static_cast<int>(a2.size());
  double p = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      p += element(i * d + j, i * d + j).real() * a2[j] / d;
  return p;
}

// Average of f(|phi>) over the Bloch sphere by Gauss-Legendre in cos(theta)
// and a uniform grid in phi; exact for the degree-4 polynomials used here.
template <class F>
double bloch_average(F&& f, int n_theta = 16, int n_phi = 32) {
  // Gauss-Legendre nodes by Newton iteration on P_n.
  std::vector<double> x(n_theta), w(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n_theta + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n_theta; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n_theta * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  double total = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = x[i];
    const double c_half = std::sqrt((1.0 + ct) / 2.0);
    const double s_half = std::sqrt((1.0 - ct) / 2.0);
    for (int k = 0; k < n_phi; ++k) {
      const double ph = 2.0 * std::numbers::pi * k / n_phi;
      Vec phi(2);
      phi << c_half, std::polar(s_half, ph);
      total += w[i] * f(phi) / n_phi;
    }
  }
  return total / 2.0;
}

} // namespace oracle
