#pragma once

#include <span>

#include "qtele/channel.hpp"

namespace qtele::formulas {

// Maximal average fidelity with the orthogonal inconclusive refinement:
//   lambda + (1 - lambda)/(d + 1) + (sum_i sqrt(d a_i^2 - lambda))^2 / (d (d + 1))
// Throws DomainError on a negative radicand or negative lambda.
double f_otaf(std::span<const double> coeff_sq, double lambda);
double f_otaf(const SchmidtChannel& ch, double lambda);

// Product refinement with |j> -> |i> corrections: lambda + 2 (1 - lambda)/(d + 1).
double f_product(int dim, double lambda);

// Qubit overall fidelity (2/3)(1 + lambda/2), lambda in [0, 1].
double f_overall_d2(double lambda);

// Qubit inconclusive share 2 (1 - lambda) / 3.
double f_inconclusive_d2(double lambda);

// Standard-teleportation optimum (1 + (sum_i a_i)^2) / (d + 1).
double f_standard(const SchmidtChannel& ch);

// Relaxed-angle family:
//   (2/3)(1 + (lambda/2) sqrt(1 - cos^2 theta_c) / sqrt(1 - cos^2 theta))
// with |cos theta| < 1 and 0 <= lambda <= 1 - |cos theta|.
double f_theta_d2(double cos_theta_c, double cos_theta, double lambda);

// Binary entropy in bits.
double binary_entropy(double p);

struct EntropyChannel {
  SchmidtChannel channel; // coefficients ordered (a_min, a_max)
  double min_coeff_sq = 0.0;
  double cos_theta_c = 1.0;
};

// Inverts h(a_min^2) = S on a_min^2 in [0, 1/2] by bisection to 1e-12.
EntropyChannel entropy_to_channel_d2(double entropy_bits);

} // namespace qtele::formulas
