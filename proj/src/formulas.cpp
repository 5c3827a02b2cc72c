#include "qtele/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qtele/errors.hpp"

namespace qtele::formulas {

namespace {

constexpr double kSlack = 1e-12;

void check_lambda(double lambda, double upper, const char* who) {
  if (!(lambda >= -kSlack) || lambda > upper + kSlack) {
    std::ostringstream msg;
    msg << who << ": lambda = " << lambda << " outside [0, " << upper << "]";
    throw DomainError(msg.str());
  }
}

} // namespace

double f_otaf(std::span<const double> coeff_sq, double lambda) {
  const auto d = static_cast<double>(coeff_sq.size());
  if (coeff_sq.size() < 2)
    throw DomainError("f_otaf: need d >= 2");
  if (!(lambda >= -kSlack))
    throw DomainError("f_otaf: lambda is negative");
  double root_sum = 0.0;
  for (double a2 : coeff_sq) {
    double radicand = d * a2 - lambda;
    // sqrt is not Lipschitz at 0: a radicand that is zero up to rounding of
    // its two terms (3 * 0.2 - 0.6) would otherwise add ~1e-8.
    if (std::abs(radicand) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(d * a2, lambda))
      radicand = 0.0;
    if (radicand < -kSlack) {
      std::ostringstream msg;
      msg << "f_otaf: negative radicand d a^2 - lambda = " << radicand;
      throw DomainError(msg.str());
    }
    root_sum += std::sqrt(std::max(0.0, radicand));
  }
  return lambda + (1.0 - lambda) / (d + 1.0) + root_sum * root_sum / (d * (d + 1.0));
}

double f_otaf(const SchmidtChannel& ch, double lambda) {
  std::vector<double> sq;
  for (double a : ch.coeffs())
    sq.push_back(a * a);
  return f_otaf(sq, lambda);
}

double f_product(int dim, double lambda) {
  check_lambda(lambda, 1.0, "f_product");
  return lambda + 2.0 * (1.0 - lambda) / (dim + 1.0);
}

double f_overall_d2(double lambda) {
  check_lambda(lambda, 1.0, "f_overall_d2");
  return 2.0 / 3.0 * (1.0 + lambda / 2.0);
}

double f_inconclusive_d2(double lambda) {
  check_lambda(lambda, 1.0, "f_inconclusive_d2");
  return 2.0 * (1.0 - lambda) / 3.0;
}

double f_standard(const SchmidtChannel& ch) {
  const double s = ch.coeffs().sum();
  return (1.0 + s * s) / (ch.dim() + 1.0);
}

double f_theta_d2(double cos_theta_c, double cos_theta, double lambda) {
  if (!(std::abs(cos_theta) < 1.0))
    throw DomainError("f_theta_d2: |cos theta| must be < 1");
  if (!(std::abs(cos_theta_c) <= 1.0))
    throw DomainError("f_theta_d2: |cos theta_c| must be <= 1");
  check_lambda(lambda, 1.0 - std::abs(cos_theta), "f_theta_d2");
  const double ratio =
      std::sqrt(1.0 - cos_theta_c * cos_theta_c) / std::sqrt(1.0 - cos_theta * cos_theta);
  return 2.0 / 3.0 * (1.0 + lambda / 2.0 * ratio);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("binary_entropy: p outside [0, 1]");
  double h = 0.0;
  if (p > 0.0)
    h -= p * std::log2(p);
  if (p < 1.0)
    h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

EntropyChannel entropy_to_channel_d2(double entropy_bits) {
  if (!(entropy_bits >= 0.0 && entropy_bits <= 1.0))
    throw DomainError("entropy_to_channel_d2: entropy must lie in [0, 1] bits");
  // h is increasing on [0, 1/2].
  double lo = 0.0, hi = 0.5;
  if (entropy_bits == 0.0) {
    hi = 0.0;
  } else if (entropy_bits == 1.0) {
    lo = 0.5;
  } else {
    while (hi - lo > 1e-15) {
      const double mid = 0.5 * (lo + hi);
      if (binary_entropy(mid) < entropy_bits)
        lo = mid;
      else
        hi = mid;
    }
  }
  const double p = 0.5 * (lo + hi);
  return {make_channel({std::sqrt(p), std::sqrt(1.0 - p)}), p, 1.0 - 2.0 * p};
}

} // namespace qtele::formulas
