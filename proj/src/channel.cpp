#include "qtele/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtele/errors.hpp"

namespace qtele {

SchmidtChannel::SchmidtChannel(RealVector coeffs) : coeffs_(std::move(coeffs)) {
  for (int i = 1; i < coeffs_.size(); ++i)
    if (coeffs_(i) < coeffs_(k_min_))
      k_min_ = i;
}

Ket SchmidtChannel::state() const {
  const int d = dim();
  Ket psi = Ket::Zero(d * d);
  for (int i = 0; i < d; ++i)
    psi(i * d + i) = coeffs_(i);
  return psi;
}

double SchmidtChannel::entropy() const {
  double s = 0.0;
  for (double a : coeffs_) {
    const double p = a * a;
    if (p > 0.0)
      s -= p * std::log2(p);
  }
  return s;
}

SchmidtChannel make_channel(std::span<const double> coeffs) {
  if (coeffs.size() < 2)
    throw DomainError("make_channel: need at least two Schmidt coefficients");
  double norm2 = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!(coeffs[i] >= 0.0)) {
      std::ostringstream msg;
      msg << "make_channel: coefficient " << i << " is " << coeffs[i];
      throw DomainError(msg.str());
    }
    norm2 += coeffs[i] * coeffs[i];
  }
  if (norm2 == 0.0)
    throw DomainError("make_channel: all coefficients vanish");
  if (std::abs(norm2 - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "make_channel: sum of squared coefficients is " << norm2;
    throw NormalizationError(msg.str());
  }
  RealVector a(static_cast<Eigen::Index>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    a(static_cast<Eigen::Index>(i)) = coeffs[i];
  a /= std::sqrt(norm2);
  return SchmidtChannel(std::move(a));
}

SchmidtChannel make_channel(std::initializer_list<double> coeffs) {
  return make_channel(std::span<const double>(coeffs.begin(), coeffs.size()));
}

SchmidtChannel maximally_entangled_channel(int dim) {
  std::vector<double> a(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  return make_channel(a);
}

SchmidtChannel channel_from_cos_theta(double cos_theta_c) {
  if (!(cos_theta_c >= -1.0 && cos_theta_c <= 1.0))
    throw DomainError("channel_from_cos_theta: |cos theta_c| must be <= 1");
  return make_channel({std::sqrt((1.0 - cos_theta_c) / 2.0),
                       std::sqrt((1.0 + cos_theta_c) / 2.0)});
}

SchmidtChannel random_channel(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> a(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : a) {
      x = std::abs(gauss(rng));
      norm2 += x * x;
    }
  } while (norm2 == 0.0 || *std::min_element(a.begin(), a.end()) == 0.0);
  for (auto& x : a)
    x /= std::sqrt(norm2);
  return make_channel(a);
}

namespace {

void check_compatible(const SchmidtChannel& ch, const UnitaryBasis& basis) {
  if (ch.dim() != basis.dim())
    throw ShapeError("channel and unitary basis have different dimensions");
}

void require_full_rank(const SchmidtChannel& ch) {
  if (!ch.full_rank()) {
    std::ostringstream msg;
    msg << "Schmidt coefficient a_" << ch.k_min()
        << " vanishes; the measurement basis has no biorthogonal dual";
    throw SingularChannelError(msg.str());
  }
}

} // namespace

GammaTriple gamma_matrices(const SchmidtChannel& ch, const UnitaryBasis& basis) {
  check_compatible(ch, basis);
  require_full_rank(ch);
  const int d = ch.dim();
  GammaTriple g;
  for (const auto& u : basis.ops()) {
    Operator gam(d, d), inv(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        gam(i, j) = u(i, j) * ch.coeff(j);
        inv(i, j) = std::conj(u(i, j)) / (d * ch.coeff(j));
      }
    g.gamma.push_back(std::move(gam));
    g.gamma_tilde.push_back(inv.conjugate());
    g.gamma_inv.push_back(std::move(inv));
  }
  return g;
}

Ket flatten_joint(const Operator& coeffs) {
  // Row-major flattening: |ij> -> i * d + j.
  return coeffs.transpose().reshaped();
}

std::vector<Ket> basis_states(const SchmidtChannel& ch, const UnitaryBasis& basis) {
  const auto g = gamma_matrices(ch, basis);
  std::vector<Ket> out;
  for (const auto& gam : g.gamma)
    out.push_back(flatten_joint(gam));
  return out;
}

std::vector<Ket> dual_states(const SchmidtChannel& ch, const UnitaryBasis& basis) {
  const auto g = gamma_matrices(ch, basis);
  std::vector<Ket> out;
  for (const auto& gt : g.gamma_tilde)
    out.push_back(flatten_joint(gt));
  return out;
}

} // namespace qtele
