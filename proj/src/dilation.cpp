#include "qtele/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtele/errors.hpp"

namespace qtele {

namespace {

constexpr double kPieceFloor = 1e-13;

// Append unit vectors of the computational basis, orthogonalized against the
// columns already present, until `basis` is square.
void complete_columns(Operator& cols, int filled) {
  const Eigen::Index n = cols.rows();
  int next = filled;
  for (Eigen::Index e = 0; e < n && next < n; ++e) {
    Ket v = Ket::Zero(n);
    v(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < next; ++c)
        v -= cols.col(c).dot(v) * cols.col(c);
    const double norm = v.norm();
    if (norm < 1e-6)
      continue;
    cols.col(next++) = v / norm;
  }
  if (next != n)
    throw ConsistencyError("dilate: orthogonal complement is incomplete");
}

} // namespace

Operator DilationResult::reconstructed_element(int alpha) const {
  Operator m = Operator::Zero(system_dim, system_dim);
  for (int e : outcome_map.at(alpha)) {
    Ket row(system_dim);
    for (int x = 0; x < system_dim; ++x)
      row(x) = unitary(e, x * ancilla_dim);
    m += row.conjugate() * row.transpose();
  }
  return m;
}

double DilationResult::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

double DilationResult::unitarity_residual() const { return qtele::unitarity_residual(unitary); }

double DilationResult::completeness_residual() const {
  Operator sum = Operator::Zero(system_dim, system_dim);
  for (std::size_t a = 0; a < outcome_map.size(); ++a)
    sum += reconstructed_element(static_cast<int>(a));
  return max_abs(sum - Operator::Identity(system_dim, system_dim));
}

DilationResult dilate(const PovmSet& p, int ancilla_dim) {
  const int d = p.local_dim();
  const int n_sys = p.joint_dim();
  if (ancilla_dim < d) {
    std::ostringstream msg;
    msg << "dilate: ancilla dimension " << ancilla_dim << " < d = " << d
        << "; d^2 d_a extended outcomes are needed for up to 2 d^2 elements";
    throw CapacityError(msg.str());
  }
  const int n_ext = n_sys * ancilla_dim;

  // Rank-one pieces m with M_alpha = sum |m><m|.
  std::vector<std::vector<Ket>> pieces(p.size());
  std::size_t n_pieces = 0;
  for (int a = 0; a < p.size(); ++a) {
    const auto eig = hermitian_eigen(p.element(a));
    for (Eigen::Index k = eig.values.size() - 1; k >= 0; --k)
      if (eig.values(k) > kPieceFloor)
        pieces[a].push_back(std::sqrt(eig.values(k)) * eig.vectors.col(k));
    if (pieces[a].empty())
      pieces[a].push_back(Ket::Zero(n_sys));
    n_pieces += pieces[a].size();
  }
  if (n_pieces > static_cast<std::size_t>(n_ext)) {
    std::ostringstream msg;
    msg << "dilate: " << n_pieces << " rank-one pieces exceed the " << n_ext
        << " extended outcomes available with ancilla dimension " << ancilla_dim;
    throw CapacityError(msg.str());
  }

  DilationResult r;
  r.system_dim = n_sys;
  r.ancilla_dim = ancilla_dim;
  r.outcome_map.resize(p.size());

  // Isometry W|x> = sum_e conj(m_e(x)) |e>.
  Operator iso = Operator::Zero(n_ext, n_sys);
  int slot = 0;
  for (int a = 0; a < p.size(); ++a)
    for (const auto& m : pieces[a]) {
      iso.row(slot) = m.adjoint();
      r.outcome_map[a].push_back(slot++);
    }

  // Columns x * d_a hold the isometry; the others are filled by completion.
  Operator cols(n_ext, n_ext);
  cols.leftCols(n_sys) = iso;
  complete_columns(cols, n_sys);
  r.unitary = Operator::Zero(n_ext, n_ext);
  int spare = n_sys;
  for (int x = 0; x < n_sys; ++x)
    for (int anc = 0; anc < ancilla_dim; ++anc)
      r.unitary.col(x * ancilla_dim + anc) = anc == 0 ? cols.col(x) : cols.col(spare++);

  for (int a = 0; a < p.size(); ++a)
    r.residuals.push_back(max_abs(r.reconstructed_element(a) - p.element(a)));
  return r;
}

namespace {

// Rows: extended index, columns: particle 3 basis. Implements (U (x) 1)
// acting on |Psi_123> with the ancilla in |0> between particles 12 and 3.
Operator extended_amplitudes(const DilationResult& dil, const Ket& psi123, int local_dim) {
  const int n_sys = dil.system_dim;
  if (psi123.size() != n_sys * local_dim)
    throw ShapeError("dilated state: wrong three-particle dimension");
  Operator padded = Operator::Zero(dil.extended_dim(), local_dim);
  for (int x = 0; x < n_sys; ++x)
    for (int k = 0; k < local_dim; ++k)
      padded(x * dil.ancilla_dim, k) = psi123(x * local_dim + k);
  return dil.unitary * padded;
}

} // namespace

std::vector<double> dilated_probabilities(const DilationResult& dil, const Ket& psi123,
                                          int local_dim) {
  const Operator amps = extended_amplitudes(dil, psi123, local_dim);
  std::vector<double> out(dil.outcome_map.size(), 0.0);
  for (std::size_t a = 0; a < dil.outcome_map.size(); ++a)
    for (int e : dil.outcome_map[a])
      out[a] += amps.row(e).squaredNorm();
  return out;
}

MonteCarloReport simulate_dilated(const DilationResult& dil, const PovmSet& p,
                                  const SchmidtChannel& ch, const UnitaryBasis& basis,
                                  Corrections mode, const SimulationOptions& opts) {
  const int d = ch.dim();
  if (static_cast<int>(dil.outcome_map.size()) != p.size() || dil.system_dim != d * d)
    throw ShapeError("simulate_dilated: dilation does not match the POVM");
  const auto fixes = correction_unitaries(p, ch, basis, mode);
  std::vector<int> owner(dil.extended_dim(), -1);
  for (std::size_t a = 0; a < dil.outcome_map.size(); ++a)
    for (int e : dil.outcome_map[a])
      owner[e] = static_cast<int>(a);
  const Ket channel_state = ch.state();

  RunKernel kernel = [&](const Ket& phi, Rng& rng) {
    const Ket psi123 = tensor(phi, channel_state);
    const Operator amps = extended_amplitudes(dil, psi123, d);
    const Eigen::VectorXd prob = amps.rowwise().squaredNorm();
    const double total = prob.sum();
    if (std::abs(total - 1.0) > 1e-8)
      throw ConsistencyError("simulate_dilated: extended state lost normalization");
    std::uniform_real_distribution<double> uniform(0.0, total);
    const double u = uniform(rng);
    int pick = -1;
    double acc = 0.0;
    for (Eigen::Index e = 0; e < prob.size(); ++e) {
      if (prob(e) <= 0.0)
        continue;
      acc += prob(e);
      pick = static_cast<int>(e);
      if (u < acc)
        break;
    }
    const int alpha = owner[pick];
    if (alpha < 0)
      throw ConsistencyError("simulate_dilated: unassigned extended outcome fired");
    const Ket out = fixes[alpha] * amps.row(pick).transpose();
    return RunSample{alpha, std::norm(phi.dot(out)) / prob(pick)};
  };
  return run_monte_carlo(d, p.tags(), kernel, opts);
}

} // namespace qtele
