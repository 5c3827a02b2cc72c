#include "qtele/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qtele/dilation.hpp"
#include "qtele/errors.hpp"
#include "qtele/fidelity.hpp"
#include "qtele/formulas.hpp"
#include "qtele/povm.hpp"
#include "qtele/weyl.hpp"

namespace qtele::verify {

namespace {

class Battery {
public:
  // Runs `body`, which returns the max residual; exceptions become failing rows.
  void check(const std::string& name, double tol, const std::function<double()>& body) {
    CheckRow row{name, 0.0, tol, false, {}};
    try {
      row.value = body();
      row.pass = row.value <= tol;
    } catch (const std::exception& e) {
      row.value = std::numeric_limits<double>::infinity();
      row.note = e.what();
    }
    rows_.push_back(std::move(row));
  }

  std::vector<CheckRow> take() { return std::move(rows_); }

private:
  std::vector<CheckRow> rows_;
};

std::string tagged(const std::string& group, int d, const std::string& what) {
  return group + ".d" + std::to_string(d) + "." + what;
}

Operator random_matrix(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Operator m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = gauss(rng);
      m(i, j) = Complex(re, gauss(rng));
    }
  return m;
}

double z_score(double estimate, double exact, double se) {
  const double diff = std::abs(estimate - exact);
  if (se <= 0.0)
    return diff <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

void linalg_checks(Battery& b, int d, Rng& rng) {
  b.check(tagged("linalg", d, "tensor_associativity"), 1e-14, [&] {
    Operator x = haar_random_unitary(d, rng), y = haar_random_unitary(2, rng),
             z = haar_random_unitary(d, rng);
    return max_abs(tensor(tensor(x, y), z) - tensor(x, tensor(y, z)));
  });
  b.check(tagged("linalg", d, "partial_trace_preserves_trace"), 1e-12, [&] {
    Operator a = random_matrix(d * d, rng);
    Operator rho = a.adjoint() * a;
    const std::vector<int> dims{d, d};
    double worst = 0.0;
    for (int keep = 0; keep < 2; ++keep)
      worst = std::max(worst, std::abs(partial_trace(rho, keep, dims).trace() - rho.trace()));
    return worst;
  });
  b.check(tagged("linalg", d, "psd_sqrt_square"), 1e-10, [&] {
    Operator a = random_matrix(d, rng);
    Operator m = a.adjoint() * a;
    Operator s = psd_sqrt(m);
    return std::max(max_abs(s * s - m), max_abs(s * m - m * s));
  });
  // Second and fourth moments of one Haar amplitude, in standard errors.
  b.check(tagged("linalg", d, "haar_moments_zscore"), 4.0, [&] {
    const int n = 20000;
    double s2 = 0, s2sq = 0, s4 = 0, s4sq = 0;
    for (int k = 0; k < n; ++k) {
      const double p = std::norm(haar_random_ket(d, rng)(0));
      s2 += p;
      s2sq += p * p;
      s4 += p * p;
      s4sq += p * p * p * p;
    }
    auto z = [n](double sum, double sumsq, double exact) {
      const double mean = sum / n;
      const double var = (sumsq / n - mean * mean) * n / (n - 1.0);
      return z_score(mean, exact, std::sqrt(var / n));
    };
    return std::max(z(s2, s2sq, 1.0 / d), z(s4, s4sq, 2.0 / (d * (d + 1.0))));
  });
}

void weyl_checks(Battery& b, int d) {
  const auto basis = build_weyl_basis(d);
  b.check(tagged("weyl", d, "unitarity"), 1e-12, [&] { return basis.max_unitarity_residual(); });
  b.check(tagged("weyl", d, "trace_orthogonality"), 1e-10,
          [&] { return basis.trace_orthogonality_residual(); });
  b.check(tagged("weyl", d, "operator_completeness"), 1e-10,
          [&] { return basis.completeness_residual(); });
  b.check(tagged("weyl", d, "entangled_basis_orthonormal_complete"), 1e-12, [&] {
    const auto kets = maximally_entangled_basis(basis);
    Operator cols(d * d, d * d);
    for (int a = 0; a < d * d; ++a)
      cols.col(a) = kets[a];
    const Operator id = Operator::Identity(d * d, d * d);
    return std::max(max_abs(cols.adjoint() * cols - id), max_abs(cols * cols.adjoint() - id));
  });
}

void channel_checks(Battery& b, int d, const SchmidtChannel& ch, Rng& rng) {
  const auto basis = build_weyl_basis(d);
  const int n = d * d;
  b.check(tagged("channel", d, "biorthogonality"), 1e-10, [&] {
    const auto psi = basis_states(ch, basis);
    const auto dual = dual_states(ch, basis);
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        worst = std::max(worst, std::abs(dual[a].dot(psi[c]) - (a == c ? 1.0 : 0.0)));
    return worst;
  });
  b.check(tagged("channel", d, "gamma_inverse_relations"), 1e-10, [&] {
    const auto g = gamma_matrices(ch, basis);
    double worst = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l) {
            Complex s = 0.0;
            for (int a = 0; a < n; ++a)
              s += g.gamma_inv[a](i, j) * g.gamma[a](k, l);
            worst = std::max(worst, std::abs(s - ((i == k && j == l) ? 1.0 : 0.0)));
          }
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        const Complex s = (g.gamma[a].cwiseProduct(g.gamma_inv[c])).sum();
        worst = std::max(worst, std::abs(s - (a == c ? 1.0 : 0.0)));
      }
    return worst;
  });
  b.check(tagged("channel", d, "modified_completeness"), 1e-10, [&] {
    const auto g = gamma_matrices(ch, basis);
    const auto psi = basis_states(ch, basis);
    Operator sum = Operator::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          sum += g.gamma_inv[a](i, j) * psi[a] * basis_ket(n, i * d + j).adjoint();
    return max_abs(sum - Operator::Identity(n, n));
  });
  b.check(tagged("channel", d, "expansion_identity"), 1e-10, [&] {
    const auto psi = basis_states(ch, basis);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Ket phi = haar_random_ket(d, rng);
      const Ket lhs = tensor(phi, ch.state());
      Ket rhs = Ket::Zero(lhs.size());
      for (int a = 0; a < n; ++a)
        rhs += tensor(psi[a], Ket(basis.op(a).adjoint() * phi)) / static_cast<double>(d);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
  });
  b.check(tagged("channel", d, "reduced_entropy"), 1e-10, [&] {
    const std::vector<int> dims{d, d};
    const Ket s = ch.state();
    return std::abs(von_neumann_entropy(partial_trace(projector(s), 0, dims)) - ch.entropy());
  });
}

void povm_engine_checks(Battery& b, int d, const SchmidtChannel& ch, double lambda,
                        const std::string& label, std::uint64_t mc_runs, std::uint64_t seed) {
  const auto basis = build_weyl_basis(d);
  const int n = d * d;
  const std::string base = tagged("povm", d, label);
  auto build = [&] { return build_conclusive_povm(ch, basis, lambda); };

  b.check(base + ".positivity", 1e-10, [&] { return std::max(0.0, -build().min_element_eigenvalue()); });
  b.check(base + ".completeness", 1e-10, [&] { return build().completeness_residual(); });
  b.check(base + ".remainder_closed_form", 1e-10, [&] {
    const auto p = build();
    Operator expect = Operator::Zero(n, n);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        expect(i * d + j, i * d + j) = 1.0 - lambda / (d * ch.coeff(j) * ch.coeff(j));
    return max_abs(p.element(p.remainder_index()) - expect);
  });
  b.check(base + ".identification_ratio", 1e-10,
          [&] { return identification_ratio(build(), basis_states(ch, basis)); });
  b.check(base + ".probabilities", 1e-10, [&] {
    const auto r = report(refine_inconclusive_product(build()), ch, basis, Corrections::Paper);
    double worst = std::abs(r.p_inconclusive - (1.0 - lambda));
    for (const auto& o : r.outcomes)
      if (o.tag.is_conclusive())
        worst = std::max(worst, std::abs(o.probability - lambda / n));
    return worst;
  });

  const std::string eng = tagged("engine", d, label);
  b.check(eng + ".residual_vs_otaf", 1e-9, [&] {
    const auto r = report(refine_inconclusive_residual(build(), basis), ch, basis, Corrections::Auto);
    return std::abs(r.f_total - formulas::f_otaf(ch, lambda));
  });
  b.check(eng + ".product_vs_closed_form", 1e-9, [&] {
    const auto r = report(refine_inconclusive_product(build()), ch, basis, Corrections::Paper);
    return std::abs(r.f_total - formulas::f_product(d, lambda));
  });
  b.check(eng + ".conclusive_correction_optimal", 1e-10, [&] {
    const auto p = build();
    const auto paper = report(refine_inconclusive_product(p), ch, basis, Corrections::Paper);
    const auto best = report(refine_inconclusive_product(p), ch, basis, Corrections::Auto);
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
      worst = std::max(worst,
                       std::abs(paper.outcomes[k].fidelity_term - best.outcomes[k].fidelity_term));
    return worst;
  });
  b.check(eng + ".basis_invariance", 1e-9, [&] {
    Rng rng(seed + 17);
    const Operator left = haar_random_unitary(d, rng), right = haar_random_unitary(d, rng);
    std::vector<Operator> ops;
    for (const auto& u : basis.ops())
      ops.push_back(left * u * right);
    const UnitaryBasis twisted(d, std::move(ops));
    const auto ref = report(refine_inconclusive_residual(build(), basis), ch, basis, Corrections::Auto);
    const auto alt = report(refine_inconclusive_residual(build_conclusive_povm(ch, twisted, lambda),
                                                         twisted),
                            ch, twisted, Corrections::Auto);
    return std::abs(ref.f_total - alt.f_total);
  });
  if (mc_runs > 0) {
    b.check(eng + ".monte_carlo_zscore", 4.0, [&] {
      const auto p = refine_inconclusive_residual(build(), basis);
      const auto exact = report(p, ch, basis, Corrections::Auto);
      SimulationOptions opts;
      opts.n_runs = mc_runs;
      opts.seed = seed;
      const auto mc = simulate(p, ch, basis, Corrections::Auto, opts);
      return std::max({z_score(mc.f_total.mean, exact.f_total, mc.f_total.std_error),
                       z_score(mc.p_inconclusive.mean, exact.p_inconclusive,
                               mc.p_inconclusive.std_error),
                       mc.max_conclusive_deviation > 1e-12 ? 1e9 : 0.0});
    });
  }

  if (d <= 3) {
    const std::string dil = tagged("dilation", d, label);
    for (const char* refinement : {"product", "residual"}) {
      const bool product = std::string(refinement) == "product";
      b.check(dil + "." + refinement, 1e-10, [&] {
        const auto p = product ? refine_inconclusive_product(build())
                               : refine_inconclusive_residual(build(), basis);
        const auto r = dilate(p, d);
        Rng rng(seed + 29);
        const Ket psi123 = tensor(haar_random_ket(d, rng), ch.state());
        const auto probs = dilated_probabilities(r, psi123, d);
        double worst = std::max({r.max_residual(), r.unitarity_residual(), r.completeness_residual()});
        for (int k = 0; k < p.size(); ++k) {
          const Operator full = tensor(p.element(k), Operator::Identity(d, d));
          worst = std::max(worst, std::abs(probs[k] - psi123.dot(full * psi123).real()));
        }
        return worst;
      });
    }
  }
}

void formula_checks(Battery& b, Rng& rng) {
  b.check("formulas.otaf_at_lambda_max_equals_overall_d2", 1e-12, [&] {
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto ch = random_channel(2, rng);
      const double lm = lambda_max(ch);
      worst = std::max(worst, std::abs(formulas::f_otaf(ch, lm) - formulas::f_overall_d2(lm)));
    }
    return worst;
  });
  b.check("formulas.otaf_at_zero_equals_standard", 1e-12, [&] {
    double worst = 0.0;
    for (int d = 2; d <= 4; ++d)
      for (int t = 0; t < 5; ++t) {
        const auto ch = random_channel(d, rng);
        worst = std::max(worst, std::abs(formulas::f_otaf(ch, 0.0) - formulas::f_standard(ch)));
      }
    return worst;
  });
  b.check("formulas.theta_curve_nonincreasing", 0.0, [&] {
    double worst = 0.0;
    for (double cc : {0.0, 0.3, 0.6, 0.9}) {
      double prev = formulas::f_theta_d2(cc, 0.0, 1.0);
      for (int k = 1; k < 100; ++k) {
        const double c = k / 100.0;
        const double f = formulas::f_theta_d2(cc, c, 1.0 - c);
        worst = std::max(worst, f - prev);
        prev = f;
      }
    }
    return worst;
  });
  b.check("theta.family_vs_formula", 1e-9, [&] {
    const auto basis = build_weyl_basis(2);
    double worst = 0.0;
    for (double cc : {0.0, 0.3, 0.6, 0.9})
      for (int k = -19; k <= 19; ++k) {
        const double c = k * 0.05;
        const ThetaPovmFamily fam{cc, c, 1.0 - std::abs(c)};
        const auto p = refine_inconclusive_product(build_theta_povm(fam));
        const auto r = report(p, fam.channel(), basis, Corrections::Paper);
        worst = std::max(worst, std::abs(r.f_total - formulas::f_theta_d2(cc, c, fam.lambda)));
      }
    return worst;
  });
}

} // namespace

std::vector<CheckRow> run_battery(const BatteryOptions& opts) {
  Battery b;
  Rng rng(opts.seed);
  for (int d : opts.dims) {
    linalg_checks(b, d, rng);
    weyl_checks(b, d);

    std::vector<std::pair<std::string, SchmidtChannel>> channels;
    if (opts.channel) {
      channels.emplace_back("given", *opts.channel);
    } else {
      channels.emplace_back("maximal", maximally_entangled_channel(d));
      for (int t = 0; t < opts.random_channels; ++t)
        channels.emplace_back("random" + std::to_string(t), random_channel(d, rng));
    }
    for (const auto& [name, ch] : channels) {
      if (ch.full_rank())
        channel_checks(b, d, ch, rng);
      std::vector<double> lambdas;
      if (opts.lambda)
        lambdas = {*opts.lambda};
      else
        lambdas = {0.0, lambda_max(ch) / 2.0, lambda_max(ch)};
      for (std::size_t k = 0; k < lambdas.size(); ++k) {
        std::ostringstream label;
        label << name << ".lambda" << k;
        // Monte Carlo on the top of the sweep only.
        const std::uint64_t runs = (k + 1 == lambdas.size()) ? opts.mc_runs : 0;
        povm_engine_checks(b, d, ch, lambdas[k], label.str(), runs, opts.seed + 1000 * k + d);
      }
    }
  }
  formula_checks(b, rng);
  return b.take();
}

std::vector<DiscrepancyRow> discrepancy_report() {
  struct Case {
    std::vector<double> coeff_sq;
    std::optional<double> lambda;
  };
  const std::vector<Case> cases{
      {{0.5, 0.3, 0.2}, std::nullopt},
      {{0.2, 0.8}, std::nullopt},
      {{0.9, 0.1}, std::nullopt},
      {{0.9, 0.1}, 0.1},
  };
  std::vector<DiscrepancyRow> out;
  for (const auto& c : cases) {
    std::vector<double> a;
    for (double x : c.coeff_sq)
      a.push_back(std::sqrt(x));
    const auto ch = make_channel(a);
    const int d = ch.dim();
    const auto basis = build_weyl_basis(d);
    DiscrepancyRow row;
    row.d = d;
    row.coeff_sq = c.coeff_sq;
    row.lambda = c.lambda.value_or(lambda_max(ch));
    const auto p = build_conclusive_povm(ch, basis, row.lambda);
    row.product_engine =
        report(refine_inconclusive_product(p), ch, basis, Corrections::Paper).f_total;
    row.residual_engine =
        report(refine_inconclusive_residual(p, basis), ch, basis, Corrections::Auto).f_total;
    row.product_formula = formulas::f_product(d, row.lambda);
    row.otaf_formula = formulas::f_otaf(ch, row.lambda);
    row.coincide = std::abs(row.product_engine - row.residual_engine) <= 1e-9;
    out.push_back(row);
  }
  return out;
}

void print_rows(const std::vector<CheckRow>& rows, std::ostream& out) {
  std::size_t width = 5;
  for (const auto& r : rows)
    width = std::max(width, r.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "check" << "  "
      << std::setw(12) << "max_resid" << "  " << std::setw(9) << "tol" << "  status\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::setw(12)
        << std::setprecision(3) << std::scientific << r.value << "  " << std::setw(9)
        << r.tolerance << "  " << (r.pass ? "PASS" : "FAIL");
    if (!r.note.empty())
      out << "  (" << r.note << ")";
    out << '\n';
  }
  out << std::defaultfloat;
}

void print_discrepancy(const std::vector<DiscrepancyRow>& rows, std::ostream& out) {
  out << "\nInconclusive refinements compared (exact engine):\n"
      << "  product  = product projectors |ij><ij| with |j> -> |i> corrections\n"
      << "  residual = sqrt(R) |psi^m_a><psi^m_a| sqrt(R) with optimal corrections\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << "  d=" << r.d << " a^2=(";
    for (std::size_t i = 0; i < r.coeff_sq.size(); ++i)
      out << (i ? "," : "") << r.coeff_sq[i];
    out << ") lambda=" << r.lambda << ": product " << r.product_engine << " (closed form "
        << r.product_formula << "), residual " << r.residual_engine << " (optimum formula "
        << r.otaf_formula << ") -> " << (r.coincide ? "coincide" : "differ") << '\n';
  }
  out << std::defaultfloat;
}

} // namespace qtele::verify
