#include "qtele/fidelity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "qtele/errors.hpp"

namespace qtele {

Operator outcome_map_from_ket(const Ket& factor, const SchmidtChannel& ch) {
  const int d = ch.dim();
  if (factor.size() != d * d)
    throw ShapeError("outcome_map_from_ket: factor is not on the joint space");
  Operator b(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      b(j, i) = std::conj(factor(i * d + j)) * ch.coeff(j);
  return b;
}

OutcomeChannelMap outcome_channel(const Operator& element, const SchmidtChannel& ch,
                                  int outcome) {
  const int d = ch.dim();
  if (element.rows() != d * d || element.cols() != d * d)
    throw ShapeError("outcome_channel: element is not on the joint space");
  const auto eig = hermitian_eigen(element);
  const Eigen::Index n = eig.values.size();
  const double top = eig.values(n - 1);
  if (eig.values(0) < -kPsdTol)
    throw PositivityError("outcome_channel: element is not positive semidefinite");
  if (n > 1 && eig.values(n - 2) > kPsdTol) {
    std::ostringstream msg;
    msg << "outcome_channel: element " << outcome
        << " has rank above one; refine the POVM first";
    throw DecompositionRequiredError(msg.str());
  }
  if (top <= 1e-14)
    return {outcome, Operator::Zero(d, d)};
  const Ket factor = std::sqrt(top) * eig.vectors.col(n - 1);
  return {outcome, outcome_map_from_ket(factor, ch)};
}

std::vector<OutcomeChannelMap> outcome_channels(const PovmSet& p, const SchmidtChannel& ch) {
  if (p.local_dim() != ch.dim())
    throw ShapeError("POVM and channel have different dimensions");
  std::vector<OutcomeChannelMap> maps;
  maps.reserve(p.size());
  for (int k = 0; k < p.size(); ++k)
    maps.push_back(outcome_channel(p.element(k), ch, k));
  return maps;
}

FidelityTerm avg_fidelity_term(const Operator& map, const Operator& correction) {
  const auto d = static_cast<double>(map.rows());
  if (map.rows() != map.cols() || correction.rows() != map.rows() ||
      correction.cols() != map.cols())
    throw ShapeError("avg_fidelity_term: shape mismatch");
  if (!is_unitary(correction))
    throw DomainError("avg_fidelity_term: correction is not unitary");
  const double weight = map.squaredNorm(); // Tr(B^dag B)
  const double overlap = std::norm((correction * map).trace());
  return {weight / d, (overlap + weight) / (d * (d + 1.0))};
}

Operator optimal_correction(const Operator& map) {
  Eigen::JacobiSVD<Operator> svd(map, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Operator left = svd.matrixU();
  Operator right = svd.matrixV();
  // Fix each pair's phase: largest-magnitude entry of the left vector real
  // positive. The same phase on both sides leaves B and V unchanged.
  for (Eigen::Index k = 0; k < left.cols(); ++k) {
    Eigen::Index arg = 0;
    left.col(k).cwiseAbs().maxCoeff(&arg);
    const Complex z = left(arg, k);
    if (std::abs(z) > 0.0) {
      const Complex phase = std::conj(z) / std::abs(z);
      left.col(k) *= phase;
      right.col(k) *= phase;
    }
  }
  return right * left.adjoint();
}

std::string to_string(Corrections c) {
  return c == Corrections::Auto ? "auto" : "paper";
}

std::string strategy_name(const PovmSet& p) {
  bool product = false, residual = false, remainder = false;
  for (const auto& t : p.tags()) {
    product |= t.kind == ElementKind::InconclusiveProduct;
    residual |= t.kind == ElementKind::InconclusiveResidual;
    remainder |= t.kind == ElementKind::Remainder;
  }
  if (remainder)
    return "unrefined";
  if (product && residual)
    return "mixed";
  if (residual)
    return "residual";
  return "product";
}

std::vector<Operator> correction_unitaries(const PovmSet& p, const SchmidtChannel& ch,
                                           const UnitaryBasis& basis, Corrections mode) {
  if (basis.dim() != p.local_dim())
    throw ShapeError("correction_unitaries: basis dimension mismatch");
  const int d = p.local_dim();
  std::vector<Operator> out;
  out.reserve(p.size());
  if (mode == Corrections::Auto) {
    for (const auto& m : outcome_channels(p, ch))
      out.push_back(optimal_correction(m.map));
    return out;
  }
  for (const auto& t : p.tags()) {
    switch (t.kind) {
    case ElementKind::Conclusive:
    case ElementKind::InconclusiveResidual:
      out.push_back(basis.op(t.first));
      break;
    case ElementKind::InconclusiveProduct:
      // receiver holds |j>; rotate it onto the measured input label |i>
      out.push_back(shift_operator(d, t.first - t.second));
      break;
    case ElementKind::Remainder:
      throw DecompositionRequiredError(
          "paper corrections need a refined inconclusive element");
    }
  }
  return out;
}

FidelityReport report(const PovmSet& p, const SchmidtChannel& ch,
                      const UnitaryBasis& basis, Corrections mode) {
  const auto maps = outcome_channels(p, ch);
  const auto fixes = correction_unitaries(p, ch, basis, mode);

  FidelityReport r;
  r.lambda = p.lambda();
  r.strategy = strategy_name(p);
  r.corrections = mode;
  for (int k = 0; k < p.size(); ++k) {
    const auto term = avg_fidelity_term(maps[k].map, fixes[k]);
    OutcomeReport o;
    o.index = k;
    o.tag = p.tag(k);
    o.probability = term.probability;
    o.fidelity_term = term.fidelity_term;
    o.conditional_fidelity =
        term.probability > 0.0 ? term.fidelity_term / term.probability : 0.0;
    if (o.tag.is_conclusive()) {
      r.p_conclusive += o.probability;
      r.f_conclusive += o.fidelity_term;
    } else {
      r.p_inconclusive += o.probability;
      r.f_inconclusive += o.fidelity_term;
    }
    r.outcomes.push_back(o);
  }
  r.f_total = r.f_conclusive + r.f_inconclusive;
  if (std::abs(r.p_conclusive + r.p_inconclusive - 1.0) > kPsdTol)
    throw ConsistencyError("report: outcome probabilities do not sum to one");
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo

int classical_bits(int n_outcomes) {
  int bits = 0;
  while ((1 << bits) < n_outcomes)
    ++bits;
  return bits + 1;
}

int resolve_workers(int requested) {
  if (requested > 0)
    return requested;
  if (const char* env = std::getenv("QTELE_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0)
      return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

constexpr std::uint64_t kBlockRuns = 4096;

struct BlockTally {
  std::vector<std::uint64_t> count;
  std::vector<double> sum_f;
  std::vector<double> sum_f2;
  double max_conclusive_deviation = 0.0;
  std::vector<TranscriptRecord> transcript;
};

Rng block_rng(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32)};
  return Rng(seq);
}

Estimate mean_of(double sum, double sum2, std::uint64_t n) {
  const auto nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = n > 1 ? std::max(0.0, (sum2 - nn * mean * mean) / (nn - 1.0)) : 0.0;
  return {mean, std::sqrt(var / nn)};
}

} // namespace

MonteCarloReport run_monte_carlo(int local_dim, const std::vector<ElementTag>& tags,
                                 const RunKernel& kernel, const SimulationOptions& opts) {
  if (opts.n_runs < 1)
    throw DomainError("simulate: n_runs must be at least 1");
  const int n_out = static_cast<int>(tags.size());
  const int bits = classical_bits(n_out);
  const std::uint64_t n_blocks = (opts.n_runs + kBlockRuns - 1) / kBlockRuns;
  const bool keep_transcript = static_cast<bool>(opts.transcript);

  std::vector<BlockTally> tallies(n_blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::uint64_t b = next++; b < n_blocks; b = next++) {
        BlockTally& t = tallies[b];
        t.count.assign(n_out, 0);
        t.sum_f.assign(n_out, 0.0);
        t.sum_f2.assign(n_out, 0.0);
        Rng rng = block_rng(opts.seed, b);
        const std::uint64_t first = b * kBlockRuns;
        const std::uint64_t last = std::min(opts.n_runs, first + kBlockRuns);
        for (std::uint64_t run = first; run < last; ++run) {
          const Ket phi = haar_random_ket(local_dim, rng);
          const RunSample s = kernel(phi, rng);
          ++t.count[s.outcome];
          t.sum_f[s.outcome] += s.fidelity;
          t.sum_f2[s.outcome] += s.fidelity * s.fidelity;
          const bool conclusive = tags[s.outcome].is_conclusive();
          if (conclusive)
            t.max_conclusive_deviation =
                std::max(t.max_conclusive_deviation, std::abs(s.fidelity - 1.0));
          if (keep_transcript)
            t.transcript.push_back({run, s.outcome, conclusive, bits});
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure)
        failure = std::current_exception();
      next = n_blocks;
    }
  };

  const int n_workers =
      static_cast<int>(std::min<std::uint64_t>(resolve_workers(opts.workers), n_blocks));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);

  // Merge in block order so sums are reproducible for any worker count.
  std::vector<std::uint64_t> count(n_out, 0);
  std::vector<double> sum_f(n_out, 0.0), sum_f2(n_out, 0.0);
  MonteCarloReport r;
  r.n_runs = opts.n_runs;
  for (auto& t : tallies) {
    for (int k = 0; k < n_out; ++k) {
      count[k] += t.count[k];
      sum_f[k] += t.sum_f[k];
      sum_f2[k] += t.sum_f2[k];
    }
    r.max_conclusive_deviation = std::max(r.max_conclusive_deviation, t.max_conclusive_deviation);
    if (keep_transcript)
      for (const auto& rec : t.transcript)
        opts.transcript(rec);
  }

  double con_n = 0, con_f = 0, con_f2 = 0, inc_n = 0, inc_f = 0, inc_f2 = 0;
  for (int k = 0; k < n_out; ++k) {
    MonteCarloOutcome o;
    o.index = k;
    o.tag = tags[k];
    o.count = count[k];
    const auto c = static_cast<double>(count[k]);
    o.probability = mean_of(c, c, opts.n_runs);
    o.fidelity_term = mean_of(sum_f[k], sum_f2[k], opts.n_runs);
    r.outcomes.push_back(o);
    if (tags[k].is_conclusive()) {
      con_n += c;
      con_f += sum_f[k];
      con_f2 += sum_f2[k];
    } else {
      inc_n += c;
      inc_f += sum_f[k];
      inc_f2 += sum_f2[k];
    }
  }
  r.p_conclusive = mean_of(con_n, con_n, opts.n_runs);
  r.p_inconclusive = mean_of(inc_n, inc_n, opts.n_runs);
  r.f_conclusive = mean_of(con_f, con_f2, opts.n_runs);
  r.f_inconclusive = mean_of(inc_f, inc_f2, opts.n_runs);
  r.f_total = mean_of(con_f + inc_f, con_f2 + inc_f2, opts.n_runs);
  return r;
}

MonteCarloReport simulate(const PovmSet& p, const SchmidtChannel& ch,
                          const UnitaryBasis& basis, Corrections mode,
                          const SimulationOptions& opts) {
  const auto maps = outcome_channels(p, ch);
  const auto fixes = correction_unitaries(p, ch, basis, mode);
  std::vector<Operator> raw, corrected;
  for (int k = 0; k < p.size(); ++k) {
    raw.push_back(maps[k].map);
    corrected.push_back(fixes[k] * maps[k].map);
  }
  const int n_out = p.size();

  RunKernel kernel = [&](const Ket& phi, Rng& rng) {
    std::vector<double> prob(n_out);
    double total = 0.0;
    for (int k = 0; k < n_out; ++k) {
      prob[k] = (raw[k] * phi).squaredNorm();
      total += prob[k];
    }
    if (std::abs(total - 1.0) > 1e-8) {
      std::ostringstream msg;
      msg << "simulate: outcome probabilities sum to " << total;
      throw ConsistencyError(msg.str());
    }
    std::uniform_real_distribution<double> uniform(0.0, total);
    const double u = uniform(rng);
    int pick = -1;
    double acc = 0.0;
    for (int k = 0; k < n_out; ++k) {
      if (prob[k] <= 0.0)
        continue;
      acc += prob[k];
      pick = k;
      if (u < acc)
        break;
    }
    const double overlap = std::norm(phi.dot(corrected[pick] * phi));
    return RunSample{pick, overlap / prob[pick]};
  };
  return run_monte_carlo(p.local_dim(), p.tags(), kernel, opts);
}

} // namespace qtele
