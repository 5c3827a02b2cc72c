#include "qtele/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtele/errors.hpp"
#include "qtele/formulas.hpp"
#include "qtele/povm.hpp"
#include "qtele/verify.hpp"
#include "qtele/weyl.hpp"

namespace qtele::cli {

namespace {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

double parse_double(const std::string& text, const std::string& flag) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw UsageError(flag + ": not a number: '" + text + "'");
  return value;
}

template <class Int>
Int parse_int(const std::string& text, const std::string& flag) {
  Int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw UsageError(flag + ": not an integer: '" + text + "'");
  return value;
}

std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Output stream that is either a file or the fallback.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw IoError("cannot open '" + path + "' for writing");
      out_ = file_.get();
    }
  }
  std::ostream& stream() { return *out_; }
  void finish() {
    out_->flush();
    if (!*out_)
      throw IoError("write failed");
  }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

} // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

RunConfig parse_args(const std::vector<std::string>& args, std::ostream& help) {
  CLI::App app{"Conclusive teleportation of a qudit: exact fidelities, Monte Carlo, "
               "POVM dilation",
               args.empty() ? "qtele" : args.front()};
  app.require_subcommand(1);
  std::string d, coeffs, entropy, cos_theta_c, lambda, strategy, corrections, runs, seed,
      out, transcript, format;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--d", d, "local dimension");
    sub->add_option("--coeffs", coeffs, "Schmidt coefficients a1,a2,... (normalized)");
    sub->add_option("--entropy", entropy, "qubit channel by entanglement entropy (bits)");
    sub->add_option("--cos-theta-c", cos_theta_c, "qubit channel by cos(theta_c)");
    sub->add_option("--lambda", lambda, "conclusive weight, a number or 'max'");
    sub->add_option("--strategy", strategy, "inconclusive refinement: product|residual");
    sub->add_option("--corrections", corrections, "receiver corrections: auto|paper");
    sub->add_option("--runs", runs, "Monte Carlo runs (0: exact only)");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out, "output path (default stdout)");
    sub->add_option("--transcript", transcript, "classical transcript output path");
    sub->add_option("--format", format, "csv|jsonl");
  };
  auto* verify = app.add_subcommand("verify", "run the invariant battery");
  auto* figure = app.add_subcommand("figure1", "optimal fidelity versus POVM angle (CSV)");
  auto* teleport = app.add_subcommand("teleport", "fidelity report for one configuration");
  for (auto* sub : {verify, figure, teleport})
    add_common(sub);

  std::vector<const char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"qtele"} : args;
  for (const auto& a : storage)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    help << app.help();
    return {};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  if (!d.empty()) {
    cfg.d = parse_int<int>(d, "--d");
    if (*cfg.d < 2)
      throw UsageError("--d: dimension must be at least 2");
  }
  if (!coeffs.empty()) {
    std::vector<double> values;
    std::stringstream ss(coeffs);
    std::string item;
    while (std::getline(ss, item, ','))
      values.push_back(parse_double(item, "--coeffs"));
    cfg.coeffs = values;
  }
  if (!entropy.empty())
    cfg.entropy = parse_double(entropy, "--entropy");
  if (!cos_theta_c.empty())
    cfg.cos_theta_c = parse_double(cos_theta_c, "--cos-theta-c");
  if (!lambda.empty() && lambda != "max")
    cfg.lambda = parse_double(lambda, "--lambda");
  if (!strategy.empty()) {
    if (strategy == "product")
      cfg.strategy = Strategy::Product;
    else if (strategy == "residual")
      cfg.strategy = Strategy::Residual;
    else
      throw UsageError("--strategy: expected product|residual, got '" + strategy + "'");
  }
  if (!corrections.empty()) {
    if (corrections == "auto")
      cfg.corrections = Corrections::Auto;
    else if (corrections == "paper")
      cfg.corrections = Corrections::Paper;
    else
      throw UsageError("--corrections: expected auto|paper, got '" + corrections + "'");
  }
  if (!runs.empty())
    cfg.runs = parse_int<std::uint64_t>(runs, "--runs");
  if (!seed.empty())
    cfg.seed = parse_int<std::uint64_t>(seed, "--seed");
  cfg.out = out;
  cfg.transcript = transcript;
  if (!format.empty()) {
    if (format == "csv")
      cfg.format = Format::Csv;
    else if (format == "jsonl")
      cfg.format = Format::JsonLines;
    else
      throw UsageError("--format: expected csv|jsonl, got '" + format + "'");
  }
  int channel_flags = cfg.coeffs.has_value() + cfg.entropy.has_value() + cfg.cos_theta_c.has_value();
  if (channel_flags > 1)
    throw UsageError("give at most one of --coeffs, --entropy, --cos-theta-c");
  return cfg;
}

std::vector<std::string> to_args(const RunConfig& cfg) {
  std::vector<std::string> a{"qtele", cfg.command};
  auto put = [&a](const std::string& flag, const std::string& value) {
    a.push_back(flag);
    a.push_back(value);
  };
  if (cfg.d)
    put("--d", std::to_string(*cfg.d));
  if (cfg.coeffs) {
    std::string joined;
    for (std::size_t i = 0; i < cfg.coeffs->size(); ++i)
      joined += (i ? "," : "") + exact((*cfg.coeffs)[i]);
    put("--coeffs", joined);
  }
  if (cfg.entropy)
    put("--entropy", exact(*cfg.entropy));
  if (cfg.cos_theta_c)
    put("--cos-theta-c", exact(*cfg.cos_theta_c));
  put("--lambda", cfg.lambda ? exact(*cfg.lambda) : "max");
  put("--strategy", cfg.strategy == Strategy::Product ? "product" : "residual");
  put("--corrections", to_string(cfg.corrections));
  put("--runs", std::to_string(cfg.runs));
  put("--seed", std::to_string(cfg.seed));
  if (!cfg.out.empty())
    put("--out", cfg.out);
  if (!cfg.transcript.empty())
    put("--transcript", cfg.transcript);
  put("--format", cfg.format == Format::Csv ? "csv" : "jsonl");
  return a;
}

bool has_channel_flag(const RunConfig& cfg) {
  return cfg.coeffs || cfg.entropy || cfg.cos_theta_c;
}

int resolve_dim(const RunConfig& cfg) {
  std::optional<int> implied;
  if (cfg.coeffs)
    implied = static_cast<int>(cfg.coeffs->size());
  if (cfg.entropy || cfg.cos_theta_c)
    implied = 2;
  if (implied && cfg.d && *implied != *cfg.d)
    throw UsageError("--d " + std::to_string(*cfg.d) + " conflicts with the channel, which has d = " +
                     std::to_string(*implied));
  return implied.value_or(cfg.d.value_or(2));
}

SchmidtChannel resolve_channel(const RunConfig& cfg) {
  const int d = resolve_dim(cfg);
  try {
    if (cfg.coeffs)
      return make_channel(*cfg.coeffs);
    if (cfg.entropy)
      return formulas::entropy_to_channel_d2(*cfg.entropy).channel;
    if (cfg.cos_theta_c)
      return channel_from_cos_theta(*cfg.cos_theta_c);
  } catch (const qtele::Error& e) {
    const char* flag = cfg.coeffs ? "--coeffs" : cfg.entropy ? "--entropy" : "--cos-theta-c";
    throw UsageError(std::string(flag) + ": " + e.what());
  }
  return maximally_entangled_channel(d);
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  verify::BatteryOptions opts;
  if (has_channel_flag(cfg)) {
    opts.channel = resolve_channel(cfg);
    opts.dims = {opts.channel->dim()};
  } else if (cfg.d) {
    opts.dims = {*cfg.d};
  }
  opts.lambda = cfg.lambda;
  opts.seed = cfg.seed;
  if (cfg.runs > 0)
    opts.mc_runs = cfg.runs;

  const auto rows = verify::run_battery(opts);
  verify::print_rows(rows, out);
  verify::print_discrepancy(verify::discrepancy_report(), out);
  std::size_t failed = 0;
  for (const auto& r : rows)
    failed += r.pass ? 0 : 1;
  out << '\n' << rows.size() - failed << "/" << rows.size() << " checks passed\n";
  return failed == 0 ? kOk : kCheckFailure;
}

std::vector<FigureRow> figure1_rows() {
  std::vector<FigureRow> rows;
  for (double s : {0.0, 0.19, 0.55, 1.0}) {
    const auto ec = formulas::entropy_to_channel_d2(s);
    const double cc = ec.cos_theta_c;
    bool arrow_on_grid = false;
    std::vector<FigureRow> curve;
    for (int k = 0; k < 100; ++k) {
      const double c = k / 100.0;
      const bool arrow = std::abs(c - cc) < 1e-12;
      arrow_on_grid |= arrow;
      curve.push_back({s, c, formulas::f_theta_d2(cc, c, 1.0 - c), arrow});
    }
    if (!arrow_on_grid) {
      // Arrow at the channel's own angle; at cos theta_c = 1 the curve's
      // limit is the lambda = 0 value.
      const double f = std::abs(cc) < 1.0 ? formulas::f_theta_d2(cc, cc, 1.0 - std::abs(cc))
                                          : formulas::f_overall_d2(0.0);
      FigureRow arrow{s, cc, f, true};
      auto pos = std::find_if(curve.begin(), curve.end(),
                              [cc](const FigureRow& r) { return r.cos_theta > cc; });
      curve.insert(pos, arrow);
    }
    rows.insert(rows.end(), curve.begin(), curve.end());
  }
  return rows;
}

int cmd_figure1(const RunConfig& cfg, std::ostream& out) {
  Sink sink(cfg.out, out);
  auto& os = sink.stream();
  const auto rows = figure1_rows();
  if (cfg.format == Format::Csv) {
    os << "entropy_bits,cos_theta,fidelity_opt,is_arrow_point\n";
    for (const auto& r : rows)
      os << format_number(r.entropy_bits) << ',' << format_number(r.cos_theta) << ','
         << format_number(r.fidelity_opt) << ',' << (r.is_arrow_point ? 1 : 0) << '\n';
  } else {
    for (const auto& r : rows)
      os << nlohmann::json{{"entropy_bits", r.entropy_bits},
                           {"cos_theta", r.cos_theta},
                           {"fidelity_opt", r.fidelity_opt},
                           {"is_arrow_point", r.is_arrow_point ? 1 : 0}}
                .dump()
         << '\n';
  }
  sink.finish();
  return kOk;
}

namespace {

void write_report_csv(std::ostream& os, const FidelityReport& r, const MonteCarloReport* mc) {
  os << "kind,index,tag,probability,fidelity,conditional_fidelity,mc_probability,"
        "mc_probability_se,mc_fidelity,mc_fidelity_se\n";
  auto cond = [](double f, double p) { return p > 0.0 ? f / p : 0.0; };
  auto mc_cols = [&](const Estimate* p, const Estimate* f) {
    if (!mc)
      return std::string(",,,");
    return format_number(p->mean) + ',' + format_number(p->std_error) + ',' +
           format_number(f->mean) + ',' + format_number(f->std_error);
  };
  for (const auto& o : r.outcomes) {
    const MonteCarloOutcome* m = mc ? &mc->outcomes[o.index] : nullptr;
    os << "outcome," << o.index << ',' << o.tag.str() << ',' << format_number(o.probability)
       << ',' << format_number(o.fidelity_term) << ',' << format_number(o.conditional_fidelity)
       << ',' << mc_cols(m ? &m->probability : nullptr, m ? &m->fidelity_term : nullptr) << '\n';
  }
  const Estimate one{1.0, 0.0};
  os << "conclusive,," << r.strategy << ',' << format_number(r.p_conclusive) << ','
     << format_number(r.f_conclusive) << ',' << format_number(cond(r.f_conclusive, r.p_conclusive))
     << ',' << mc_cols(mc ? &mc->p_conclusive : nullptr, mc ? &mc->f_conclusive : nullptr) << '\n';
  os << "inconclusive,," << r.strategy << ',' << format_number(r.p_inconclusive) << ','
     << format_number(r.f_inconclusive) << ','
     << format_number(cond(r.f_inconclusive, r.p_inconclusive)) << ','
     << mc_cols(mc ? &mc->p_inconclusive : nullptr, mc ? &mc->f_inconclusive : nullptr) << '\n';
  os << "total,," << r.strategy << ',' << format_number(1.0) << ',' << format_number(r.f_total)
     << ',' << format_number(r.f_total) << ',' << mc_cols(mc ? &one : nullptr, mc ? &mc->f_total : nullptr)
     << '\n';
}

nlohmann::json estimate_json(const Estimate& e) {
  return {{"mean", e.mean}, {"stderr", e.std_error}};
}

void write_report_jsonl(std::ostream& os, const FidelityReport& r, const MonteCarloReport* mc,
                        int d) {
  for (const auto& o : r.outcomes) {
    nlohmann::json j{{"kind", "outcome"},
                     {"index", o.index},
                     {"tag", o.tag.str()},
                     {"probability", o.probability},
                     {"fidelity", o.fidelity_term},
                     {"conditional_fidelity", o.conditional_fidelity}};
    if (mc) {
      const auto& m = mc->outcomes[o.index];
      j["mc_count"] = m.count;
      j["mc_probability"] = estimate_json(m.probability);
      j["mc_fidelity"] = estimate_json(m.fidelity_term);
    }
    os << j.dump() << '\n';
  }
  nlohmann::json s{{"kind", "summary"},
                   {"d", d},
                   {"lambda", r.lambda},
                   {"strategy", r.strategy},
                   {"corrections", to_string(r.corrections)},
                   {"p_conclusive", r.p_conclusive},
                   {"p_inconclusive", r.p_inconclusive},
                   {"f_conclusive", r.f_conclusive},
                   {"f_inconclusive", r.f_inconclusive},
                   {"f_total", r.f_total}};
  if (mc) {
    s["mc_runs"] = mc->n_runs;
    s["mc_p_conclusive"] = estimate_json(mc->p_conclusive);
    s["mc_p_inconclusive"] = estimate_json(mc->p_inconclusive);
    s["mc_f_conclusive"] = estimate_json(mc->f_conclusive);
    s["mc_f_inconclusive"] = estimate_json(mc->f_inconclusive);
    s["mc_f_total"] = estimate_json(mc->f_total);
    s["mc_max_conclusive_deviation"] = mc->max_conclusive_deviation;
  }
  os << s.dump() << '\n';
}

} // namespace

int cmd_teleport(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SchmidtChannel ch = resolve_channel(cfg);
  const int d = ch.dim();
  const UnitaryBasis basis = build_weyl_basis(d);
  const double lambda = cfg.lambda.value_or(lambda_max(ch));

  PovmSet povm = [&] {
    try {
      const auto base = build_conclusive_povm(ch, basis, lambda);
      return cfg.strategy == Strategy::Product ? refine_inconclusive_product(base)
                                               : refine_inconclusive_residual(base, basis);
    } catch (const qtele::SingularChannelError& e) {
      throw UsageError(std::string("channel: ") + e.what());
    } catch (const qtele::Error& e) {
      throw UsageError(std::string("--lambda: ") + e.what());
    }
  }();

  FidelityReport exact_report;
  try {
    exact_report = report(povm, ch, basis, cfg.corrections);
  } catch (const qtele::Error& e) {
    throw UsageError(std::string("--corrections: ") + e.what());
  }

  std::optional<MonteCarloReport> mc;
  if (cfg.runs > 0) {
    SimulationOptions opts;
    opts.n_runs = cfg.runs;
    opts.seed = cfg.seed;
    std::unique_ptr<Sink> transcript;
    if (!cfg.transcript.empty()) {
      transcript = std::make_unique<Sink>(cfg.transcript, err);
      auto& ts = transcript->stream();
      if (cfg.format == Format::Csv) {
        ts << "run_index,outcome_alpha,conclusive_flag,bits_sent\n";
        opts.transcript = [&ts](const TranscriptRecord& t) {
          ts << t.run_index << ',' << t.outcome_alpha << ',' << (t.conclusive ? 1 : 0) << ','
             << t.bits_sent << '\n';
        };
      } else {
        opts.transcript = [&ts](const TranscriptRecord& t) {
          ts << nlohmann::json{{"run_index", t.run_index},
                               {"outcome_alpha", t.outcome_alpha},
                               {"conclusive_flag", t.conclusive ? 1 : 0},
                               {"bits_sent", t.bits_sent}}
                    .dump()
             << '\n';
        };
      }
    }
    mc = simulate(povm, ch, basis, cfg.corrections, opts);
    if (transcript)
      transcript->finish();
  }

  Sink sink(cfg.out, out);
  if (cfg.format == Format::Csv)
    write_report_csv(sink.stream(), exact_report, mc ? &*mc : nullptr);
  else
    write_report_jsonl(sink.stream(), exact_report, mc ? &*mc : nullptr, d);
  sink.finish();
  return kOk;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "verify")
      return cmd_verify(cfg, out);
    if (cfg.command == "figure1")
      return cmd_figure1(cfg, out);
    if (cfg.command == "teleport")
      return cmd_teleport(cfg, out, err);
    if (cfg.command.empty())
      return kOk;
    err << "error: unknown command '" << cfg.command << "'\n";
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  RunConfig cfg;
  try {
    cfg = parse_args(args, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return kUsageError;
  }
  return run(cfg, std::cout, std::cerr);
}

} // namespace qtele::cli
