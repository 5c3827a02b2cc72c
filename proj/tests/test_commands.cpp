#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "qtele/commands.hpp"
#include "qtele/formulas.hpp"

using namespace qtele;
using namespace qtele::cli;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err, help;
  Outcome r;
  try {
    r.code = run(parse_args(args, help), out, err);
  } catch (const UsageError& e) {
    r.code = kUsageError;
    err << e.what();
  }
  r.out = out.str() + help.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, sep))
    parts.push_back(item);
  return parts;
}

// Column `col` of the CSV row whose first field is `kind`.
std::string field(const std::string& csv, const std::string& kind, int col) {
  for (const auto& line : split(csv, '\n')) {
    const auto cells = split(line, ',');
    if (!cells.empty() && cells[0] == kind)
      return col < static_cast<int>(cells.size()) ? cells[col] : std::string();
  }
  return "<missing>";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qtele_test_commands";
  std::filesystem::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_CASE("numbers are printed with 12 significant digits") {
  CHECK(format_number(0.8) == "0.8");
  CHECK(format_number(2.0 / 3.0) == "0.666666666667");
  CHECK(format_number(1.0) == "1");
}

TEST_CASE("parse_args reads every flag") {
  std::ostringstream help;
  const auto cfg = parse_args({"qtele", "teleport", "--coeffs", "0.6,0.8", "--lambda", "0.5",
                               "--strategy", "residual", "--corrections", "paper", "--runs",
                               "100", "--seed", "7", "--format", "jsonl"},
                              help);
  CHECK(cfg.command == "teleport");
  REQUIRE(cfg.coeffs.has_value());
  CHECK(cfg.coeffs->size() == 2);
  CHECK((*cfg.coeffs)[1] == 0.8);
  CHECK(cfg.lambda == 0.5);
  CHECK(cfg.strategy == Strategy::Residual);
  CHECK(cfg.corrections == Corrections::Paper);
  CHECK(cfg.runs == 100);
  CHECK(cfg.seed == 7);
  CHECK(cfg.format == Format::JsonLines);

  const auto dflt = parse_args({"qtele", "figure1", "--lambda", "max"}, help);
  CHECK_FALSE(dflt.lambda.has_value());
  CHECK(dflt.corrections == Corrections::Auto);
  CHECK(dflt.seed == 1);
}

TEST_CASE("config echo round-trips through the parser") {
  std::ostringstream help;
  RunConfig cfg;
  cfg.command = "teleport";
  cfg.coeffs = std::vector<double>{std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)};
  cfg.lambda = 0.1 + 0.2;
  cfg.strategy = Strategy::Residual;
  cfg.runs = 12345;
  cfg.seed = 18446744073709551615ull;
  cfg.out = "out.csv";
  cfg.transcript = "t.csv";
  cfg.format = Format::JsonLines;
  CHECK(parse_args(to_args(cfg), help) == cfg);

  RunConfig other;
  other.command = "figure1";
  other.entropy = 0.19;
  other.d = 2;
  CHECK(parse_args(to_args(other), help) == other);

  RunConfig third;
  third.command = "verify";
  third.cos_theta_c = 1.0 / 3.0;
  CHECK(parse_args(to_args(third), help) == third);
}

TEST_CASE("malformed input is a usage error") {
  std::ostringstream help;
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"qtele"},
           {"qtele", "launch"},
           {"qtele", "teleport", "--strategy", "bogus"},
           {"qtele", "teleport", "--corrections", "best"},
           {"qtele", "teleport", "--format", "xml"},
           {"qtele", "teleport", "--lambda", "0.4x"},
           {"qtele", "teleport", "--runs", "-3"},
           {"qtele", "teleport", "--d", "1"},
           {"qtele", "teleport", "--entropy", "0.2", "--cos-theta-c", "0.3"},
           {"qtele", "teleport", "--unknown", "1"},
       })
    CHECK_THROWS_AS(parse_args(args, help), UsageError);
}

TEST_CASE("help returns an empty command") {
  std::ostringstream help;
  const auto cfg = parse_args({"qtele", "--help"}, help);
  CHECK(cfg.command.empty());
  CHECK(help.str().find("teleport") != std::string::npos);
}

TEST_CASE("channel resolution") {
  std::ostringstream help;
  CHECK(resolve_dim(parse_args({"qtele", "teleport", "--d", "4"}, help)) == 4);
  CHECK(resolve_dim(parse_args({"qtele", "teleport"}, help)) == 2);
  CHECK(resolve_channel(parse_args({"qtele", "teleport", "--d", "3"}, help)).coeff(1) ==
        doctest::Approx(1 / std::sqrt(3.0)));
  CHECK_THROWS_AS(resolve_dim(parse_args({"qtele", "teleport", "--d", "3", "--cos-theta-c", "0.2"}, help)),
                  UsageError);
  CHECK_THROWS_AS(resolve_channel(parse_args({"qtele", "teleport", "--coeffs", "0.6,0.9"}, help)),
                  UsageError);
  const auto ch = resolve_channel(parse_args({"qtele", "teleport", "--entropy", "0.55"}, help));
  CHECK(ch.coeff(0) * ch.coeff(0) == doctest::Approx(oracle::invert_binary_entropy(0.55)).epsilon(1e-12));
}

TEST_CASE("teleport report values") {
  const auto product = invoke({"qtele", "teleport", "--cos-theta-c", "0.6", "--corrections", "paper"});
  REQUIRE(product.code == kOk);
  CHECK(split(product.out, '\n')[0] ==
        "kind,index,tag,probability,fidelity,conditional_fidelity,mc_probability,"
        "mc_probability_se,mc_fidelity,mc_fidelity_se");
  CHECK(std::stod(field(product.out, "total", 4)) == doctest::Approx(0.8).epsilon(1e-11));
  CHECK(field(product.out, "total", 6).empty()); // no Monte Carlo columns
  CHECK(std::stod(field(product.out, "inconclusive", 3)) == doctest::Approx(0.6).epsilon(1e-11));

  const auto residual = invoke({"qtele", "teleport", "--cos-theta-c", "0.6", "--strategy", "residual"});
  REQUIRE(residual.code == kOk);
  const double expect = formulas::f_otaf(channel_from_cos_theta(0.6), 0.4);
  CHECK(std::stod(field(residual.out, "total", 4)) == doctest::Approx(expect).epsilon(1e-11));

  // 8 outcomes + 3 summary rows + header
  CHECK(split(product.out, '\n').size() == 12);
}

TEST_CASE("teleport output is byte-stable for a fixed seed") {
  const std::vector<std::string> args{"qtele", "teleport", "--coeffs", "0.7,0.5,0.5099019513592785",
                                      "--strategy", "residual", "--runs", "5000", "--seed", "42"};
  const auto a = invoke(args), b = invoke(args);
  REQUIRE(a.code == kOk);
  CHECK(a.out == b.out);
  CHECK_FALSE(field(a.out, "total", 8).empty());
  auto c_args = args;
  c_args.back() = "43";
  CHECK(invoke(c_args).out != a.out);
}

TEST_CASE("teleport JSON lines") {
  const auto r = invoke({"qtele", "teleport", "--cos-theta-c", "0.6", "--runs", "2000", "--format", "jsonl"});
  REQUIRE(r.code == kOk);
  const auto lines = split(r.out, '\n');
  REQUIRE(lines.size() == 9);
  const auto first = nlohmann::json::parse(lines[0]);
  CHECK(first["kind"] == "outcome");
  CHECK(first.contains("mc_probability"));
  const auto summary = nlohmann::json::parse(lines.back());
  CHECK(summary["kind"] == "summary");
  CHECK(summary["f_total"].get<double>() == doctest::Approx(0.8));
  CHECK(summary["mc_runs"].get<int>() == 2000);
}

TEST_CASE("transcript file") {
  const auto path = scratch("transcript.csv");
  const auto r = invoke({"qtele", "teleport", "--cos-theta-c", "0.6", "--runs", "300", "--transcript",
                         path.string()});
  REQUIRE(r.code == kOk);
  const auto lines = split(slurp(path), '\n');
  REQUIRE(lines.size() == 301);
  CHECK(lines[0] == "run_index,outcome_alpha,conclusive_flag,bits_sent");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k], ',');
    REQUIRE(cells.size() == 4);
    CHECK(cells[3] == "4");
    CHECK((std::stoi(cells[1]) < 4) == (cells[2] == "1"));
  }
}

TEST_CASE("exit codes") {
  CHECK(invoke({"qtele", "teleport", "--cos-theta-c", "0.6", "--lambda", "0.41"}).code == kUsageError);
  CHECK(invoke({"qtele", "teleport", "--coeffs", "1,0"}).code == kUsageError);
  CHECK(invoke({"qtele", "teleport", "--cos-theta-c", "0.6", "--out", "/nonexistent/dir/x.csv"}).code ==
        kCheckFailure);
  const auto bad = invoke({"qtele", "verify", "--cos-theta-c", "0.6", "--lambda", "0.41"});
  CHECK(bad.code == kCheckFailure);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("verify on one channel passes and prints the discrepancy section") {
  const auto r = invoke({"qtele", "verify", "--cos-theta-c", "0.6", "--runs", "2000"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("checks passed") != std::string::npos);
  CHECK(r.out.find("product 0.8 (closed form 0.8), residual 0.8866025404") != std::string::npos);
}

TEST_CASE("figure rows") {
  const auto rows = figure1_rows();
  auto find = [&](double s, double c) -> const FigureRow* {
    for (const auto& r : rows)
      if (std::abs(r.entropy_bits - s) < 1e-12 && std::abs(r.cos_theta - c) < 1e-12)
        return &r;
    return nullptr;
  };
  const auto* top = find(1.0, 0.0);
  REQUIRE(top != nullptr);
  CHECK(top->fidelity_opt == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(top->is_arrow_point);
  for (const auto& r : rows)
    if (r.entropy_bits == 0.0)
      CHECK(r.fidelity_opt == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const auto* mid = find(0.55, 0.3);
  REQUIRE(mid != nullptr);
  const double cc = 1 - 2 * oracle::invert_binary_entropy(0.55);
  CHECK(std::abs(mid->fidelity_opt - formulas::f_theta_d2(cc, 0.3, 0.7)) <= 1e-12);

  int arrows = 0;
  for (const auto& r : rows)
    if (r.is_arrow_point) {
      ++arrows;
      // forward direction: the inverse is ill-conditioned as S -> 1
      CHECK(std::abs(oracle::binary_entropy((1 - r.cos_theta) / 2) - r.entropy_bits) <= 1e-12);
      if (r.entropy_bits > 0.0 && r.entropy_bits < 1.0) {
        const double want = 1 - 2 * oracle::invert_binary_entropy(r.entropy_bits);
        CHECK(std::abs(r.cos_theta - want) <= 1e-9);
      }
    }
  CHECK(arrows == 4);
}

TEST_CASE("figure CSV is ordered and non-increasing per curve") {
  const auto r = invoke({"qtele", "figure1"});
  REQUIRE(r.code == kOk);
  const auto lines = split(r.out, '\n');
  CHECK(lines[0] == "entropy_bits,cos_theta,fidelity_opt,is_arrow_point");
  double last_s = -1, last_c = -1, last_f = 2;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k], ',');
    const double s = std::stod(cells[0]), c = std::stod(cells[1]), f = std::stod(cells[2]);
    if (s != last_s) {
      last_c = -1;
      last_f = 2;
    }
    CHECK(c >= last_c);
    CHECK(f <= last_f + 1e-12);
    last_s = s;
    last_c = c;
    last_f = f;
  }
}

TEST_CASE("figure CSV to a file") {
  const auto path = scratch("figure.csv");
  const auto r = invoke({"qtele", "figure1", "--out", path.string()});
  REQUIRE(r.code == kOk);
  CHECK(r.out.empty());
  CHECK(slurp(path) == invoke({"qtele", "figure1"}).out);
}
