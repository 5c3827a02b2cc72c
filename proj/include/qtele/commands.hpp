#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtele/channel.hpp"
#include "qtele/fidelity.hpp"

namespace qtele::cli {

enum ExitCode : int { kOk = 0, kCheckFailure = 1, kUsageError = 2 };

// Thrown for malformed or inconsistent command-line input.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Strategy { Product, Residual };
enum class Format { Csv, JsonLines };

struct RunConfig {
  std::string command;
  std::optional<int> d;
  std::optional<std::vector<double>> coeffs;
  std::optional<double> entropy;
  std::optional<double> cos_theta_c;
  std::optional<double> lambda; // empty means lambda_max
  Strategy strategy = Strategy::Product;
  Corrections corrections = Corrections::Auto;
  std::uint64_t runs = 0;
  std::uint64_t seed = 1;
  std::string out;        // empty: stdout
  std::string transcript; // empty: no transcript
  Format format = Format::Csv;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// argv[0] is the program name. Throws UsageError; `--help` prints usage to
// `help` and returns a config with an empty command.
RunConfig parse_args(const std::vector<std::string>& args, std::ostream& help);

// Command line that parses back to `cfg`, numbers printed round-trip exact.
std::vector<std::string> to_args(const RunConfig& cfg);

// 12 significant digits.
std::string format_number(double x);

// Local dimension implied by the config (channel flags and --d must agree).
int resolve_dim(const RunConfig& cfg);
// --coeffs, --entropy or --cos-theta-c; maximally entangled otherwise.
SchmidtChannel resolve_channel(const RunConfig& cfg);
bool has_channel_flag(const RunConfig& cfg);

int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_figure1(const RunConfig& cfg, std::ostream& out);
int cmd_teleport(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Dispatches on cfg.command; maps errors onto exit codes.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int main_entry(int argc, char** argv);

// Figure rows: entropy, cos theta, optimal fidelity, arrow flag.
struct FigureRow {
  double entropy_bits = 0.0;
  double cos_theta = 0.0;
  double fidelity_opt = 0.0;
  bool is_arrow_point = false;
};

std::vector<FigureRow> figure1_rows();

} // namespace qtele::cli
