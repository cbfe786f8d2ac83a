#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "teis/arith.hpp"
#include "teis/budget.hpp"

namespace teis::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInvalidConfig = 2,
  kPrecisionUnreachable = 3,
  kIoError = 4,
};

struct RunConfig {
  std::string command;
  i64 level = 11;
  int weight = 4;
  std::vector<i64> twist_indices{0};
  bool all_indices = false;
  /// "zero", "eta11", "eta14", "eta15" or a path to a series file.
  std::string form = "zero";
  double form_scale = 1.0;
  bool trivializing_scale = false;
  i64 terms = 10;
  PrecisionBudget budget;
  std::optional<std::complex<double>> tau;
  std::string out;
  std::string format = "json";
  int threads = 1;
  i64 max_den = 1000000;
  double tol = 1e-10;
  double max_height = 20.0;
  // form command
  std::string eta;
  int fricke_sign = 0;

  void validate() const;
};

/// Parses "x+yi", "x-yi", "x,y" or "x y".
std::complex<double> parse_tau(const std::string& s);

/// Each command writes its report to `out` and returns an ExitCode; errors propagate.
int cmd_qexp(const RunConfig& c, std::ostream& out);
int cmd_eval(const RunConfig& c, std::ostream& out);
int cmd_check(const RunConfig& c, std::ostream& out);
int cmd_periods(const RunConfig& c, std::ostream& out);
int cmd_scan(const RunConfig& c, std::ostream& out);
int cmd_form(const RunConfig& c, std::ostream& out);

/// Full command line: parses, runs, maps exceptions to exit codes with a diagnostic on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace teis::cli
