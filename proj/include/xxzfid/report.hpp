#pragma once

// Command execution and serialization behind the xxzfid command-line tool.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xxzfid/ed_oracle.hpp"
#include "xxzfid/numeric.hpp"
#include "xxzfid/parallel.hpp"

namespace xxzfid::cli {

enum class Command { eval, scan, fit, identities, ed };
enum class OutputFormat { json, csv };
enum class Spacing { linear, log };
enum class Coordinate { x, eps };

struct GridSpec {
  Coordinate coordinate = Coordinate::x;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  Spacing spacing = Spacing::linear;
};

struct RunConfig {
  Command command = Command::eval;
  std::optional<double> x;
  std::optional<double> eps;
  GridSpec grid;
  double rel_tol = 32.0 * machine_epsilon<double>();
  std::size_t max_terms = kSeriesMaxTerms;
  bool cross_check = false;
  OutputFormat format = OutputFormat::json;
  std::optional<std::string> output_path;
  std::vector<int> lengths;
  ed::Pinning pinning = ed::Pinning::neel;
  unsigned threads = default_thread_count();

  /// Throws DomainError / InvalidSpec on an inconsistent configuration.
  void validate() const;
};

/// Column order of scan/eval CSV output.
inline constexpr const char* kPointColumns =
    "x,eps,delta,xi,ln_xi,f,ln_f,ratio,path,est_rel_error";

/// Shortest round-trip decimal form; "inf", "-inf" or "nan" for non-finite values.
std::string format_number(double v);

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass() const { return max_residual < threshold; }
};

/// Every identity and route-equivalence check, each on its grid.
std::vector<SuiteResult> run_identity_suites(const Tolerance& tol, unsigned threads);

/// Executes the command and writes the report to `out` (or the configured
/// file). Returns 0 on success, 1 on validation errors, 2 on numerical
/// failures; errors are reported on `err` as a one-line JSON object.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace xxzfid::cli
