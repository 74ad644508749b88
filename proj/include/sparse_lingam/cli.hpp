#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "sparse_lingam/errors.hpp"
#include "sparse_lingam/types.hpp"

namespace sparse_lingam {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int parse = 2;           // malformed or incomplete input
inline constexpr int parameter = 3;       // invalid configuration
inline constexpr int nonconvergence = 4;  // outputs written, solver flagged
inline constexpr int io = 5;
inline constexpr int numerical = 6;       // degenerate, singular, diverged
}  // namespace exit_code

int exit_code_for(ErrorKind kind) noexcept;

/// Every knob of every command. Serialized as JSON (docs/formats.md);
/// defaults match SolverConfig and PipelineConfig.
struct RunConfig {
  std::string command;
  std::string input;
  std::string output_dir = ".";
  std::string output;  // heatmap image path

  int d = 10;
  long n = 1000;
  std::string graph = "er";
  std::optional<double> edges;  // defaults to d
  std::string noise = "mixed";
  std::uint64_t seed = 0;
  std::optional<double> ar1;  // simulate an AR(1) series instead of a DAG

  double lambda = 0.1;
  std::optional<double> alpha;  // skips CV when set
  std::string alpha_grid = "0.001:0.31622776601683794:50";
  int k_folds = 10;
  double omega1 = 0.05;
  double omega2 = 0.05;
  double gamma = 1.0;
  double rho = 1.0;
  double eta = 0.005;
  int u_max = 10;
  int max_outer = 2000;

  int replicates = 20;
  std::optional<int> window;
  bool log1p = false;
  int jobs = 1;
  bool header = false;
  char delimiter = ',';
  int cell = 16;  // heatmap pixels per matrix entry
};

std::string run_config_to_json(const RunConfig& cfg);
/// Fields absent from `text` keep their value in `base`.
RunConfig run_config_from_json(const std::string& text, RunConfig base = {});

/// Shortest text that reads back to the same double; "-0" prints as "0".
std::string format_double(double v);
/// One row per line, comma separated, trailing newline.
std::string matrix_to_csv(const Matrix& m);

/// Binary PPM (P6), `cell` x `cell` pixels per entry. Red for positive,
/// blue for negative, white for zero, saturating at max|b|.
std::string heatmap_ppm(const Matrix& b, int cell = 16);

int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_benchmark(const RunConfig& cfg, std::ostream& out);
int cmd_heatmap(const RunConfig& cfg, std::ostream& out);

/// Parses arguments and dispatches. Errors are reported on `err` and
/// mapped to the exit codes above.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace sparse_lingam
