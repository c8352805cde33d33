#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odefilter/filter.hpp"
#include "odefilter/noise.hpp"
#include "odefilter/prior.hpp"

namespace odefilter {

/// Geometric step-size grid h_k = h0 / factor^k, k = 0..count-1.
struct HGrid {
  double h0 = 0.1;
  double factor = 2.0;
  int count = 8;

  [[nodiscard]] std::vector<double> values() const;
  /// `H0:FACTOR:COUNT`
  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] static HGrid parse(std::string_view text);

  friend bool operator==(const HGrid&, const HGrid&) = default;
};

/// Resolves a noise spec; `power:q:K` uses the run's q as the exponent.
[[nodiscard]] NoiseModel resolve_noise(const std::string& spec, int q);

/// Settings shared by every subcommand. Unset optionals fall back to the
/// defaults of the chosen command or preset.
struct RunConfig {
  std::optional<std::string> problem;
  std::optional<std::vector<int>> q;
  std::optional<PriorKind> prior;
  std::optional<double> theta;
  std::optional<double> sigma;
  std::optional<double> h;
  std::optional<HGrid> h_grid;
  std::optional<std::vector<std::string>> noise;
  std::string init = "exact";
  std::uint64_t seed = 0;
  std::optional<std::string> preset;
  std::string out;
  std::string svg;

  /// Applies one `key = value` setting; keys match the long flag names.
  /// Throws ConfigError on unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);

  /// `key = value` lines, one per set field, in a fixed order.
  [[nodiscard]] std::string to_text() const;
  /// Accepts `#` comments and blank lines.
  [[nodiscard]] static RunConfig from_text(std::string_view text);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

[[nodiscard]] const std::vector<std::string>& preset_names();
[[nodiscard]] const std::vector<std::string>& config_keys();

/// One solver run of a sweep.
struct RunSpec {
  std::string problem;
  PriorSpec prior;
  std::string noise_spec;
  NoiseModel noise;
  double h = 0.0;
  InitMode init;
};

struct WpdRow {
  std::string problem;
  std::string params;
  std::string x0;
  double T = 0.0;
  int q = 1;
  std::string prior;
  double theta = 0.0;
  double sigma = 1.0;
  std::string noise;
  double p = 0.0;
  double K_R = 0.0;
  double h = 0.0;
  long n_evals = 0;
  double final_error = 0.0;
  double max_error = 0.0;
  double final_std = 0.0;
  double max_std = 0.0;
  double delta1_final = 0.0;
  double delta1_max = 0.0;
  bool diverged = false;
  bool permissible = true;
};

/// Runs one sweep point keeping O(1) history. Errors are NaN for problems
/// without a closed-form solution.
[[nodiscard]] WpdRow run_point(const RunSpec& spec);

/// Runs all points on up to `threads` workers (0 = hardware concurrency).
/// Output order equals input order.
[[nodiscard]] std::vector<WpdRow> run_points(const std::vector<RunSpec>& specs,
                                             unsigned threads = 0);

/// Expands a config (or its preset) into the cross product of problems, q
/// values, noise specs and step sizes.
[[nodiscard]] std::vector<RunSpec> expand_sweep(const RunConfig& config);

void write_wpd_csv(std::ostream& os, const std::vector<WpdRow>& rows);

/// Entry point of the `odefilter` executable. `args` excludes the program
/// name. Returns 0 on success, 1 on configuration errors and 2 when a
/// `solve` run diverged.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace odefilter
