#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sadic/dsl.hpp"

namespace sadic {

enum class Task {
  props,
  matrix,
  cocycle_eval,
  lyapunov,
  spectrum,
  chi,
  mahler_bound,
  criterion,
  cone_verify,
  example_family,
  weyl,
  spectral_measure,
  dimension_scan,
};

const char* to_string(Task t);
std::optional<Task> parse_task(std::string_view name);
/// Tasks that need a family file.
bool needs_family(Task t);

inline constexpr const char* kSchemaVersion = "1.0";

struct RunConfig {
  Task task = Task::props;
  std::string family;                       // family file path
  std::optional<std::vector<double>> probs;  // overrides the file's weights
  std::uint64_t seed = 0;
  std::string out = "sadic-out";

  // lyapunov, spectrum, chi
  std::size_t n_steps = 10'000;
  std::size_t n_trials = 64;
  double burn_in = 0.1;
  std::vector<std::size_t> k_list{1, 2, 4, 8, 16};
  std::size_t n_samples = 256;          // per k in the finite-k sweep
  std::size_t integral_samples = 20'000;  // per-substitution Monte Carlo

  // matrix, cocycle-eval
  std::size_t member = 0;
  std::vector<double> point;  // torus point; empty = task default

  // mahler-bound: coefficients, low degree first
  std::vector<long long> poly{1, -3, 1};

  // example-family, cone-verify
  long long m = 23;
  std::string variant = "standard";  // standard | shifted-k
  std::vector<long long> ks;
  long long m_min = 4;
  long long m_max = 200;
  std::string cone = "forward";  // forward | inverse | family
  std::string cone_mode = "exact";
  std::size_t cone_samples = 1000;

  // weyl
  std::size_t N = 100'000;
  std::vector<std::size_t> subsamples{1, 2, 3};
  std::vector<long long> rational_point;  // numerators; with denominator > 0
  long long denominator = 0;

  // spectral-measure, dimension-scan
  std::size_t K = 1000;
  std::size_t grid = 1 << 14;
  std::uint32_t letter = 0;
  std::size_t level = 0;
  bool centered = true;
  std::vector<double> omega_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> radii;  // empty = 2^-4 .. 2^-12

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

/// Sets one key. Throws ParseError at the value's position for unknown
/// keys and out-of-range values.
void apply_setting(RunConfig& cfg, const KeyValue& kv);

/// `key = value` lines with `#` comments. Unknown or repeated keys, syntax
/// errors and range errors throw ParseError with line and column.
RunConfig parse_config(std::string_view text, bool require_task = true);

/// Every key accepted by apply_setting.
std::vector<std::string> config_keys();

/// Cross-field checks (family present when the task needs one, ranges).
/// Throws std::invalid_argument.
void validate_config(const RunConfig& cfg);

}  // namespace sadic
