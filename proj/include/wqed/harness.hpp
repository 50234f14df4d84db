#pragma once

// Scenario configuration, method dispatch, grid comparison and file output.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wqed/correlators.hpp"
#include "wqed/params.hpp"
#include "wqed/wavefield.hpp"

namespace wqed::harness {

enum class MethodChoice { Diagrammatic, Oracle, Both };
enum class LoopFlag { Auto, On, Off };
enum class GridKind { Time, Jacobi };
enum class SweepAxis { NumAtoms, DrivePower, Beta };

/// Configuration problems; the message lists every violation found.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grids with different axes or kinds cannot be compared.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridSpec {
  GridKind kind = GridKind::Time;
  int n = 50;
  double lo = 0.0, hi = 5.0;  // time grid, units 1/gamma_tot
  double eta_min = -6.0, eta_max = 6.0, zeta_min = -6.0, zeta_max = 6.0, R = 0.0;  // Jacobi grid
};

struct Tolerances {
  double epsilon = 0.03;         ///< acceptable oracle discrepancy, reported in comparisons
  double count_rate_rel = 1e-2;  ///< coarse/fine agreement of the count-rate quadrature
};

struct OracleSettings {
  int dense_max_atoms = 4;
  double max_step = 0.02;
};

struct ScenarioConfig {
  EnsembleParams params{0.05, 2, 1.0, 0.02};
  MethodChoice method = MethodChoice::Diagrammatic;
  LoopFlag loops = LoopFlag::Auto;
  GridSpec grid;
  Tolerances tol;
  WavefieldOptions quadrature;
  OracleSettings oracle;
  double gamma_tot_hz = 2.0 * 3.14159265358979323846 * 5e6;
  double window = 3.0;
  std::string out_dir = "out";
  std::string name = "scenario";
  int threads = 1;
  SweepAxis sweep_axis = SweepAxis::NumAtoms;
  std::vector<double> sweep_values;
  // scatter table
  double k_min = -5.0, k_max = 5.0;
  int k_points = 101;
};

/// Prefix of environment variables overriding config keys, e.g. WQED_ENSEMBLE_BETA.
inline constexpr const char* kEnvPrefix = "WQED_";

/// All recognised keys in section.key form.
const std::vector<std::string>& config_keys();

/// Environment variable name for a key ("grid.jacobi.eta_min" -> WQED_GRID_JACOBI_ETA_MIN).
std::string env_name(const std::string& key);

/// Key-value assignments in section.key form.
using KeyValues = std::map<std::string, std::string>;

/// Parses the text config format ([section] / [section.sub] headers, key = value lines).
KeyValues parse_config_text(std::istream& in);
KeyValues read_config_file(const std::filesystem::path& path);
/// Values of every recognised key present in the environment.
KeyValues environment_overrides();

/// Applies assignments on top of `base`. Throws ConfigError listing every bad key or value.
ScenarioConfig apply(const ScenarioConfig& base, const KeyValues& kv);

/// Empty when valid; otherwise one message per violation.
std::vector<std::string> validation_errors(const ScenarioConfig& c);
/// Throws ConfigError (all violations) or oracle::CapacityError when M exceeds the oracle cap.
void validate(const ScenarioConfig& c);

bool loops_enabled(const ScenarioConfig& c);
WavefieldOptions wavefield_options(const ScenarioConfig& c);

std::string version();

struct ComparisonReport {
  double epsilon = 0;        ///< ||A - B||_F / ||A||_F
  double max_deviation = 0;  ///< max |A - B|
  Eigen::Index max_i = 0, max_j = 0;
  Eigen::Index rows = 0, cols = 0;
  double seconds_a = 0, seconds_b = 0;
};

ComparisonReport compare_grids(const CorrelationGrid& a, const CorrelationGrid& b);

struct ScenarioResult {
  std::optional<CorrelationGrid> diagrammatic, oracle;
  std::optional<ComparisonReport> comparison;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> files;
  double seconds_diagrammatic = 0, seconds_oracle = 0;
};

/// Computes the configured grids and writes CSV + JSON sidecars into out_dir.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Long-format CSV (axes then value) plus a JSON sidecar next to it.
void write_grid(const CorrelationGrid& g, const std::filesystem::path& csv, const ScenarioConfig& config,
                const std::vector<std::string>& warnings = {});
/// Reads a grid written by write_grid.
CorrelationGrid read_grid(const std::filesystem::path& csv);

struct SweepRow {
  double value = 0;
  bool ok = false;
  std::string error;
  double gc3_origin = 0;
  double count_rate_hz = 0;
  std::optional<double> epsilon;
};

/// Runs one scenario per value along `axis`; failures are recorded per row.
std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values);
void write_sweep(const std::vector<SweepRow>& rows, SweepAxis axis, const std::filesystem::path& csv);

const char* to_string(MethodChoice m);
const char* to_string(LoopFlag f);
const char* to_string(SweepAxis a);

}  // namespace wqed::harness
