#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "damplab/circle_grid.hpp"
#include "damplab/damping.hpp"

namespace damplab {

enum class ExperimentKind { ResolventSweep, DecayRun, LemmaCertify, EsmallProbe };

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_kind(std::string_view name) noexcept;

/// Schema or range violation; path() names the offending field ("data.k[2]").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct EPolicy {
  enum class Mode { AllModes, Fixed, Q2Fraction };
  Mode mode = Mode::AllModes;
  std::vector<double> values;
  bool operator==(const EPolicy&) const = default;
};

struct DataSpec {
  std::string family = "gaussian-strip";  // or "plane-wave"
  std::vector<long> k{1, 2, 4, 8, 16};
  double width = 0.0;  // 0 means sigma / 4
  long m = 1;          // plane-wave only
  bool operator==(const DataSpec&) const = default;
};

struct ExpectBands {
  std::optional<std::pair<double, double>> slope;
  std::optional<std::pair<double, double>> alpha;
  std::optional<double> sup_max;
  std::optional<double> trend_max;
  bool operator==(const ExpectBands&) const = default;
};

/// Normalized experiment description; every default is filled in by parse_config.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ResolventSweep;

  double sigma = kPi / 2.0;
  double beta = 0.0;
  double c0 = 1.0;
  EnvelopeVariant variant = EnvelopeVariant::ExactV;
  double variant_param = 1.0;

  DiffScheme scheme = DiffScheme::Fd2;
  std::optional<std::size_t> n;  // fixed node count; otherwise the n rule below
  double n_factor = 8.0;
  std::size_t n_min = 0;

  std::vector<double> q;  // ascending, expanded
  std::string q_sampling = "resonant";  // or "nominal"
  EPolicy E;
  double E_cut = 1.0;
  double tol = 1e-6;
  int max_iter = 500;

  DataSpec data;
  double T = 1000.0;
  double dt = 0.05;
  std::size_t sample_stride = 20;
  std::pair<double, double> window{20.0, 500.0};
  std::pair<double, double> sup_window{10.0, 1000.0};

  std::optional<double> tau;
  int min_layers = 2;
  std::vector<int> cases{1, 2, 3, 4};
  int trials = 1;

  std::uint64_t seed = 0x5EEDULL;
  std::string out;
  ExpectBands expect;

  bool operator==(const ExperimentConfig&) const = default;

  /// Node count for frequency q: the fixed n, or max(8, n_min, n_factor q) rounded up to even.
  std::size_t nodes_for(double q) const;
  DampingProfile profile() const;
};

/// Parses a JSON document. Unknown or duplicate keys, type mismatches and
/// out-of-range values raise ConfigError.
ExperimentConfig parse_config(std::string_view text);

/// Defaults for a kind, as if parsed from {"kind": ...}.
ExperimentConfig default_config(ExperimentKind kind);

/// Canonical JSON (sorted keys, all defaults explicit). parse_config of the
/// result reproduces the config exactly.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Re-runs the cross-field checks after CLI overrides.
void validate_config(const ExperimentConfig& config);

/// Geometric list min, min*factor, ... up to max (inclusive within 1e-9 relative).
std::vector<double> geometric_range(double min, double max, double factor);

}  // namespace damplab
