#ifndef WRELAY_CLI_SCENARIO_HPP
#define WRELAY_CLI_SCENARIO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wrelay/channel.hpp"
#include "wrelay/cli/toml.hpp"
#include "wrelay/metrics/common.hpp"
#include "wrelay/metrics/qam.hpp"

namespace wrelay::cli {

// Well-formed file with invalid content (unknown keys, bad units, values
// out of range).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hop parameters. Per-hop lists hold either one value, used for every hop,
// or exactly one value per hop.
struct ChainSpec {
  int hops = 1;
  std::vector<double> alpha{1.0};
  std::vector<double> omega{1.0};
  double distance_m = 100.0;             // end-to-end, split equally
  std::vector<double> hop_distances_m;   // overrides distance_m when set
  double bandwidth_hz = 200e6;
  double eirp_dbm = 23.0;

  bool operator==(const ChainSpec&) const = default;
};

enum class SweepVariable { eirp, distance, hops };
enum class SweepScale { linear, log };

struct SweepSpec {
  SweepVariable variable = SweepVariable::eirp;
  double start = 0.0;
  double stop = 50.0;
  int points = 11;
  SweepScale scale = SweepScale::linear;

  std::vector<double> values() const;
  bool operator==(const SweepSpec&) const = default;
};

enum class MetricKind { outage, ber, ser, bler, capacity, capacity_ratio, ee };
enum class Csi { perfect, outdated };
enum class Allocation { uniform, ber_optimal, ee_optimal };

struct MetricSpec {
  MetricKind kind = MetricKind::outage;
  std::string label;  // file stem, defaults to the kind name
  double threshold_db = 0.0;                          // outage
  int qam_order = 4;                                  // ber, ser
  metrics::SnrConvention convention = metrics::SnrConvention::per_bit;
  Csi csi = Csi::perfect;                             // ber
  double rho = 0.95;
  bool stale_csi_mc = false;  // extra symbol-level MC column with a stale equaliser
  int beam_t = 0;             // ber: t > 0 selects beamforming with r < t
  int beam_r = 0;
  std::string mc_mode = "analytic";  // ber/ser: analytic|symbol; bler: linear|normal
  double rate = 1.0;                 // bler
  int block_length = 100;
  double reference_frequency_ghz = 73.0;  // capacity_ratio denominator band
  double circuit_power_w = 0.5;           // ee, per node
  Allocation allocation = Allocation::uniform;

  bool operator==(const MetricSpec&) const = default;
};

struct McSpec {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  double sigma = 3.0;
  unsigned workers = 4;

  bool operator==(const McSpec&) const = default;
};

// Named set of overrides applied on top of the base scenario. Keys under
// "metric" apply to every metric.
struct Variant {
  std::string label;
  toml::Table overrides;

  bool operator==(const Variant&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  ChainSpec chain;
  LinkBudget budget;
  SweepSpec sweep;
  std::vector<metrics::Method> methods{metrics::Method::exact, metrics::Method::asymptotic,
                                       metrics::Method::monte_carlo};
  McSpec mc;
  std::vector<MetricSpec> metric_specs;
  std::vector<Variant> variants;

  bool operator==(const Scenario&) const = default;
};

std::string to_string(MetricKind k);
std::string to_string(SweepVariable v);
// Sweep column header, e.g. "eirp_dbm".
std::string sweep_column(SweepVariable v);

Scenario scenario_from_toml(const toml::Table& t);
toml::Table scenario_to_toml(const Scenario& s);
std::string serialize(const Scenario& s);

// Reads and parses a file. Throws toml::ParseError for syntax errors,
// ValidationError for content errors and std::runtime_error when the file
// cannot be read.
Scenario load_scenario(const std::string& path);

// The scenario with one variant's overrides applied and no variants left.
// With no variants the scenario itself is the only resolved form.
Scenario resolve_variant(const Scenario& s, std::size_t index);

// Hop chain at one sweep value; validation failures throw ValidationError.
HopChain build_chain(const Scenario& resolved, double sweep_value);

// Strict "<number> <unit>" quantities.
double parse_power_dbm(const std::string& text);
double parse_frequency_hz(const std::string& text);
double parse_distance_m(const std::string& text);
double parse_db(const std::string& text);

}  // namespace wrelay::cli

#endif  // WRELAY_CLI_SCENARIO_HPP
