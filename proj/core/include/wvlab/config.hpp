#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wvlab/phases.hpp"
#include "wvlab/radius.hpp"
#include "wvlab/series.hpp"
#include "wvlab/wv_stats.hpp"

namespace wvlab {

struct SequenceSpec {
  std::string kind = "GEOMETRIC";  // GEOMETRIC | SQRT_EXP | POWER_EXP | TABLE
  double eps = 0.5;                // POWER_EXP exponent
  std::vector<double> moduli;      // TABLE
  std::vector<double> args;        // TABLE, optional

  CoefficientSequence build() const;
};

struct PhaseSpec {
  std::string kind = "geometric";  // geometric: theta_{n+1} = ceil(q theta_n); phi_power: phi(n) = (n+1)^delta
  double q = 2.0;
  double delta = 0.25;
  // 0 = as long as the radius grid needs
  std::uint64_t n_max = 0;

  PhaseSequence build(std::uint64_t n_max) const;
};

struct WeightSpec {
  std::string kind = "LOG_MEASURE";  // LOG_MEASURE | POWER
  double p = 1.0;

  WeightFunction build() const;
};

struct ExperimentConfig {
  SequenceSpec sequence;
  PhaseSpec phases;
  WeightSpec weight;

  int per_decade = 8;
  int kmax = 3;
  int trials = 10;
  std::uint64_t seed = 1;
  std::vector<double> eta = {0.25, 0.35, 0.5};
  double delta = 0.1;
  double margin_nats = 46.0;
  std::uint64_t n_cap = 10'000'000;
  std::string out_dir = "out";

  // ensemble
  bool force_u_zero = false;
  double median_threshold = 0.45;
  double theorem1_delta = 0.1;  // delta > 0 passed to rhs_theorem1; not the phase gap exponent
  double ceiling = 0.55;

  // bound audit
  std::vector<double> audit_eps = {0.5};
  std::vector<int> refinements;  // extra per-decade densities to compare

  // sharpness / baire
  double drift_tolerance = 0.10;

  // kahane
  std::vector<double> coeffs;  // empty = all ones
  std::uint64_t kahane_terms = 21;
  double t_lo = 0.0;
  double t_hi = 6.283185307179586;
  int grid_n = 1 << 16;

  // verbatim text of the file this was parsed from (empty if built in code)
  std::string source_text;

  std::vector<Radius> grid() const { return log_radius_grid(per_decade, kmax); }
  SeriesOptions series_options() const { return SeriesOptions{margin_nats, n_cap}; }
  void validate() const;
};

// JSON text; missing keys keep their defaults, unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// effective configuration as pretty JSON
std::string config_to_json(const ExperimentConfig& config);

}  // namespace wvlab
