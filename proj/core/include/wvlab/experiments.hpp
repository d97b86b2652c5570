#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wvlab/config.hpp"
#include "wvlab/maxmod.hpp"
#include "wvlab/wv_stats.hpp"

namespace wvlab {

// t = 0 sweep over the radius grid.  delta_h is empty where the statistic is undefined.
struct ProfileResult {
  ExperimentConfig config;
  std::vector<GrowthProfile> rows;
  double seconds = 0.0;
};
ProfileResult run_profile(const ExperimentConfig& config);

// ratio(r) = M(r) / (h mu ln^{1/2}(h mu)) at t = 0 with h = 1/(1-r); its tail minimum
// min_{r' >= r} ratio(r') is the liminf proxy.
struct RatioResult {
  ExperimentConfig config;
  std::string experiment;
  std::vector<GrowthProfile> rows;
  std::vector<double> ratio;
  std::vector<double> tail_min;
  std::vector<double> tail_max;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  // first grid index of the final decade of s
  std::size_t final_decade_start = 0;
  // relative change of the tail min (max) across the final decade
  double drift_min = 0.0;
  double drift_max = 0.0;
  double seconds = 0.0;
};
RatioResult run_sharpness(const ExperimentConfig& config);
RatioResult run_baire_example(const ExperimentConfig& config);

struct TrialRecord {
  std::uint64_t index = 0;
  std::string u_hex;
  std::vector<double> log_M;              // per radius
  std::vector<double> delta;              // per radius, NaN where undefined
  std::vector<std::vector<bool>> flags;   // [eta][radius]
  std::vector<double> h_mass;             // per eta, grid-cell h-measure of the flagged set
  // sup of Delta_h over the final decade outside the set flagged at the largest eta; NaN if all flagged
  double tail_sup = 0.0;
};

struct RadiusAggregate {
  int valid = 0;
  double min = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
  // trials with log_M above rhs_theorem1 (-1 when undefined)
  int above_theorem1 = -1;
  double rhs_theorem1 = 0.0;  // NaN when undefined
  double median_log_M = 0.0;
};

struct EnsembleResult {
  ExperimentConfig config;
  std::vector<GrowthProfile> profiles;  // t-independent part
  std::vector<TrialRecord> trials;
  std::vector<RadiusAggregate> aggregates;
  CorollaryBounds bounds{};
  double gamma = 0.0;  // gap statistic of the phase sequence (NaN if too short)
  unsigned fraction_bits = 0;
  std::uint64_t phase_terms = 0;
  std::size_t final_decade_start = 0;
  double max_tail_sup = 0.0;
  bool median_check = false;  // medians at the three largest radii <= median_threshold
  bool trend_check = false;   // median decreases across the final decade
  bool ceiling_check = false; // every tail sup <= ceiling
  bool theorem1_check = false; // median log_M <= rhs_theorem1 across the final decade
  double seconds = 0.0;
};
EnsembleResult run_ensemble(const ExperimentConfig& config);

struct AuditRun {
  int per_decade = 0;
  double eps = 0.0;
  std::vector<Radius> grid;
  std::vector<bool> in_regime;
  std::vector<bool> viol_A, viol_B2_statement, viol_B2_proof, viol_G;
  double h_A = 0.0, h_B2_statement = 0.0, h_B2_proof = 0.0, h_G = 0.0;
};
struct AuditResult {
  ExperimentConfig config;
  std::vector<GrowthProfile> rows;  // main grid
  std::vector<AuditRun> runs;       // every (refinement, eps) pair
  double seconds = 0.0;
};
AuditResult run_bound_audit(const ExperimentConfig& config);

struct KahaneResult {
  double t0 = 0.0;
  double ratio = 0.0;
  double re_q = 0.0;
  double sum_c = 0.0;
  std::size_t terms = 0;
  double t_lo = 0.0, t_hi = 0.0;
  int grid_n = 0;
  // Re Q / sum c on a subsample of the search grid
  std::vector<double> curve_t, curve_ratio;
  double seconds = 0.0;
};
// max over t in [t_lo, t_hi] of Re sum c_n e^{i theta_n t}; theta_n < 2^53
KahaneResult run_kahane_search(const PhaseSequence& theta, const std::vector<double>& coeffs, double t_lo,
                               double t_hi, int grid_n);
KahaneResult run_kahane(const ExperimentConfig& config);

// Linear-interpolation quantile of a sample (sorted copy), q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace wvlab
