#pragma once

#include <cstdint>
#include <memory>

#include "wvlab/phases.hpp"
#include "wvlab/radius.hpp"
#include "wvlab/series.hpp"

namespace wvlab {

struct MaxModulusOptions {
  SeriesOptions series;
  // grid points per unit of polynomial degree
  unsigned oversample = 16;
  // number of grid local maxima considered for refinement
  unsigned top_k = 5;
  // refinement stops once the bracket in psi is narrower than this
  double bracket_tol = 1e-12;
};

struct MaxModulusResult {
  double log_M = 0.0;
  double psi_star = 0.0;
  std::uint64_t trunc_n = 0;
  // terms below window_lo are under the truncation margin and left out of the grid
  std::uint64_t window_lo = 0;
  std::uint64_t grid_size = 0;
  double grid_log_max = 0.0;
  // true max <= grid_log_max + resolution_bound (Bernstein)
  double resolution_bound = 0.0;
  double tail_log_bound = 0.0;
  unsigned refined = 0;
};

// ln |f_t(r e^{i psi})| with the terms n <= trunc_n, t = 2 pi u.
double eval_rotated(const CoefficientSequence& seq, const PhaseSequence& theta, const PhaseFraction& u, Radius r,
                    double psi, const SeriesOptions& opts = {});

// Reuses FFT plans and buffers between calls.  Not thread-safe; use one engine per thread.
class MaxModulusEngine {
 public:
  MaxModulusEngine();
  ~MaxModulusEngine();
  MaxModulusEngine(const MaxModulusEngine&) = delete;
  MaxModulusEngine& operator=(const MaxModulusEngine&) = delete;

  MaxModulusResult max_modulus(const CoefficientSequence& seq, const PhaseSequence& theta, const PhaseFraction& u,
                               Radius r, const MaxModulusOptions& opts = {});
  // t = 0
  MaxModulusResult max_modulus(const CoefficientSequence& seq, Radius r, const MaxModulusOptions& opts = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

MaxModulusResult max_modulus(const CoefficientSequence& seq, const PhaseSequence& theta, const PhaseFraction& u,
                             Radius r, const MaxModulusOptions& opts = {});
MaxModulusResult max_modulus_unrotated(const CoefficientSequence& seq, Radius r, const MaxModulusOptions& opts = {});

}  // namespace wvlab
