#include "wvlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "wvlab/error.hpp"

namespace wvlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

[[noreturn]] void rethrow_at(const Error& e, Radius r) {
  std::string msg = e.what();
  const std::string prefix = std::string(to_string(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  char where[96];
  std::snprintf(where, sizeof where, "at r = 1 - %.6g: ", r.s());
  throw Error(e.code(), where + msg);
}

std::optional<double> try_delta(double log_M, double log_mu, Radius r, const WeightFunction& h) {
  try {
    return delta_h(log_M, log_mu, r, h);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDomain) throw;
    return std::nullopt;
  }
}

MaxModulusOptions mm_options(const ExperimentConfig& config) {
  MaxModulusOptions o;
  o.series = config.series_options();
  return o;
}

// first grid index with s <= 10^{-(kmax-1)}
std::size_t final_decade_index(const ExperimentConfig& config) {
  if (config.kmax <= 1) return 0;
  return static_cast<std::size_t>(config.per_decade) * static_cast<std::size_t>(config.kmax - 1) - 1;
}

std::vector<GrowthProfile> unrotated_profiles(const ExperimentConfig& config, const std::vector<Radius>& grid,
                                              MaxModulusEngine& engine) {
  const CoefficientSequence seq = config.sequence.build();
  const WeightFunction h = config.weight.build();
  const MaxModulusOptions mo = mm_options(config);
  std::vector<GrowthProfile> rows;
  rows.reserve(grid.size());
  for (Radius r : grid) {
    try {
      GrowthProfile p = growth_profile(seq, r, mo.series);
      p.log_M = engine.max_modulus(seq, r, mo).log_M;
      p.delta_h = try_delta(*p.log_M, p.log_mu, r, h);
      rows.push_back(p);
    } catch (const Error& e) {
      rethrow_at(e, r);
    }
  }
  return rows;
}

double rel_change(double from, double to) { return std::fabs(from - to) / std::fabs(to); }

RatioResult run_ratio(const ExperimentConfig& config, const std::string& name) {
  Stopwatch clock;
  config.validate();
  if (config.weight.kind != "LOG_MEASURE")
    throw Error(ErrorCode::kBadParam, name + " uses h(r) = 1/(1-r); set weight.kind to LOG_MEASURE");
  RatioResult out;
  out.config = config;
  out.experiment = name;
  MaxModulusEngine engine;
  const auto grid = config.grid();
  out.rows = unrotated_profiles(config, grid, engine);
  for (const GrowthProfile& p : out.rows) {
    const double lh = p.r.log_inv_s();
    const double l = lh + p.log_mu;
    if (!(l > 0.0)) throw Error(ErrorCode::kDomain, "ln(h mu) <= 0 at r = 1 - " + std::to_string(p.r.s()));
    out.ratio.push_back(std::exp(*p.log_M - lh - p.log_mu - 0.5 * std::log(l)));
  }
  const std::size_t n = out.ratio.size();
  out.tail_min.assign(n, 0.0);
  out.tail_max.assign(n, 0.0);
  for (std::size_t j = n; j-- > 0;) {
    out.tail_min[j] = j + 1 < n ? std::min(out.ratio[j], out.tail_min[j + 1]) : out.ratio[j];
    out.tail_max[j] = j + 1 < n ? std::max(out.ratio[j], out.tail_max[j + 1]) : out.ratio[j];
  }
  out.min_ratio = *std::min_element(out.ratio.begin(), out.ratio.end());
  out.max_ratio = *std::max_element(out.ratio.begin(), out.ratio.end());
  out.final_decade_start = final_decade_index(config);
  out.drift_min = rel_change(out.tail_min[out.final_decade_start], out.tail_min.back());
  out.drift_max = rel_change(out.tail_max[out.final_decade_start], out.tail_max.back());
  out.seconds = clock.seconds();
  return out;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ProfileResult run_profile(const ExperimentConfig& config) {
  Stopwatch clock;
  config.validate();
  ProfileResult out;
  out.config = config;
  MaxModulusEngine engine;
  out.rows = unrotated_profiles(config, config.grid(), engine);
  out.seconds = clock.seconds();
  return out;
}

RatioResult run_sharpness(const ExperimentConfig& config) { return run_ratio(config, "sharpness"); }

RatioResult run_baire_example(const ExperimentConfig& config) {
  if (config.sequence.kind != "POWER_EXP")
    throw Error(ErrorCode::kBadParam, "baire example needs sequence.kind = POWER_EXP");
  return run_ratio(config, "baire");
}

EnsembleResult run_ensemble(const ExperimentConfig& config) {
  Stopwatch clock;
  config.validate();
  EnsembleResult out;
  out.config = config;
  const CoefficientSequence seq = config.sequence.build();
  const WeightFunction h = config.weight.build();
  const MaxModulusOptions mo = mm_options(config);
  const auto grid = config.grid();
  const std::size_t nr = grid.size();

  for (Radius r : grid) {
    try {
      out.profiles.push_back(growth_profile(seq, r, mo.series));
    } catch (const Error& e) {
      rethrow_at(e, r);
    }
  }
  std::uint64_t max_trunc = 0;
  for (const auto& p : out.profiles) max_trunc = std::max(max_trunc, p.trunc_n);

  const PhaseSequence theta = config.phases.build(max_trunc);
  if (theta.size() <= max_trunc)
    throw Error(ErrorCode::kPhasesTooShort, "phase sequence has " + std::to_string(theta.size()) +
                                                " terms; the grid needs " + std::to_string(max_trunc + 1));
  out.phase_terms = theta.size();
  out.fraction_bits = static_cast<unsigned>((theta.bit_length(max_trunc) + 128 + 63) / 64 * 64);
  out.gamma = theta.size() >= 102 ? gamma_stat(theta, 100).value : kNaN;
  out.bounds = corollary_bounds(config.delta);
  out.final_decade_start = final_decade_index(config);

  const std::vector<double>& etas = config.eta;
  const std::size_t e_max = static_cast<std::size_t>(std::max_element(etas.begin(), etas.end()) - etas.begin());

  MaxModulusEngine engine;
  for (int i = 0; i < config.trials; ++i) {
    TrialRecord rec;
    rec.index = static_cast<std::uint64_t>(i);
    std::mt19937_64 rng = trial_rng(config.seed, rec.index);
    const PhaseFraction u = config.force_u_zero ? PhaseFraction(out.fraction_bits) : sample_u(rng, out.fraction_bits);
    rec.u_hex = u.hex128();
    rec.flags.assign(etas.size(), std::vector<bool>(nr, false));
    for (std::size_t j = 0; j < nr; ++j) {
      const GrowthProfile& p = out.profiles[j];
      double log_M = 0.0;
      try {
        log_M = engine.max_modulus(seq, theta, u, p.r, mo).log_M;
      } catch (const Error& e) {
        rethrow_at(e, p.r);
      }
      const auto d = try_delta(log_M, p.log_mu, p.r, h);
      rec.log_M.push_back(log_M);
      rec.delta.push_back(d ? *d : kNaN);
      for (std::size_t k = 0; k < etas.size(); ++k) rec.flags[k][j] = d && *d > etas[k];
    }
    for (std::size_t k = 0; k < etas.size(); ++k)
      rec.h_mass.push_back(exceptional_set_from_grid(grid, rec.flags[k], h).h_mass);
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t j = out.final_decade_start; j < nr; ++j)
      if (!rec.flags[e_max][j] && !std::isnan(rec.delta[j])) sup = std::max(sup, rec.delta[j]);
    rec.tail_sup = std::isinf(sup) ? kNaN : sup;
    out.trials.push_back(std::move(rec));
  }

  for (std::size_t j = 0; j < nr; ++j) {
    std::vector<double> vals;
    for (const auto& t : out.trials)
      if (!std::isnan(t.delta[j])) vals.push_back(t.delta[j]);
    RadiusAggregate a;
    a.valid = static_cast<int>(vals.size());
    a.min = vals.empty() ? kNaN : *std::min_element(vals.begin(), vals.end());
    a.max = vals.empty() ? kNaN : *std::max_element(vals.begin(), vals.end());
    a.median = quantile(vals, 0.5);
    a.p90 = quantile(vals, 0.9);
    std::vector<double> lm;
    for (const auto& t : out.trials) lm.push_back(t.log_M[j]);
    a.median_log_M = quantile(lm, 0.5);
    a.rhs_theorem1 = kNaN;
    try {
      a.rhs_theorem1 = rhs_theorem1(out.profiles[j], h, config.theorem1_delta);
      a.above_theorem1 = 0;
      for (double x : lm) a.above_theorem1 += x > a.rhs_theorem1 ? 1 : 0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDomain) throw;
    }
    out.aggregates.push_back(a);
  }

  out.max_tail_sup = -std::numeric_limits<double>::infinity();
  for (const auto& t : out.trials)
    if (!std::isnan(t.tail_sup)) out.max_tail_sup = std::max(out.max_tail_sup, t.tail_sup);
  out.ceiling_check = !(out.max_tail_sup > config.ceiling);
  if (std::isinf(out.max_tail_sup)) out.max_tail_sup = kNaN;

  out.median_check = nr >= 3;
  for (std::size_t j = nr >= 3 ? nr - 3 : 0; j < nr; ++j)
    out.median_check = out.median_check && out.aggregates[j].median <= config.median_threshold;
  out.theorem1_check = out.final_decade_start < nr;
  for (std::size_t j = out.final_decade_start; j < nr; ++j) {
    const RadiusAggregate& a = out.aggregates[j];
    out.theorem1_check = out.theorem1_check && !std::isnan(a.rhs_theorem1) && a.median_log_M <= a.rhs_theorem1;
  }
  out.trend_check = out.aggregates.back().median < out.aggregates[out.final_decade_start].median;
  out.seconds = clock.seconds();
  return out;
}

AuditResult run_bound_audit(const ExperimentConfig& config) {
  Stopwatch clock;
  config.validate();
  AuditResult out;
  out.config = config;
  const CoefficientSequence seq = config.sequence.build();
  const WeightFunction h = config.weight.build();
  MaxModulusEngine engine;
  out.rows = unrotated_profiles(config, config.grid(), engine);

  std::vector<int> densities = {config.per_decade};
  for (int m : config.refinements)
    if (std::find(densities.begin(), densities.end(), m) == densities.end()) densities.push_back(m);

  for (int m : densities) {
    const auto grid = log_radius_grid(m, config.kmax);
    std::vector<GrowthProfile> rows;
    if (m == config.per_decade) {
      rows = out.rows;
    } else {
      for (Radius r : grid) {
        try {
          rows.push_back(growth_profile(seq, r, config.series_options()));
        } catch (const Error& e) {
          rethrow_at(e, r);
        }
      }
    }
    for (double eps : config.audit_eps) {
      AuditRun run;
      run.per_decade = m;
      run.eps = eps;
      run.grid = grid;
      for (const GrowthProfile& p : rows) {
        bool regime = true;
        AuditBounds b{};
        try {
          b = audit_bounds(p.log_mu, p.r, h, eps);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDomain) throw;
          regime = false;
        }
        run.in_regime.push_back(regime);
        run.viol_A.push_back(regime && p.A > 0.0 && std::log(p.A) > b.log_A_bound);
        run.viol_B2_statement.push_back(regime && p.B2 > 0.0 && std::log(p.B2) > b.log_B2_statement);
        run.viol_B2_proof.push_back(regime && p.B2 > 0.0 && std::log(p.B2) > b.log_B2_proof);
        run.viol_G.push_back(regime && p.log_G > b.log_G_bound);
      }
      run.h_A = exceptional_set_from_grid(grid, run.viol_A, h).h_mass;
      run.h_B2_statement = exceptional_set_from_grid(grid, run.viol_B2_statement, h).h_mass;
      run.h_B2_proof = exceptional_set_from_grid(grid, run.viol_B2_proof, h).h_mass;
      run.h_G = exceptional_set_from_grid(grid, run.viol_G, h).h_mass;
      out.runs.push_back(std::move(run));
    }
  }
  out.seconds = clock.seconds();
  return out;
}

namespace {

constexpr long double kTwoPiL = 6.283185307179586476925286766559005768L;

struct TrigSum {
  std::vector<long double> theta;
  std::vector<double> c;

  double operator()(double t) const {
    long double acc = 0.0L;
    for (std::size_t n = 0; n < c.size(); ++n) acc += c[n] * std::cos(std::fmod(theta[n] * t, kTwoPiL));
    return static_cast<double>(acc);
  }
};

}  // namespace

KahaneResult run_kahane_search(const PhaseSequence& theta, const std::vector<double>& coeffs, double t_lo,
                               double t_hi, int grid_n) {
  Stopwatch clock;
  if (!(t_hi > t_lo) || !std::isfinite(t_lo) || !std::isfinite(t_hi))
    throw Error(ErrorCode::kBadParam, "empty search interval");
  if (grid_n < 2) throw Error(ErrorCode::kBadParam, "grid_n must be >= 2");
  if (coeffs.empty()) throw Error(ErrorCode::kBadParam, "no coefficients");
  if (theta.size() < coeffs.size()) throw Error(ErrorCode::kPhasesTooShort, "fewer phases than coefficients");
  TrigSum q;
  double sum_c = 0.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    if (!(coeffs[n] >= 0.0)) throw Error(ErrorCode::kBadParam, "coefficients must be nonnegative");
    if (theta.bit_length(n) > 53) throw Error(ErrorCode::kBadParam, "theta_n must stay below 2^53");
    q.theta.push_back(static_cast<long double>(theta.theta(n).get_d()));
    q.c.push_back(coeffs[n]);
    sum_c += coeffs[n];
  }
  if (!(sum_c > 0.0)) throw Error(ErrorCode::kBadParam, "coefficients sum to zero");

  const double step = (t_hi - t_lo) / (grid_n - 1);
  auto at = [&](int j) { return j == grid_n - 1 ? t_hi : t_lo + step * j; };
  std::vector<double> v(grid_n);
  for (int j = 0; j < grid_n; ++j) v[j] = q(at(j));

  // top 5 local maxima, ties towards smaller t
  std::vector<int> cand;
  for (int j = 0; j < grid_n; ++j) {
    const bool left = j == 0 || v[j] >= v[j - 1];
    const bool right = j == grid_n - 1 || v[j] >= v[j + 1];
    if (left && right) cand.push_back(j);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return v[a] > v[b]; });
  if (cand.size() > 5) cand.resize(5);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double best = -std::numeric_limits<double>::infinity();
  double best_t = t_lo;
  for (int j : cand) {
    double a = at(std::max(j - 1, 0)), b = at(std::min(j + 1, grid_n - 1));
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = q(x1), f2 = q(x2);
    const double tol = 1e-14 * std::max(1.0, std::fabs(at(j)));
    while (b - a > tol) {
      if (f1 >= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = q(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = q(x2);
      }
    }
    double t = 0.5 * (a + b);
    double val = q(t);
    if (!(val > v[j])) {
      t = at(j);
      val = v[j];
    }
    if (val > best || (val == best && t < best_t)) {
      best = val;
      best_t = t;
    }
  }
  KahaneResult out;
  out.t0 = best_t;
  out.re_q = best;
  out.sum_c = sum_c;
  out.ratio = best / sum_c;
  out.terms = coeffs.size();
  out.t_lo = t_lo;
  out.t_hi = t_hi;
  out.grid_n = grid_n;
  const int stride = std::max(1, grid_n / 2048);
  for (int j = 0; j < grid_n; j += stride) {
    out.curve_t.push_back(at(j));
    out.curve_ratio.push_back(v[j] / sum_c);
  }
  out.seconds = clock.seconds();
  return out;
}

KahaneResult run_kahane(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> coeffs = config.coeffs;
  if (coeffs.empty()) coeffs.assign(config.kahane_terms, 1.0);
  const PhaseSequence theta = config.phases.build(coeffs.size() - 1);
  return run_kahane_search(theta, coeffs, config.t_lo, config.t_hi, config.grid_n);
}

}  // namespace wvlab
