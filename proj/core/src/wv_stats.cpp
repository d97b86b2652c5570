#include "wvlab/wv_stats.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "wvlab/error.hpp"
#include "wvlab/numeric.hpp"

namespace wvlab {

WeightFunction WeightFunction::log_measure() {
  WeightFunction h;
  h.label_ = "LOG_MEASURE";
  h.log_h_ = [](Radius r) { return r.log_inv_s(); };
  h.antiderivative_ = [](Radius r) { return r.log_inv_s(); };
  return h;
}

WeightFunction WeightFunction::power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::kBadParam, "power weight needs p >= 1");
  if (p == 1.0) return log_measure();
  WeightFunction h;
  h.label_ = "POWER(" + std::to_string(p) + ")";
  h.log_h_ = [p](Radius r) { return p * r.log_inv_s(); };
  h.antiderivative_ = [p](Radius r) { return std::pow(r.s(), 1.0 - p) / (p - 1.0); };
  return h;
}

WeightFunction WeightFunction::custom(std::string label, std::function<double(Radius)> log_h) {
  if (!log_h) throw Error(ErrorCode::kBadParam, "custom weight needs ln h");
  WeightFunction h;
  h.label_ = std::move(label);
  h.log_h_ = std::move(log_h);
  return h;
}

bool WeightFunction::increasing_on(const std::vector<Radius>& sample) const {
  for (std::size_t i = 1; i < sample.size(); ++i)
    if (!(log_eval(sample[i]) > log_eval(sample[i - 1]))) return false;
  return true;
}

std::vector<double> WeightFunction::cumulative_mass(int kmax) const {
  std::vector<double> out;
  for (int k = 1; k <= kmax; ++k)
    out.push_back(h_measure(Interval{Radius::from_s(1.0), Radius::from_s(std::pow(10.0, -k))}, *this));
  return out;
}

double h_measure(const Interval& interval, const WeightFunction& h) {
  if (!(interval.hi.s() < interval.lo.s())) {
    if (interval.hi.s() == interval.lo.s()) return 0.0;
    throw Error(ErrorCode::kBadParam, "interval endpoints out of order");
  }
  if (h.has_antiderivative()) return h.antiderivative(interval.hi) - h.antiderivative(interval.lo);
  // x = -ln(1 - r), dr = e^{-x} dx
  auto f = [&h](double x) { return std::exp(h.log_eval(Radius::from_s(std::exp(-x))) - x); };
  const double a = interval.lo.log_inv_s();
  const double b = interval.hi.log_inv_s();
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-8, &err);
  if (!std::isfinite(value) || err > 1e-8 * std::fabs(value) + 1e-300)
    throw Error(ErrorCode::kNumeric, "h-measure quadrature did not converge (error estimate " +
                                         std::to_string(err) + ")");
  return value;
}

double h_measure(const std::vector<Interval>& intervals, const WeightFunction& h) {
  CompensatedSum sum;
  for (const Interval& iv : intervals) sum.add(h_measure(iv, h));
  return sum.value();
}

bool ExceptionalSet::contains(Radius r) const {
  for (const Interval& iv : intervals)
    if (iv.hi.s() < r.s() && r.s() < iv.lo.s()) return true;
  return false;
}

bool ExceptionalSet::covers(Radius a, Radius b) const {
  if (a.s() == b.s()) return true;
  for (const Interval& iv : intervals)
    if (iv.lo.s() >= a.s() && b.s() >= iv.hi.s()) return true;
  return false;
}

ExceptionalSet make_exceptional_set(std::vector<Interval> intervals, const WeightFunction& h) {
  for (const Interval& iv : intervals)
    if (!(iv.hi.s() < iv.lo.s())) throw Error(ErrorCode::kBadParam, "exceptional intervals need lo < hi");
  std::sort(intervals.begin(), intervals.end(), [](const Interval& x, const Interval& y) { return x.lo.s() > y.lo.s(); });
  for (std::size_t i = 1; i < intervals.size(); ++i)
    if (intervals[i].lo.s() > intervals[i - 1].hi.s())
      throw Error(ErrorCode::kBadParam, "exceptional intervals overlap");
  ExceptionalSet e;
  e.intervals = std::move(intervals);
  e.h_mass = h_measure(e.intervals, h);
  return e;
}

ExceptionalSet exceptional_set_from_grid(const std::vector<Radius>& grid, const std::vector<bool>& flags,
                                         const WeightFunction& h) {
  if (grid.size() != flags.size()) throw Error(ErrorCode::kBadParam, "one flag per grid radius expected");
  const std::size_t n = grid.size();
  for (std::size_t j = 1; j < n; ++j)
    if (!(grid[j].s() < grid[j - 1].s())) throw Error(ErrorCode::kBadParam, "grid must be increasing in r");
  ExceptionalSet e;
  if (n == 0) return e;
  // cell edges in s: geometric midpoints, the outer ones mirrored
  const double first_ratio = n > 1 ? grid[0].s() / grid[1].s() : std::pow(10.0, 0.125);
  const double last_ratio = n > 1 ? grid[n - 2].s() / grid[n - 1].s() : first_ratio;
  auto left_edge = [&](std::size_t j) {
    return j == 0 ? std::min(1.0, grid[0].s() * std::sqrt(first_ratio)) : std::sqrt(grid[j - 1].s() * grid[j].s());
  };
  auto right_edge = [&](std::size_t j) {
    return j + 1 == n ? grid[j].s() / std::sqrt(last_ratio) : std::sqrt(grid[j].s() * grid[j + 1].s());
  };
  std::vector<Interval> intervals;
  for (std::size_t j = 0; j < n;) {
    if (!flags[j]) {
      ++j;
      continue;
    }
    std::size_t k = j;
    while (k + 1 < n && flags[k + 1]) ++k;
    intervals.push_back(Interval{Radius::from_s(left_edge(j)), Radius::from_s(right_edge(k))});
    j = k + 1;
  }
  e.intervals = std::move(intervals);
  e.h_mass = h_measure(e.intervals, h);
  e.open_at_boundary = flags.back();
  return e;
}

double delta_h(double log_M, double log_mu, Radius r, const WeightFunction& h) {
  const double lh = h.log_eval(r);
  const double l = lh + log_mu;  // ln(h mu)
  if (!(l > 0.0)) throw Error(ErrorCode::kDomain, "ln(h mu) <= 0 at s = " + std::to_string(r.s()));
  const double den = 2.0 * lh + std::log(l);
  if (!(den > 0.0)) throw Error(ErrorCode::kDomain, "Delta_h denominator <= 0 at s = " + std::to_string(r.s()));
  return (log_M - log_mu) / den;
}

bool exceptional_flag(const GrowthProfile& profile, double eta, const WeightFunction& h) {
  if (!profile.log_M) throw Error(ErrorCode::kBadParam, "profile has no maximum modulus");
  return delta_h(*profile.log_M, profile.log_mu, profile.r, h) > eta;
}

namespace {

// smallest-s side of the bracket where ln k(r) = target, found by bisection in ln s
Radius solve_log_k(const std::function<double(Radius)>& log_k, double target) {
  double s_hi = 1.0;  // ln k(s_hi) < target
  if (log_k(Radius::from_s(s_hi)) >= target) return Radius::from_s(s_hi);
  double s_lo = 0.5;  // ln k(s_lo) >= target
  while (log_k(Radius::from_s(s_lo)) < target) {
    s_hi = s_lo;
    s_lo = s_lo * s_lo;
    if (s_lo < 1e-300) throw Error(ErrorCode::kExhausted, "ln k stays below " + std::to_string(target));
  }
  for (int it = 0; it < 400 && s_hi - s_lo > 1e-15 * s_lo; ++it) {
    const double mid = std::sqrt(s_lo) * std::sqrt(s_hi);
    if (!(mid > s_lo && mid < s_hi)) break;
    if (log_k(Radius::from_s(mid)) >= target)
      s_lo = mid;
    else
      s_hi = mid;
  }
  return Radius::from_s(s_lo);
}

const Interval* interval_containing(const ExceptionalSet& e, Radius r) {
  for (const Interval& iv : e.intervals)
    if (iv.hi.s() < r.s() && r.s() < iv.lo.s()) return &iv;
  return nullptr;
}

}  // namespace

std::vector<Radius> lemma2_sequence(const std::function<double(Radius)>& log_k, const ExceptionalSet& e, int n_max) {
  if (n_max < 1) throw Error(ErrorCode::kBadParam, "lemma2_sequence needs n_max >= 1");
  double prev_value = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= 40; ++j) {
    const double v = log_k(Radius::from_s(std::pow(10.0, -j / 4.0)));
    if (!std::isfinite(v) || v < prev_value) throw Error(ErrorCode::kBadParam, "k must be finite and increasing");
    prev_value = v;
  }

  std::vector<Radius> seq;
  for (int n = 1; n <= n_max; ++n) {
    Radius c = solve_log_k(log_k, 0.5 * n);
    if (!seq.empty() && seq.back().s() < c.s()) c = seq.back();
    const Interval* iv = interval_containing(e, c);
    if (!iv) {
      seq.push_back(c);
      continue;
    }
    if (e.open_at_boundary && iv == &e.intervals.back())
      throw Error(ErrorCode::kExhausted, "exceptional set reaches the end of the grid at n = " + std::to_string(n));
    if (seq.empty() || seq.back() == iv->lo || log_k(iv->hi) <= 1.0 + log_k(seq.back())) {
      seq.push_back(iv->hi);
    } else if (log_k(iv->lo) >= 0.5 * n) {
      seq.push_back(iv->lo);
    } else {
      // r_{n-1} moves to the left end, so (r_{n-1}, r_n) lies inside E
      seq.back() = iv->lo;
      seq.push_back(iv->hi);
    }
  }
  const Lemma2Check check = verify_lemma2(seq, log_k, e);
  if (!check.ok()) throw Error(ErrorCode::kNumeric, "lemma2 sequence failed re-verification: " + check.detail);
  return seq;
}

Lemma2Check verify_lemma2(const std::vector<Radius>& seq, const std::function<double(Radius)>& log_k,
                          const ExceptionalSet& e) {
  Lemma2Check check;
  auto note = [&check](const std::string& msg) {
    if (check.detail.empty()) check.detail = msg;
  };
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (e.contains(seq[i])) {
      check.outside_set = false;
      note("r_" + std::to_string(n) + " lies in E");
    }
    if (!(log_k(seq[i]) >= 0.5 * n)) {
      check.growth = false;
      note("ln k(r_" + std::to_string(n) + ") < n/2");
    }
    if (i + 1 < seq.size()) {
      if (seq[i + 1].s() > seq[i].s()) {
        check.monotone = false;
        note("r_" + std::to_string(n + 1) + " < r_" + std::to_string(n));
      }
      if (!e.covers(seq[i], seq[i + 1]) && !(log_k(seq[i + 1]) <= 1.0 + log_k(seq[i]))) {
        check.jumps = false;
        note("k(r_" + std::to_string(n + 1) + ") > e k(r_" + std::to_string(n) + ")");
      }
    }
  }
  return check;
}

double rhs_theorem1(const GrowthProfile& profile, const WeightFunction& h, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::kBadParam, "delta must be positive");
  const double lh = h.log_eval(profile.r);
  const double l = lh + profile.log_mu;
  if (!(lh > 1.0) || !(l > 1.0))
    throw Error(ErrorCode::kDomain, "needs ln h > 1 and ln ln(h mu) > 0 at s = " + std::to_string(profile.r.s()));
  return profile.log_mu + 0.5 * lh + 0.25 * std::log(l) + (0.75 + delta) * std::log(lh) +
         (1.0 + delta) * std::log(std::log(l));
}

double rhs_theorem2(const GrowthProfile& profile, const WeightFunction& h, double v_alpha, double phi_delta,
                    double eps) {
  if (v_alpha > 0.25) throw Error(ErrorCode::kBadParam, "v must have growth order <= 1/4");
  if (v_alpha < 0.0 || phi_delta < 0.0 || !(eps > 0.0))
    throw Error(ErrorCode::kBadParam, "v_alpha, phi_delta >= 0 and eps > 0 required");
  const double lh = h.log_eval(profile.r);
  const double l = lh + profile.log_mu;
  if (!(lh > 0.0) || !(l > 1.0) || !(lh * l > 1.0))
    throw Error(ErrorCode::kDomain, "logarithms undefined at s = " + std::to_string(profile.r.s()));
  const double ll = std::log(l);
  const double prefix = 0.5 * (lh + std::log(lh)) + profile.log_mu + 0.25 * std::log(l) +
                        (1.0 + eps) * std::log(std::log(lh) + std::log(l));
  const double v_term = v_alpha * (std::log(8.0) + 2.0 * lh + std::log(l));
  // ln of the phi argument; v is evaluated at h ln(h mu) as printed
  const double phi_arg = 1.5 * lh + 1.25 * std::log(l) + (1.0 + eps) * std::log(ll) - v_alpha * (lh + std::log(l));
  const double phi_term = 0.5 * phi_delta * phi_arg;
  return prefix + log_add_exp(v_term, phi_term);
}

CorollaryBounds corollary_bounds(double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::kBadParam, "delta must be >= 0");
  CorollaryBounds b;
  b.c2_bound = (1.0 + 3.0 * delta) / (4.0 + 2.0 * delta);
  b.c3_bound = (1.0 + 2.0 * delta) / (4.0 + 2.0 * delta);
  b.c2_alpha = 5.0 * delta / (4.0 * (2.0 + delta));
  b.c3_alpha = 3.0 * delta / (4.0 * (2.0 + delta));
  b.c2_valid = delta < 0.5;
  b.c3_valid = delta < 1.0;
  b.abstract_bound = (1.0 + 2.0 * delta) / (4.0 + 3.0 * delta);
  return b;
}

AuditBounds audit_bounds(double log_mu, Radius r, const WeightFunction& h, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kBadParam, "eps must be positive");
  const double lh = h.log_eval(r);
  const double l = lh + log_mu;
  if (!(l > 1.0) || !(std::log(l) > 1.0) || !(lh > 0.0))
    throw Error(ErrorCode::kDomain, "ln_2(h mu) <= 1 at s = " + std::to_string(r.s()));
  const double ll = std::log(l);
  AuditBounds b;
  b.log_A_bound = lh + ll + (1.0 + eps) * std::log(ll);
  b.log_B2_statement = (2.0 + eps) * lh + ll + (2.0 + eps) * std::log(ll);
  b.log_B2_proof = (2.0 + eps) * lh + (1.0 + eps) * ll;
  b.log_G_bound = log_mu + lh + 0.5 * ll + (0.5 + eps) * std::log(lh) + (1.0 + eps) * std::log(ll);
  return b;
}

}  // namespace wvlab
