#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wvlab/radius.hpp"
#include "wvlab/series.hpp"

namespace wvlab {

// A weight h: positive, continuous and increasing on (0,1) with a divergent
// integral towards 1.  Everything is expressed through s = 1 - r.
class WeightFunction {
 public:
  // h(r) = 1 / (1 - r); its h-measure is the logarithmic measure
  static WeightFunction log_measure();
  // h(r) = (1 - r)^(-p), p >= 1
  static WeightFunction power(double p);
  // user supplied ln h; the h-measure falls back to quadrature
  static WeightFunction custom(std::string label, std::function<double(Radius)> log_h);

  double log_eval(Radius r) const { return log_h_(r); }
  double eval(Radius r) const { return std::exp(log_h_(r)); }
  bool has_antiderivative() const { return static_cast<bool>(antiderivative_); }
  // H with H' = h, only when has_antiderivative()
  double antiderivative(Radius r) const { return antiderivative_(r); }
  const std::string& label() const { return label_; }

  // true when ln h is strictly increasing along the (increasing in r) sample
  bool increasing_on(const std::vector<Radius>& sample) const;
  // h-measure of (0, 1 - 10^-k), k = 1..kmax: for members of H these grow without bound
  std::vector<double> cumulative_mass(int kmax) const;

 private:
  std::string label_;
  std::function<double(Radius)> log_h_;
  std::function<double(Radius)> antiderivative_;
};

// Open interval (lo, hi) of radii, lo < hi.
struct Interval {
  Radius lo;
  Radius hi;
};

double h_measure(const Interval& interval, const WeightFunction& h);

struct ExceptionalSet {
  std::vector<Interval> intervals;  // disjoint, sorted by radius
  double h_mass = 0.0;
  // the last grid point is flagged, so the set may continue towards r = 1
  bool open_at_boundary = false;

  bool contains(Radius r) const;
  // (a, b) is inside one of the intervals
  bool covers(Radius a, Radius b) const;
};

// Closed-form or quadrature h-measure of a union of disjoint intervals.
double h_measure(const std::vector<Interval>& intervals, const WeightFunction& h);

ExceptionalSet make_exceptional_set(std::vector<Interval> intervals, const WeightFunction& h);

// Grid-resolved set: each flagged grid radius contributes its cell, bounded by
// the geometric midpoints in s of its neighbours.  grid must be increasing in r.
ExceptionalSet exceptional_set_from_grid(const std::vector<Radius>& grid, const std::vector<bool>& flags,
                                         const WeightFunction& h);

// (log_M - log_mu) / (2 ln h + ln ln(h mu))
double delta_h(double log_M, double log_mu, Radius r, const WeightFunction& h);

// Delta_h(r) > eta; the profile must carry log_M
bool exceptional_flag(const GrowthProfile& profile, double eta, const WeightFunction& h);

// Radii r_1 <= ... <= r_n outside E with ln k(r_n) >= n/2 and k(r_{n+1}) <= e k(r_n)
// unless (r_n, r_{n+1}) lies in E.  log_k is ln k, increasing to +inf.
std::vector<Radius> lemma2_sequence(const std::function<double(Radius)>& log_k, const ExceptionalSet& e,
                                    int n_max);

struct Lemma2Check {
  bool outside_set = true;
  bool growth = true;
  bool jumps = true;
  bool monotone = true;
  std::string detail;
  bool ok() const { return outside_set && growth && jumps && monotone; }
};
Lemma2Check verify_lemma2(const std::vector<Radius>& seq, const std::function<double(Radius)>& log_k,
                          const ExceptionalSet& e);

// ln of mu sqrt(h) ln^{1/4}(h mu) ln^{3/4+delta} h (ln ln(h mu))^{1+delta}
double rhs_theorem1(const GrowthProfile& profile, const WeightFunction& h, double delta);

// ln of the right-hand side of the generalized-gap bound with v(x) = x^v_alpha and phi(x) = x^phi_delta
double rhs_theorem2(const GrowthProfile& profile, const WeightFunction& h, double v_alpha, double phi_delta,
                    double eps);

struct CorollaryBounds {
  double c2_bound;
  double c3_bound;
  double c2_alpha;
  double c3_alpha;
  bool c2_valid;  // delta < 1/2
  bool c3_valid;  // delta < 1
  // the competing constant (1 + 2 delta) / (4 + 3 delta), reported alongside
  double abstract_bound;
};
CorollaryBounds corollary_bounds(double delta);

// Logarithmic right-hand sides used by the bound audit; lh = ln h, L = ln(h mu).
struct AuditBounds {
  double log_A_bound;
  double log_B2_statement;  // h^{2+e} ln(h mu) ln_2^{2+e}(h mu)
  double log_B2_proof;      // h^{2+e} ln^{1+e}(h mu)
  double log_G_bound;
};
// requires ln_2(h mu) > 1
AuditBounds audit_bounds(double log_mu, Radius r, const WeightFunction& h, double eps);

}  // namespace wvlab
