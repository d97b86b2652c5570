#pragma once

#include <cmath>
#include <vector>

#include "wvlab/error.hpp"

namespace wvlab {

// A radius r in [0, 1) stored through its distance to the boundary s = 1 - r,
// so radii such as 1 - 1e-12 keep full relative precision.
class Radius {
 public:
  static Radius from_s(double s) {
    if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::kBadParam, "radius needs s = 1 - r in (0, 1]");
    return Radius(s);
  }
  static Radius from_r(double r) { return from_s(1.0 - r); }
  // x = ln r < 0
  static Radius from_log_r(double x) {
    if (!(x < 0.0)) throw Error(ErrorCode::kBadParam, "ln r must be negative");
    return from_s(-std::expm1(x));
  }

  double s() const { return s_; }
  double r() const { return 1.0 - s_; }
  double log_r() const { return std::log1p(-s_); }
  // ln(1/s) = ln(1/(1 - r)), the natural abscissa for every plot
  double log_inv_s() const { return -std::log(s_); }

  friend bool operator==(Radius a, Radius b) { return a.s_ == b.s_; }

 private:
  explicit Radius(double s) : s_(s) {}
  double s_;
};

// r_j = 1 - 10^{-j/m}, j = 1 .. m * kmax (increasing r).
inline std::vector<Radius> log_radius_grid(int per_decade, int kmax) {
  if (per_decade < 1 || kmax < 1) throw Error(ErrorCode::kBadParam, "grid needs m >= 1 and kmax >= 1");
  std::vector<Radius> grid;
  grid.reserve(static_cast<std::size_t>(per_decade) * kmax);
  for (int j = 1; j <= per_decade * kmax; ++j)
    grid.push_back(Radius::from_s(std::pow(10.0, -static_cast<double>(j) / per_decade)));
  return grid;
}

}  // namespace wvlab
