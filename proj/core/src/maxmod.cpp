#include "wvlab/maxmod.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "wvlab/error.hpp"
#include "wvlab/numeric.hpp"

namespace wvlab {

namespace {

using cd = std::complex<double>;

// e^{2 pi i a / n}, 0 <= a < n
cd unit_root(std::uint64_t a, std::uint64_t n) {
  const double angle = kTwoPi * (static_cast<double>(a) / static_cast<double>(n));
  return {std::cos(angle), std::sin(angle)};
}

__extension__ typedef unsigned __int128 u128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % n);
}

// Streams e^{2 pi i k g / n} for k = 0, 1, ... with one complex product per
// step; the angle is reduced exactly in integers every kBlock steps.
class Phasor {
 public:
  static constexpr std::size_t kBlock = 64;

  Phasor(std::uint64_t g, std::uint64_t n) : g_(g % n), n_(n) {
    for (std::size_t l = 0; l < kBlock; ++l)
      table_[l] = unit_root(mulmod(l, g_, n_), n_);
  }
  cd block_base(std::uint64_t k0) const {
    return unit_root(mulmod(k0, g_, n_), n_);
  }
  const cd& table(std::size_t l) const { return table_[l]; }

 private:
  std::uint64_t g_, n_;
  std::array<cd, kBlock> table_;
};

constexpr std::size_t kMoments = 20;

// Local expansion p(psi0 + d) = e^{i kc d} sum_j m_j (i hw d)^j, with m_j already divided by j!.
struct LocalExpansion {
  std::array<cd, kMoments> m{};
  double hw = 1.0;

  double norm_at(double d) const {
    const cd z(0.0, hw * d);
    cd acc = m[kMoments - 1];
    for (std::size_t j = kMoments - 1; j-- > 0;) acc = acc * z + m[j];
    return std::norm(acc);
  }
};

LocalExpansion expand(const std::vector<cd>& c, std::uint64_t g, std::uint64_t n) {
  const std::size_t count = c.size();
  const double kc = 0.5 * static_cast<double>(count - 1);
  LocalExpansion e;
  e.hw = std::max(kc, 1.0);
  const double inv_hw = 1.0 / e.hw;
  std::array<double, kMoments> re{}, im{};
  const Phasor ph(g, n);
  for (std::size_t k0 = 0; k0 < count; k0 += Phasor::kBlock) {
    const cd base = ph.block_base(k0);
    const std::size_t end = std::min(count, k0 + Phasor::kBlock);
    for (std::size_t k = k0; k < end; ++k) {
      const cd z = c[k] * (base * ph.table(k - k0));
      const double x = (static_cast<double>(k) - kc) * inv_hw;
      double zr = z.real(), zi = z.imag();
      for (std::size_t j = 0; j < kMoments; ++j) {
        re[j] += zr;
        im[j] += zi;
        zr *= x;
        zi *= x;
      }
    }
  }
  double fact = 1.0;
  for (std::size_t j = 0; j < kMoments; ++j) {
    if (j > 0) fact *= static_cast<double>(j);
    e.m[j] = cd(re[j], im[j]) / fact;
  }
  return e;
}

struct Candidate {
  float value;  // |p|^2 on the grid
  std::uint64_t index;
};

bool better(const Candidate& a, const Candidate& b) {
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

}  // namespace

struct MaxModulusEngine::Impl {
  fftw_complex* buf = nullptr;
  std::size_t capacity = 0;
  std::size_t plan_size = 0;
  fftw_plan plan = nullptr;

  ~Impl() {
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }

  void prepare(std::size_t m) {
    if (m > capacity) {
      if (plan) fftw_destroy_plan(plan);
      plan = nullptr;
      if (buf) fftw_free(buf);
      buf = fftw_alloc_complex(m);
      if (!buf) throw Error(ErrorCode::kNumeric, "cannot allocate FFT buffer of size " + std::to_string(m));
      capacity = m;
    }
    if (!plan || plan_size != m) {
      if (plan) fftw_destroy_plan(plan);
      plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
      if (!plan) throw Error(ErrorCode::kNumeric, "FFTW planning failed");
      plan_size = m;
    }
  }

  // |p|^2 at psi = 2 pi (O q + p) / (O M), q = 0 .. M-1
  void grid_row(const std::vector<cd>& c, std::size_t m, std::uint64_t p, std::uint64_t n, std::vector<float>& row) {
    auto* z = reinterpret_cast<cd*>(buf);
    const Phasor ph(p, n);
    for (std::size_t k0 = 0; k0 < c.size(); k0 += Phasor::kBlock) {
      const cd base = ph.block_base(k0);
      const std::size_t end = std::min(c.size(), k0 + Phasor::kBlock);
      for (std::size_t k = k0; k < end; ++k) z[k] = c[k] * (base * ph.table(k - k0));
    }
    std::fill(z + c.size(), z + m, cd(0.0, 0.0));
    fftw_execute(plan);
    row.resize(m);
    for (std::size_t q = 0; q < m; ++q) row[q] = static_cast<float>(std::norm(z[q]));
  }

  MaxModulusResult run(const std::vector<cd>& c, const MaxModulusOptions& opts);
};

MaxModulusResult MaxModulusEngine::Impl::run(const std::vector<cd>& c, const MaxModulusOptions& opts) {
  const std::size_t degree = c.size() - 1;
  std::size_t m = 1;
  while (m < degree + 1) m *= 2;
  const std::uint64_t over = opts.oversample;
  const std::uint64_t n = over * m;
  prepare(m);

  std::vector<Candidate> top;  // sorted best first
  auto offer = [&](float v, std::uint64_t idx) {
    const Candidate cand{v, idx};
    if (top.size() == opts.top_k && !better(cand, top.back())) return;
    auto it = std::upper_bound(top.begin(), top.end(), cand, better);
    top.insert(it, cand);
    if (top.size() > opts.top_k) top.pop_back();
  };
  auto decide = [&](std::uint64_t p, const std::vector<float>& left, const std::vector<float>& mid,
                    const std::vector<float>& right) {
    for (std::size_t q = 0; q < m; ++q) {
      const float v = mid[q];
      const float lv = p > 0 ? left[q] : left[(q + m - 1) % m];
      const float rv = p + 1 < over ? right[q] : right[(q + 1) % m];
      if (v >= lv && v >= rv) offer(v, over * q + p);
    }
  };

  std::vector<float> row0, row1;
  std::array<std::vector<float>, 3> ring;
  for (std::uint64_t p = 0; p < over; ++p) {
    auto& row = ring[p % 3];
    grid_row(c, m, p, n, row);
    if (p == 0) row0 = row;
    if (p == 1) row1 = row;
    if (p >= 2) decide(p - 1, ring[(p - 2) % 3], ring[(p - 1) % 3], row);
  }
  decide(over - 1, ring[(over - 2) % 3], ring[(over - 1) % 3], row0);
  decide(0, ring[(over - 1) % 3], row0, row1);

  MaxModulusResult res;
  res.grid_size = n;
  res.grid_log_max = 0.5 * std::log(static_cast<double>(top.front().value));
  const double x = M_PI * static_cast<double>(degree) / static_cast<double>(n);
  res.resolution_bound = x * x / 2.0 < 1.0 ? -0.5 * std::log1p(-x * x / 2.0) : std::numeric_limits<double>::infinity();

  // a peak whose grid neighbourhood is below best - bound cannot beat the best grid value
  const double keep = res.grid_log_max - res.resolution_bound - 1e-6;
  const double h = kTwoPi / static_cast<double>(n);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double best = -1.0;
  double best_psi = 0.0;
  for (const Candidate& cand : top) {
    if (res.refined > 0 && 0.5 * std::log(static_cast<double>(cand.value)) < keep) continue;
    ++res.refined;
    const LocalExpansion e = expand(c, cand.index, n);
    double a = -h, b = h;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = e.norm_at(x1), f2 = e.norm_at(x2);
    while (b - a > opts.bracket_tol) {
      if (f1 >= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = e.norm_at(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = e.norm_at(x2);
      }
    }
    double d = 0.5 * (a + b);
    double v = e.norm_at(d);
    const double v0 = std::norm(e.m[0]);
    if (v0 > v) {
      v = v0;
      d = 0.0;
    }
    double psi = kTwoPi * (static_cast<double>(cand.index) / static_cast<double>(n)) + d;
    if (psi < 0.0) psi += kTwoPi;
    if (psi >= kTwoPi) psi -= kTwoPi;
    if (v > best || (v == best && psi < best_psi)) {
      best = v;
      best_psi = psi;
    }
  }
  res.log_M = 0.5 * std::log(best);
  res.psi_star = best_psi;
  return res;
}

MaxModulusEngine::MaxModulusEngine() : impl_(std::make_unique<Impl>()) {}
MaxModulusEngine::~MaxModulusEngine() = default;

namespace {

double weight(const CoefficientSequence& seq, std::uint64_t n, double lr, double log_mu) {
  const double lc = seq.log_coeff(n);
  if (lc == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lc + static_cast<double>(n) * lr - log_mu);
}

void check_options(const MaxModulusOptions& opts) {
  if (opts.oversample < 4) throw Error(ErrorCode::kBadParam, "grid oversampling must be at least 4");
  if (opts.top_k < 1) throw Error(ErrorCode::kBadParam, "top_k must be positive");
  if (!(opts.bracket_tol > 0.0)) throw Error(ErrorCode::kBadParam, "bracket tolerance must be positive");
}

}  // namespace

MaxModulusResult MaxModulusEngine::max_modulus(const CoefficientSequence& seq, Radius r,
                                               const MaxModulusOptions& opts) {
  check_options(opts);
  const TermScan scan = scan_terms(seq, r, opts.series);
  const double lr = r.log_r();
  MaxModulusResult res;
  res.trunc_n = scan.trunc_n;
  res.window_lo = scan.window_lo;
  res.tail_log_bound = scan.tail_log_bound;
  if (!seq.has_args()) {
    // every term is positive at psi = 0
    CompensatedSum sum;
    for (std::uint64_t k = 0; k <= scan.trunc_n; ++k) sum.add(weight(seq, k, lr, scan.log_mu));
    res.log_M = scan.log_mu + std::log(sum.value());
    res.grid_log_max = res.log_M;
    return res;
  }
  std::vector<cd> c(scan.trunc_n - scan.window_lo + 1);
  for (std::uint64_t k = scan.window_lo; k <= scan.trunc_n; ++k)
    c[k - scan.window_lo] = std::polar(weight(seq, k, lr, scan.log_mu), seq.arg(k));
  MaxModulusResult grid = impl_->run(c, opts);
  grid.log_M += scan.log_mu;
  grid.grid_log_max += scan.log_mu;
  grid.trunc_n = scan.trunc_n;
  grid.window_lo = scan.window_lo;
  grid.tail_log_bound = scan.tail_log_bound;
  return grid;
}

MaxModulusResult MaxModulusEngine::max_modulus(const CoefficientSequence& seq, const PhaseSequence& theta,
                                               const PhaseFraction& u, Radius r, const MaxModulusOptions& opts) {
  check_options(opts);
  const TermScan scan = scan_terms(seq, r, opts.series);
  if (theta.size() <= scan.trunc_n)
    throw Error(ErrorCode::kPhasesTooShort, "phase sequence has " + std::to_string(theta.size()) + " terms, " +
                                                std::to_string(scan.trunc_n + 1) + " required at s = " +
                                                std::to_string(r.s()));
  if (u.is_zero()) return max_modulus(seq, r, opts);

  const double lr = r.log_r();
  const std::vector<double> angles = phase_angles(theta, u, scan.window_lo, scan.trunc_n);
  std::vector<cd> c(angles.size());
  for (std::uint64_t k = scan.window_lo; k <= scan.trunc_n; ++k) {
    const std::size_t i = k - scan.window_lo;
    c[i] = std::polar(weight(seq, k, lr, scan.log_mu), seq.arg(k) + angles[i]);
  }
  MaxModulusResult res = impl_->run(c, opts);
  res.log_M += scan.log_mu;
  res.grid_log_max += scan.log_mu;
  res.trunc_n = scan.trunc_n;
  res.window_lo = scan.window_lo;
  res.tail_log_bound = scan.tail_log_bound;
  return res;
}

MaxModulusResult max_modulus(const CoefficientSequence& seq, const PhaseSequence& theta, const PhaseFraction& u,
                             Radius r, const MaxModulusOptions& opts) {
  MaxModulusEngine engine;
  return engine.max_modulus(seq, theta, u, r, opts);
}

MaxModulusResult max_modulus_unrotated(const CoefficientSequence& seq, Radius r, const MaxModulusOptions& opts) {
  MaxModulusEngine engine;
  return engine.max_modulus(seq, r, opts);
}

double eval_rotated(const CoefficientSequence& seq, const PhaseSequence& theta, const PhaseFraction& u, Radius r,
                    double psi, const SeriesOptions& opts) {
  const TermScan scan = scan_terms(seq, r, opts);
  if (theta.size() <= scan.trunc_n)
    throw Error(ErrorCode::kPhasesTooShort, "phase sequence has " + std::to_string(theta.size()) + " terms, " +
                                                std::to_string(scan.trunc_n + 1) + " required");
  const std::vector<double> angles = phase_angles(theta, u, 0, scan.trunc_n);
  const double lr = r.log_r();
  const long double psi_l = psi;
  constexpr long double kTwoPiL = 6.283185307179586476925286766559005768L;
  CompensatedSum re, im;
  for (std::uint64_t k = 0; k <= scan.trunc_n; ++k) {
    const double w = weight(seq, k, lr, scan.log_mu);
    if (w == 0.0) continue;
    const double turn = static_cast<double>(std::fmod(static_cast<long double>(k) * psi_l, kTwoPiL));
    const double angle = seq.arg(k) + angles[k] + turn;
    re.add(w * std::cos(angle));
    im.add(w * std::sin(angle));
  }
  return scan.log_mu + 0.5 * std::log(re.value() * re.value() + im.value() * im.value());
}

}  // namespace wvlab
