#include "wvlab/series.hpp"

#include <algorithm>
#include <cmath>

#include "wvlab/numeric.hpp"

namespace wvlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

CoefficientSequence CoefficientSequence::geometric() { return {Kind::kGeometric, "GEOMETRIC"}; }

CoefficientSequence CoefficientSequence::sqrt_exp() { return {Kind::kSqrtExp, "SQRT_EXP"}; }

CoefficientSequence CoefficientSequence::power_exp(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::kBadParam, "POWER_EXP needs eps in (0, 1)");
  // n^{1/2} through sqrt keeps POWER_EXP(0.5) bit-identical to SQRT_EXP
  if (eps == 0.5) {
    CoefficientSequence seq(Kind::kSqrtExp, "POWER_EXP(0.5)");
    seq.eps_ = eps;
    return seq;
  }
  CoefficientSequence seq(Kind::kPowerExp, "POWER_EXP(" + std::to_string(eps) + ")");
  seq.eps_ = eps;
  return seq;
}

CoefficientSequence CoefficientSequence::table(const std::vector<double>& moduli, std::vector<double> args) {
  if (moduli.empty()) throw Error(ErrorCode::kBadParam, "TABLE needs at least one coefficient");
  if (!args.empty() && args.size() != moduli.size())
    throw Error(ErrorCode::kBadParam, "TABLE args must match the number of moduli");
  auto table = std::make_shared<Table>();
  table->log_moduli.reserve(moduli.size());
  for (double m : moduli) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw Error(ErrorCode::kBadParam, "TABLE moduli must be finite and >= 0");
    table->log_moduli.push_back(m > 0.0 ? std::log(m) : kNegInf);
  }
  table->args = std::move(args);
  CoefficientSequence seq(Kind::kTable, "TABLE[" + std::to_string(moduli.size()) + "]");
  seq.table_ = std::move(table);
  return seq;
}

CoefficientSequence CoefficientSequence::custom(std::string label, std::function<double(std::uint64_t)> log_coeff,
                                                bool log_concave) {
  if (!log_coeff) throw Error(ErrorCode::kBadParam, "custom sequence needs a log-coefficient function");
  CoefficientSequence seq(Kind::kCustom, std::move(label));
  seq.custom_ = std::move(log_coeff);
  seq.custom_concave_ = log_concave;
  return seq;
}

bool CoefficientSequence::has_args() const {
  if (!table_) return false;
  return std::any_of(table_->args.begin(), table_->args.end(), [](double a) { return a != 0.0; });
}

std::optional<std::uint64_t> CoefficientSequence::length() const {
  if (kind_ == Kind::kTable) return table_->log_moduli.size();
  return std::nullopt;
}

bool CoefficientSequence::log_concave() const {
  switch (kind_) {
    case Kind::kGeometric:
    case Kind::kSqrtExp:
    case Kind::kPowerExp: return true;
    case Kind::kTable: return false;
    case Kind::kCustom: return custom_concave_;
  }
  return false;
}

namespace {

void check_radius(Radius r) {
  if (!(r.s() < 1.0)) throw Error(ErrorCode::kBadParam, "radius must satisfy 0 < r < 1");
}

TermScan scan_table(const CoefficientSequence& seq, double lr, double margin) {
  const std::uint64_t len = *seq.length();
  std::vector<double> t(len);
  TermScan scan;
  scan.log_mu = kNegInf;
  for (std::uint64_t n = 0; n < len; ++n) {
    const double lc = seq.log_coeff(n);
    t[n] = lc == kNegInf ? kNegInf : lc + static_cast<double>(n) * lr;
    if (t[n] > scan.log_mu) {
      scan.log_mu = t[n];
      scan.nu = n;
    }
  }
  if (scan.log_mu == kNegInf) throw Error(ErrorCode::kBadParam, "TABLE describes the zero series");
  const double cut = scan.log_mu - margin;

  // suffix[n] = max_{k >= n} t_k
  std::vector<double> suffix(len + 1, kNegInf);
  for (std::uint64_t n = len; n-- > 0;) suffix[n] = std::max(suffix[n + 1], t[n]);

  scan.trunc_n = len - 1;
  for (std::uint64_t n = scan.nu + 1; n < len; ++n) {
    const bool decaying = t[n] == kNegInf || t[n] < t[n - 1];
    if (t[n] < cut && decaying && suffix[n + 1] < cut) {
      scan.trunc_n = n;
      break;
    }
  }
  double tail = kNegInf;
  for (std::uint64_t n = scan.trunc_n + 1; n < len; ++n) tail = log_add_exp(tail, t[n] - scan.log_mu);
  scan.tail_log_bound = tail;
  scan.tail_certified = true;
  scan.window_lo = 0;
  while (t[scan.window_lo] < cut) ++scan.window_lo;
  return scan;
}

}  // namespace

TermScan scan_terms(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts) {
  check_radius(r);
  if (!(opts.margin_nats > 0.0)) throw Error(ErrorCode::kBadParam, "truncation margin must be positive");
  const double lr = r.log_r();
  if (seq.length()) return scan_table(seq, lr, opts.margin_nats);

  auto term = [&](std::uint64_t n) {
    const double lc = seq.log_coeff(n);
    return lc == kNegInf ? kNegInf : lc + static_cast<double>(n) * lr;
  };
  const bool concave = seq.log_concave();

  TermScan scan;
  scan.log_mu = kNegInf;
  double prev = kNegInf;
  for (std::uint64_t n = 0;; ++n) {
    if (n > opts.n_cap)
      throw Error(ErrorCode::kNonAnalytic, "terms of " + seq.label() + " have not decayed by n_cap = " +
                                               std::to_string(opts.n_cap) + " at s = " + std::to_string(r.s()));
    const double t = term(n);
    if (t > scan.log_mu) {
      scan.log_mu = t;
      scan.nu = n;
    }
    const double cut = scan.log_mu - opts.margin_nats;
    const bool decaying = t == kNegInf || t < prev;
    if (n > scan.nu && t < cut && decaying) {
      bool accepted = true;
      if (!concave) {
        for (std::uint64_t step = 1; accepted; step *= 2) {
          const std::uint64_t k = n + step > opts.n_cap ? opts.n_cap : n + step;
          if (term(k) >= cut) accepted = false;
          if (k == opts.n_cap) break;
        }
      }
      if (accepted) {
        scan.trunc_n = n;
        break;
      }
    }
    prev = t;
  }
  if (scan.log_mu == kNegInf) throw Error(ErrorCode::kBadParam, seq.label() + " is the zero series");

  const double t_n = term(scan.trunc_n);
  const double t_next = term(scan.trunc_n + 1);
  if (t_next == kNegInf) {
    scan.tail_log_bound = kNegInf;
  } else {
    const double log_ratio = t_next - t_n;
    scan.tail_log_bound = log_ratio < 0.0 ? t_next - scan.log_mu - std::log(-std::expm1(log_ratio))
                                          : std::numeric_limits<double>::infinity();
  }
  scan.tail_certified = concave;

  const double cut = scan.log_mu - opts.margin_nats;
  if (concave) {
    // increasing up to nu, so the first index within the margin is found by bisection
    std::uint64_t lo = 0, hi = scan.nu;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (term(mid) >= cut)
        hi = mid;
      else
        lo = mid + 1;
    }
    scan.window_lo = lo;
  } else {
    scan.window_lo = 0;
    while (term(scan.window_lo) < cut) ++scan.window_lo;
  }
  return scan;
}

MaxTerm max_term(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts) {
  const TermScan scan = scan_terms(seq, r, opts);
  return {scan.log_mu, scan.nu};
}

std::uint64_t truncation_index(const CoefficientSequence& seq, Radius r, double margin_nats, std::uint64_t n_cap) {
  return scan_terms(seq, r, SeriesOptions{margin_nats, n_cap}).trunc_n;
}

namespace {

struct Sums {
  double sum_g;   // sum of |a_n| r^n / mu
  double sum_s;   // sum of (|a_n| r^n / mu)^2
  double sum_d;   // sum of (n - nu) w_n
  double sum_d2;  // sum of (n - nu)^2 w_n
};

Sums accumulate(const CoefficientSequence& seq, Radius r, const TermScan& scan) {
  const double lr = r.log_r();
  CompensatedSum g, s, d1, d2;
  const double nu = static_cast<double>(scan.nu);
  for (std::uint64_t n = 0; n <= scan.trunc_n; ++n) {
    const double lc = seq.log_coeff(n);
    if (lc == kNegInf) continue;
    const double rel = lc + static_cast<double>(n) * lr - scan.log_mu;
    const double w = std::exp(rel);
    if (w == 0.0) continue;
    const double d = static_cast<double>(n) - nu;
    g.add(w);
    s.add(std::exp(2.0 * rel));
    d1.add(d * w);
    d2.add(d * d * w);
  }
  return {g.value(), s.value(), d1.value(), d2.value()};
}

Moments moments_from(const Sums& sums, const TermScan& scan) {
  const double mean_shift = sums.sum_d / sums.sum_g;
  double b2 = sums.sum_d2 / sums.sum_g - mean_shift * mean_shift;
  if (b2 < 0.0) {
    if (b2 < -1e-12) throw Error(ErrorCode::kNumeric, "negative variance " + std::to_string(b2));
    b2 = 0.0;
  }
  double a = static_cast<double>(scan.nu) + mean_shift;
  if (a < 0.0) a = 0.0;
  return {a, b2};
}

}  // namespace

double log_G(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts) {
  const TermScan scan = scan_terms(seq, r, opts);
  return scan.log_mu + std::log(accumulate(seq, r, scan).sum_g);
}

double log_S(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts) {
  const TermScan scan = scan_terms(seq, r, opts);
  return scan.log_mu + 0.5 * std::log(accumulate(seq, r, scan).sum_s);
}

Moments moments_AB(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts) {
  const TermScan scan = scan_terms(seq, r, opts);
  return moments_from(accumulate(seq, r, scan), scan);
}

GrowthProfile growth_profile(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts) {
  const TermScan scan = scan_terms(seq, r, opts);
  const Sums sums = accumulate(seq, r, scan);
  const Moments m = moments_from(sums, scan);
  GrowthProfile p;
  p.r = r;
  p.log_mu = scan.log_mu;
  p.nu = scan.nu;
  p.log_G = scan.log_mu + std::log(sums.sum_g);
  p.log_S = scan.log_mu + 0.5 * std::log(sums.sum_s);
  p.A = m.A;
  p.B2 = m.B2;
  p.trunc_n = scan.trunc_n;
  p.tail_log_bound = scan.tail_log_bound;
  return p;
}

bool looks_analytic(const CoefficientSequence& seq, Radius r, std::uint64_t n_cap) {
  check_radius(r);
  const double lr = r.log_r();
  double best = kNegInf;
  double last = kNegInf;
  for (std::uint64_t n = 0; n <= n_cap; n = n == 0 ? 1 : n * 2) {
    const double lc = seq.log_coeff(n);
    last = lc == kNegInf ? kNegInf : lc + static_cast<double>(n) * lr;
    best = std::max(best, last);
    if (n > n_cap / 2) break;
  }
  const double at_cap = seq.log_coeff(n_cap) + static_cast<double>(n_cap) * lr;
  return at_cap < best || at_cap == kNegInf;
}

}  // namespace wvlab
