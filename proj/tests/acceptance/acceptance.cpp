// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: wvlab_acceptance [output dir]
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wvlab/config.hpp"
#include "wvlab/error.hpp"
#include "wvlab/experiments.hpp"
#include "wvlab/maxmod.hpp"
#include "wvlab/phases.hpp"
#include "wvlab/report.hpp"
#include "wvlab/series.hpp"
#include "wvlab/wv_stats.hpp"

using namespace wvlab;
namespace fs = std::filesystem;
namespace mp = boost::multiprecision;

namespace {

// ---- pinned tolerances and limits ----
constexpr double kC1LogMuTol = 1e-12;
constexpr double kC1Seconds = 5.0;
constexpr double kC2RelTol = 1e-8;
constexpr double kC2Seconds = 1.0;
constexpr double kC3Step = 1e-5;
constexpr double kC3RelTolA = 1e-5;
constexpr double kC3RelTolB2 = 1e-3;
constexpr double kC4Slack = 1e-9;
constexpr double kC5MinRatio = 0.01;
constexpr double kC5Drift = 0.10;
constexpr double kC5Seconds = 120.0;
constexpr int kC6Trials = 50;
constexpr double kC6MedianMax = 0.45;
constexpr double kC7Ceiling = 0.55;
constexpr double kC9Exact = 0.0;  // corollary constants are compared exactly
constexpr double kC10Tol = 0.05;
constexpr double kC11Drift = 0.10;
constexpr double kC12PiUlps = 1.0;
constexpr double kC12OracleTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// C1
Outcome max_term_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> len(1, 1000);
  std::lognormal_distribution<double> mod(0.0, 4.0);
  std::bernoulli_distribution zero(0.15);
  std::uniform_real_distribution<double> ls(-8.0, 0.0);
  int nu_mismatch = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> m(static_cast<std::size_t>(len(rng)));
    for (double& a : m) a = zero(rng) ? 0.0 : mod(rng);
    m[0] = std::max(m[0], 1e-6);
    const auto seq = CoefficientSequence::table(m);
    for (int k = 0; k < 20; ++k) {
      const Radius r = Radius::from_s(std::pow(10.0, ls(rng)));
      double best = -std::numeric_limits<double>::infinity();
      std::uint64_t arg = 0;
      for (std::size_t n = 0; n < m.size(); ++n) {
        if (m[n] == 0.0) continue;
        const double v = std::log(m[n]) + static_cast<double>(n) * r.log_r();
        if (v > best) best = v, arg = n;
      }
      const MaxTerm got = max_term(seq, r);
      nu_mismatch += got.nu != arg;
      worst = std::max(worst, std::fabs(got.log_mu - best));
    }
  }
  const double sec = seconds_since(t0);
  return {nu_mismatch == 0 && worst <= kC1LogMuTol && sec < kC1Seconds,
          fmt("2000 cases, nu mismatches %d, max |dlog_mu| %.3g (tol %.0e), %.2f s (limit %.0f s)", nu_mismatch,
              worst, kC1LogMuTol, sec, kC1Seconds)};
}

// C2
Outcome geometric_closed_forms() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = CoefficientSequence::geometric();
  double worst = 0.0;
  for (double r : {0.5, 0.9, 0.99}) {
    const GrowthProfile p = growth_profile(g, Radius::from_r(r));
    worst = std::max({worst, rel_err(p.log_G, -std::log(1 - r)), rel_err(p.log_S, 0.5 * std::log(1 / (1 - r * r))),
                      rel_err(p.A, r / (1 - r)), rel_err(p.B2, r / ((1 - r) * (1 - r)))});
  }
  const double sec = seconds_since(t0);
  return {worst <= kC2RelTol && sec < kC2Seconds,
          fmt("max relative error %.3g (tol %.0e), %.4f s (limit %.0f s)", worst, kC2RelTol, sec, kC2Seconds)};
}

// C3
Outcome finite_differences() {
  double worst_a = 0.0, worst_b = 0.0;
  for (const auto& seq : {CoefficientSequence::geometric(), CoefficientSequence::sqrt_exp()}) {
    for (double r : {0.5, 0.9, 0.99}) {
      const double x = std::log(r);
      const double gm = log_G(seq, Radius::from_log_r(x - kC3Step));
      const double g0 = log_G(seq, Radius::from_log_r(x));
      const double gp = log_G(seq, Radius::from_log_r(x + kC3Step));
      const Moments m = moments_AB(seq, Radius::from_log_r(x));
      worst_a = std::max(worst_a, rel_err((gp - gm) / (2 * kC3Step), m.A));
      worst_b = std::max(worst_b, rel_err((gp - 2 * g0 + gm) / (kC3Step * kC3Step), m.B2));
    }
  }
  return {worst_a <= kC3RelTolA && worst_b <= kC3RelTolB2,
          fmt("max rel error A %.3g (tol %.0e), B2 %.3g (tol %.0e)", worst_a, kC3RelTolA, worst_b, kC3RelTolB2)};
}

// C4
Outcome parseval_sandwich() {
  std::mt19937_64 rng(4004);
  std::vector<double> mods(200), args(200);
  std::uniform_real_distribution<double> um(0.0, 3.0), ua(0.0, 2 * std::numbers::pi);
  for (std::size_t n = 0; n < 200; ++n) mods[n] = um(rng), args[n] = ua(rng);
  const std::vector<CoefficientSequence> seqs = {CoefficientSequence::geometric(), CoefficientSequence::sqrt_exp(),
                                                 CoefficientSequence::power_exp(0.3),
                                                 CoefficientSequence::power_exp(0.6),
                                                 CoefficientSequence::table(mods, args)};
  const auto radii = log_radius_grid(8, 3);  // 24 radii; the first 20 are used
  MaxModulusEngine engine;
  int checked = 0, bad = 0;
  double worst_lo = std::numeric_limits<double>::infinity(), worst_hi = -std::numeric_limits<double>::infinity();
  for (const auto& seq : seqs) {
    for (std::size_t j = 0; j < 20; ++j) {
      const Radius r = radii[j];
      const GrowthProfile p = growth_profile(seq, r);
      const auto theta = gen_geometric(2.0, p.trunc_n);
      for (int k = 0; k < 20; ++k) {
        const PhaseFraction u = sample_u(rng, static_cast<unsigned>(p.trunc_n + 192));
        const double lm = engine.max_modulus(seq, theta, u, r).log_M;
        worst_lo = std::min(worst_lo, lm - p.log_S);
        worst_hi = std::max(worst_hi, lm - p.log_G);
        bad += !(lm >= p.log_S - kC4Slack && lm <= p.log_G + kC4Slack);
        ++checked;
      }
    }
  }
  return {bad == 0, fmt("%d maxima over 5 sequences x 20 radii x 20 u, violations %d, min(log_M-log_S) %.3g, "
                        "max(log_M-log_G) %.3g (slack %.0e)",
                        checked, bad, worst_lo, worst_hi, kC4Slack)};
}

ExperimentConfig sqrt_exp_to_1e4() {
  ExperimentConfig c;
  c.sequence.kind = "SQRT_EXP";
  c.weight.kind = "LOG_MEASURE";
  c.per_decade = 8;
  c.kmax = 4;
  c.n_cap = 1'000'000'000;
  return c;
}

// C5 and C11 share the ratio diagnostics
Outcome ratio_check(const RatioResult& res, double drift_tol, double min_ratio, double seconds, double limit) {
  const std::size_t a = res.final_decade_start;
  const double running_min = res.tail_min[a];
  // recompute the drift from the tail minima rather than trusting the summary field
  const double drift = std::fabs(res.tail_min[a] - res.tail_min.back()) / std::fabs(res.tail_min.back());
  bool pass = running_min > min_ratio && drift < drift_tol && drift == res.drift_min;
  if (limit > 0) pass = pass && seconds < limit;
  std::string d = fmt("running min %.6g on final decade (need > %g), drift %.4g (need < %.2f), min ratio %.6g, max ratio %.6g",
                      running_min, min_ratio, drift, drift_tol, res.min_ratio, res.max_ratio);
  if (limit > 0) d += fmt(", %.1f s (limit %.0f s)", seconds, limit);
  return {pass, d};
}

Outcome sharpness(const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const RatioResult res = run_sharpness(sqrt_exp_to_1e4());
  const double sec = seconds_since(t0);
  write_ratio(res, (out / "sharpness").string());
  return ratio_check(res, kC5Drift, kC5MinRatio, sec, kC5Seconds);
}

ExperimentConfig ensemble_config() {
  ExperimentConfig c = sqrt_exp_to_1e4();
  c.phases.kind = "geometric";
  c.phases.q = 2.0;
  c.trials = kC6Trials;
  c.seed = 20240601;
  c.eta = {0.25, 0.35, 0.5};
  c.delta = 0.0;
  return c;
}

// C6
Outcome ensemble_direction(const EnsembleResult& e) {
  const std::size_t nr = e.profiles.size();
  std::vector<double> median(nr);
  for (std::size_t j = 0; j < nr; ++j) {
    std::vector<double> v;
    for (const auto& t : e.trials)
      if (!std::isnan(t.delta[j])) v.push_back(t.delta[j]);
    std::sort(v.begin(), v.end());
    median[j] = v.empty() ? std::nan("") : (v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]));
  }
  bool top3 = true;
  for (std::size_t j = nr - 3; j < nr; ++j) top3 = top3 && median[j] <= kC6MedianMax;
  const std::size_t a = e.final_decade_start;
  const bool trend = median[nr - 1] < median[a];
  return {static_cast<int>(e.trials.size()) == kC6Trials && top3 && trend,
          fmt("T=%zu, medians at the three largest radii %.4f %.4f %.4f (need <= %.2f); final decade median %.4f at "
              "s=%.3g -> %.4f at s=%.3g (need decrease); asymptotic 1/4 not expected at this scale; info: median log_M "
              "<= rhs_theorem1 (delta %.2g) over the final decade: %s",
              e.trials.size(), median[nr - 3], median[nr - 2], median[nr - 1], kC6MedianMax, median[a],
              e.profiles[a].r.s(), median[nr - 1], e.profiles[nr - 1].r.s(), e.config.theorem1_delta,
              e.theorem1_check ? "yes" : "no")};
}

// C7
Outcome ensemble_ceiling(const EnsembleResult& e) {
  const std::size_t a = e.final_decade_start, nr = e.profiles.size();
  const std::size_t e_max = static_cast<std::size_t>(
      std::max_element(e.config.eta.begin(), e.config.eta.end()) - e.config.eta.begin());
  double sup_outside = -1.0, sup_all = -1.0;
  int undefined = 0, above = 0;
  for (const auto& t : e.trials) {
    double s_out = -1.0;
    for (std::size_t j = a; j < nr; ++j) {
      if (std::isnan(t.delta[j])) continue;
      sup_all = std::max(sup_all, t.delta[j]);
      if (!t.flags[e_max][j]) s_out = std::max(s_out, t.delta[j]);
    }
    if (s_out < 0) ++undefined;
    above += s_out > kC7Ceiling;
    sup_outside = std::max(sup_outside, s_out);
  }
  return {above == 0 && undefined == 0,
          fmt("max tail sup outside each trial's set E(eta=%.2f) %.4f (ceiling %.2f), trials over ceiling %d, trials "
              "with no radius left %d; unexcluded final-decade max %.4f",
              e.config.eta[e_max], sup_outside, kC7Ceiling, above, undefined, sup_all)};
}

// C8
Outcome lemma2() {
  const WeightFunction h = WeightFunction::log_measure();
  auto log_k = [](Radius r) { return -std::log(r.s()); };
  auto r_of = [](double r) { return Radius::from_r(r); };
  const std::vector<std::pair<std::string, ExceptionalSet>> cases = {
      {"empty", ExceptionalSet{}},
      {"(0,0.5)", make_exceptional_set({Interval{Radius::from_s(1.0), r_of(0.5)}}, h)},
      {"3 intervals", make_exceptional_set({{r_of(0.7), r_of(0.85)}, {r_of(0.95), r_of(0.99)}, {r_of(0.999), r_of(0.9999)}}, h)}};
  bool pass = true;
  std::string d;
  for (const auto& [name, e] : cases) {
    const auto seq = lemma2_sequence(log_k, e, 20);
    const Lemma2Check c = verify_lemma2(seq, log_k, e);
    const bool ok = c.outside_set && c.growth && c.jumps && c.monotone && seq.size() == 20;
    pass = pass && ok;
    d += fmt("%s%s: %zu radii, outside=%d growth=%d jumps=%d monotone=%d", d.empty() ? "" : "; ", name.c_str(),
             seq.size(), c.outside_set, c.growth, c.jumps, c.monotone);
  }
  return {pass, d};
}

// C9
Outcome corollary_constants() {
  const CorollaryBounds b0 = corollary_bounds(0.0);
  bool pass = std::fabs(b0.c2_bound - 0.25) <= kC9Exact && std::fabs(b0.c3_bound - 0.25) <= kC9Exact &&
              std::fabs(corollary_bounds(0.5).c2_bound - 0.5) <= kC9Exact &&
              std::fabs(corollary_bounds(1.0).c3_bound - 0.5) <= kC9Exact;
  bool mono = true;
  for (int i = 1; i < 100; ++i) {
    const CorollaryBounds lo = corollary_bounds((i - 1) / 99.0), hi = corollary_bounds(i / 99.0);
    mono = mono && hi.c2_bound > lo.c2_bound && hi.c3_bound > lo.c3_bound;
  }
  return {pass && mono, fmt("c2(0)=%.17g c3(0)=%.17g c2(0.5)=%.17g c3(1)=%.17g, strictly increasing on 100 points: %s",
                            b0.c2_bound, b0.c3_bound, corollary_bounds(0.5).c2_bound, corollary_bounds(1.0).c3_bound,
                            mono ? "yes" : "no")};
}

// C10
Outcome gamma_statistic() {
  const double g2 = gamma_stat(gen_geometric(2.0, 10000), 2).value;
  const double gphi = gamma_stat(gen_phi([](double n) { return std::pow(n + 1.0, 0.25); }, 10000), 100).value;
  std::vector<mpz_class> v;
  for (int n = 1; n <= 10001; ++n) v.push_back(n);
  const double gint = gamma_stat(PhaseSequence::explicit_values(v, "consecutive"), 100).value;
  return {g2 == 0.0 && std::fabs(gphi - 0.25) <= kC10Tol && std::fabs(gint - 1.0) <= kC10Tol,
          fmt("2^n: %.17g; phi=(n+1)^(1/4): %.4f (0.25 +- %.2f); consecutive: %.4f (1 +- %.2f); n_max 1e4, n_min 100",
              g2, gphi, kC10Tol, gint, kC10Tol)};
}

// C11
Outcome baire(const fs::path& out) {
  ExperimentConfig c = sqrt_exp_to_1e4();
  c.sequence.kind = "POWER_EXP";
  c.sequence.eps = 0.5;
  const RatioResult res = run_baire_example(c);
  write_ratio(res, (out / "baire").string());
  return ratio_check(res, kC11Drift, 0.0, 0.0, 0.0);
}

// C12
Outcome phase_reduction() {
  const mpz_class big = (mpz_class(1) << 200) + 1;
  const double a = phase_angle(big, PhaseFraction::from_ratio(1, 2));
  const double ulp = std::nextafter(std::numbers::pi, 4.0) - std::numbers::pi;
  const bool pi_ok = std::fabs(a - std::numbers::pi) <= kC12PiUlps * ulp;

  std::mt19937_64 rng(1212);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    mpz_class theta = 0;
    mp::cpp_int bt = 0;
    for (int w = 0; w < 8; ++w) {
      const std::uint64_t word = rng();
      theta = (theta << 64) + mpz_class(std::to_string(word));
      bt = (bt << 64) + word;
    }
    theta |= mpz_class(1) << 511;
    bt |= mp::cpp_int(1) << 511;
    const std::uint64_t hi = rng(), lo = rng();
    const mp::cpp_int U = (mp::cpp_int(hi) << 64) + lo;
    // frac(theta U / 2^128) as an exact rational
    const mp::cpp_rational x(bt * U, mp::cpp_int(1) << 128);
    const mp::cpp_int whole = mp::numerator(x) / mp::denominator(x);
    const mp::cpp_rational frac = x - mp::cpp_rational(whole);
    const double want = 2 * std::numbers::pi * frac.convert_to<double>();
    const double got = phase_angle(theta, PhaseFraction::from_words({hi, lo}));
    double d = std::fabs(got - want);
    d = std::min(d, 2 * std::numbers::pi - d);
    worst = std::max(worst, d);
  }
  return {pi_ok && worst <= kC12OracleTol,
          fmt("theta=2^200+1, u=1/2 -> %.17g (pi %s within %.0f ulp); 50 x (512-bit theta, 128-bit u) vs rational "
              "oracle max error %.3g (tol %.0e)",
              a, pi_ok ? "" : "NOT", kC12PiUlps, worst, kC12OracleTol)};
}

// C13
Outcome determinism(const fs::path& out) {
  ExperimentConfig c = ensemble_config();
  c.kmax = 3;
  c.trials = 10;
  const fs::path d1 = out / "determinism_a", d2 = out / "determinism_b";
  fs::remove_all(d1);
  fs::remove_all(d2);
  write_ensemble(run_ensemble(c), d1.string());
  write_ensemble(run_ensemble(c), d2.string());
  int same = 0, total = 0;
  std::string diff;
  for (const char* f : {"ensemble.csv", "ensemble_summary.json", "plotdata_ensemble.csv"}) {
    ++total;
    const std::string a = slurp(d1 / f), b = slurp(d2 / f);
    if (!a.empty() && a == b) ++same;
    else diff += std::string(" ") + f;
  }
  return {same == total, fmt("%d/%d files byte-identical across two runs (T=%d, kmax=%d, seed %llu)%s%s", same, total,
                             c.trials, c.kmax, static_cast<unsigned long long>(c.seed), diff.empty() ? "" : "; differ:",
                             diff.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  int failed = 0;
  auto report = [&](const char* id, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };

  report("C1", "max_term oracle", max_term_oracle);
  report("C2", "geometric closed forms", geometric_closed_forms);
  report("C3", "finite differences of log_G", finite_differences);
  report("C4", "Parseval sandwich", parseval_sandwich);
  report("C5", "sharpness of 1/2", [&] { return sharpness(out); });

  std::optional<EnsembleResult> ens;
  std::string ens_error;
  try {
    ens = run_ensemble(ensemble_config());
    write_ensemble(*ens, (out / "ensemble").string());
  } catch (const std::exception& e) {
    ens_error = e.what();
  }
  auto need_ens = [&](auto f) {
    return [&, f]() -> Outcome {
      if (!ens) return {false, "ensemble failed: " + ens_error};
      return f(*ens);
    };
  };
  report("C6", "almost-sure improvement direction", need_ens(ensemble_direction));
  report("C7", "deterministic ceiling", need_ens(ensemble_ceiling));
  report("C8", "exceptional-set radius sequence", lemma2);
  report("C9", "corollary_bounds constants", corollary_constants);
  report("C10", "gamma statistic", gamma_statistic);
  report("C11", "lower ratio for sum e^{sqrt n} z^n (eps = 1/2)", [&] { return baire(out); });
  report("C12", "exact phase reduction", phase_reduction);
  report("C13", "determinism", [&] { return determinism(out); });

  std::printf("%d of 13 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
