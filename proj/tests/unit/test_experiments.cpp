#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wvlab/config.hpp"
#include "wvlab/error.hpp"
#include "wvlab/experiments.hpp"
#include "wvlab/numeric.hpp"
#include "wvlab/report.hpp"

using namespace wvlab;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wvlab_unit_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small_ensemble() {
  ExperimentConfig c;
  c.sequence.kind = "SQRT_EXP";
  c.per_decade = 4;
  c.kmax = 2;
  c.trials = 3;
  c.seed = 99;
  c.eta = {0.25, 0.5};
  return c;
}

}  // namespace

TEST(RunProfile, GeometricRowsAndClosedForm) {
  ExperimentConfig c;
  c.kmax = 3;
  c.per_decade = 4;
  const ProfileResult p = run_profile(c);
  ASSERT_EQ(p.rows.size(), 12u);
  for (const auto& row : p.rows) {
    EXPECT_NEAR(row.log_G, -std::log(row.r.s()), 1e-10);
    ASSERT_TRUE(row.log_M.has_value());
  }
}

TEST(RunProfile, SqrtExpCentralIndexAtLogRMinusHundredth) {
  // the radius with ln r = -0.01 is not on a decade grid; the profile row is built the same way
  const GrowthProfile p = growth_profile(CoefficientSequence::sqrt_exp(), Radius::from_log_r(-0.01));
  EXPECT_EQ(p.nu, 2500u);
}

TEST(RunProfile, SingleTermHasZeroDelta) {
  ExperimentConfig c;
  c.sequence.kind = "TABLE";
  c.sequence.moduli = {1.0};
  c.kmax = 3;
  const ProfileResult p = run_profile(c);
  int valid = 0;
  for (const auto& row : p.rows) {
    if (!row.delta_h) continue;
    EXPECT_EQ(*row.delta_h, 0.0);
    ++valid;
  }
  EXPECT_GT(valid, 0);
}

TEST(RunProfile, CsvLayout) {
  ExperimentConfig c;
  c.sequence.kind = "SQRT_EXP";
  c.kmax = 2;
  const std::string csv = profile_csv(run_profile(c).rows);
  const auto lines = lines_of(csv);
  ASSERT_EQ(lines.size(), 17u);
  EXPECT_EQ(lines[0], "r,s,log_mu,nu,log_G,log_S,A,B2,log_M,delta_h");
  const auto f = split(lines[5]);
  ASSERT_EQ(f.size(), 10u);
  // 17 significant digits round-trip every real
  const double s = std::stod(f[1]);
  EXPECT_EQ(s, std::pow(10.0, -5.0 / 8.0));
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(std::nan("")), "nan");
}

TEST(RunProfile, ErrorsNameTheRadius) {
  ExperimentConfig c;
  c.sequence.kind = "SQRT_EXP";
  c.kmax = 4;
  c.n_cap = 1000;
  try {
    run_profile(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonAnalytic);
    EXPECT_NE(std::string(e.what()).find("r = 1 - "), std::string::npos);
  }
}

TEST(RunSharpness, GeometricRatioVanishes) {
  ExperimentConfig c;
  c.kmax = 6;
  c.n_cap = 1'000'000'000;
  const RatioResult r = run_sharpness(c);
  for (std::size_t j = 0; j < r.rows.size(); ++j) {
    if (std::isnan(r.ratio[j])) continue;
    EXPECT_NEAR(r.ratio[j], 1.0 / std::sqrt(-std::log(r.rows[j].r.s())), 1e-9);
  }
  EXPECT_LT(r.ratio.back(), r.ratio[r.final_decade_start]);
}

TEST(RunSharpness, NeedsLogMeasure) {
  ExperimentConfig c;
  c.weight.kind = "POWER";
  c.weight.p = 2.0;
  EXPECT_THROW(run_sharpness(c), Error);
}

TEST(RunSharpness, ShortGridBoundedRatio) {
  ExperimentConfig c;
  c.sequence.kind = "SQRT_EXP";
  c.kmax = 3;
  const RatioResult r = run_sharpness(c);
  EXPECT_GT(r.min_ratio, 0.01);
  EXPECT_LT(r.max_ratio, 100.0);
  for (std::size_t j = 1; j < r.tail_min.size(); ++j) EXPECT_GE(r.tail_min[j], r.tail_min[j - 1]);
}

TEST(RunBaire, RequiresPowerExp) {
  ExperimentConfig c;
  c.sequence.kind = "SQRT_EXP";
  EXPECT_THROW(run_baire_example(c), Error);
  c.sequence.kind = "POWER_EXP";
  c.sequence.eps = 0.3;
  c.kmax = 3;
  const RatioResult r = run_baire_example(c);
  EXPECT_GT(r.min_ratio, 0.0);
  EXPECT_TRUE(std::isfinite(r.max_ratio));
}

TEST(RunEnsemble, ZeroRotationReproducesProfile) {
  ExperimentConfig c = small_ensemble();
  c.trials = 1;
  c.force_u_zero = true;
  const EnsembleResult e = run_ensemble(c);
  const ProfileResult p = run_profile(c);
  ASSERT_EQ(e.trials.size(), 1u);
  for (std::size_t j = 0; j < p.rows.size(); ++j) {
    EXPECT_EQ(e.trials[0].log_M[j], *p.rows[j].log_M);
    if (p.rows[j].delta_h) {
      EXPECT_EQ(e.trials[0].delta[j], *p.rows[j].delta_h);
    } else {
      EXPECT_TRUE(std::isnan(e.trials[0].delta[j]));
    }
  }
  // and the CSV rows start with the profile rows verbatim
  const auto a = lines_of(ensemble_csv(e)), b = lines_of(profile_csv(p.rows));
  for (std::size_t j = 1; j < b.size(); ++j) EXPECT_EQ(a[j].substr(0, b[j].size() + 1), b[j] + ",");
}

TEST(RunEnsemble, CsvHeaderAndRows) {
  const EnsembleResult e = run_ensemble(small_ensemble());
  const auto lines = lines_of(ensemble_csv(e));
  EXPECT_EQ(lines[0], "r,s,log_mu,nu,log_G,log_S,A,B2,log_M,delta_h,trial,u_hex,flag_eta_0.25,flag_eta_0.5");
  ASSERT_EQ(lines.size(), 1u + 3u * 8u);
  const auto f = split(lines.back());
  ASSERT_EQ(f.size(), 14u);
  EXPECT_EQ(f[10], "2");
  EXPECT_EQ(f[11].size(), 32u);
}

TEST(RunEnsemble, SandwichAndFlagsConsistent) {
  const EnsembleResult e = run_ensemble(small_ensemble());
  for (const auto& t : e.trials) {
    for (std::size_t j = 0; j < e.profiles.size(); ++j) {
      EXPECT_GE(t.log_M[j], e.profiles[j].log_S - 1e-9);
      EXPECT_LE(t.log_M[j], e.profiles[j].log_G + 1e-9);
      if (std::isnan(t.delta[j])) continue;
      EXPECT_EQ(t.flags[0][j], t.delta[j] > 0.25);
      EXPECT_EQ(t.flags[1][j], t.delta[j] > 0.5);
      // a larger eta flags a subset
      if (t.flags[1][j]) {
        EXPECT_TRUE(t.flags[0][j]);
      }
    }
    EXPECT_GE(t.h_mass[0], t.h_mass[1]);
  }
}

TEST(RunEnsemble, Theorem1ColumnsMatchDirectEvaluation) {
  const ExperimentConfig c = small_ensemble();
  const EnsembleResult e = run_ensemble(c);
  const WeightFunction h = c.weight.build();
  int defined = 0;
  for (std::size_t j = 0; j < e.profiles.size(); ++j) {
    const RadiusAggregate& a = e.aggregates[j];
    std::vector<double> lm;
    for (const auto& t : e.trials) lm.push_back(t.log_M[j]);
    EXPECT_EQ(a.median_log_M, quantile(lm, 0.5));
    try {
      const double rhs = rhs_theorem1(e.profiles[j], h, c.theorem1_delta);
      ++defined;
      EXPECT_EQ(a.rhs_theorem1, rhs);
      int above = 0;
      for (double x : lm) above += x > rhs;
      EXPECT_EQ(a.above_theorem1, above);
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::kDomain);
      EXPECT_TRUE(std::isnan(a.rhs_theorem1));
      EXPECT_EQ(a.above_theorem1, -1);
    }
  }
  EXPECT_GT(defined, 0);
  // the phase gap delta does not switch the comparison off
  ExperimentConfig c0 = c;
  c0.delta = 0.0;
  EXPECT_EQ(run_ensemble(c0).aggregates.back().above_theorem1, e.aggregates.back().above_theorem1);
}

TEST(RunEnsemble, ScaleConsistency) {
  ExperimentConfig c = small_ensemble();
  c.trials = 2;
  const EnsembleResult two = run_ensemble(c);
  c.trials = 4;
  const EnsembleResult four = run_ensemble(c);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(two.trials[i].u_hex, four.trials[i].u_hex);
    EXPECT_EQ(two.trials[i].log_M, four.trials[i].log_M);
  }
}

TEST(RunEnsemble, ByteIdenticalReruns) {
  const ExperimentConfig c = small_ensemble();
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  write_ensemble(run_ensemble(c), d1.string());
  write_ensemble(run_ensemble(c), d2.string());
  for (const char* f : {"ensemble.csv", "ensemble_summary.json", "plotdata_ensemble.csv"})
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
}

TEST(RunEnsemble, PhasesTooShort) {
  ExperimentConfig c = small_ensemble();
  c.phases.n_max = 10;
  try {
    run_ensemble(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPhasesTooShort);
  }
}

TEST(RunEnsemble, PhiPhasesWork) {
  ExperimentConfig c = small_ensemble();
  c.phases.kind = "phi_power";
  c.phases.delta = 0.5;
  c.kmax = 1;
  c.trials = 2;
  const EnsembleResult e = run_ensemble(c);
  EXPECT_EQ(e.trials.size(), 2u);
}

TEST(BoundAudit, GeometricAHasNoViolations) {
  ExperimentConfig c;
  c.kmax = 6;
  c.n_cap = 1'000'000'000;
  const AuditResult a = run_bound_audit(c);
  ASSERT_EQ(a.runs.size(), 1u);
  int in_regime = 0;
  for (std::size_t j = 0; j < a.runs[0].grid.size(); ++j) {
    EXPECT_FALSE(a.runs[0].viol_A[j]);
    in_regime += a.runs[0].in_regime[j];
  }
  EXPECT_GT(in_regime, 30);
  EXPECT_EQ(a.runs[0].h_A, 0.0);
}

TEST(BoundAudit, LargerEpsFlagsSubsetsAndRefinementIsStable) {
  ExperimentConfig c;
  c.sequence.kind = "SQRT_EXP";
  c.kmax = 3;
  c.audit_eps = {0.1, 0.5, 1.0};
  c.refinements = {16, 32};
  const AuditResult a = run_bound_audit(c);
  ASSERT_EQ(a.runs.size(), 9u);
  for (std::size_t k = 0; k + 1 < a.runs.size(); ++k) {
    const AuditRun& lo = a.runs[k];
    const AuditRun& hi = a.runs[k + 1];
    if (lo.per_decade != hi.per_decade) continue;
    for (std::size_t j = 0; j < lo.grid.size(); ++j) {
      if (hi.viol_A[j]) {
        EXPECT_TRUE(lo.viol_A[j]);
      }
      if (hi.viol_B2_statement[j]) {
        EXPECT_TRUE(lo.viol_B2_statement[j]);
      }
      if (hi.viol_B2_proof[j]) {
        EXPECT_TRUE(lo.viol_B2_proof[j]);
      }
      if (hi.viol_G[j]) {
        EXPECT_TRUE(lo.viol_G[j]);
      }
    }
  }
  // refining the grid never grows a violation measure by more than one coarse cell
  for (std::size_t e = 0; e < 3; ++e) {
    for (std::size_t m = 0; m + 1 < 3; ++m) {
      const AuditRun& coarse = a.runs[m * 3 + e];
      const AuditRun& fine = a.runs[(m + 1) * 3 + e];
      const double cell = std::log(10.0) / coarse.per_decade;
      EXPECT_LE(fine.h_G, coarse.h_G + cell);
      EXPECT_LE(fine.h_A, coarse.h_A + cell);
      EXPECT_LE(fine.h_B2_proof, coarse.h_B2_proof + cell);
      EXPECT_LE(fine.h_B2_statement, coarse.h_B2_statement + cell);
    }
  }
}

TEST(Kahane, TrivialCases) {
  const KahaneResult one = run_kahane_search(PhaseSequence::explicit_values({1}, "1"), {1.0}, 0.0, kTwoPi, 1024);
  EXPECT_NEAR(one.ratio, 1.0, 1e-15);
  EXPECT_NEAR(std::remainder(one.t0, kTwoPi), 0.0, 1e-7);
  const KahaneResult two = run_kahane_search(PhaseSequence::explicit_values({1, 2}, "1,2"), {1.0, 1.0}, 0.0, kTwoPi, 1024);
  EXPECT_NEAR(two.ratio, 1.0, 1e-15);
  EXPECT_EQ(two.t0, 0.0);
}

TEST(Kahane, GeometricAgainstDenseGrid) {
  const auto theta = gen_geometric(2.0, 19);
  const std::vector<double> c(20, 1.0);
  const double lo = 0.1, hi = 0.1 + kTwoPi / 1.0 * 0.25;
  const KahaneResult k = run_kahane_search(theta, c, lo, hi, 1 << 16);
  EXPECT_GT(k.ratio, 0.0);
  EXPECT_LE(k.ratio, 1.0);
  EXPECT_GE(k.t0, lo);
  EXPECT_LE(k.t0, hi);
  // 10^6-point oracle
  double best = -1e300;
  for (int i = 0; i <= 1000000; ++i) {
    const long double t = lo + (hi - lo) * static_cast<long double>(i) / 1000000.0L;
    long double acc = 0;
    for (int n = 0; n < 20; ++n) acc += std::cos(std::fmod(std::ldexp(1.0L, n) * t, 2 * 3.14159265358979323846264338327950288L));
    best = std::max(best, static_cast<double>(acc) / 20.0);
  }
  EXPECT_GE(k.ratio, best - 1e-9);
}

TEST(Kahane, Errors) {
  const auto theta = gen_geometric(2.0, 5);
  EXPECT_THROW(run_kahane_search(theta, {1, 1}, 1.0, 1.0, 100), Error);
  EXPECT_THROW(run_kahane_search(theta, {1, -1}, 0.0, 1.0, 100), Error);
  EXPECT_THROW(run_kahane_search(gen_geometric(2.0, 60), std::vector<double>(61, 1.0), 0.0, 1.0, 100), Error);
}

TEST(Config, ParsesCommentsAndEchoesText) {
  const std::string text = "{\n  // trial count\n  \"trials\": 7,\n  \"eta\": [0.3],\n  \"sequence\": {\"kind\": \"POWER_EXP\", \"eps\": 0.4},\n  \"n_cap\": 1e9\n}\n";
  const ExperimentConfig c = parse_config(text);
  EXPECT_EQ(c.trials, 7);
  EXPECT_EQ(c.eta, std::vector<double>{0.3});
  EXPECT_EQ(c.sequence.eps, 0.4);
  EXPECT_EQ(c.n_cap, 1'000'000'000u);
  EXPECT_EQ(c.source_text, text);
  const ExperimentConfig again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, RejectsBadInput) {
  for (const char* bad : {"{\"trails\": 3}", "{\"trials\": 0}", "{\"kmax\": \"x\"}", "[1,2]", "{\"sequence\": {\"kind\": \"NOPE\"}}",
                          "{\"sequence\": {\"kind\": \"POWER_EXP\", \"eps\": 1.5}}", "{\"phases\": {\"q\": 1.0}}",
                          "{\"theorem1_delta\": 0}"}) {
    try {
      parse_config(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadParam) << bad;
    }
  }
}

TEST(Report, WritersProduceAllFiles) {
  ExperimentConfig c;
  c.sequence.kind = "SQRT_EXP";
  c.kmax = 2;
  const auto dir = scratch("writers");
  const auto files = write_profile(run_profile(c), dir.string());
  ASSERT_EQ(files.size(), 4u);
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f)) << f;
  const auto plot = lines_of(slurp(dir / "plotdata_profile.csv"));
  ASSERT_GT(plot.size(), 2u);
  EXPECT_EQ(plot[0].substr(0, 2), "x,");
  const auto first = split(plot[1]);
  EXPECT_NEAR(std::stod(first[0]), std::log(std::pow(10.0, 1.0 / 8.0)), 1e-15);
  const std::string summary = slurp(dir / "profile_summary.json");
  EXPECT_EQ(summary.find("out_dir"), std::string::npos);
  EXPECT_NE(summary.find("\"seed\""), std::string::npos);
}

TEST(Report, KahaneAndAuditSummaries) {
  ExperimentConfig c;
  c.grid_n = 4096;
  const auto dir = scratch("kahane");
  const auto files = write_kahane(run_kahane(c), c, dir.string());
  EXPECT_EQ(files.size(), 3u);
  EXPECT_NE(slurp(dir / "kahane_summary.json").find("\"ratio\""), std::string::npos);
  c.kmax = 3;
  const auto files2 = write_audit(run_bound_audit(c), dir.string());
  EXPECT_NE(slurp(dir / "bound_audit_summary.json").find("h_measure"), std::string::npos);
}

TEST(Quantile, LinearInterpolation) {
  EXPECT_EQ(quantile({3, 1, 2}, 0.5), 2.0);
  EXPECT_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_NEAR(quantile({0, 10}, 0.9), 9.0, 1e-15);
  EXPECT_TRUE(std::isnan(quantile({}, 0.5)));
}
