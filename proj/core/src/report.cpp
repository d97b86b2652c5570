#include "wvlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wvlab/error.hpp"

namespace wvlab {

using ojson = nlohmann::ordered_json;

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string eta_label(double eta) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", eta);
  return buf;
}

std::string opt_real(const std::optional<double>& x) { return x ? format_real(*x) : std::string(); }

// NaN becomes null
ojson jnum(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

void profile_fields(std::ostringstream& out, const GrowthProfile& p, const std::optional<double>& log_M,
                    const std::optional<double>& delta) {
  out << format_real(p.r.r()) << ',' << format_real(p.r.s()) << ',' << format_real(p.log_mu) << ',' << p.nu << ','
      << format_real(p.log_G) << ',' << format_real(p.log_S) << ',' << format_real(p.A) << ','
      << format_real(p.B2) << ',' << opt_real(log_M) << ',' << opt_real(delta);
}

constexpr const char* kProfileHeader = "r,s,log_mu,nu,log_G,log_S,A,B2,log_M,delta_h";

ojson config_echo(const ExperimentConfig& c) {
  ojson j;
  j["text"] = c.source_text;
  j["effective"] = ojson::parse(config_to_json(c));
  // where the files land is not part of the result
  j["effective"].erase("out_dir");
  return j;
}

ojson bounds_json(double delta) {
  const CorollaryBounds b = corollary_bounds(delta);
  ojson j;
  j["delta"] = delta;
  j["quarter"] = 0.25;
  j["c2_bound"] = b.c2_bound;
  j["c2_valid"] = b.c2_valid;
  j["c2_alpha"] = b.c2_alpha;
  j["c3_bound"] = b.c3_bound;
  j["c3_valid"] = b.c3_valid;
  j["c3_alpha"] = b.c3_alpha;
  j["deterministic"] = 0.5;
  j["abstract_bound"] = b.abstract_bound;
  return j;
}

ojson header(const std::string& experiment, const ExperimentConfig& c) {
  ojson j;
  j["experiment"] = experiment;
  j["config"] = config_echo(c);
  j["seed"] = c.seed;
  return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const std::string& text, std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kBadParam, "cannot write " + path.string());
  out << text;
  written.push_back(path.string());
}

std::filesystem::path prepare(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string runtime_json(const std::string& experiment, double seconds) {
  ojson j;
  j["experiment"] = experiment;
  j["seconds"] = seconds;
  return dump(j);
}

}  // namespace

std::string profile_csv(const std::vector<GrowthProfile>& rows) {
  std::ostringstream out;
  out << kProfileHeader << '\n';
  for (const GrowthProfile& p : rows) {
    profile_fields(out, p, p.log_M, p.delta_h);
    out << '\n';
  }
  return out.str();
}

std::string ensemble_csv(const EnsembleResult& result) {
  std::ostringstream out;
  out << kProfileHeader << ",trial,u_hex";
  for (double eta : result.config.eta) out << ",flag_eta_" << eta_label(eta);
  out << '\n';
  for (const TrialRecord& t : result.trials) {
    for (std::size_t j = 0; j < result.profiles.size(); ++j) {
      const std::optional<double> d = std::isnan(t.delta[j]) ? std::nullopt : std::optional<double>(t.delta[j]);
      profile_fields(out, result.profiles[j], t.log_M[j], d);
      out << ',' << t.index << ',' << t.u_hex;
      for (const auto& flags : t.flags) out << ',' << (flags[j] ? 1 : 0);
      out << '\n';
    }
  }
  return out.str();
}

std::string profile_summary_json(const ProfileResult& result) {
  ojson j = header("profile", result.config);
  j["log_M_source"] = "M_f(r), t = 0";
  ojson rows = ojson::array();
  for (const GrowthProfile& p : result.rows) {
    ojson row;
    row["s"] = p.r.s();
    row["log_inv_s"] = p.r.log_inv_s();
    row["log_mu"] = p.log_mu;
    row["nu"] = p.nu;
    row["trunc_n"] = p.trunc_n;
    row["tail_log_bound"] = jnum(p.tail_log_bound);
    row["delta_h"] = p.delta_h ? ojson(*p.delta_h) : ojson(nullptr);
    rows.push_back(row);
  }
  j["radii"] = rows;
  j["bounds"] = bounds_json(result.config.delta);
  return dump(j);
}

std::string ratio_summary_json(const RatioResult& result) {
  ojson j = header(result.experiment, result.config);
  j["log_M_source"] = "M_f(r), t = 0";
  j["ratio_definition"] = "M(r) (1-r) / (mu(r) ln^{1/2}(mu(r)/(1-r)))";
  ojson rows = ojson::array();
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    ojson row;
    row["s"] = result.rows[k].r.s();
    row["log_inv_s"] = result.rows[k].r.log_inv_s();
    row["ratio"] = result.ratio[k];
    row["tail_min"] = result.tail_min[k];
    row["tail_max"] = result.tail_max[k];
    rows.push_back(row);
  }
  j["radii"] = rows;
  const std::size_t f = result.final_decade_start;
  ojson fin;
  fin["first_s"] = result.rows[f].r.s();
  fin["last_s"] = result.rows.back().r.s();
  fin["running_min"] = result.tail_min[f];
  fin["running_max"] = result.tail_max[f];
  fin["drift_min"] = result.drift_min;
  fin["drift_max"] = result.drift_max;
  fin["drift_tolerance"] = result.config.drift_tolerance;
  fin["min_stable"] = result.drift_min < result.config.drift_tolerance;
  fin["max_stable"] = result.drift_max < result.config.drift_tolerance;
  j["final_decade"] = fin;
  j["min_ratio"] = result.min_ratio;
  j["max_ratio"] = result.max_ratio;
  if (result.experiment == "baire") {
    j["c0_lower_estimate"] = result.tail_min[f];
    j["c0_upper_estimate"] = result.tail_max[f];
  }
  return dump(j);
}

std::string ensemble_summary_json(const EnsembleResult& result) {
  const ExperimentConfig& c = result.config;
  ojson j = header("ensemble", c);
  j["log_M_source"] = "M_f(r,t), t = 2 pi u";
  j["phases"] = {{"terms", result.phase_terms}, {"fraction_bits", result.fraction_bits},
                 {"gamma_n_min_100", jnum(result.gamma)}};
  j["bounds"] = bounds_json(c.delta);
  ojson radii = ojson::array();
  for (std::size_t k = 0; k < result.profiles.size(); ++k) {
    const GrowthProfile& p = result.profiles[k];
    const RadiusAggregate& a = result.aggregates[k];
    ojson row;
    row["s"] = p.r.s();
    row["log_inv_s"] = p.r.log_inv_s();
    row["log_mu"] = p.log_mu;
    row["nu"] = p.nu;
    row["trunc_n"] = p.trunc_n;
    row["valid"] = a.valid;
    row["min"] = jnum(a.min);
    row["median"] = jnum(a.median);
    row["p90"] = jnum(a.p90);
    row["max"] = jnum(a.max);
    row["median_log_M"] = jnum(a.median_log_M);
    row["rhs_theorem1"] = jnum(a.rhs_theorem1);
    row["above_theorem1"] = a.above_theorem1;
    radii.push_back(row);
  }
  j["radii"] = radii;

  ojson trials = ojson::array();
  for (const TrialRecord& t : result.trials) {
    ojson row;
    row["trial"] = t.index;
    row["u_hex"] = t.u_hex;
    row["tail_sup"] = jnum(t.tail_sup);
    ojson mass;
    for (std::size_t k = 0; k < c.eta.size(); ++k) mass[eta_label(c.eta[k])] = t.h_mass[k];
    row["h_mass"] = mass;
    trials.push_back(row);
  }
  j["trials"] = trials;

  ojson viol = ojson::array();
  for (std::size_t k = 0; k < c.eta.size(); ++k) {
    double sum = 0.0, mx = 0.0;
    int with = 0;
    for (const TrialRecord& t : result.trials) {
      sum += t.h_mass[k];
      mx = std::max(mx, t.h_mass[k]);
      with += t.h_mass[k] > 0.0 ? 1 : 0;
    }
    viol.push_back({{"eta", c.eta[k]},
                    {"mean_h_measure", sum / static_cast<double>(result.trials.size())},
                    {"max_h_measure", mx},
                    {"trials_with_flags", with}});
  }
  j["violation_h_measure"] = viol;

  ojson checks;
  checks["final_decade_first_s"] = result.profiles[result.final_decade_start].r.s();
  checks["median_threshold"] = c.median_threshold;
  checks["median_check"] = result.median_check;
  checks["trend_check"] = result.trend_check;
  checks["ceiling"] = c.ceiling;
  checks["max_tail_sup"] = jnum(result.max_tail_sup);
  checks["ceiling_check"] = result.ceiling_check;
  checks["theorem1_delta"] = c.theorem1_delta;
  checks["theorem1_check"] = result.theorem1_check;
  j["checks"] = checks;
  return dump(j);
}

std::string audit_summary_json(const AuditResult& result) {
  ojson j = header("bound-audit", result.config);
  j["log_M_source"] = "M_f(r), t = 0";
  j["regime"] = "ln_2(h mu) > 1";
  ojson runs = ojson::array();
  for (const AuditRun& run : result.runs) {
    auto count = [](const std::vector<bool>& v) {
      int n = 0;
      for (bool b : v) n += b ? 1 : 0;
      return n;
    };
    ojson row;
    row["per_decade"] = run.per_decade;
    row["eps"] = run.eps;
    row["radii"] = run.grid.size();
    row["in_regime"] = count(run.in_regime);
    row["A"] = {{"violations", count(run.viol_A)}, {"h_measure", run.h_A}};
    row["B2_statement"] = {{"violations", count(run.viol_B2_statement)}, {"h_measure", run.h_B2_statement}};
    row["B2_proof"] = {{"violations", count(run.viol_B2_proof)}, {"h_measure", run.h_B2_proof}};
    row["G"] = {{"violations", count(run.viol_G)}, {"h_measure", run.h_G}};
    runs.push_back(row);
  }
  j["runs"] = runs;
  return dump(j);
}

std::string kahane_summary_json(const KahaneResult& result, const ExperimentConfig& config) {
  ojson j = header("kahane", config);
  j["terms"] = result.terms;
  j["interval"] = {result.t_lo, result.t_hi};
  j["grid_n"] = result.grid_n;
  j["t0"] = result.t0;
  j["re_q"] = result.re_q;
  j["sum_c"] = result.sum_c;
  j["ratio"] = result.ratio;
  return dump(j);
}

std::vector<std::string> write_profile(const ProfileResult& result, const std::string& out_dir) {
  const auto dir = prepare(out_dir);
  std::vector<std::string> written;
  write_file(dir / "profile.csv", profile_csv(result.rows), written);
  write_file(dir / "profile_summary.json", profile_summary_json(result), written);
  std::ostringstream plot;
  plot << "x,delta_h,log_M_minus_log_mu,log_mu\n";
  for (const GrowthProfile& p : result.rows)
    plot << format_real(p.r.log_inv_s()) << ',' << opt_real(p.delta_h) << ','
         << format_real(*p.log_M - p.log_mu) << ',' << format_real(p.log_mu) << '\n';
  write_file(dir / "plotdata_profile.csv", plot.str(), written);
  write_file(dir / "runtime_profile.json", runtime_json("profile", result.seconds), written);
  return written;
}

std::vector<std::string> write_ratio(const RatioResult& result, const std::string& out_dir) {
  const auto dir = prepare(out_dir);
  const std::string& name = result.experiment;
  std::vector<std::string> written;
  write_file(dir / (name + ".csv"), profile_csv(result.rows), written);
  write_file(dir / (name + "_summary.json"), ratio_summary_json(result), written);
  std::ostringstream plot;
  plot << "x,ratio,tail_min,tail_max\n";
  for (std::size_t k = 0; k < result.rows.size(); ++k)
    plot << format_real(result.rows[k].r.log_inv_s()) << ',' << format_real(result.ratio[k]) << ','
         << format_real(result.tail_min[k]) << ',' << format_real(result.tail_max[k]) << '\n';
  write_file(dir / ("plotdata_" + name + ".csv"), plot.str(), written);
  write_file(dir / ("runtime_" + name + ".json"), runtime_json(name, result.seconds), written);
  return written;
}

std::vector<std::string> write_ensemble(const EnsembleResult& result, const std::string& out_dir) {
  const auto dir = prepare(out_dir);
  std::vector<std::string> written;
  write_file(dir / "ensemble.csv", ensemble_csv(result), written);
  write_file(dir / "ensemble_summary.json", ensemble_summary_json(result), written);
  const CorollaryBounds b = corollary_bounds(result.config.delta);
  std::ostringstream plot;
  plot << "x,min,median,p90,max,quarter,c2_bound,c3_bound,half\n";
  for (std::size_t k = 0; k < result.profiles.size(); ++k) {
    const RadiusAggregate& a = result.aggregates[k];
    plot << format_real(result.profiles[k].r.log_inv_s()) << ',' << format_real(a.min) << ','
         << format_real(a.median) << ',' << format_real(a.p90) << ',' << format_real(a.max) << ",0.25,"
         << format_real(b.c2_bound) << ',' << format_real(b.c3_bound) << ",0.5\n";
  }
  write_file(dir / "plotdata_ensemble.csv", plot.str(), written);
  write_file(dir / "runtime_ensemble.json", runtime_json("ensemble", result.seconds), written);
  return written;
}

std::vector<std::string> write_audit(const AuditResult& result, const std::string& out_dir) {
  const auto dir = prepare(out_dir);
  std::vector<std::string> written;
  write_file(dir / "bound_audit.csv", profile_csv(result.rows), written);
  write_file(dir / "bound_audit_summary.json", audit_summary_json(result), written);
  const WeightFunction h = result.config.weight.build();
  const double eps = result.config.audit_eps.front();
  std::ostringstream plot;
  plot << "x,A_margin,B2_statement_margin,B2_proof_margin,G_margin\n";
  for (const GrowthProfile& p : result.rows) {
    plot << format_real(p.r.log_inv_s());
    try {
      const AuditBounds b = audit_bounds(p.log_mu, p.r, h, eps);
      // positive margin = bound violated
      plot << ',' << format_real(std::log(p.A) - b.log_A_bound) << ','
           << format_real(std::log(p.B2) - b.log_B2_statement) << ',' << format_real(std::log(p.B2) - b.log_B2_proof)
           << ',' << format_real(p.log_G - b.log_G_bound) << '\n';
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDomain) throw;
      plot << ",,,,\n";
    }
  }
  write_file(dir / "plotdata_bound_audit.csv", plot.str(), written);
  write_file(dir / "runtime_bound_audit.json", runtime_json("bound-audit", result.seconds), written);
  return written;
}

std::vector<std::string> write_kahane(const KahaneResult& result, const ExperimentConfig& config,
                                      const std::string& out_dir) {
  const auto dir = prepare(out_dir);
  std::vector<std::string> written;
  write_file(dir / "kahane_summary.json", kahane_summary_json(result, config), written);
  std::ostringstream plot;
  plot << "t,ratio\n";
  for (std::size_t k = 0; k < result.curve_t.size(); ++k)
    plot << format_real(result.curve_t[k]) << ',' << format_real(result.curve_ratio[k]) << '\n';
  write_file(dir / "plotdata_kahane.csv", plot.str(), written);
  write_file(dir / "runtime_kahane.json", runtime_json("kahane", result.seconds), written);
  return written;
}

}  // namespace wvlab
