#include "wvlab/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wvlab/error.hpp"

namespace wvlab {

using nlohmann::json;

CoefficientSequence SequenceSpec::build() const {
  if (kind == "GEOMETRIC") return CoefficientSequence::geometric();
  if (kind == "SQRT_EXP") return CoefficientSequence::sqrt_exp();
  if (kind == "POWER_EXP") return CoefficientSequence::power_exp(eps);
  if (kind == "TABLE") return CoefficientSequence::table(moduli, args);
  throw Error(ErrorCode::kBadParam, "unknown sequence kind " + kind);
}

PhaseSequence PhaseSpec::build(std::uint64_t needed) const {
  const std::uint64_t len = n_max > 0 ? n_max : needed;
  if (kind == "geometric") return gen_geometric(q, len);
  if (kind == "phi_power") {
    const double d = delta;
    char label[64];
    std::snprintf(label, sizeof label, "phi_power(delta=%g)", d);
    return gen_phi([d](double n) { return std::pow(n + 1.0, d); }, len, label);
  }
  throw Error(ErrorCode::kBadParam, "unknown phase kind " + kind);
}

WeightFunction WeightSpec::build() const {
  if (kind == "LOG_MEASURE") return WeightFunction::log_measure();
  if (kind == "POWER") return WeightFunction::power(p);
  throw Error(ErrorCode::kBadParam, "unknown weight kind " + kind);
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::kBadParam, msg); };
  if (trials < 1) bad("trials must be >= 1");
  if (kmax < 1) bad("kmax must be >= 1");
  if (per_decade < 1) bad("per_decade must be >= 1");
  if (!(margin_nats > 0.0)) bad("margin_nats must be positive");
  if (!(delta >= 0.0)) bad("delta must be >= 0");
  if (!(theorem1_delta > 0.0)) bad("theorem1_delta must be positive");
  if (eta.empty()) bad("eta list is empty");
  for (double e : eta)
    if (!std::isfinite(e)) bad("eta values must be finite");
  for (double e : audit_eps)
    if (!(e > 0.0)) bad("audit eps must be positive");
  for (int m : refinements)
    if (m < 1) bad("refinements must be >= 1");
  if (!(t_hi > t_lo)) bad("kahane interval is empty");
  if (grid_n < 2) bad("grid_n must be >= 2");
  if (phases.kind == "geometric" && !(phases.q > 1.0)) bad("phase ratio q must exceed 1");
  // builders check the remaining preconditions
  sequence.build();
  weight.build();
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw Error(ErrorCode::kBadParam, "unknown config key " + where + item.key());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadParam, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kBadParam, "config must be a JSON object");
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"sequence", "phases", "weight", "per_decade", "kmax", "trials", "seed", "eta", "delta",
                    "margin_nats", "n_cap", "out_dir", "force_u_zero", "median_threshold", "theorem1_delta", "ceiling", "audit_eps",
                    "refinements", "drift_tolerance", "coeffs", "kahane_terms", "t_lo", "t_hi", "grid_n"},
                   "");
    if (j.contains("sequence")) {
      const json& s = j.at("sequence");
      reject_unknown(s, {"kind", "eps", "moduli", "args"}, "sequence.");
      take(s, "kind", c.sequence.kind);
      take(s, "eps", c.sequence.eps);
      take(s, "moduli", c.sequence.moduli);
      take(s, "args", c.sequence.args);
    }
    if (j.contains("phases")) {
      const json& p = j.at("phases");
      reject_unknown(p, {"kind", "q", "delta", "n_max"}, "phases.");
      take(p, "kind", c.phases.kind);
      take(p, "q", c.phases.q);
      take(p, "delta", c.phases.delta);
      take(p, "n_max", c.phases.n_max);
    }
    if (j.contains("weight")) {
      const json& w = j.at("weight");
      reject_unknown(w, {"kind", "p"}, "weight.");
      take(w, "kind", c.weight.kind);
      take(w, "p", c.weight.p);
    }
    take(j, "per_decade", c.per_decade);
    take(j, "kmax", c.kmax);
    take(j, "trials", c.trials);
    take(j, "seed", c.seed);
    take(j, "eta", c.eta);
    take(j, "delta", c.delta);
    take(j, "margin_nats", c.margin_nats);
    if (j.contains("n_cap")) c.n_cap = static_cast<std::uint64_t>(j.at("n_cap").get<double>());
    take(j, "out_dir", c.out_dir);
    take(j, "force_u_zero", c.force_u_zero);
    take(j, "median_threshold", c.median_threshold);
    take(j, "theorem1_delta", c.theorem1_delta);
    take(j, "ceiling", c.ceiling);
    take(j, "audit_eps", c.audit_eps);
    take(j, "refinements", c.refinements);
    take(j, "drift_tolerance", c.drift_tolerance);
    take(j, "coeffs", c.coeffs);
    take(j, "kahane_terms", c.kahane_terms);
    take(j, "t_lo", c.t_lo);
    take(j, "t_hi", c.t_hi);
    take(j, "grid_n", c.grid_n);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadParam, std::string("config field has the wrong type: ") + e.what());
  }
  c.source_text = text;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kBadParam, "cannot read config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["sequence"] = {{"kind", c.sequence.kind}, {"eps", c.sequence.eps}, {"moduli", c.sequence.moduli},
                   {"args", c.sequence.args}};
  j["phases"] = {{"kind", c.phases.kind}, {"q", c.phases.q}, {"delta", c.phases.delta}, {"n_max", c.phases.n_max}};
  j["weight"] = {{"kind", c.weight.kind}, {"p", c.weight.p}};
  j["per_decade"] = c.per_decade;
  j["kmax"] = c.kmax;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["eta"] = c.eta;
  j["delta"] = c.delta;
  j["margin_nats"] = c.margin_nats;
  j["n_cap"] = c.n_cap;
  j["out_dir"] = c.out_dir;
  j["force_u_zero"] = c.force_u_zero;
  j["median_threshold"] = c.median_threshold;
  j["theorem1_delta"] = c.theorem1_delta;
  j["ceiling"] = c.ceiling;
  j["audit_eps"] = c.audit_eps;
  j["refinements"] = c.refinements;
  j["drift_tolerance"] = c.drift_tolerance;
  j["coeffs"] = c.coeffs;
  j["kahane_terms"] = c.kahane_terms;
  j["t_lo"] = c.t_lo;
  j["t_hi"] = c.t_hi;
  j["grid_n"] = c.grid_n;
  return j.dump(2);
}

}  // namespace wvlab
