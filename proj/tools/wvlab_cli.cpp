// wvlab: experiment driver.  Every subcommand reads an optional JSON config, applies
// the command-line overrides and writes its CSV/JSON files into --out.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wvlab/config.hpp"
#include "wvlab/error.hpp"
#include "wvlab/experiments.hpp"
#include "wvlab/report.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> kmax;
  std::optional<int> trials;
  std::optional<std::string> eta;
  std::optional<double> delta;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--kmax", o.kmax, "grid reaches r = 1 - 10^-kmax");
  cmd->add_option("--trials", o.trials, "number of rotations t");
  cmd->add_option("--eta", o.eta, "comma-separated exceptional thresholds");
  cmd->add_option("--delta", o.delta, "phase-gap exponent for the corollary bounds");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw wvlab::Error(wvlab::ErrorCode::kBadParam, "bad --eta entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

wvlab::ExperimentConfig resolve(const Overrides& o) {
  wvlab::ExperimentConfig c = o.config_path.empty() ? wvlab::ExperimentConfig{} : wvlab::load_config(o.config_path);
  if (o.out) c.out_dir = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.kmax) c.kmax = *o.kmax;
  if (o.trials) c.trials = *o.trials;
  if (o.eta) c.eta = parse_list(*o.eta);
  if (o.delta) c.delta = *o.delta;
  c.validate();
  return c;
}

void report(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiman-Valiron growth experiments on random power series"};
  app.require_subcommand(1);

  Overrides o;
  auto* profile = app.add_subcommand("profile", "t = 0 sweep of mu, nu, G, S, A, B2, M, Delta_h");
  auto* sharp = app.add_subcommand("sharpness", "lower-bound ratio for sum e^sqrt(n) z^n");
  auto* ensemble = app.add_subcommand("ensemble", "Monte Carlo over rotations t");
  auto* audit = app.add_subcommand("bound-audit", "violation sets of the A, B2 and G bounds");
  auto* baire = app.add_subcommand("baire", "lower ratio for sum e^{n^eps} z^n");
  auto* kahane = app.add_subcommand("kahane", "max of Re sum c_n e^{i theta_n t} over an interval");
  auto* phases = app.add_subcommand("phases", "print the phase sequence, one integer per line");
  for (auto* cmd : {profile, sharp, ensemble, audit, baire, kahane, phases}) add_common(cmd, o);
  std::uint64_t phase_count = 64;
  phases->add_option("--count", phase_count, "largest index n (prints n + 1 terms)");

  CLI11_PARSE(app, argc, argv);

  try {
    const wvlab::ExperimentConfig c = resolve(o);
    if (*profile) {
      report(wvlab::write_profile(wvlab::run_profile(c), c.out_dir));
    } else if (*sharp) {
      report(wvlab::write_ratio(wvlab::run_sharpness(c), c.out_dir));
    } else if (*ensemble) {
      report(wvlab::write_ensemble(wvlab::run_ensemble(c), c.out_dir));
    } else if (*audit) {
      report(wvlab::write_audit(wvlab::run_bound_audit(c), c.out_dir));
    } else if (*baire) {
      report(wvlab::write_ratio(wvlab::run_baire_example(c), c.out_dir));
    } else if (*kahane) {
      report(wvlab::write_kahane(wvlab::run_kahane(c), c, c.out_dir));
    } else if (*phases) {
      wvlab::write_phase_sequence(std::cout, c.phases.build(phase_count));
    }
  } catch (const wvlab::Error& e) {
    std::cerr << "wvlab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wvlab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
