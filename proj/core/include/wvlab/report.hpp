#pragma once

#include <string>
#include <vector>

#include "wvlab/experiments.hpp"

namespace wvlab {

// reals in every CSV use 17 significant digits
std::string format_real(double x);

// r,s,log_mu,nu,log_G,log_S,A,B2,log_M,delta_h
std::string profile_csv(const std::vector<GrowthProfile>& rows);
// the profile columns followed by trial,u_hex,flag_eta_<eta>...; trial-major order
std::string ensemble_csv(const EnsembleResult& result);

std::string profile_summary_json(const ProfileResult& result);
std::string ratio_summary_json(const RatioResult& result);
std::string ensemble_summary_json(const EnsembleResult& result);
std::string audit_summary_json(const AuditResult& result);
std::string kahane_summary_json(const KahaneResult& result, const ExperimentConfig& config);

// Each writer creates out_dir if needed and returns the paths it wrote:
// <name>.csv (where applicable), <name>_summary.json, plotdata_<name>.csv and
// runtime_<name>.json (wall-clock times are kept out of the summary so that it
// is reproducible byte for byte).
std::vector<std::string> write_profile(const ProfileResult& result, const std::string& out_dir);
std::vector<std::string> write_ratio(const RatioResult& result, const std::string& out_dir);
std::vector<std::string> write_ensemble(const EnsembleResult& result, const std::string& out_dir);
std::vector<std::string> write_audit(const AuditResult& result, const std::string& out_dir);
std::vector<std::string> write_kahane(const KahaneResult& result, const ExperimentConfig& config,
                                      const std::string& out_dir);

}  // namespace wvlab
