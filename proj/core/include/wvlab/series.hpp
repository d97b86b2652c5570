#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wvlab/radius.hpp"

namespace wvlab {

// Log-coefficient model n -> ln|a_n| of a power series sum a_n z^n that is
// analytic in the unit disk.  -inf encodes a_n = 0.
class CoefficientSequence {
 public:
  enum class Kind { kGeometric, kSqrtExp, kPowerExp, kTable, kCustom };

  // ln|a_n| = 0
  static CoefficientSequence geometric();
  // ln|a_n| = sqrt(n)
  static CoefficientSequence sqrt_exp();
  // ln|a_n| = n^eps, eps in (0, 1)
  static CoefficientSequence power_exp(double eps);
  // Finite table of moduli |a_n| >= 0 with optional arguments arg a_n (radians);
  // coefficients beyond the table are zero.
  static CoefficientSequence table(const std::vector<double>& moduli, std::vector<double> args = {});
  // Arbitrary model.  `log_concave` promises n -> ln|a_n| is concave, which
  // makes the truncation search exact instead of sampled.
  static CoefficientSequence custom(std::string label, std::function<double(std::uint64_t)> log_coeff,
                                    bool log_concave = false);

  double log_coeff(std::uint64_t n) const {
    switch (kind_) {
      case Kind::kGeometric: return 0.0;
      case Kind::kSqrtExp: return std::sqrt(static_cast<double>(n));
      case Kind::kPowerExp: return std::pow(static_cast<double>(n), eps_);
      case Kind::kTable:
        return n < table_->log_moduli.size() ? table_->log_moduli[n]
                                             : -std::numeric_limits<double>::infinity();
      case Kind::kCustom: return custom_(n);
    }
    return -std::numeric_limits<double>::infinity();
  }
  double arg(std::uint64_t n) const {
    return (table_ && n < table_->args.size()) ? table_->args[n] : 0.0;
  }
  // true when some arg a_n is nonzero
  bool has_args() const;
  std::optional<std::uint64_t> length() const;
  bool log_concave() const;
  Kind kind() const { return kind_; }
  double epsilon() const { return eps_; }
  const std::string& label() const { return label_; }

 private:
  struct Table {
    std::vector<double> log_moduli;
    std::vector<double> args;
  };

  CoefficientSequence(Kind kind, std::string label) : kind_(kind), label_(std::move(label)) {}

  Kind kind_;
  std::string label_;
  double eps_ = 0.0;
  std::shared_ptr<const Table> table_;
  std::function<double(std::uint64_t)> custom_;
  bool custom_concave_ = false;
};

struct SeriesOptions {
  // Dropped terms lie below the maximal term by at least this many nats.
  double margin_nats = 46.0;
  std::uint64_t n_cap = 10'000'000;
};

struct MaxTerm {
  double log_mu;
  std::uint64_t nu;
};

// Result of the single scan every radial quantity is built on.
struct TermScan {
  double log_mu = 0.0;
  std::uint64_t nu = 0;
  // Truncation index N: terms n > N are dropped.
  std::uint64_t trunc_n = 0;
  // Smallest n whose term is within the margin of the maximal term.
  std::uint64_t window_lo = 0;
  // ln of (sum of dropped terms above N) / mu; -inf when nothing is dropped.
  double tail_log_bound = -std::numeric_limits<double>::infinity();
  // true when the tail bound is a geometric certificate (log-concave or finite
  // models), false when it is an estimate for sampled custom models.
  bool tail_certified = true;
};

struct GrowthProfile {
  Radius r = Radius::from_s(1.0);
  double log_mu = 0.0;
  std::uint64_t nu = 0;
  double log_G = 0.0;
  double log_S = 0.0;
  double A = 0.0;
  double B2 = 0.0;
  std::optional<double> log_M;
  std::optional<double> delta_h;
  std::uint64_t trunc_n = 0;
  double tail_log_bound = -std::numeric_limits<double>::infinity();
};

TermScan scan_terms(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts = {});

MaxTerm max_term(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts = {});
std::uint64_t truncation_index(const CoefficientSequence& seq, Radius r, double margin_nats = 46.0,
                               std::uint64_t n_cap = SeriesOptions{}.n_cap);
double log_G(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts = {});
double log_S(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts = {});

struct Moments {
  double A;
  double B2;
};
Moments moments_AB(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts = {});

// All of the above from one scan; log_M and delta_h are left empty.
GrowthProfile growth_profile(const CoefficientSequence& seq, Radius r, const SeriesOptions& opts = {});

// Samples ln|a_n| + n ln r for n up to n_cap and reports whether the terms
// eventually fall below their running maximum.
bool looks_analytic(const CoefficientSequence& seq, Radius r, std::uint64_t n_cap);

}  // namespace wvlab
