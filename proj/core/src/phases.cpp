#include "wvlab/phases.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <istream>
#include <ostream>

#include "wvlab/error.hpp"
#include "wvlab/numeric.hpp"

static_assert(GMP_LIMB_BITS == 64, "64-bit GMP limbs expected");

namespace wvlab {

namespace {

std::size_t mpz_bits(const mpz_class& z) { return z == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2); }

double mpz_log(const mpz_class& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

std::uint64_t low_limb(const mpz_class& z) {
  return mpz_size(z.get_mpz_t()) == 0 ? 0 : static_cast<std::uint64_t>(mpz_getlimbn(z.get_mpz_t(), 0));
}

double angle_from_top64(std::uint64_t top) {
  constexpr long double kTwoPiL = 6.283185307179586476925286766559005768L;
  const long double x = static_cast<long double>(top) * 0x1p-64L;
  double angle = static_cast<double>(x * kTwoPiL);
  if (angle >= kTwoPi) angle = std::nextafter(kTwoPi, 0.0);
  return angle;
}

// Leading 64 bits of frac(theta * U / 2^F), exact.
std::uint64_t frac_top64(const mpz_class& theta, const PhaseFraction& u, const mpz_class& numerator) {
  const std::size_t len = mpz_bits(theta);
  if (len == 0) return 0;
  if (mpz_scan1(theta.get_mpz_t(), 0) == len - 1) return u.bits_at(len - 1);

  const std::size_t f = u.bits();
  constexpr std::size_t kGuard = 64;
  mpz_class prod;
  if (f <= len + 64 + kGuard) {
    prod = theta * numerator;
    mpz_fdiv_q_2exp(prod.get_mpz_t(), prod.get_mpz_t(), f - 64);
    return low_limb(prod);
  }
  // theta * U = theta * U_hi * 2^k + theta * U_lo with theta * U_lo < 2^(f - 64 - guard).
  const std::size_t k = f - (len + 64 + kGuard);
  mpz_class hi;
  mpz_fdiv_q_2exp(hi.get_mpz_t(), numerator.get_mpz_t(), k);
  prod = theta * hi;
  mpz_class guard_bits;
  mpz_fdiv_q_2exp(guard_bits.get_mpz_t(), prod.get_mpz_t(), len);
  mpz_fdiv_r_2exp(guard_bits.get_mpz_t(), guard_bits.get_mpz_t(), kGuard);
  if (mpz_popcount(guard_bits.get_mpz_t()) == kGuard) {
    // a carry from the dropped part may reach the result: redo in full
    prod = theta * numerator;
    mpz_fdiv_q_2exp(prod.get_mpz_t(), prod.get_mpz_t(), f - 64);
    return low_limb(prod);
  }
  mpz_fdiv_q_2exp(prod.get_mpz_t(), prod.get_mpz_t(), len + kGuard);
  return low_limb(prod);
}

void validate_increasing(const std::vector<mpz_class>& values) {
  if (values.empty()) throw Error(ErrorCode::kBadParam, "phase sequence is empty");
  if (values.front() < 1) throw Error(ErrorCode::kBadParam, "phase sequence needs theta_0 >= 1");
  for (std::size_t n = 1; n < values.size(); ++n)
    if (values[n] <= values[n - 1])
      throw Error(ErrorCode::kBadParam, "phase sequence is not strictly increasing at n = " + std::to_string(n));
}

}  // namespace

PhaseSequence PhaseSequence::explicit_values(std::vector<mpz_class> theta, std::string label) {
  validate_increasing(theta);
  PhaseSequence seq;
  seq.values_ = std::move(theta);
  seq.label_ = std::move(label);
  return seq;
}

PhaseSequence PhaseSequence::dyadic(std::size_t count, unsigned step_bits, std::string label) {
  if (count == 0 || step_bits == 0) throw Error(ErrorCode::kBadParam, "dyadic sequence needs count, step >= 1");
  PhaseSequence seq;
  seq.dyadic_ = true;
  seq.count_ = count;
  seq.step_ = step_bits;
  seq.label_ = std::move(label);
  return seq;
}

mpz_class PhaseSequence::theta(std::size_t n) const {
  if (n >= size()) throw Error(ErrorCode::kPhasesTooShort, "index " + std::to_string(n) + " beyond phase sequence");
  if (!dyadic_) return values_[n];
  mpz_class v;
  mpz_setbit(v.get_mpz_t(), static_cast<mp_bitcnt_t>(step_) * n);
  return v;
}

std::size_t PhaseSequence::bit_length(std::size_t n) const {
  if (n >= size()) throw Error(ErrorCode::kPhasesTooShort, "index " + std::to_string(n) + " beyond phase sequence");
  return dyadic_ ? static_cast<std::size_t>(step_) * n + 1 : mpz_bits(values_[n]);
}

PhaseSequence gen_geometric(double q, std::size_t n_max) {
  if (!(q > 1.0) || !std::isfinite(q)) throw Error(ErrorCode::kBadParam, "geometric phases need q > 1");
  int exp = 0;
  const double mant = std::frexp(q, &exp);
  char label[64];
  std::snprintf(label, sizeof label, "geometric(q=%g)", q);
  if (mant == 0.5) return PhaseSequence::dyadic(n_max + 1, static_cast<unsigned>(exp - 1), label);

  const mpq_class ratio(q);
  std::vector<mpz_class> theta;
  theta.reserve(n_max + 1);
  theta.emplace_back(1);
  for (std::size_t n = 0; n < n_max; ++n) {
    mpz_class next = theta.back() * ratio.get_num();
    mpz_cdiv_q(next.get_mpz_t(), next.get_mpz_t(), ratio.get_den_mpz_t());
    theta.push_back(std::move(next));
  }
  return PhaseSequence::explicit_values(std::move(theta), label);
}

PhaseSequence gen_phi(const std::function<double(double)>& phi, std::size_t n_max, std::string label) {
  std::vector<mpz_class> theta;
  theta.reserve(n_max + 1);
  theta.emplace_back(1);
  for (std::size_t n = 0; n < n_max; ++n) {
    const double value = phi(static_cast<double>(n));
    if (!(value > 0.0) || !std::isfinite(value))
      throw Error(ErrorCode::kBadParam, "phi must be positive, phi(" + std::to_string(n) + ") = " + std::to_string(value));
    const mpq_class p(value);
    mpz_class step = theta.back() * p.get_den();
    mpz_cdiv_q(step.get_mpz_t(), step.get_mpz_t(), p.get_num_mpz_t());
    theta.push_back(theta.back() + step);
  }
  return PhaseSequence::explicit_values(std::move(theta), std::move(label));
}

bool satisfies_geometric_gap(const PhaseSequence& theta, double q) {
  if (!(q > 1.0)) return false;
  if (theta.is_dyadic()) return std::ldexp(1.0, static_cast<int>(theta.dyadic_step())) >= q;
  const mpq_class ratio(q);
  for (std::size_t n = 0; n + 1 < theta.size(); ++n)
    if (theta.theta(n + 1) * ratio.get_den() < theta.theta(n) * ratio.get_num()) return false;
  return true;
}

bool satisfies_phi_gap(const PhaseSequence& theta, const std::function<double(double)>& phi) {
  for (std::size_t n = 0; n + 1 < theta.size(); ++n) {
    const double value = phi(static_cast<double>(n));
    if (!(value > 0.0)) return false;
    const mpq_class p(value);
    const mpz_class a = theta.theta(n);
    if ((theta.theta(n + 1) - a) * p.get_num() < a * p.get_den()) return false;
  }
  return true;
}

GammaStat gamma_stat(const PhaseSequence& theta, std::size_t n_min) {
  if (n_min < 2) throw Error(ErrorCode::kBadParam, "gamma_stat needs n_min >= 2");
  if (theta.size() < n_min + 2) throw Error(ErrorCode::kBadParam, "phase sequence too short for gamma_stat window");
  const std::size_t last = theta.size() - 1;
  GammaStat best{-std::numeric_limits<double>::infinity(), n_min, 0.0};
  // dyadic: theta_n / (theta_{n+1} - theta_n) = 1 / (2^j - 1)
  const double dyadic_log_ratio =
      theta.is_dyadic() ? -std::log(std::ldexp(1.0, static_cast<int>(theta.dyadic_step())) - 1.0) : 0.0;
  for (std::size_t n = n_min; n < last; ++n) {
    double log_ratio = dyadic_log_ratio;
    if (!theta.is_dyadic()) {
      const mpz_class a = theta.theta(n);
      const mpz_class d = theta.theta(n + 1) - a;
      if (d <= 0) throw Error(ErrorCode::kBadParam, "theta_{n+1} = theta_n at n = " + std::to_string(n));
      log_ratio = mpz_log(a) - mpz_log(d);
    }
    const double value = log_ratio / std::log(static_cast<double>(n));
    if (value > best.value) {
      best.value = value;
      best.argmax = n;
    }
    if (n + 1 == last) best.tail = value;
  }
  return best;
}

PhaseFraction::PhaseFraction(unsigned bits) {
  if (bits < 128) throw Error(ErrorCode::kBadParam, "phase fractions need at least 128 bits");
  words_.assign((bits + 63) / 64, 0);
}

PhaseFraction PhaseFraction::from_words(std::vector<std::uint64_t> words) {
  if (words.size() < 2) throw Error(ErrorCode::kBadParam, "phase fractions need at least 128 bits");
  PhaseFraction u;
  u.words_ = std::move(words);
  return u;
}

PhaseFraction PhaseFraction::from_numerator(const mpz_class& numerator, unsigned bits) {
  PhaseFraction u(bits);
  if (numerator < 0 || mpz_bits(numerator) > u.bits())
    throw Error(ErrorCode::kBadParam, "phase fraction numerator outside [0, 2^F)");
  std::size_t count = 0;
  std::vector<std::uint64_t> tmp(u.words_.size());
  mpz_export(tmp.data(), &count, 1, sizeof(std::uint64_t), 0, 0, numerator.get_mpz_t());
  // right-align: exported words are the least significant `count` words
  const std::size_t pad = u.words_.size() - count;
  for (std::size_t i = 0; i < count; ++i) u.words_[pad + i] = tmp[i];
  return u;
}

PhaseFraction PhaseFraction::from_ratio(const mpz_class& num, const mpz_class& den, unsigned bits) {
  if (den <= 0 || num < 0 || num >= den) throw Error(ErrorCode::kBadParam, "phase fraction ratio must lie in [0, 1)");
  const unsigned f = (bits + 63) / 64 * 64;
  mpz_class scaled = num;
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), f);
  mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  return from_numerator(scaled, f);
}

mpz_class PhaseFraction::numerator() const {
  mpz_class z;
  mpz_import(z.get_mpz_t(), words_.size(), 1, sizeof(std::uint64_t), 0, 0, words_.data());
  return z;
}

bool PhaseFraction::is_zero() const {
  for (auto w : words_)
    if (w != 0) return false;
  return true;
}

PhaseFraction PhaseFraction::negated() const {
  PhaseFraction out = *this;
  // two's complement on the whole word array, least significant word last
  bool carry = true;
  for (std::size_t i = out.words_.size(); i-- > 0;) {
    std::uint64_t w = ~out.words_[i];
    if (carry) {
      ++w;
      carry = w == 0;
    }
    out.words_[i] = w;
  }
  return out;
}

std::uint64_t PhaseFraction::bits_at(std::size_t offset) const {
  const std::size_t w = offset / 64;
  const unsigned b = static_cast<unsigned>(offset % 64);
  const std::uint64_t hi = w < words_.size() ? words_[w] : 0;
  if (b == 0) return hi;
  const std::uint64_t lo = w + 1 < words_.size() ? words_[w + 1] : 0;
  return (hi << b) | (lo >> (64 - b));
}

double PhaseFraction::to_double() const {
  return static_cast<double>(static_cast<long double>(words_[0]) * 0x1p-64L);
}

std::string PhaseFraction::hex128() const {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(words_[0]),
                static_cast<unsigned long long>(words_[1]));
  return buf;
}

PhaseFraction sample_u(std::mt19937_64& rng, unsigned bits) {
  PhaseFraction u(bits);
  std::vector<std::uint64_t> words(u.words().size());
  for (auto& w : words) w = rng();
  return PhaseFraction::from_words(std::move(words));
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x57'56'4cu};
  return std::mt19937_64(seq);
}

double phase_angle(const mpz_class& theta, const PhaseFraction& u) {
  if (theta < 0) throw Error(ErrorCode::kBadParam, "theta must be nonnegative");
  return angle_from_top64(frac_top64(theta, u, u.numerator()));
}

std::vector<double> phase_angles(const PhaseSequence& theta, const PhaseFraction& u, std::size_t first,
                                 std::size_t last) {
  if (last >= theta.size())
    throw Error(ErrorCode::kPhasesTooShort,
                "phase sequence has " + std::to_string(theta.size()) + " terms, " + std::to_string(last + 1) + " required");
  std::vector<double> out;
  out.reserve(last - first + 1);
  if (u.is_zero()) {
    out.assign(last - first + 1, 0.0);
    return out;
  }
  if (theta.is_dyadic()) {
    const std::size_t step = theta.dyadic_step();
    for (std::size_t n = first; n <= last; ++n) out.push_back(angle_from_top64(u.bits_at(step * n)));
    return out;
  }
  const mpz_class numerator = u.numerator();
  for (std::size_t n = first; n <= last; ++n)
    out.push_back(angle_from_top64(frac_top64(theta.theta(n), u, numerator)));
  return out;
}

void write_phase_sequence(std::ostream& out, const PhaseSequence& theta) {
  for (std::size_t n = 0; n < theta.size(); ++n) out << theta.theta(n).get_str() << '\n';
}

PhaseSequence read_phase_sequence(std::istream& in, std::string label) {
  std::vector<mpz_class> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    const auto end = line.find_last_not_of(" \t\r");
    const std::string digits = line.substr(begin, end - begin + 1);
    if (digits.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorCode::kBadParam, "phase file line is not a decimal integer: " + digits);
    values.emplace_back(digits, 10);
  }
  return PhaseSequence::explicit_values(std::move(values), std::move(label));
}

}  // namespace wvlab
