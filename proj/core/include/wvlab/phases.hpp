#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace wvlab {

// Strictly increasing positive integer frequencies theta_0 < theta_1 < ...
// Immutable once built.  Sequences theta_n = 2^(step * n) are kept in closed
// form; everything else is an explicit list of big integers.
class PhaseSequence {
 public:
  static PhaseSequence explicit_values(std::vector<mpz_class> theta, std::string label);
  static PhaseSequence dyadic(std::size_t count, unsigned step_bits, std::string label);

  std::size_t size() const { return dyadic_ ? count_ : values_.size(); }
  mpz_class theta(std::size_t n) const;
  std::size_t bit_length(std::size_t n) const;
  bool is_dyadic() const { return dyadic_; }
  unsigned dyadic_step() const { return step_; }
  const std::string& label() const { return label_; }

 private:
  PhaseSequence() = default;

  bool dyadic_ = false;
  std::size_t count_ = 0;
  unsigned step_ = 0;
  std::vector<mpz_class> values_;
  std::string label_;
};

// theta_0 = 1, theta_{n+1} = ceil(q * theta_n), n = 0 .. n_max (exact rational
// ceiling of the binary value of q).
PhaseSequence gen_geometric(double q, std::size_t n_max);

// theta_0 = 1, theta_{n+1} = ceil(theta_n * (1 + 1 / phi(n))).
PhaseSequence gen_phi(const std::function<double(double)>& phi, std::size_t n_max, std::string label = "phi");

// Exact checks of theta_{n+1} / theta_n >= q and >= 1 + 1/phi(n).
bool satisfies_geometric_gap(const PhaseSequence& theta, double q);
bool satisfies_phi_gap(const PhaseSequence& theta, const std::function<double(double)>& phi);

struct GammaStat {
  double value;        // max over the window
  std::size_t argmax;  // index attaining it
  double tail;         // value at the last index N - 1
};

// max over n in [n_min, N-1] of ln(theta_n / (theta_{n+1} - theta_n)) / ln n.
GammaStat gamma_stat(const PhaseSequence& theta, std::size_t n_min);

// u = t / (2 pi) as an F-bit binary fraction in [0, 1).  words()[0] holds the
// first 64 bits after the binary point.
class PhaseFraction {
 public:
  PhaseFraction() : PhaseFraction(128) {}
  explicit PhaseFraction(unsigned bits);  // zero, F rounded up to a multiple of 64

  static PhaseFraction from_words(std::vector<std::uint64_t> words);
  // floor(num * 2^F / den) / 2^F
  static PhaseFraction from_ratio(const mpz_class& num, const mpz_class& den, unsigned bits = 128);
  // integer numerator U with u = U / 2^F
  static PhaseFraction from_numerator(const mpz_class& numerator, unsigned bits);

  unsigned bits() const { return static_cast<unsigned>(words_.size() * 64); }
  const std::vector<std::uint64_t>& words() const { return words_; }
  mpz_class numerator() const;
  bool is_zero() const;
  // (1 - u) mod 1
  PhaseFraction negated() const;
  // 64 bits of u starting `offset` bits after the binary point, i.e. the
  // leading bits of frac(2^offset * u).
  std::uint64_t bits_at(std::size_t offset) const;
  double to_double() const;
  // leading 128 bits, 32 lowercase hex digits
  std::string hex128() const;

 private:
  std::vector<std::uint64_t> words_;
};

// Uniform draw with F >= 128 bits; the leading words do not depend on F.
PhaseFraction sample_u(std::mt19937_64& rng, unsigned bits = 128);

// Deterministic generator for trial `index` of a run seeded with `seed`.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t index);

// 2 pi frac(theta * u) computed exactly; the conversion to double is the only rounding.
double phase_angle(const mpz_class& theta, const PhaseFraction& u);

// phase_angle(theta_n, u) for n = first .. last inclusive.
std::vector<double> phase_angles(const PhaseSequence& theta, const PhaseFraction& u, std::size_t first,
                                 std::size_t last);

// Decimal integers, one per line.
void write_phase_sequence(std::ostream& out, const PhaseSequence& theta);
PhaseSequence read_phase_sequence(std::istream& in, std::string label = "file");

}  // namespace wvlab
