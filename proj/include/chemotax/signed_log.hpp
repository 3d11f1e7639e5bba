#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace chemotax {

// Scalar carried as a sign plus the natural log of its magnitude.
//
// The subsolution constant chain produces values far outside double range
// (y0 ~ 1e139 already for the reference parameter set, and much worse for
// asymmetric exponent pairs), so every derivation and residual evaluation
// routes through this type. Linear doubles are materialized only at the
// edges and saturate to +-infinity there.
struct SignedLog {
  double lg = -std::numeric_limits<double>::infinity();  // log|value|
  int sgn = 0;                                           // -1, 0, +1

  static SignedLog zero() { return {}; }
  static SignedLog one() { return {0.0, 1}; }

  bool is_zero() const { return sgn == 0; }
  bool finite() const { return sgn == 0 || std::isfinite(lg) || lg == -std::numeric_limits<double>::infinity(); }
};

inline SignedLog slog(double x) {
  if (x == 0.0) return SignedLog::zero();
  return {std::log(std::abs(x)), x > 0 ? 1 : -1};
}

// +exp(lg)
inline SignedLog slog_pos(double lg) { return {lg, 1}; }

inline SignedLog slog_signed(int sgn, double lg) {
  return sgn == 0 ? SignedLog::zero() : SignedLog{lg, sgn > 0 ? 1 : -1};
}

// Saturating conversion: magnitudes beyond double range come back as
// +-infinity, underflows as (signed) zero.
inline double to_double(const SignedLog& v) {
  if (v.sgn == 0) return 0.0;
  if (v.lg > 709.7) return v.sgn > 0 ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
  if (v.lg < -745.0) return 0.0;
  return v.sgn * std::exp(v.lg);
}

inline SignedLog operator*(const SignedLog& a, const SignedLog& b) {
  if (a.sgn == 0 || b.sgn == 0) return SignedLog::zero();
  return {a.lg + b.lg, a.sgn * b.sgn};
}

inline SignedLog operator/(const SignedLog& a, const SignedLog& b) {
  if (b.sgn == 0) throw std::domain_error("SignedLog: division by zero");
  if (a.sgn == 0) return SignedLog::zero();
  return {a.lg - b.lg, a.sgn * b.sgn};
}

inline SignedLog operator-(const SignedLog& a) { return {a.lg, -a.sgn}; }

inline SignedLog operator+(const SignedLog& a, const SignedLog& b) {
  if (a.sgn == 0) return b;
  if (b.sgn == 0) return a;
  const SignedLog& big = (a.lg >= b.lg) ? a : b;
  const SignedLog& sml = (a.lg >= b.lg) ? b : a;
  const double r = (sml.sgn * big.sgn) * std::exp(sml.lg - big.lg);  // in [-1, 1]
  const double m = 1.0 + r;
  if (m == 0.0) return SignedLog::zero();
  return {big.lg + std::log(std::abs(m)), m > 0 ? big.sgn : -big.sgn};
}

inline SignedLog operator-(const SignedLog& a, const SignedLog& b) { return a + (-b); }

// base must be nonnegative
inline SignedLog pow(const SignedLog& base, double p) {
  if (base.sgn < 0) throw std::domain_error("SignedLog: pow of negative base");
  if (base.sgn == 0) {
    if (p > 0) return SignedLog::zero();
    if (p == 0) return SignedLog::one();
    return {std::numeric_limits<double>::infinity(), 1};
  }
  return {p * base.lg, 1};
}

// Signed log-sum-exp over a term list; more accurate than folding operator+.
inline SignedLog sum(std::span<const SignedLog> terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (t.sgn != 0 && t.lg > mx) mx = t.lg;
  if (mx == -std::numeric_limits<double>::infinity()) return SignedLog::zero();
  double acc = 0.0;
  for (const auto& t : terms)
    if (t.sgn != 0) acc += t.sgn * std::exp(t.lg - mx);
  if (acc == 0.0) return SignedLog::zero();
  return {mx + std::log(std::abs(acc)), acc > 0 ? 1 : -1};
}

// log of the largest term magnitude; -inf when all terms vanish.
inline double max_magnitude(std::span<const SignedLog> terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (t.sgn != 0 && t.lg > mx) mx = t.lg;
  return mx;
}

// true if a < b as real numbers
inline bool sl_less(const SignedLog& a, const SignedLog& b) {
  if (a.sgn != b.sgn) return a.sgn < b.sgn;
  if (a.sgn == 0) return false;
  return a.sgn > 0 ? a.lg < b.lg : a.lg > b.lg;
}

}  // namespace chemotax
