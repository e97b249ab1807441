#pragma once

#include <cstdint>
#include <optional>

#include "sumset/rational.hpp"

namespace sumset {

// The construction splits into three regimes at alpha = 2 (equivalently
// k = 2*beta); the regime decides both the error exponent of the summatory
// discrepancy and the growth of the per-class fiber mass.
enum class Regime { AlphaGreater2, AlphaLess2, AlphaEqual2 };

// Problem parameters: k summands, target exponent beta, derived
// alpha = k/beta.  beta is kept as an exact rational whenever possible so
// the regime tag comes from integer comparison (k*den <=> 2*num), never
// from comparing a floating alpha against 2.
class Parameters {
  public:
    // Rational beta: regime derived exactly.
    Parameters(int k, Rational beta);
    // Irrational beta: caller supplies the regime tag explicitly.
    Parameters(int k, double beta, Regime regime);

    int k() const { return k_; }
    double beta() const { return beta_; }
    double alpha() const { return alpha_; }
    Regime regime() const { return regime_; }

    // Present iff beta was given as a rational.
    const std::optional<Rational>& beta_rational() const { return beta_rat_; }
    const std::optional<Rational>& alpha_rational() const { return alpha_rat_; }

    // Band-label stride d = floor(2*k^2*alpha) + k, exact when alpha is
    // rational.
    std::int64_t label_stride() const;

  private:
    int k_;
    double beta_;
    double alpha_;
    Regime regime_;
    std::optional<Rational> beta_rat_;
    std::optional<Rational> alpha_rat_;
};

enum class LogFactor { SqrtLog, Log, None };

// Predicted exponent of |S(n) - C n^beta|; the error carries a sqrt(log n)
// factor off the critical line k = 2*beta and a full log n factor on it.
struct ErrorPrediction {
    double exponent;
    LogFactor log_factor;
};

// Exponent of the summatory error term by regime:
//   k > 2*beta : beta - beta*(k+beta)/k^2   (sqrt log)
//   k < 2*beta : beta - 3*beta/(2k)         (sqrt log)
//   k = 2*beta : beta - 3/4                 (log)
ErrorPrediction predicted_error_exponent(const Parameters& p);

// C_{k,alpha} = vol{x in R^k : x_r >= 0, sum x_r^alpha <= 1}
//             = Gamma(1 + 1/alpha)^k / Gamma(1 + k/alpha).
// The raw overload exists so tests can evaluate degenerate k (e.g. k = 1,
// where the volume is exactly 1) without a Parameters object.
double volume_constant(int k, double alpha);
double volume_constant(const Parameters& p);

// floor(theta^alpha) for theta >= 0, alpha >= 1, with a guarded correction
// when theta^alpha lands within 8 ulps of an integer: the boundary is then
// re-decided by comparing theta against r^(1/alpha) in long double.
// Throws std::overflow_error once the result leaves the int64 range.
std::int64_t power_floor(double theta, double alpha);

// exp(-2 y^2), the Hoeffding tail factor.
double hoeffding_tail(double y);

// ---- guarded power comparisons -----------------------------------------
//
// Shell membership uses strict inequalities between i^alpha (i integer)
// and real thresholds.  These comparisons must be deterministic and, for
// the alpha actually exercised by experiments (integers and half-integers),
// exact.  Three paths:
//   * alpha integer:        i^alpha in unsigned 128-bit, exact compare
//                           against integral thresholds, long double else.
//   * alpha = p/2:          i^alpha = sqrtl(i^p); sqrtl is correctly
//                           rounded, so perfect squares compare exactly.
//   * other alpha:          double with a 4-ulp guard band, re-decided in
//                           long double inside the band.

// i^alpha as long double through the exact-friendly paths above.
long double ipow(std::uint64_t i, const Parameters& p);
long double ipow(std::uint64_t i, double alpha, const std::optional<Rational>& alpha_rat);

// sign of (i^alpha - x): -1, 0, +1.
int compare_ipow(std::uint64_t i, const Parameters& p, double x);
int compare_ipow(std::uint64_t i, double alpha, const std::optional<Rational>& alpha_rat, double x);

// Largest integer j >= 0 with j^alpha <= x (i.e. floor(x^(1/alpha))),
// for x >= 0; 0 if x < 1 makes no j >= 1 fit.
std::int64_t floor_root(double x, const Parameters& p);
std::int64_t floor_root(double x, double alpha, const std::optional<Rational>& alpha_rat);

// x^alpha for real x >= 0, routed through the same branch structure:
// integer alpha is a plain product, alpha = p/2 is sqrtl of a product,
// anything else falls back to powl.
long double real_pow(long double x, const Parameters& p);
long double real_pow(long double x, double alpha, const std::optional<Rational>& alpha_rat);

}  // namespace sumset
