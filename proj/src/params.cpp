#include "sumset/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sumset {

namespace {

void check_basic(int k, double beta) {
    if (k < 2) throw std::invalid_argument("Parameters: k must be >= 2");
    if (!(beta > 0.0)) throw std::invalid_argument("Parameters: beta must be positive");
    if (!(beta < static_cast<double>(k)))
        throw std::invalid_argument("Parameters: beta must be < k");
}

}  // namespace

Parameters::Parameters(int k, Rational beta)
    : k_(k), beta_(beta.value()), alpha_(0.0), regime_(Regime::AlphaEqual2) {
    check_basic(k, beta_);
    if (beta.num <= 0) throw std::invalid_argument("Parameters: beta must be positive");
    beta_rat_ = beta;
    // alpha = k/beta = k*den/num, reduced by the Rational constructor.
    alpha_rat_ = Rational(static_cast<std::int64_t>(k) * beta.den, beta.num);
    alpha_ = alpha_rat_->value();
    // alpha <=> 2 is k*den <=> 2*num exactly.
    const std::int64_t lhs = static_cast<std::int64_t>(k) * beta.den;
    const std::int64_t rhs = 2 * beta.num;
    regime_ = lhs > rhs   ? Regime::AlphaGreater2
              : lhs < rhs ? Regime::AlphaLess2
                          : Regime::AlphaEqual2;
}

Parameters::Parameters(int k, double beta, Regime regime)
    : k_(k), beta_(beta), alpha_(static_cast<double>(k) / beta), regime_(regime) {
    check_basic(k, beta);
}

std::int64_t Parameters::label_stride() const {
    if (alpha_rat_) {
        // floor(2*k^2*num/den) by integer division; everything positive.
        const std::int64_t num = 2 * static_cast<std::int64_t>(k_) * k_ * alpha_rat_->num;
        return num / alpha_rat_->den + k_;
    }
    return static_cast<std::int64_t>(std::floor(2.0 * k_ * k_ * alpha_)) + k_;
}

ErrorPrediction predicted_error_exponent(const Parameters& p) {
    const double beta = p.beta();
    const double k = p.k();
    switch (p.regime()) {
        case Regime::AlphaGreater2:  // k > 2*beta
            return {beta - beta * (k + beta) / (k * k), LogFactor::SqrtLog};
        case Regime::AlphaLess2:  // k < 2*beta
            return {beta - 3.0 * beta / (2.0 * k), LogFactor::SqrtLog};
        case Regime::AlphaEqual2:
            return {beta - 0.75, LogFactor::Log};
    }
    throw std::logic_error("unreachable");
}

double volume_constant(int k, double alpha) {
    if (k < 1) throw std::invalid_argument("volume_constant: k must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("volume_constant: alpha must be positive");
    // Gamma(1+1/alpha)^k / Gamma(1+k/alpha), evaluated in log space; both
    // arguments exceed 1 so lgamma is well conditioned here.
    const double lg = static_cast<double>(k) * std::lgamma(1.0 + 1.0 / alpha) -
                      std::lgamma(1.0 + static_cast<double>(k) / alpha);
    return std::exp(lg);
}

double volume_constant(const Parameters& p) { return volume_constant(p.k(), p.alpha()); }

std::int64_t power_floor(double theta, double alpha) {
    if (!(theta >= 0.0)) throw std::invalid_argument("power_floor: theta must be >= 0");
    if (!(alpha >= 1.0)) throw std::invalid_argument("power_floor: alpha must be >= 1");
    const double powv = std::pow(theta, alpha);
    if (!(powv < 9.2e18)) throw std::overflow_error("power_floor: theta^alpha exceeds int64");
    const double r = std::nearbyint(powv);
    const double ulp = std::nextafter(powv, std::numeric_limits<double>::infinity()) - powv;
    if (std::fabs(powv - r) <= 8.0 * ulp && r >= 1.0) {
        // Near an integer boundary the double rounding of pow cannot be
        // trusted.  Write theta = t * 2^e with t odd.  For alpha = p or
        // p/2, a tie theta^alpha == r forces e >= 0 (odd t^p over a power
        // of two is never an integer), and integer theta compares exactly
        // in 128 bits; otherwise an extended product decides the strict
        // side without ever forming the inexact exponent 1/alpha.
        using u128 = unsigned __int128;
        const double a2 = 2.0 * alpha;
        const bool integral = alpha == std::nearbyint(alpha);
        const bool half = !integral && a2 == std::nearbyint(a2);
        const auto rr = static_cast<std::uint64_t>(r);
        bool at_least;  // theta^alpha >= r
        if (integral || half) {
            const int p = static_cast<int>(integral ? alpha : a2);
            int e2 = 0;
            auto t = static_cast<std::uint64_t>(std::scalbn(std::frexp(theta, &e2), 53));
            int e = e2 - 53;
            while (t != 0 && (t & 1u) == 0) {
                t >>= 1;
                ++e;
            }
            if (e >= 0) {
                const u128 base = static_cast<u128>(t) << e;
                u128 lhs = 1;
                bool over = false;
                for (int j = 0; j < p && !over; ++j) {
                    if (base != 0 && lhs > ~static_cast<u128>(0) / base) over = true;
                    else lhs *= base;
                }
                const u128 rhs = integral ? static_cast<u128>(rr) : static_cast<u128>(rr) * rr;
                at_least = over || lhs >= rhs;
            } else {
                long double prod = 1.0L;
                for (int j = 0; j < p; ++j) prod *= static_cast<long double>(theta);
                const long double rhs = integral ? static_cast<long double>(rr)
                                                 : static_cast<long double>(rr) *
                                                       static_cast<long double>(rr);
                at_least = prod >= rhs;
            }
        } else {
            at_least = std::pow(static_cast<long double>(theta),
                                static_cast<long double>(alpha)) >= static_cast<long double>(rr);
        }
        if (at_least) return static_cast<std::int64_t>(r);
        return static_cast<std::int64_t>(r) - 1;
    }
    return static_cast<std::int64_t>(std::floor(powv));
}

double hoeffding_tail(double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("hoeffding_tail: y must be >= 0");
    return std::exp(-2.0 * y * y);
}

namespace {

using u128 = unsigned __int128;

// i^p in 128 bits; throws if it would not fit.
u128 upow128(std::uint64_t i, std::int64_t p) {
    u128 r = 1;
    for (std::int64_t j = 0; j < p; ++j) {
        const u128 next = r * i;
        if (i != 0 && next / i != r) throw std::overflow_error("upow128: overflow");
        r = next;
    }
    return r;
}

bool fits_u128_pow(std::uint64_t i, std::int64_t p) {
    if (i <= 1 || p <= 1) return true;
    // conservative: p * log2(i) < 127
    return static_cast<double>(p) * std::log2(static_cast<double>(i)) < 126.0;
}

int sign_of(long double d) { return d < 0 ? -1 : d > 0 ? 1 : 0; }

}  // namespace

long double ipow(std::uint64_t i, double alpha, const std::optional<Rational>& alpha_rat) {
    if (alpha_rat && alpha_rat->den == 1 && fits_u128_pow(i, alpha_rat->num)) {
        return static_cast<long double>(upow128(i, alpha_rat->num));
    }
    if (alpha_rat && alpha_rat->den == 2 && fits_u128_pow(i, alpha_rat->num)) {
        // i^(p/2) = sqrt(i^p); sqrtl of an exactly-representable square is exact.
        return sqrtl(static_cast<long double>(upow128(i, alpha_rat->num)));
    }
    return powl(static_cast<long double>(i), static_cast<long double>(alpha));
}

long double ipow(std::uint64_t i, const Parameters& p) {
    return ipow(i, p.alpha(), p.alpha_rational());
}

int compare_ipow(std::uint64_t i, double alpha, const std::optional<Rational>& alpha_rat,
                 double x) {
    if (x < 0) return 1;
    if (alpha_rat && fits_u128_pow(i, alpha_rat->num)) {
        const std::int64_t pnum = alpha_rat->num, pden = alpha_rat->den;
        if (pden == 1) {
            const u128 ip = upow128(i, pnum);
            // exact integral threshold below 2^63: compare as integers
            if (x == std::floor(x) && x < 9.2e18) {
                const u128 xi = static_cast<u128>(x);
                if (ip != xi) return ip < xi ? -1 : 1;
                return 0;
            }
            return sign_of(static_cast<long double>(ip) - static_cast<long double>(x));
        }
        if (pden == 2) {
            const u128 ip = upow128(i, pnum);  // compare sqrt(ip) vs x <=> ip vs x^2
            if (x == std::floor(x) && x < 9.2e18) {
                const u128 x2 = static_cast<u128>(x) * static_cast<u128>(x);
                if (ip != x2) return ip < x2 ? -1 : 1;
                return 0;
            }
            const long double lhs = sqrtl(static_cast<long double>(ip));
            return sign_of(lhs - static_cast<long double>(x));
        }
    }
    // Guarded double path: a 4-ulp band around equality is re-decided in
    // long double (deterministic; exact ties essentially never arise here).
    const double v = std::pow(static_cast<double>(i), alpha);
    const double diff = v - x;
    const double scale = std::max(std::fabs(v), std::fabs(x));
    const double ulp = std::nextafter(scale, std::numeric_limits<double>::infinity()) - scale;
    if (std::fabs(diff) > 4.0 * ulp) return diff < 0 ? -1 : 1;
    const long double lv = powl(static_cast<long double>(i), static_cast<long double>(alpha));
    return sign_of(lv - static_cast<long double>(x));
}

int compare_ipow(std::uint64_t i, const Parameters& p, double x) {
    return compare_ipow(i, p.alpha(), p.alpha_rational(), x);
}

std::int64_t floor_root(double x, double alpha, const std::optional<Rational>& alpha_rat) {
    if (!(x >= 0.0)) return -1;  // no j >= 0 satisfies j^alpha <= x < 0
    // initial estimate, then correct by exact comparison; the estimate is
    // within 1-2 of the truth for all inputs in range.
    double est = std::pow(x, 1.0 / alpha);
    if (!(est < 4.6e18)) throw std::overflow_error("floor_root: root exceeds int64");
    std::int64_t j = std::max<std::int64_t>(static_cast<std::int64_t>(std::floor(est)), 0);
    while (j > 0 && compare_ipow(static_cast<std::uint64_t>(j), alpha, alpha_rat, x) > 0) --j;
    while (compare_ipow(static_cast<std::uint64_t>(j) + 1, alpha, alpha_rat, x) <= 0) ++j;
    return j;
}

std::int64_t floor_root(double x, const Parameters& p) {
    return floor_root(x, p.alpha(), p.alpha_rational());
}

long double real_pow(long double x, double alpha, const std::optional<Rational>& alpha_rat) {
    if (alpha_rat && alpha_rat->den <= 2) {
        long double r = 1.0L;
        for (std::int64_t j = 0; j < alpha_rat->num; ++j) r *= x;
        return alpha_rat->den == 1 ? r : sqrtl(r);
    }
    return powl(x, static_cast<long double>(alpha));
}

long double real_pow(long double x, const Parameters& p) {
    return real_pow(x, p.alpha(), p.alpha_rational());
}

}  // namespace sumset
