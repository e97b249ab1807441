#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sumset {

// Exact rational with 64-bit numerator/denominator, always normalized
// (den > 0, gcd(num, den) = 1).  Used to keep beta and alpha = k/beta
// exact so that regime decisions never depend on floating comparisons.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    explicit Rational(std::int64_t n) : num(n), den(1) {}

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    // a < b  <=>  a.num*b.den < b.num*a.den; operands here stay tiny.
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }
};

// Parses a decimal literal ("1", "1.5", "0.25") into an exact rational.
// Scientific notation and other float syntax are rejected: parameters
// must be exact by construction.
inline Rational parse_decimal_rational(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') { neg = s[0] == '-'; i = 1; }
    std::int64_t num = 0, den = 1;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("bad rational literal: " + std::string(s));
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9')
            throw std::invalid_argument("bad rational literal: " + std::string(s));
        seen_digit = true;
        if (num > (INT64_MAX - 9) / 10 || (seen_dot && den > INT64_MAX / 10))
            throw std::range_error("rational literal out of range: " + std::string(s));
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
    }
    if (!seen_digit) throw std::invalid_argument("bad rational literal: " + std::string(s));
    return Rational(neg ? -num : num, den);
}

inline std::string to_string(const Rational& r) {
    if (r.den == 1) return std::to_string(r.num);
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

}  // namespace sumset
