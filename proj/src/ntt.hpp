#pragma once

// Exact k-th powers of non-negative integer polynomials via number
// theoretic transforms modulo three NTT-friendly primes, recombined by
// CRT in 128-bit arithmetic.  Truncation is by coefficient index, which
// commutes with reduction mod p, so each prime runs independently and
// the reconstruction happens once on the final series.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sumset::detail {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

// primes p = c * 2^e + 1 with generator 3; min 2-adicity 2^23 caps the
// transform size at 8388608.
inline constexpr u64 kNttPrimes[3] = {998244353ull, 469762049ull, 167772161ull};
inline constexpr u64 kNttMaxSize = 1ull << 23;

struct Barrett {
    u64 p;
    u64 im;  // ~0 / p + 1
    explicit Barrett(u64 prime) : p(prime), im(~0ull / prime + 1) {}
    // a, b < p < 2^31, so a*b < 2^62 fits u64.
    u64 mul(u64 a, u64 b) const {
        const u64 z = a * b;
        const u64 x = static_cast<u64>((static_cast<u128>(z) * im) >> 64);
        const u64 r = z - x * p;
        return static_cast<std::int64_t>(r) < 0 ? r + p : (r >= p ? r - p : r);
    }
    u64 add(u64 a, u64 b) const {
        const u64 s = a + b;
        return s >= p ? s - p : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p - b; }
    u64 pow(u64 a, u64 e) const {
        u64 r = 1;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    u64 inv(u64 a) const { return pow(a, p - 2); }
};

// In-place iterative transform, decimation in time.  `invert` runs the
// inverse transform including the 1/n scaling.
inline void ntt(std::vector<u64>& a, const Barrett& bt, bool invert) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("ntt: size not a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        u64 wlen = bt.pow(3, (bt.p - 1) / len);
        if (invert) wlen = bt.inv(wlen);
        for (std::size_t i = 0; i < n; i += len) {
            u64 w = 1;
            for (std::size_t j = 0; j < len / 2; ++j) {
                const u64 u = a[i + j];
                const u64 v = bt.mul(a[i + j + len / 2], w);
                a[i + j] = bt.add(u, v);
                a[i + j + len / 2] = bt.sub(u, v);
                w = bt.mul(w, wlen);
            }
        }
    }
    if (invert) {
        const u64 n_inv = bt.inv(n % bt.p);
        for (auto& x : a) x = bt.mul(x, n_inv);
    }
}

// (a * b) mod p, truncated to the first `keep` coefficients.
inline std::vector<u64> conv_trunc_mod(const std::vector<u64>& a, const std::vector<u64>& b,
                                       std::size_t keep, const Barrett& bt) {
    if (a.empty() || b.empty()) return {};
    const std::size_t full = a.size() + b.size() - 1;
    std::size_t sz = 1;
    while (sz < full) sz <<= 1;
    if (sz > kNttMaxSize) throw std::invalid_argument("ntt: transform size exceeds prime support");
    std::vector<u64> fa(a);
    fa.resize(sz, 0);
    if (&a == &b) {
        ntt(fa, bt, false);
        for (auto& x : fa) x = bt.mul(x, x);
    } else {
        std::vector<u64> fb(b);
        fb.resize(sz, 0);
        ntt(fa, bt, false);
        ntt(fb, bt, false);
        for (std::size_t i = 0; i < sz; ++i) fa[i] = bt.mul(fa[i], fb[i]);
    }
    ntt(fa, bt, true);
    fa.resize(std::min(keep, full));
    return fa;
}

// c^k mod p truncated to `keep` coefficients, by binary exponentiation.
inline std::vector<u64> power_trunc_mod(const std::vector<u64>& c, u64 k, std::size_t keep,
                                        const Barrett& bt) {
    std::vector<u64> base(c);
    if (base.size() > keep) base.resize(keep);
    std::vector<u64> result;  // empty = multiplicative unit
    u64 e = k;
    while (e) {
        if (e & 1) result = result.empty() ? base : conv_trunc_mod(result, base, keep, bt);
        e >>= 1;
        if (e) base = conv_trunc_mod(base, base, keep, bt);
    }
    if (result.empty()) result.push_back(1 % bt.p);
    result.resize(keep, 0);
    return result;
}

// CRT over the three fixed primes; throws if the reconstructed value does
// not fit u64 (counts must not silently wrap).
inline u64 crt3(u64 r0, u64 r1, u64 r2) {
    const Barrett b1(kNttPrimes[1]), b2(kNttPrimes[2]);
    const u64 p0 = kNttPrimes[0], p1 = kNttPrimes[1], p2 = kNttPrimes[2];
    // x = r0 + p0 * t1, t1 = (r1 - r0)/p0 mod p1
    const u64 t1 = b1.mul(b1.sub(r1 % p1, r0 % p1), b1.inv(p0 % p1));
    const u128 x01 = static_cast<u128>(r0) + static_cast<u128>(p0) * t1;
    // x = x01 + p0*p1 * t2, t2 = (r2 - x01)/(p0*p1) mod p2
    const u128 p01 = static_cast<u128>(p0) * p1;
    const u64 x01_mod = static_cast<u64>(x01 % p2);
    const u64 p01_mod = static_cast<u64>(p01 % p2);
    const u64 t2 = b2.mul(b2.sub(r2 % p2, x01_mod), b2.inv(p01_mod));
    const u128 x = x01 + p01 * t2;
    if (x > static_cast<u128>(~0ull))
        throw std::overflow_error("rep_counts: coefficient exceeds 64-bit range");
    return static_cast<u64>(x);
}

}  // namespace sumset::detail
