#include "sumset/repcount.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ntt.hpp"

namespace sumset {

namespace {

using detail::u128;
using detail::u64;

// Schoolbook truncated convolution, exact.  Input entries are capped at
// 2^32 so every product fits u64 and the u128 accumulators cannot wrap
// (at most ~2^24 terms per coefficient); outputs are checked against the
// 64-bit range.
std::vector<u64> conv_trunc_exact(const std::vector<u64>& a, const std::vector<u64>& b,
                                  std::size_t keep) {
    if (a.empty() || b.empty() || keep == 0) return {};
    constexpr u64 kEntryCap = 1ull << 32;
    for (u64 v : a)
        if (v >= kEntryCap) throw std::overflow_error("rep_counts: schoolbook operand too large");
    for (u64 v : b)
        if (v >= kEntryCap) throw std::overflow_error("rep_counts: schoolbook operand too large");
    const std::size_t out_len = std::min(keep, a.size() + b.size() - 1);
    std::vector<u128> acc(out_len, 0);
    for (std::size_t i = 0; i < a.size() && i < out_len; ++i) {
        if (a[i] == 0) continue;
        const std::size_t j_end = std::min(b.size(), out_len - i);
        for (std::size_t j = 0; j < j_end; ++j) acc[i + j] += a[i] * b[j];
    }
    std::vector<u64> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        if (acc[i] > static_cast<u128>(std::numeric_limits<u64>::max()))
            throw std::overflow_error("rep_counts: coefficient exceeds 64-bit range");
        out[i] = static_cast<u64>(acc[i]);
    }
    return out;
}

std::vector<u64> power_trunc_exact(const std::vector<u64>& c, u64 k, std::size_t keep) {
    std::vector<u64> base(c);
    if (base.size() > keep) base.resize(keep);
    std::vector<u64> result;  // empty = multiplicative unit
    u64 e = k;
    while (e) {
        if (e & 1) result = result.empty() ? base : conv_trunc_exact(result, base, keep);
        e >>= 1;
        if (e) base = conv_trunc_exact(base, base, keep);
    }
    if (result.empty()) result.push_back(1);
    result.resize(keep, 0);
    return result;
}

std::vector<long double> theta_pows(const SampledSequence& seq) {
    std::vector<long double> pw(seq.thetas.size());
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = real_pow(seq.thetas[i], seq.params);
    return pw;
}

// First absent index is seq.size(); its theta is at least seq.size(), so
// the sequence certifies every tuple with value sum <= x exactly when
// size^alpha > x.
void require_coverage(const SampledSequence& seq, double x, const char* who) {
    if (compare_ipow(seq.size(), seq.params, x) > 0) return;
    throw coverage_error(std::string(who) + ": sequence too short for threshold");
}

u64 checked_add(u64 a, u64 b, const char* who) {
    u64 s = 0;
    if (__builtin_add_overflow(a, b, &s))
        throw std::overflow_error(std::string(who) + ": count exceeds 64-bit range");
    return s;
}

struct SigmaContext {
    const std::vector<long double>* pw;
    int k;
    long double x;
};

// Depth-first over coordinates 0..k-2 in index order; the last coordinate
// is resolved by binary search (pw is non-decreasing).
u64 sigma_recurse(const SigmaContext& ctx, int depth, long double partial) {
    const auto& pw = *ctx.pw;
    if (depth == ctx.k - 1) {
        auto it = std::partition_point(pw.begin(), pw.end(),
                                       [&](long double v) { return partial + v <= ctx.x; });
        return static_cast<u64>(it - pw.begin());
    }
    const long double tail_min = (ctx.k - 1 - depth) * pw.front();
    u64 total = 0;
    for (long double v : pw) {
        if (partial + v + tail_min > ctx.x) break;
        total = checked_add(total, sigma_recurse(ctx, depth + 1, partial + v), "sigma_direct");
    }
    return total;
}

void bucket_recurse(const std::vector<long double>& pw, int k, long double x, int depth,
                    long double partial, std::vector<u64>& bucket) {
    const long double tail_min = (k - 1 - depth) * pw.front();
    for (long double v : pw) {
        const long double s = partial + v;
        if (s + tail_min > x) break;
        if (depth == k - 1)
            bucket[static_cast<std::size_t>(std::ceil(s))] += 1;
        else
            bucket_recurse(pw, k, x, depth + 1, s, bucket);
    }
}

}  // namespace

MultiplicityVector multiplicities(const SampledSequence& seq, std::int64_t n_max) {
    if (n_max < 0) throw std::invalid_argument("multiplicities: n_max must be >= 0");
    // Covered if the last present value already exceeds n_max (a is
    // non-decreasing) or the first absent index must: floor(m^alpha) > n_max
    // iff m^alpha >= n_max + 1.
    const bool covered =
        (!seq.a.empty() && seq.a.back() > n_max) ||
        compare_ipow(seq.size(), seq.params, static_cast<double>(n_max) + 1.0) >= 0;
    if (!covered) throw coverage_error("multiplicities: sequence too short for n_max");
    MultiplicityVector mv;
    mv.n_max = n_max;
    mv.c.assign(static_cast<std::size_t>(n_max) + 1, 0);
    for (std::int64_t v : seq.a) {
        if (v < 0) throw std::invalid_argument("multiplicities: negative sequence value");
        if (v <= n_max) mv.c[static_cast<std::size_t>(v)] += 1;
    }
    return mv;
}

RepSeries rep_counts(const MultiplicityVector& mv, int k, std::int64_t n_max,
                     ConvBackend backend) {
    if (k < 1) throw std::invalid_argument("rep_counts: k must be >= 1");
    if (n_max < 0) throw std::invalid_argument("rep_counts: n_max must be >= 0");
    const std::size_t keep = static_cast<std::size_t>(n_max) + 1;
    std::vector<u64> c(mv.c.begin(),
                       mv.c.begin() + static_cast<std::ptrdiff_t>(std::min(mv.c.size(), keep)));
    if (c.empty()) c.push_back(0);

    // Every coefficient of the k-th power is at most (sum c)^k, so the fast
    // backend's CRT is valid whenever that bound stays below the prime
    // product (~2^85.9); 85 bits leaves margin.  Transform size is capped
    // by the primes' 2-adicity.
    u128 mass = 0;
    for (u64 v : c) mass += v;
    const long double bits =
        k * std::log2(static_cast<long double>(mass) + 1.0L);
    const bool fast_ok = bits <= 85.0L && 2 * keep - 1 <= detail::kNttMaxSize;
    if (backend == ConvBackend::Auto)
        backend = fast_ok ? ConvBackend::Fast : ConvBackend::Schoolbook;
    if (backend == ConvBackend::Fast && !fast_ok)
        throw std::overflow_error("rep_counts: input exceeds fast-backend range");

    RepSeries rep;
    rep.k = k;
    rep.n_max = n_max;
    if (k == 1) {
        c.resize(keep, 0);
        rep.r = std::move(c);
    } else if (backend == ConvBackend::Fast) {
        std::vector<u64> res[3];
        for (int t = 0; t < 3; ++t) {
            const detail::Barrett bt(detail::kNttPrimes[t]);
            std::vector<u64> cm(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) cm[i] = c[i] % bt.p;
            res[t] = detail::power_trunc_mod(cm, static_cast<u64>(k), keep, bt);
        }
        rep.r.resize(keep);
        for (std::size_t i = 0; i < keep; ++i)
            rep.r[i] = detail::crt3(res[0][i], res[1][i], res[2][i]);
    } else {
        rep.r = power_trunc_exact(c, static_cast<u64>(k), keep);
    }

    rep.S.resize(keep);
    u64 run = 0;
    for (std::size_t i = 0; i < keep; ++i) {
        run = checked_add(run, rep.r[i], "summatory");
        rep.S[i] = run;
    }
    return rep;
}

std::uint64_t sigma_direct(const SampledSequence& seq, double x) {
    if (!seq.has_thetas()) throw std::invalid_argument("sigma_direct: sequence lacks thetas");
    if (x < 0) return 0;
    require_coverage(seq, x, "sigma_direct");
    if (seq.size() == 0) return 0;
    const auto pw = theta_pows(seq);
    SigmaContext ctx{&pw, seq.params.k(), static_cast<long double>(x)};
    return sigma_recurse(ctx, 0, 0.0L);
}

std::vector<std::uint64_t> sigma_table(const SampledSequence& seq, std::int64_t n_max) {
    if (n_max < 0) throw std::invalid_argument("sigma_table: n_max must be >= 0");
    if (!seq.has_thetas()) throw std::invalid_argument("sigma_table: sequence lacks thetas");
    require_coverage(seq, static_cast<double>(n_max), "sigma_table");
    std::vector<u64> bucket(static_cast<std::size_t>(n_max) + 1, 0);
    if (seq.size() > 0) {
        const auto pw = theta_pows(seq);
        bucket_recurse(pw, seq.params.k(), static_cast<long double>(n_max), 0, 0.0L, bucket);
    }
    std::vector<u64> sig(bucket.size());
    u64 run = 0;
    for (std::size_t i = 0; i < bucket.size(); ++i) {
        run = checked_add(run, bucket[i], "sigma_table");
        sig[i] = run;
    }
    return sig;
}

SandwichReport sandwich_check(const SampledSequence& seq, std::int64_t n, ConvBackend backend) {
    if (n < 0) throw std::invalid_argument("sandwich_check: n must be >= 0");
    SandwichReport rep;
    rep.n = n;
    rep.sigma_n = sigma_direct(seq, static_cast<double>(n));
    rep.sigma_n_plus_k = sigma_direct(seq, static_cast<double>(n + seq.params.k()));
    const auto series = rep_counts(multiplicities(seq, n), seq.params.k(), n, backend);
    rep.S_n = series.S.back();
    rep.ok = rep.sigma_n <= rep.S_n && rep.S_n <= rep.sigma_n_plus_k;
    return rep;
}

void write_repcount_csv(const RepSeries& rep, std::ostream& out) {
    out << "m,r,S\n";
    for (std::size_t m = 0; m < rep.r.size(); ++m)
        out << m << ',' << rep.r[m] << ',' << rep.S[m] << '\n';
}

}  // namespace sumset
