#include "sumset/shell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace sumset {

namespace {

constexpr std::size_t kSampleCap = 16;
// Right-side pruning works on sums of ipow values (exact for integer
// alpha, <=1e-13 absolute error otherwise at workbench scales); the
// margin only ever keeps borderline candidates, never drops them.
constexpr long double kPruneMargin = 1e-9L;

// Largest j >= 0 with j^alpha < x, or -1 if none.
std::int64_t strict_floor_root(double x, double alpha, const std::optional<Rational>& rat) {
    if (!(x > 0)) return -1;
    std::int64_t j = floor_root(x, alpha, rat);
    if (compare_ipow(static_cast<std::uint64_t>(j), alpha, rat, x) == 0) --j;
    return j;
}

// Smallest j >= 0 with j^alpha >= x.
std::int64_t ceil_root(double x, double alpha, const std::optional<Rational>& rat) {
    if (!(x > 0)) return 0;
    const std::int64_t j = floor_root(x, alpha, rat);
    return compare_ipow(static_cast<std::uint64_t>(j), alpha, rat, x) == 0 ? j : j + 1;
}

struct ShellBuilder {
    const Parameters& p;
    double n;
    int k;
    ShellIndex* out;
    std::vector<std::uint32_t> prefix;

    // v = sum of i^alpha, vp = sum of (i+1)^alpha over chosen coordinates.
    void descend(int r, long double v, long double vp) {
        const auto& rat = p.alpha_rational();
        const double alpha = p.alpha();
        std::int64_t hi, lo;
        if (r == 0) {
            hi = strict_floor_root(n, alpha, rat);
            lo = std::max<std::int64_t>(k - 1, ceil_root(n / k, alpha, rat) - 1);
        } else {
            hi = std::min<std::int64_t>(prefix[static_cast<std::size_t>(r) - 1] - 1,
                                        strict_floor_root(static_cast<double>(n - v), alpha, rat));
            lo = k - 1 - r;
        }
        for (std::int64_t i = hi; i >= lo; --i) {
            const long double ip = ipow(static_cast<std::uint64_t>(i), p);
            const long double ip1 = ipow(static_cast<std::uint64_t>(i) + 1, p);
            // After this coordinate, k-1-r more follow, each at most i-1;
            // if even the largest completion cannot push the right sum
            // past n, no smaller i can either.
            if (vp + ip1 + (k - 1 - r) * ip <= n - kPruneMargin) break;
            prefix[static_cast<std::size_t>(r)] = static_cast<std::uint32_t>(i);
            if (r < k - 2) {
                descend(r + 1, v + ip, vp + ip1);
                continue;
            }
            const long double v2 = v + ip;
            const long double vp2 = vp + ip1;
            const double x2 = static_cast<double>(n - v2);
            const std::int64_t hi_f =
                std::min<std::int64_t>(i - 1, strict_floor_root(x2, alpha, rat));
            if (hi_f < 0) continue;
            const double x1 = static_cast<double>(n - vp2);
            const std::int64_t lo_f = x1 > 0 ? floor_root(x1, alpha, rat) : 0;
            if (lo_f <= hi_f)
                out->push_prefix(prefix.data(), static_cast<std::uint32_t>(lo_f),
                                 static_cast<std::uint32_t>(hi_f), static_cast<double>(v2));
        }
    }
};

std::optional<Rational> infer_rational(double alpha) {
    if (alpha == std::floor(alpha) && alpha < 63)
        return Rational{static_cast<std::int64_t>(alpha), 1};
    const double twice = 2 * alpha;
    if (twice == std::floor(twice) && twice < 126)
        return Rational{static_cast<std::int64_t>(twice), 2};
    return std::nullopt;
}

struct GeneralShellCounter {
    const std::vector<std::int64_t>& a;
    double alpha;
    const std::optional<Rational>& rat;
    double n;
    int k;
    std::uint64_t count = 0;

    void descend(int r, long double v, long double vp) {
        const long double w = static_cast<long double>(a[static_cast<std::size_t>(r)]);
        if (r == k - 1) {
            const double x2 = static_cast<double>((n - v) / w);
            const std::int64_t hi = strict_floor_root(x2, alpha, rat);
            if (hi < 0) return;
            const double x1 = static_cast<double>((n - vp) / w);
            const std::int64_t lo = x1 > 0 ? floor_root(x1, alpha, rat) : 0;
            if (lo <= hi) count += static_cast<std::uint64_t>(hi - lo + 1);
            return;
        }
        const double x2 = static_cast<double>((n - v) / w);
        const std::int64_t hi = strict_floor_root(x2, alpha, rat);
        for (std::int64_t i = 0; i <= hi; ++i)
            descend(r + 1, v + w * ipow(static_cast<std::uint64_t>(i), alpha, rat),
                    vp + w * ipow(static_cast<std::uint64_t>(i) + 1, alpha, rat));
    }
};

std::uint64_t checked_sq_add(std::uint64_t acc, std::uint64_t sz) {
    std::uint64_t sq = 0, out = 0;
    if (__builtin_mul_overflow(sz, sz, &sq) || __builtin_add_overflow(acc, sq, &out))
        throw std::overflow_error("verify_partition: fiber mass exceeds 64-bit range");
    return out;
}

}  // namespace

std::uint64_t ShellIndex::tuple_count() const {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < prefix_count(); ++j) total += fiber_size(j);
    return total;
}

std::vector<std::int64_t> ShellIndex::prefix(std::size_t j) const {
    const int km1 = params_.k() - 1;
    std::vector<std::int64_t> out(static_cast<std::size_t>(km1));
    for (int r = 0; r < km1; ++r) out[static_cast<std::size_t>(r)] = coord(j, r);
    return out;
}

std::vector<ShellTuple> ShellIndex::tuples() const {
    std::vector<ShellTuple> out;
    out.reserve(tuple_count());
    for (std::size_t j = 0; j < prefix_count(); ++j) {
        const auto pre = prefix(j);
        for (std::int64_t i = fiber_lo_[j]; i <= fiber_hi_[j]; ++i) {
            ShellTuple t;
            t.coords = pre;
            t.coords.push_back(i);
            out.push_back(std::move(t));
        }
    }
    return out;
}

void ShellIndex::push_prefix(const std::uint32_t* coords, std::uint32_t lo, std::uint32_t hi,
                             double v) {
    coords_.insert(coords_.end(), coords, coords + params_.k() - 1);
    fiber_lo_.push_back(lo);
    fiber_hi_.push_back(hi);
    value_.push_back(v);
}

ShellIndex enumerate_shell(const Parameters& p, double n) {
    if (!(n == n)) throw std::invalid_argument("enumerate_shell: n is NaN");
    if (n >= 9e15) throw std::invalid_argument("enumerate_shell: n too large");
    ShellIndex index(p, n);
    if (n < 1) return index;
    const auto& rat = p.alpha_rational();
    if (strict_floor_root(n, p.alpha(), rat) >= static_cast<std::int64_t>(1ull << 32))
        throw std::invalid_argument("enumerate_shell: coordinate range exceeds 32 bits");
    ShellBuilder builder{p, n, p.k(), &index,
                         std::vector<std::uint32_t>(static_cast<std::size_t>(p.k() - 1))};
    builder.descend(0, 0.0L, 0.0L);
    return index;
}

std::uint64_t count_shell_general(const std::vector<std::int64_t>& a, double alpha, double n) {
    if (a.empty()) throw std::invalid_argument("count_shell_general: empty weight list");
    for (std::int64_t w : a)
        if (w < 1) throw std::invalid_argument("count_shell_general: weights must be >= 1");
    if (!(alpha >= 1)) throw std::invalid_argument("count_shell_general: alpha must be >= 1");
    if (!(n > 0)) return 0;
    const auto rat = infer_rational(alpha);
    GeneralShellCounter counter{a, alpha, rat, n, static_cast<int>(a.size()), 0};
    counter.descend(0, 0.0L, 0.0L);
    return counter.count;
}

double band_width(const Parameters& p, double n) {
    if (!(n > 0)) throw std::invalid_argument("band_width: n must be positive");
    return 2.0 * p.k() * p.alpha() *
           static_cast<double>(std::pow(static_cast<long double>(n),
                                        1.0L - 1.0L / static_cast<long double>(p.alpha())));
}

BandIndex band_of_value(double v, double w) {
    if (!(w > 0)) throw std::invalid_argument("band_of_value: width must be positive");
    if (v < 0) throw std::invalid_argument("band_of_value: negative value");
    const auto q = static_cast<std::int64_t>(std::floor(v / w));
    return BandIndex{q >> 1, (q & 1) != 0};
}

BandIndex band_index(const std::vector<std::int64_t>& prefix, const Parameters& p, double n) {
    long double v = 0;
    for (std::int64_t c : prefix) v += ipow(static_cast<std::uint64_t>(c), p);
    return band_of_value(static_cast<double>(v), band_width(p, n));
}

std::vector<std::int64_t> y_label(const std::vector<std::int64_t>& prefix, const Parameters& p) {
    const int k = p.k();
    if (prefix.size() != static_cast<std::size_t>(k - 1))
        throw std::invalid_argument("y_label: prefix length must be k-1");
    const std::int64_t d = p.label_stride();
    std::vector<std::int64_t> label;
    label.reserve(static_cast<std::size_t>(k - 2));
    for (int v = 2; v <= k - 1; ++v)
        label.push_back(prefix[0] + d * prefix[static_cast<std::size_t>(v) - 1]);
    return label;
}

std::vector<PartitionClass> build_partition(const Parameters& p, double n,
                                            const ShellIndex& shell) {
    if (p.k() != shell.params().k() || p.alpha() != shell.params().alpha() || n != shell.n())
        throw std::invalid_argument("build_partition: shell built for different inputs");
    const std::size_t m = shell.prefix_count();
    std::vector<PartitionClass> classes;
    if (m == 0) return classes;

    const int k = p.k();
    const std::size_t lw = static_cast<std::size_t>(k - 2);
    const std::int64_t d = p.label_stride();
    const double w = band_width(p, n);

    // Per prefix: flattened label tuple and raw band ordinal q (t = q/2,
    // primed = q&1).  Classes key on (label, parity), never on t.
    std::vector<std::int64_t> labels(m * lw);
    std::vector<std::int32_t> q(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t r = 0; r < lw; ++r)
            labels[j * lw + r] = shell.coord(j, 0) + d * shell.coord(j, static_cast<int>(r) + 1);
        const double qq = std::floor(shell.value(j) / w);
        if (qq >= 2147483647.0) throw std::overflow_error("build_partition: band ordinal overflow");
        q[j] = static_cast<std::int32_t>(qq);
    }

    std::vector<std::uint32_t> idx(m);
    for (std::size_t j = 0; j < m; ++j) idx[j] = static_cast<std::uint32_t>(j);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        for (std::size_t r = 0; r < lw; ++r) {
            const std::int64_t la = labels[a * lw + r], lb = labels[b * lw + r];
            if (la != lb) return la < lb;
        }
        const int pa = q[a] & 1, pb = q[b] & 1;
        if (pa != pb) return pa < pb;
        return a < b;
    });

    auto same_class = [&](std::uint32_t a, std::uint32_t b) {
        for (std::size_t r = 0; r < lw; ++r)
            if (labels[a * lw + r] != labels[b * lw + r]) return false;
        return (q[a] & 1) == (q[b] & 1);
    };

    for (std::size_t start = 0; start < m;) {
        std::size_t stop = start + 1;
        while (stop < m && same_class(idx[start], idx[stop])) ++stop;
        PartitionClass cls;
        cls.label.assign(labels.begin() + static_cast<std::ptrdiff_t>(idx[start] * lw),
                         labels.begin() + static_cast<std::ptrdiff_t>(idx[start] * lw + lw));
        cls.primed = (q[idx[start]] & 1) != 0;
        cls.members.assign(idx.begin() + static_cast<std::ptrdiff_t>(start),
                           idx.begin() + static_cast<std::ptrdiff_t>(stop));
        cls.band.resize(stop - start);
        for (std::size_t j = start; j < stop; ++j)
            cls.band[j - start] = q[idx[j]] >> 1;
        classes.push_back(std::move(cls));
        start = stop;
    }
    return classes;
}

double fiber_size_bound(const std::vector<std::int64_t>& prefix, const Parameters& p, double n) {
    const long double inv_alpha = 1.0L / static_cast<long double>(p.alpha());
    long double v = 0, vp = 0;
    for (std::int64_t c : prefix) {
        v += ipow(static_cast<std::uint64_t>(c), p);
        vp += ipow(static_cast<std::uint64_t>(c) + 1, p);
    }
    const long double left = std::pow(std::max<long double>(n - v, 0.0L), inv_alpha);
    const long double right = std::pow(std::max<long double>(n - vp, 0.0L), inv_alpha);
    return static_cast<double>(left - right + 1.0L);
}

PartitionReport verify_partition(const std::vector<PartitionClass>& classes,
                                 const ShellIndex& shell, const Parameters& p, double n) {
    if (p.k() != shell.params().k() || n != shell.n())
        throw std::invalid_argument("verify_partition: inconsistent inputs");
    const int k = p.k();
    const long double inv_alpha = 1.0L / static_cast<long double>(p.alpha());

    PartitionReport rep;
    rep.class_count = classes.size();
    rep.prefix_count = shell.prefix_count();
    rep.tuple_count = shell.tuple_count();
    rep.class_fiber_sq.reserve(classes.size());

    struct Interval {
        std::uint32_t lo, hi, member;
    };
    std::vector<Interval> iv;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> scratch;  // (value, member)

    for (const auto& cls : classes) {
        const std::size_t m = cls.members.size();
        rep.max_class_size = std::max<std::uint64_t>(rep.max_class_size, m);

        std::uint64_t fiber_sq = 0;
        for (std::uint32_t j : cls.members) fiber_sq = checked_sq_add(fiber_sq, shell.fiber_size(j));
        rep.class_fiber_sq.push_back(fiber_sq);
        rep.d2 = std::max(rep.d2, fiber_sq);

        // Fiber disjointness: sweep intervals by lo; every still-active
        // interval (hi >= current lo) overlaps the current one.
        iv.clear();
        for (std::uint32_t j : cls.members) {
            const auto f = shell.fiber(j);
            iv.push_back({static_cast<std::uint32_t>(f.first), static_cast<std::uint32_t>(f.second), j});
        }
        std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) {
            return a.lo != b.lo ? a.lo < b.lo : a.member < b.member;
        });
        std::priority_queue<std::pair<std::uint32_t, std::uint32_t>,
                            std::vector<std::pair<std::uint32_t, std::uint32_t>>,
                            std::greater<>>
            active;  // (hi, member)
        for (const auto& cur : iv) {
            while (!active.empty() && active.top().first < cur.lo) active.pop();
            rep.fiber_overlap_pairs += active.size();
            if (!active.empty() && rep.fiber_overlap_samples.size() < kSampleCap)
                rep.fiber_overlap_samples.push_back({active.top().second, cur.member});
            active.push({cur.hi, cur.member});
        }

        // Coordinatewise distinctness: duplicate runs per coordinate slot.
        for (int r = 0; r < k - 1; ++r) {
            scratch.clear();
            for (std::uint32_t j : cls.members)
                scratch.emplace_back(static_cast<std::uint32_t>(shell.coord(j, r)), j);
            std::sort(scratch.begin(), scratch.end());
            for (std::size_t s = 0; s < scratch.size();) {
                std::size_t e = s + 1;
                while (e < scratch.size() && scratch[e].first == scratch[s].first) ++e;
                const std::uint64_t g = e - s;
                rep.coord_collision_pairs += g * (g - 1) / 2;
                for (std::size_t t = s; t + 1 < e && rep.coord_collision_samples.size() < kSampleCap;
                     ++t)
                    rep.coord_collision_samples.push_back({scratch[t].second, scratch[t + 1].second});
                s = e;
            }
        }

        // One prefix per band per class (vacuous for k = 2, where the two
        // parity families deliberately pool all bands).
        if (k >= 3) {
            scratch.clear();
            for (std::size_t j = 0; j < m; ++j)
                scratch.emplace_back(static_cast<std::uint32_t>(cls.band[j]), cls.members[j]);
            std::sort(scratch.begin(), scratch.end());
            for (std::size_t s = 0; s < scratch.size();) {
                std::size_t e = s + 1;
                while (e < scratch.size() && scratch[e].first == scratch[s].first) ++e;
                const std::uint64_t g = e - s;
                rep.y_band_multiplicity_pairs += g * (g - 1) / 2;
                for (std::size_t t = s; t + 1 < e && rep.y_band_samples.size() < kSampleCap; ++t)
                    rep.y_band_samples.push_back({scratch[t].second, scratch[t + 1].second});
                s = e;
            }
        }

        // Analytic fiber-size bound.  The real-valued bound misses the
        // integer roundings at both interval ends, so the sharp statement
        // is |fiber| <= bound + 1 (the fiber is the lattice interval
        // [floor(right-root), ceil(left-root) - 1]); the verifier allows
        // exactly that slack plus a long double evaluation guard.
        for (std::uint32_t j : cls.members) {
            long double vp = 0;
            for (int r = 0; r < k - 1; ++r)
                vp += ipow(static_cast<std::uint64_t>(shell.coord(j, r)) + 1, p);
            const long double left =
                std::pow(std::max<long double>(n - static_cast<long double>(shell.value(j)), 0.0L),
                         inv_alpha);
            const long double right = std::pow(std::max<long double>(n - vp, 0.0L), inv_alpha);
            const long double bound = left - right + 1.0L;
            if (static_cast<long double>(shell.fiber_size(j)) > bound + 1.0L + 1e-9L) {
                rep.fiber_bound_violations += 1;
                if (rep.fiber_bound_samples.size() < kSampleCap) rep.fiber_bound_samples.push_back(j);
            }
        }
    }
    return rep;
}

std::string partition_report_json(const PartitionReport& rep, const ShellIndex& shell,
                                  const std::vector<std::pair<std::string, double>>& slopes) {
    nlohmann::ordered_json j;
    j["n"] = shell.n();
    j["k"] = shell.params().k();
    j["alpha"] = shell.params().alpha();
    j["s"] = rep.class_count;
    j["max_class"] = rep.max_class_size;
    j["D2"] = rep.d2;
    j["violations"] = {{"fiber_overlap", rep.fiber_overlap_pairs},
                       {"coord_collision", rep.coord_collision_pairs},
                       {"y_band_multiplicity", rep.y_band_multiplicity_pairs}};
    nlohmann::ordered_json sj = nlohmann::ordered_json::object();
    for (const auto& [name, value] : slopes) sj[name] = value;
    j["slopes"] = sj;
    return j.dump();
}

}  // namespace sumset
