#include "sumset/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include "sumset/csvio.hpp"
#include "sumset/parallel.hpp"
#include "sumset/repcount.hpp"
#include "sumset/rng.hpp"
#include "sumset/sequence.hpp"

namespace sumset {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    if (m == 0) return 0.0;
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// FNV-1a over the corner coordinates, so each cell gets its own
// sampling stream.
u64 corner_hash(const std::vector<std::int64_t>& corner) {
    u64 h = 0xCBF29CE484222325ull;
    for (const std::int64_t c : corner) {
        u64 w = static_cast<u64>(c);
        for (int b = 0; b < 8; ++b) {
            h ^= (w >> (8 * b)) & 0xFFu;
            h *= 0x100000001B3ull;
        }
    }
    return h;
}

CellVolume cell_volume_impl(const std::vector<std::int64_t>& corner, double alpha,
                            const std::optional<Rational>& alpha_rat, double n,
                            std::int64_t samples, std::uint64_t seed) {
    if (corner.empty()) throw std::invalid_argument("estimate_cell_volume: empty corner");
    if (samples < 1) throw std::invalid_argument("estimate_cell_volume: samples must be >= 1");
    for (const std::int64_t c : corner) {
        if (c < 0) throw std::invalid_argument("estimate_cell_volume: corner must be >= 0");
    }
    long double at_lo = 0.0L;
    long double at_hi = 0.0L;
    for (const std::int64_t c : corner) {
        at_lo += ipow(static_cast<u64>(c), alpha, alpha_rat);
        at_hi += ipow(static_cast<u64>(c) + 1, alpha, alpha_rat);
    }
    // monotone integrand: the corner sums decide containment exactly
    if (at_hi <= static_cast<long double>(n)) return {1.0, 0.0};
    if (at_lo >= static_cast<long double>(n)) return {0.0, 0.0};
    const Stream stream(derive_seed(seed, "cellvol", corner_hash(corner)));
    const std::size_t k = corner.size();
    std::int64_t hits = 0;
    for (std::int64_t t = 0; t < samples; ++t) {
        long double sum = 0.0L;
        for (std::size_t r = 0; r < k; ++r) {
            const long double x = static_cast<long double>(corner[r]) +
                                  stream.unit(static_cast<u64>(t) * k + r);
            sum += real_pow(x, alpha, alpha_rat);
        }
        if (sum <= static_cast<long double>(n)) ++hits;
    }
    const double est = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(std::max(est * (1.0 - est), 0.0) / static_cast<double>(samples));
    return {est, se};
}

}  // namespace

ClassD class_D(const PartitionReport& report, const Parameters& p, double n) {
    ClassD out;
    out.d = std::sqrt(static_cast<double>(report.d2));
    if (!(n >= 1.0)) return out;  // growth comparison starts at n = 1
    const double a = p.alpha();
    switch (p.regime()) {
        case Regime::AlphaGreater2:
            out.predicted = std::pow(n, (a - 1.0) / (a * a));
            break;
        case Regime::AlphaLess2:
            out.predicted = std::pow(n, 1.0 / (2.0 * a));
            break;
        case Regime::AlphaEqual2:
            out.predicted = std::pow(n, 0.25) * std::sqrt(std::log(n));
            break;
    }
    return out;
}

double hoeffding_y(const Parameters& p, double n) {
    if (!(n >= 1.0)) throw std::invalid_argument("hoeffding_y: n must be >= 1");
    const double c = (static_cast<double>(p.k()) - 2.0) / p.alpha() + 2.0;
    return std::sqrt(c * std::log(n));
}

double predicted_deviation(const Parameters& p, double n, std::uint64_t s, double D) {
    if (!(D >= 0.0)) throw std::invalid_argument("predicted_deviation: D must be >= 0");
    return static_cast<double>(s) * hoeffding_y(p, n) * D;
}

CellVolume estimate_cell_volume(const std::vector<std::int64_t>& corner, const Parameters& p,
                                double n, std::int64_t samples, std::uint64_t seed) {
    if (corner.size() != static_cast<std::size_t>(p.k())) {
        throw std::invalid_argument("estimate_cell_volume: corner length must equal k");
    }
    return cell_volume_impl(corner, p.alpha(), p.alpha_rational(), n, samples, seed);
}

CellVolume estimate_cell_volume(const std::vector<std::int64_t>& corner, double alpha, double n,
                                std::int64_t samples, std::uint64_t seed) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("estimate_cell_volume: alpha must be >= 1");
    return cell_volume_impl(corner, alpha, std::nullopt, n, samples, seed);
}

DeviationRun empirical_deviation(const Parameters& p, const std::vector<std::int64_t>& n_grid,
                                 const std::vector<std::uint64_t>& seeds, SequenceMode mode,
                                 int workers) {
    if (n_grid.empty()) throw std::invalid_argument("empirical_deviation: empty n grid");
    if (seeds.empty()) throw std::invalid_argument("empirical_deviation: empty seed list");
    if (n_grid.front() < 0) throw std::invalid_argument("empirical_deviation: n must be >= 0");
    for (std::size_t i = 0; i + 1 < n_grid.size(); ++i) {
        if (n_grid[i + 1] <= n_grid[i]) {
            throw std::invalid_argument("empirical_deviation: n grid must be strictly increasing");
        }
    }

    DeviationRun run;
    run.samples.resize(n_grid.size() * seeds.size());
    const double cvol = volume_constant(p);
    parallel_for(run.samples.size(), workers, [&](std::size_t idx) {
        const std::int64_t n = n_grid[idx / seeds.size()];
        const std::uint64_t seed = seeds[idx % seeds.size()];
        const std::size_t m = static_cast<std::size_t>(sequence_length_for(p, n));
        const SampledSequence seq =
            mode == SequenceMode::Midpoint ? midpoint_sequence(p, m) : sample_sequence(p, m, seed);
        const u64 sig = sigma_direct(seq, static_cast<double>(n));
        const RepSeries series = rep_counts(multiplicities(seq, n), p.k(), n);
        DeviationSample& d = run.samples[idx];
        d.n = n;
        d.seed = seed;
        d.sigma_n = sig;
        d.S_n = series.S.back();
        d.expected = cvol * std::pow(static_cast<double>(n), p.beta());
        d.dev_sigma = static_cast<double>(d.sigma_n) - d.expected;
        d.dev_S = static_cast<double>(d.S_n) - d.expected;
    });

    run.summary.resize(n_grid.size());
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        std::vector<double> abs_sigma(seeds.size());
        std::vector<double> abs_S(seeds.size());
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            const DeviationSample& d = run.samples[ni * seeds.size() + si];
            abs_sigma[si] = std::fabs(d.dev_sigma);
            abs_S[si] = std::fabs(d.dev_S);
        }
        DeviationSummary& s = run.summary[ni];
        s.n = n_grid[ni];
        s.median_abs_dev_sigma = median_of(abs_sigma);
        s.max_abs_dev_sigma = *std::max_element(abs_sigma.begin(), abs_sigma.end());
        s.median_abs_dev_S = median_of(abs_S);
        s.max_abs_dev_S = *std::max_element(abs_S.begin(), abs_S.end());
    }
    return run;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_scaling: need at least 3 points");
    ScalingFit fit;
    fit.points.reserve(points.size());
    for (const auto& [n, value] : points) {
        if (!(n > 0.0) || !(value > 0.0)) {
            throw std::invalid_argument("fit_scaling: points must be positive");
        }
        fit.points.emplace_back(std::log(n), std::log(value));
    }
    const double m = static_cast<double>(fit.points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& [x, y] : fit.points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= m;
    mean_y /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : fit.points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_scaling: all abscissae equal");
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (const auto& [x, y] : fit.points) {
        const double e = y - (fit.intercept + fit.slope * x);
        ss_res += e * e;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.std_err = std::sqrt(ss_res / (m - 2.0) / sxx);
    return fit;
}

HoeffdingReport hoeffding_empirical(const PartitionClass& cls, const ShellIndex& shell,
                                    const Parameters& p, double n, std::int64_t trials,
                                    std::uint64_t seed, int workers) {
    if (cls.members.empty()) throw std::invalid_argument("hoeffding_empirical: empty class");
    if (trials < 1) throw std::invalid_argument("hoeffding_empirical: trials must be >= 1");
    const int k = p.k();
    const std::size_t mcount = cls.members.size();
    const std::size_t pw = static_cast<std::size_t>(k - 1);

    // flat copy of the class geometry, so trials touch no shell internals
    std::vector<std::int64_t> coords(mcount * pw);
    std::vector<std::int64_t> fiber_lo(mcount);
    std::vector<std::int64_t> fiber_hi(mcount);
    u128 d2 = 0;
    for (std::size_t m = 0; m < mcount; ++m) {
        const std::size_t j = cls.members[m];
        for (std::size_t r = 0; r < pw; ++r) {
            coords[m * pw + r] = shell.coord(j, static_cast<int>(r));
        }
        const auto [lo, hi] = shell.fiber(j);
        fiber_lo[m] = lo;
        fiber_hi[m] = hi;
        const u64 fs = shell.fiber_size(j);
        d2 += static_cast<u128>(fs) * fs;
    }

    HoeffdingReport rep;
    rep.trials = trials;
    rep.d_t = std::sqrt(static_cast<double>(static_cast<long double>(d2)));

    std::vector<double> eta(static_cast<std::size_t>(trials));
    parallel_for(eta.size(), workers, [&](std::size_t t) {
        const Stream stream(derive_seed(seed, "hoeffding", t));
        const auto theta_pow_at = [&](std::int64_t i) {
            const long double x =
                static_cast<long double>(i) + stream.unit(static_cast<u64>(i));
            return real_pow(x, p);
        };
        u64 total = 0;
        for (std::size_t m = 0; m < mcount; ++m) {
            long double base = 0.0L;
            for (std::size_t r = 0; r < pw; ++r) base += theta_pow_at(coords[m * pw + r]);
            u64 xi = 0;
            for (std::int64_t i = fiber_lo[m]; i <= fiber_hi[m]; ++i) {
                if (base + theta_pow_at(i) <= static_cast<long double>(n)) ++xi;
            }
            if (xi > static_cast<u64>(fiber_hi[m] - fiber_lo[m] + 1)) {
                throw std::logic_error("hoeffding_empirical: xi exceeds fiber size");
            }
            total += xi;
        }
        eta[t] = static_cast<double>(total);
    });

    double sum = 0.0;
    for (const double e : eta) sum += e;
    rep.mean = sum / static_cast<double>(trials);
    for (std::size_t i = 0; i < rep.y.size(); ++i) {
        const double threshold = rep.y[i] * rep.d_t;
        std::int64_t exceed = 0;
        for (const double e : eta) {
            if (std::fabs(e - rep.mean) >= threshold) ++exceed;
        }
        rep.freq[i] = static_cast<double>(exceed) / static_cast<double>(trials);
        rep.bound[i] = 2.0 * hoeffding_tail(rep.y[i]);
        rep.std_err[i] =
            std::sqrt(std::max(rep.freq[i] * (1.0 - rep.freq[i]), 0.0) / static_cast<double>(trials));
    }
    return rep;
}

void write_deviations_csv(std::ostream& out, const std::vector<DeviationSample>& samples) {
    out << "n,seed,sigma,S,expected,dev_sigma,dev_S\n";
    for (const DeviationSample& s : samples) {
        out << s.n << ',' << s.seed << ',' << s.sigma_n << ',' << s.S_n << ','
            << format_double(s.expected) << ',' << format_double(s.dev_sigma) << ','
            << format_double(s.dev_S) << '\n';
    }
}

void write_fits_csv(std::ostream& out, const std::vector<FitRow>& rows) {
    out << "quantity,slope,stderr,r2,target_slope\n";
    for (const FitRow& r : rows) {
        out << r.quantity << ',' << format_double(r.fit.slope) << ','
            << format_double(r.fit.std_err) << ',' << format_double(r.fit.r_squared) << ','
            << format_double(r.target_slope) << '\n';
    }
}

}  // namespace sumset
