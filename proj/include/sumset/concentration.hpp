#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sumset/params.hpp"
#include "sumset/sequence.hpp"
#include "sumset/shell.hpp"

// Concentration instrumentation for the boundary shell.
//
// Write sigma_n = E(sigma_n) + fluctuation.  The fluctuation splits over
// the partition classes: within one class the per-prefix fiber counts
//   xi_P = #{ i in fiber(P) : sum_r theta_{P_r}^alpha + theta_i^alpha <= n }
// are independent and bounded, 0 <= xi_P <= |fiber(P)|, so Hoeffding gives
//   P(|eta_t - E eta_t| >= y D_t) <= 2 exp(-2 y^2),
// where eta_t = sum_P xi_P and D_t^2 = sum_P |fiber(P)|^2.  A union bound
// over the s classes with the common majorant D = max_t D_t yields
//   P(|sigma_n - E(sigma_n)| >= s y D) <= 2 s exp(-2 y^2),
// and y = sqrt(((k-2)/alpha + 2) ln n) makes the right side o(1) against
// the s = O(n^{(k-2)/alpha}) classes.  D itself grows like
//   n^{(alpha-1)/alpha^2}   (alpha > 2)
//   n^{1/(2 alpha)}         (alpha < 2)
//   n^{1/4} sqrt(ln n)      (alpha = 2),
// the three cases coming from which of the two fiber statistics (count vs
// max size) dominates the sum of squares.
//
// E(sigma_n) equals the sum of cell volumes d_cell = vol(cell ∩ Omega)
// over integer unit cells, and sum_cell d_cell = vol(Omega) =
// C_{k,alpha} n^{k/alpha}.  This module measures all of these empirically:
// D and its growth rate, the envelope s y D against observed deviations,
// Monte-Carlo cell volumes, and log-log slope fits for any positive
// quantity against n.

namespace sumset {

// D = max over classes of sqrt(sum of squared fiber sizes), plus the
// regime growth value it should track (constants unspecified, so only
// slopes are comparable).
struct ClassD {
    double d = 0.0;
    double predicted = 0.0;
};

ClassD class_D(const PartitionReport& report, const Parameters& p, double n);

// y = sqrt(((k-2)/alpha + 2) ln n), for n >= 1.  Natural log.
double hoeffding_y(const Parameters& p, double n);

// s * y * D: the union-bound deviation envelope for sigma_n.  Monotone
// non-decreasing in each of s, D, n.
double predicted_deviation(const Parameters& p, double n, std::uint64_t s, double D);

struct CellVolume {
    double estimate = 0.0;
    double std_err = 0.0;  // binomial standard error; 0 for the exact cases
};

// Volume of the unit cell with lower corner `corner` intersected with
// {x : sum x_r^alpha <= n}.  Cells entirely inside or outside are decided
// exactly without sampling; boundary cells are hit-or-miss Monte-Carlo
// with `samples` points drawn from a stream derived from (seed, corner),
// so neighbouring cells sample independently and reruns are identical.
CellVolume estimate_cell_volume(const std::vector<std::int64_t>& corner, const Parameters& p,
                                double n, std::int64_t samples, std::uint64_t seed);
// Same with a bare exponent; `corner` may have any positive length k.
CellVolume estimate_cell_volume(const std::vector<std::int64_t>& corner, double alpha, double n,
                                std::int64_t samples, std::uint64_t seed);

// One (n, seed) measurement of both counting functions against the
// volume term.
struct DeviationSample {
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t sigma_n = 0;
    std::uint64_t S_n = 0;
    double expected = 0.0;   // C_{k,alpha} n^beta
    double dev_sigma = 0.0;  // sigma_n - expected
    double dev_S = 0.0;      // S_n - expected
};

// Per-n spread of |deviation| across seeds.
struct DeviationSummary {
    std::int64_t n = 0;
    double median_abs_dev_sigma = 0.0;
    double max_abs_dev_sigma = 0.0;
    double median_abs_dev_S = 0.0;
    double max_abs_dev_S = 0.0;
};

struct DeviationRun {
    std::vector<DeviationSample> samples;   // n-major, seed-minor order
    std::vector<DeviationSummary> summary;  // one row per grid point
};

// Samples a fresh sequence per (n, seed), computes sigma_n exactly and
// S(n) by exact convolution, and subtracts C_{k,alpha} n^beta.  The grid
// must be strictly increasing; coverage and overflow errors from the
// counting layer propagate.  Midpoint mode ignores the seed values (rows
// repeat identically per seed) but keeps the schema unchanged.
DeviationRun empirical_deviation(const Parameters& p, const std::vector<std::int64_t>& n_grid,
                                 const std::vector<std::uint64_t>& seeds,
                                 SequenceMode mode = SequenceMode::Random, int workers = 1);

// Least-squares line through (ln n, ln value).
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double std_err = 0.0;  // standard error of the slope
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // (ln n, ln value)
};

// Ordinary least squares on the log-log points.  Needs >= 3 points, all
// coordinates positive.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

// Empirical check of the per-class Hoeffding inequality: resample the
// thetas touching one class `trials` times, record eta = sum of fiber
// counts, and compare the frequency of |eta - mean| >= y * D_t with the
// bound 2 exp(-2 y^2) at the four fixed y values.
struct HoeffdingReport {
    std::int64_t trials = 0;
    double d_t = 0.0;  // sqrt(sum of squared fiber sizes) for this class
    double mean = 0.0;
    std::array<double, 4> y{0.5, 1.0, 1.5, 2.0};
    std::array<double, 4> freq{};
    std::array<double, 4> bound{};
    std::array<double, 4> std_err{};  // binomial standard error of freq
};

HoeffdingReport hoeffding_empirical(const PartitionClass& cls, const ShellIndex& shell,
                                    const Parameters& p, double n, std::int64_t trials,
                                    std::uint64_t seed, int workers = 1);

// Schema: n,seed,sigma,S,expected,dev_sigma,dev_S
void write_deviations_csv(std::ostream& out, const std::vector<DeviationSample>& samples);

struct FitRow {
    std::string quantity;
    ScalingFit fit;
    double target_slope = 0.0;
};

// Schema: quantity,slope,stderr,r2,target_slope
void write_fits_csv(std::ostream& out, const std::vector<FitRow>& rows);

}  // namespace sumset
