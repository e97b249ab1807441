#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

// Concentration toolkit: the class deviation scale D, the union-bound
// envelope s*y*D with y = sqrt(((k-2)/alpha + 2) ln n), Monte-Carlo cell
// volumes, log-log regression, and the per-class Hoeffding experiment.

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "sumset/concentration.hpp"
#include "sumset/repcount.hpp"
#include "sumset/sequence.hpp"
#include "sumset/shell.hpp"

using namespace sumset;

TEST_CASE("class deviation scale") {
    Parameters p(3, Rational{1, 1});
    PartitionReport rep;
    rep.class_fiber_sq = {9 + 16};  // fibers of sizes 3 and 4
    rep.d2 = 25;
    ClassD d = class_D(rep, p, 1000.0);
    CHECK(d.d == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(d.predicted == doctest::Approx(std::pow(1000.0, 2.0 / 9.0)).epsilon(1e-12));

    PartitionReport empty;
    CHECK(class_D(empty, p, 1000.0).d == 0.0);

    // regime formulas for the predicted growth
    Parameters p2(2, Rational{1, 1});  // alpha = 2
    CHECK(class_D(rep, p2, 1000.0).predicted ==
          doctest::Approx(std::pow(1000.0, 0.25) * std::sqrt(std::log(1000.0))).epsilon(1e-12));
    Parameters p15(3, Rational{2, 1});  // alpha = 3/2
    CHECK(class_D(rep, p15, 1000.0).predicted ==
          doctest::Approx(std::pow(1000.0, 1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("union-bound envelope pieces") {
    Parameters p2(2, Rational{1, 1});
    CHECK(hoeffding_y(p2, std::exp(1.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    Parameters p3(3, Rational{1, 1});
    CHECK(hoeffding_y(p3, std::exp(3.0)) == doctest::Approx(std::sqrt(7.0)).epsilon(1e-12));
    CHECK(hoeffding_y(p3, 1.0) == 0.0);
    CHECK(hoeffding_y(p3, 100.0) < hoeffding_y(p3, 1000.0));
    CHECK_THROWS_AS((void)hoeffding_y(p3, 0.5), std::invalid_argument);

    CHECK(predicted_deviation(p3, 100.0, 17, 0.0) == 0.0);
    CHECK(predicted_deviation(p2, std::exp(0.5), 1, 5.0) ==
          doctest::Approx(5.0).epsilon(1e-12));  // y = 1 there
    CHECK(predicted_deviation(p3, 100.0, 34, 2.0) ==
          doctest::Approx(34.0 * hoeffding_y(p3, 100.0) * 2.0).epsilon(1e-12));
}

TEST_CASE("cell volumes: exact short-circuits and 1-D analytic value") {
    Parameters p(2, Rational{1, 1});
    CellVolume inside = estimate_cell_volume({0, 0}, p, 4.0, 10, 1);
    CHECK(inside.estimate == 1.0);
    CHECK(inside.std_err == 0.0);

    CellVolume outside = estimate_cell_volume({2, 2}, p, 8.0, 10, 1);
    CHECK(outside.estimate == 0.0);
    CHECK(outside.std_err == 0.0);

    // 1-D boundary cell [2,3] against x^2 <= 6.25: volume sqrt(6.25)-2
    CellVolume one_d = estimate_cell_volume({2}, 2.0, 6.25, 40000, 7);
    CHECK(one_d.std_err > 0.0);
    CHECK(std::abs(one_d.estimate - 0.5) <= 4.0 * one_d.std_err);

    CellVolume again = estimate_cell_volume({2}, 2.0, 6.25, 40000, 7);
    CHECK(again.estimate == one_d.estimate);  // same seed, same stream

    CHECK_THROWS_AS((void)estimate_cell_volume({-1}, 2.0, 4.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_cell_volume({0, 0}, p, 4.0, 0, 1), std::invalid_argument);
}

TEST_CASE("cell volumes add up to the ball volume") {
    Parameters p(2, Rational{1, 1});
    const double n = 100.0;
    double total = 0.0;
    double var = 0.0;
    for (std::int64_t i = 0; i <= 10; ++i)
        for (std::int64_t j = 0; j <= 10; ++j) {
            CellVolume cv = estimate_cell_volume({i, j}, p, n, 20000, 1234);
            total += cv.estimate;
            var += cv.std_err * cv.std_err;
        }
    double target = volume_constant(p) * n;  // pi/4 * 100
    CHECK(std::abs(total - target) <= 3.0 * std::sqrt(var) + 1e-9);
}

TEST_CASE("log-log regression") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {10.0, 20.0, 40.0, 80.0, 160.0}) pts.emplace_back(n, 7.0 * n * n * n);
    ScalingFit fit = fit_scaling(pts);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-6));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.std_err <= 1e-9);
    CHECK(fit.points.size() == 5);

    std::vector<std::pair<double, double>> flat{{10.0, 4.0}, {100.0, 4.0}, {1000.0, 4.0}};
    CHECK(fit_scaling(flat).slope == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)fit_scaling({{1.0, 1.0}, {2.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS((void)fit_scaling({{1.0, 1.0}, {2.0, 0.0}, {3.0, 3.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)fit_scaling({{2.0, 1.0}, {2.0, 2.0}, {2.0, 3.0}}),
                    std::invalid_argument);
}

TEST_CASE("deviation runs: exact edges and reproducibility") {
    Parameters p(2, Rational{1, 1});

    DeviationRun zero = empirical_deviation(p, {0}, {5});
    REQUIRE(zero.samples.size() == 1);
    CHECK(zero.samples[0].expected == 0.0);
    CHECK(zero.samples[0].sigma_n == 0);
    CHECK(zero.samples[0].S_n == 1);  // the all-zero tuple
    CHECK(zero.samples[0].dev_S == 1.0);

    DeviationRun a = empirical_deviation(p, {100, 500}, {1, 2, 3}, SequenceMode::Random, 1);
    DeviationRun b = empirical_deviation(p, {100, 500}, {1, 2, 3}, SequenceMode::Random, 3);
    REQUIRE(a.samples.size() == 6);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].sigma_n == b.samples[i].sigma_n);   // workers never change results
        CHECK(a.samples[i].S_n == b.samples[i].S_n);
        CHECK(a.samples[i].dev_sigma == b.samples[i].dev_sigma);
    }
    CHECK(a.summary.size() == 2);
    CHECK(a.summary[0].n == 100);

    DeviationRun m1 = empirical_deviation(p, {200}, {1, 2}, SequenceMode::Midpoint);
    CHECK(m1.samples[0].sigma_n == m1.samples[1].sigma_n);  // midpoint ignores seeds

    CHECK_THROWS_AS((void)empirical_deviation(p, {}, {1}), std::invalid_argument);
    CHECK_THROWS_AS((void)empirical_deviation(p, {100, 100}, {1}), std::invalid_argument);
}

TEST_CASE("deviation magnitudes stay inside a loose envelope") {
    Parameters p(2, Rational{1, 1});
    DeviationRun run = empirical_deviation(p, {10000}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    double n = 10000.0;
    double envelope = 50.0 * std::pow(n, 0.25) * std::log(n);
    CHECK(run.summary[0].median_abs_dev_S <= envelope);
    CHECK(run.summary[0].median_abs_dev_sigma <= envelope);
}

TEST_CASE("single-prefix class is an exact Bernoulli variable") {
    Parameters p(2, Rational{1, 1});
    double n = 10.0;
    ShellIndex shell = enumerate_shell(p, n);
    std::size_t target = shell.prefix_count();
    for (std::size_t j = 0; j < shell.prefix_count(); ++j)
        if (shell.prefix(j) == std::vector<std::int64_t>{2}) target = j;
    REQUIRE(target < shell.prefix_count());
    REQUIRE(shell.fiber(target) == std::pair<std::int64_t, std::int64_t>{1, 1});

    PartitionClass cls;
    cls.members = {static_cast<std::uint32_t>(target)};
    cls.band = {0};
    HoeffdingReport rep = hoeffding_empirical(cls, shell, p, n, 20000, 99);

    // P(theta_2^2 + theta_1^2 <= 10) for theta_2 in [2,3), theta_1 in [1,2):
    // area under the circle arc, computed in closed form
    double prob = std::sqrt(6.0) +
                  5.0 * (std::asin(2.0 / std::sqrt(10.0)) - std::asin(1.0 / std::sqrt(10.0))) -
                  3.5;
    double se = std::sqrt(prob * (1.0 - prob) / 20000.0);
    CHECK(rep.d_t == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(rep.mean - prob) <= 4.0 * se);
    CHECK(rep.y == std::array<double, 4>{0.5, 1.0, 1.5, 2.0});
    CHECK(std::abs(rep.freq[0] - (1.0 - prob)) <= 4.0 * se);  // only eta = 0 deviates by 0.5
    CHECK(rep.freq[1] == 0.0);                                // |eta - mean| < 1 always
    CHECK(rep.freq[2] == 0.0);
    CHECK(rep.freq[3] == 0.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(rep.bound[i] == doctest::Approx(2.0 * hoeffding_tail(rep.y[i])).epsilon(1e-12));
        CHECK(rep.freq[i] <= 1.0);
        CHECK(rep.std_err[i] >= 0.0);
    }

    HoeffdingReport rep2 = hoeffding_empirical(cls, shell, p, n, 20000, 99);
    CHECK(rep2.mean == rep.mean);  // same seed, same trials
    HoeffdingReport rep3 = hoeffding_empirical(cls, shell, p, n, 20000, 99, 4);
    CHECK(rep3.mean == rep.mean);  // workers never change results
}

TEST_CASE("hoeffding bound holds on a real class") {
    Parameters p(3, Rational{1, 1});
    double n = 10000.0;
    ShellIndex shell = enumerate_shell(p, n);
    std::vector<PartitionClass> classes = build_partition(p, n, shell);
    REQUIRE(!classes.empty());
    std::size_t best = 0;
    std::uint64_t best_sq = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::uint64_t sq = 0;
        for (std::uint32_t j : classes[c].members) sq += shell.fiber_size(j) * shell.fiber_size(j);
        if (sq > best_sq) {
            best_sq = sq;
            best = c;
        }
    }
    HoeffdingReport rep = hoeffding_empirical(classes[best], shell, p, n, 2000, 424242);
    CHECK(rep.d_t == doctest::Approx(std::sqrt(static_cast<double>(best_sq))).epsilon(1e-12));
    for (int i = 0; i < 4; ++i)
        CHECK(rep.freq[i] <= rep.bound[i] + 3.0 * rep.std_err[i] + 1e-9);

    PartitionClass hollow;
    CHECK_THROWS_AS((void)hoeffding_empirical(hollow, shell, p, n, 10, 1), std::invalid_argument);
}
