#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

// Representation counts: exact histograms, k-fold convolutions (both
// backends), the continuous count sigma, and the sandwich
// sigma_n <= S(n) <= sigma_{n+k}.

#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sumset/repcount.hpp"
#include "sumset/sequence.hpp"

using namespace sumset;

namespace {

SampledSequence hand_sequence(const Parameters& p, std::vector<std::int64_t> a) {
    return SampledSequence{p, SequenceMode::Midpoint, std::nullopt, {}, std::move(a)};
}

}  // namespace

TEST_CASE("multiplicity histograms") {
    Parameters p(2, Rational{1, 1});
    MultiplicityVector c = multiplicities(hand_sequence(p, {0, 2, 2, 5}), 5);
    CHECK(c.c == std::vector<std::uint64_t>{1, 0, 2, 0, 0, 1});

    MultiplicityVector sq = multiplicities(hand_sequence(p, {0, 1, 4, 9, 16, 25}), 25);
    for (std::int64_t m = 0; m <= 25; ++m) {
        std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(m)) + 0.5);
        CHECK(sq.c[static_cast<std::size_t>(m)] == ((r * r == m) ? 1u : 0u));
    }

    MultiplicityVector empty = multiplicities(hand_sequence(p, {1, 2, 3}), 0);
    CHECK(empty.c == std::vector<std::uint64_t>{0});

    CHECK_THROWS_AS((void)multiplicities(hand_sequence(p, {0, 2}), 100), coverage_error);
}

TEST_CASE("representation counts for small frozen inputs") {
    MultiplicityVector c{4, {0, 1, 1, 0, 0}};  // A = {1, 2}
    RepSeries rep = rep_counts(c, 2, 4);
    CHECK(rep.r == std::vector<std::uint64_t>{0, 0, 1, 2, 1});
    CHECK(rep.S == std::vector<std::uint64_t>{0, 0, 1, 3, 4});

    MultiplicityVector c1{2, {0, 1, 1}};
    RepSeries ident = rep_counts(c1, 1, 2);
    CHECK(ident.r == c1.c);  // k = 1 is the identity
    CHECK(ident.S == std::vector<std::uint64_t>{0, 1, 2});

    MultiplicityVector zero{3, {0, 0, 0, 0}};
    RepSeries z = rep_counts(zero, 2, 3);
    CHECK(z.r == std::vector<std::uint64_t>{0, 0, 0, 0});
    CHECK(z.S == z.r);
}

TEST_CASE("sums of two squares up to 25") {
    Parameters p(2, Rational{1, 1});
    std::vector<std::int64_t> squares{0, 1, 4, 9, 16, 25};
    RepSeries rep = rep_counts(multiplicities(hand_sequence(p, squares), 25), 2, 25);
    CHECK(rep.S[25] == 26);
    std::vector<std::uint64_t> brute = oracle::brute_rep_counts(squares, 2, 25);
    CHECK(rep.r == brute);
}

TEST_CASE("backends agree coefficient for coefficient") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<std::uint64_t> entry(0, 8);
    for (int trial = 0; trial < 10; ++trial) {
        MultiplicityVector c;
        c.n_max = 4095;
        c.c.resize(4096);
        for (auto& v : c.c) v = entry(gen);
        for (int k : {2, 3, 4}) {
            RepSeries school = rep_counts(c, k, c.n_max, ConvBackend::Schoolbook);
            RepSeries fast = rep_counts(c, k, c.n_max, ConvBackend::Fast);
            CHECK(school.r == fast.r);
            CHECK(school.S == fast.S);
        }
    }
}

TEST_CASE("brute-force tuple enumeration confirms the convolution") {
    Parameters p(3, Rational{1, 1});
    std::mt19937_64 gen(5150);
    std::uniform_int_distribution<std::int64_t> val(0, 30);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::int64_t> a(12);
        for (auto& v : a) v = val(gen);
        std::sort(a.begin(), a.end());
        RepSeries rep = rep_counts(multiplicities(hand_sequence(p, a), 90), 3, 90);
        CHECK(rep.r == oracle::brute_rep_counts(a, 3, 90));
    }
}

TEST_CASE("total mass is conserved when nothing is truncated") {
    MultiplicityVector c;
    c.n_max = 49;
    c.c.resize(50);
    std::mt19937_64 gen(31337);
    std::uniform_int_distribution<std::uint64_t> entry(0, 8);
    for (auto& v : c.c) v = entry(gen);
    std::uint64_t mass = std::accumulate(c.c.begin(), c.c.end(), std::uint64_t{0});
    RepSeries rep = rep_counts(c, 3, 3 * 49);
    CHECK(rep.S.back() == mass * mass * mass);
}

TEST_CASE("sigma by direct enumeration") {
    Parameters p(2, Rational{1, 1});
    SampledSequence mid = midpoint_sequence(p, 4);
    CHECK(sigma_direct(mid, 5.0) == 4);   // pairs over theta in {0.5, 1.5}
    CHECK(sigma_direct(mid, 0.4) == 0);   // below k * theta_0^alpha
    CHECK(sigma_direct(mid, 0.5) == 1);   // exactly the (0,0) pair

    SampledSequence slim = sample_sequence(p, 16, 3, false);
    CHECK_THROWS_AS((void)sigma_direct(slim, 10.0), std::invalid_argument);
    SampledSequence tiny = sample_sequence(p, 2, 3);
    CHECK_THROWS_AS((void)sigma_direct(tiny, 100.0), coverage_error);
}

TEST_CASE("sigma table matches pointwise direct counts") {
    Parameters p(2, Rational{1, 1});
    SampledSequence seq = sample_sequence(p, static_cast<std::size_t>(sequence_length_for(p, 60)), 11);
    std::vector<std::uint64_t> table = sigma_table(seq, 60);
    REQUIRE(table.size() == 61);
    for (std::int64_t n = 0; n <= 60; ++n)
        CHECK(table[static_cast<std::size_t>(n)] == sigma_direct(seq, static_cast<double>(n)));
}

TEST_CASE("sandwich at the midpoint baseline") {
    Parameters p(2, Rational{1, 1});
    SampledSequence seq = midpoint_sequence(p, static_cast<std::size_t>(sequence_length_for(p, 5)));
    SandwichReport rep = sandwich_check(seq, 5);
    CHECK(rep.sigma_n == 4);
    CHECK(rep.ok);
    CHECK(rep.sigma_n <= rep.S_n);
    CHECK(rep.S_n <= rep.sigma_n_plus_k);

    SandwichReport zero = sandwich_check(seq, 0);
    CHECK(zero.ok);
    CHECK(zero.S_n == 1);  // only the all-zero pair
}

TEST_CASE("sandwich holds across random seeds") {
    for (int k : {2, 3}) {
        Parameters p(k, Rational{1, 1});
        for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
            SampledSequence seq =
                sample_sequence(p, static_cast<std::size_t>(sequence_length_for(p, 2000)), seed);
            for (std::int64_t n : {0LL, 1LL, 17LL, 500LL, 2000LL}) {
                SandwichReport rep = sandwich_check(seq, n);
                CAPTURE(k);
                CAPTURE(seed);
                CAPTURE(n);
                CHECK(rep.ok);
            }
        }
    }
}
