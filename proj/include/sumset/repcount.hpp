#pragma once

// Representation counts for k-fold sumsets.  For a sampled sequence with
// values a_i, the multiplicity vector c[m] counts indices with a_i = m,
// the representation count r[n] counts ordered k-tuples of indices with
// a_{i_1} + ... + a_{i_k} = n (the k-fold convolution of c), and
// S(n) = sum_{m<=n} r[m].  The continuous counterpart sigma(x) counts
// ordered k-tuples with theta_{i_1}^alpha + ... + theta_{i_k}^alpha <= x;
// since a_i = floor(theta_i^alpha), every integer n satisfies
// sigma(n) <= S(n) <= sigma(n+k).
//
// All counts are exact.  The fast convolution backend works modulo three
// NTT primes with CRT reconstruction; the schoolbook backend accumulates
// directly in integers.  Both throw std::overflow_error instead of
// silently wrapping, and agree coefficient-for-coefficient whenever both
// apply.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sumset/sequence.hpp"

namespace sumset {

struct MultiplicityVector {
    std::int64_t n_max = 0;
    std::vector<std::uint64_t> c;  // c[m] for m = 0..n_max
};

// Histogram of a-values up to n_max.  Throws coverage_error unless the
// sequence is long enough that every absent index would have a value
// beyond n_max (first absent index m has a_m >= floor(m^alpha)).
MultiplicityVector multiplicities(const SampledSequence& seq, std::int64_t n_max);

enum class ConvBackend { Auto, Schoolbook, Fast };

struct RepSeries {
    int k = 0;
    std::int64_t n_max = 0;
    std::vector<std::uint64_t> r;  // r[n] for n = 0..n_max
    std::vector<std::uint64_t> S;  // S[n] = r[0] + ... + r[n]
};

// k-fold convolution of c with itself, truncated at n_max, plus its
// prefix sums.  Auto picks the fast backend when the a-priori bound
// k*log2(total mass + 1) <= 85 guarantees CRT correctness, and the
// schoolbook backend otherwise.
RepSeries rep_counts(const MultiplicityVector& c, int k, std::int64_t n_max,
                     ConvBackend backend = ConvBackend::Auto);

// Ordered k-tuples of indices with sum of theta^alpha <= x.  Requires
// retained thetas and enough of them that the first absent index cannot
// participate (throws coverage_error otherwise).
std::uint64_t sigma_direct(const SampledSequence& seq, double x);

// sigma at every integer threshold 0..n_max in one enumeration pass.
std::vector<std::uint64_t> sigma_table(const SampledSequence& seq, std::int64_t n_max);

struct SandwichReport {
    std::int64_t n = 0;
    std::uint64_t sigma_n = 0;
    std::uint64_t S_n = 0;
    std::uint64_t sigma_n_plus_k = 0;
    bool ok = false;  // sigma_n <= S_n <= sigma_n_plus_k
};

SandwichReport sandwich_check(const SampledSequence& seq, std::int64_t n,
                              ConvBackend backend = ConvBackend::Auto);

// CSV rows "m,r,S" with header, one row per m = 0..n_max.
void write_repcount_csv(const RepSeries& rep, std::ostream& out);

}  // namespace sumset
