#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sumset/params.hpp"

namespace sumset {

// Raised when a sequence is too short to answer a query exactly.
struct coverage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SequenceMode { Random, Midpoint };

// A realization of the random construction: theta[i] uniform in [i, i+1)
// and a[i] = floor(theta[i]^alpha).  a is non-decreasing since theta is
// increasing.  Midpoint mode pins theta[i] = i + 1/2 for exact unit tests.
struct SampledSequence {
    Parameters params;
    SequenceMode mode = SequenceMode::Random;
    std::optional<std::uint64_t> seed;  // absent in midpoint mode
    std::vector<double> thetas;         // empty in slim mode
    std::vector<std::int64_t> a;

    std::size_t size() const { return a.size(); }
    bool has_thetas() const { return !thetas.empty(); }
};

// theta[i] = i + u_i with u_i the i-th output of the stream seeded by
// `seed`; identical (p, m, seed) is bit-identical.  keep_thetas = false
// stores only a (pure repcount runs).
SampledSequence sample_sequence(const Parameters& p, std::size_t m, std::uint64_t seed,
                                bool keep_thetas = true);

// Deterministic baseline: theta[i] = i + 1/2.
SampledSequence midpoint_sequence(const Parameters& p, std::size_t m);

// floor(n^(1/alpha)) + 1: indices 0..m-1 include every index whose theta
// value can satisfy theta_i^alpha <= n (theta_i >= i).
std::int64_t index_bound_for_n(const Parameters& p, double n);

// Sequence length sufficient for every query sandwich_check(seq, n) makes:
// sigma at n+k plus exact a-value histograms up to n.
std::int64_t sequence_length_for(const Parameters& p, std::int64_t n);

// Plain-text persistence.  Header `k beta alpha seed m mode` (seed field
// omitted in midpoint mode), then m rows `i theta_i a_i` with theta at 17
// significant digits so doubles round-trip exactly.
void save_sequence(const SampledSequence& seq, std::ostream& os);
void save_sequence_file(const SampledSequence& seq, const std::string& path);
SampledSequence load_sequence(std::istream& is);
SampledSequence load_sequence_file(const std::string& path);

}  // namespace sumset
