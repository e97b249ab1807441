#pragma once

// Boundary shell machinery.  The shell I at threshold n is the set of
// strictly decreasing k-tuples (i_1,...,i_k) of non-negative integers with
//   i_1^alpha + ... + i_k^alpha < n < (i_1+1)^alpha + ... + (i_k+1)^alpha,
// the only tuples whose membership in the sum count is random.  Its
// prefix projection I_* drops the last coordinate; the fiber of a prefix
// is the set of last coordinates completing it, always a contiguous
// integer interval [lo, hi] (both shell inequalities are one-sided in
// i_k), which is what makes the index compact.
//
// The partition groups prefixes into independence classes: bands X_t/X_t'
// slice prefix-value space into strips of width w = 2*k*alpha*n^(1-1/alpha)
// (two consecutive strips per t, unprimed then primed), and the Y-label
// s_{v-1} = i_1 + d*i_v with stride d = floor(2*k^2*alpha) + k pins at
// most one prefix per band per label.  A class is one (label, primed)
// cell; within a class, distinct members have disjoint fibers and share
// no coordinate value, which is what the verifier checks.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sumset/params.hpp"

namespace sumset {

struct ShellTuple {
    std::vector<std::int64_t> coords;  // strictly decreasing, size k
};

// Struct-of-arrays index over I_*: entry j holds the j-th prefix's k-1
// coordinates, its fiber interval, and its cached value sum(i_r^alpha).
// Prefixes appear in enumeration order (i_1 descending, then each deeper
// coordinate descending), so identical inputs produce identical layouts.
class ShellIndex {
  public:
    ShellIndex(const Parameters& p, double n) : params_(p), n_(n) {}

    const Parameters& params() const { return params_; }
    double n() const { return n_; }

    std::size_t prefix_count() const { return fiber_lo_.size(); }
    std::uint64_t tuple_count() const;

    // coordinate r of prefix j, r in [0, k-2]
    std::int64_t coord(std::size_t j, int r) const {
        return coords_[j * static_cast<std::size_t>(params_.k() - 1) + static_cast<std::size_t>(r)];
    }
    std::vector<std::int64_t> prefix(std::size_t j) const;
    std::pair<std::int64_t, std::int64_t> fiber(std::size_t j) const {
        return {fiber_lo_[j], fiber_hi_[j]};
    }
    std::uint64_t fiber_size(std::size_t j) const {
        return static_cast<std::uint64_t>(fiber_hi_[j] - fiber_lo_[j]) + 1;
    }
    double value(std::size_t j) const { return value_[j]; }

    // Materializes every shell tuple; linear in tuple_count, so only for
    // small thresholds.
    std::vector<ShellTuple> tuples() const;

    void push_prefix(const std::uint32_t* coords, std::uint32_t lo, std::uint32_t hi, double v);

  private:
    Parameters params_;
    double n_;
    std::vector<std::uint32_t> coords_;  // flattened, (k-1) per prefix
    std::vector<std::uint32_t> fiber_lo_;
    std::vector<std::uint32_t> fiber_hi_;  // inclusive
    std::vector<double> value_;
};

// Exact enumeration of I_* with fibers.  Descends coordinates from
// i_1 = floor-strict(n^(1/alpha)) down to ceil((n/k)^(1/alpha)) - 1 (shell
// members satisfy i_1 > (n/k)^(1/alpha); one extra index as margin), each
// deeper coordinate bounded by its predecessor, the strict left
// inequality, and a break once even the largest completion fails the
// right inequality.  Thresholds n < 1 yield an empty index.
ShellIndex enumerate_shell(const Parameters& p, double n);

// Count of all non-negative integer k-tuples (not necessarily decreasing)
// straddling the weighted boundary:
//   a_1 i_1^alpha + ... + a_k i_k^alpha < n < a_1(i_1+1)^alpha + ... .
// Weights (1,...,1,2) give the diagonal-term estimate.  alpha is taken
// raw; integer and half-integer values get the exact comparison paths.
std::uint64_t count_shell_general(const std::vector<std::int64_t>& a, double alpha, double n);

struct BandIndex {
    std::int64_t t = 0;
    bool primed = false;
};

// Band half-width w = 2*k*alpha*n^(1-1/alpha).
double band_width(const Parameters& p, double n);

// Left-closed bands: q = floor(v/w); t = q/2; primed = odd(q).  So
// v in [2tw, (2t+1)w) is X_t and v in [(2t+1)w, (2t+2)w) is X_t'.
BandIndex band_of_value(double v, double w);
BandIndex band_index(const std::vector<std::int64_t>& prefix, const Parameters& p, double n);

// (k-2)-tuple s_{v-1} = i_1 + d*i_v, v = 2..k-1, d = floor(2*k^2*alpha)+k.
// Empty for k = 2: the construction gives two parity-only families there,
// which the verifier treats as an experiment, not a theorem.
std::vector<std::int64_t> y_label(const std::vector<std::int64_t>& prefix, const Parameters& p);

struct PartitionClass {
    std::vector<std::int64_t> label;  // k-2 entries
    bool primed = false;
    std::vector<std::uint32_t> members;  // prefix indices into the ShellIndex
    std::vector<std::int32_t> band;      // band index t per member, parallel to members
};

// Groups every prefix by (y_label, primed); classes cover I_* disjointly.
// Classes are ordered by label (lexicographic), unprimed before primed;
// members keep enumeration order.
std::vector<PartitionClass> build_partition(const Parameters& p, double n,
                                            const ShellIndex& shell);

struct PairSample {
    std::uint32_t a = 0, b = 0;  // prefix indices
};

struct PartitionReport {
    std::uint64_t class_count = 0;  // s
    std::uint64_t max_class_size = 0;
    std::uint64_t prefix_count = 0;
    std::uint64_t tuple_count = 0;
    std::vector<std::uint64_t> class_fiber_sq;  // per class: sum over members of |fiber|^2
    std::uint64_t d2 = 0;                       // max of class_fiber_sq

    // Pair counts within classes.  coord_collision_pairs sums over
    // coordinate positions, so a pair sharing two positions counts twice;
    // zero iff the coordinatewise-distinctness claim holds exactly.
    // y_band_multiplicity_pairs counts same-band pairs (k >= 3 only; the
    // band families for k = 2 intentionally share bands).
    std::uint64_t fiber_overlap_pairs = 0;
    std::uint64_t coord_collision_pairs = 0;
    std::uint64_t y_band_multiplicity_pairs = 0;
    std::uint64_t fiber_bound_violations = 0;

    std::vector<PairSample> fiber_overlap_samples;   // capped
    std::vector<PairSample> coord_collision_samples;
    std::vector<PairSample> y_band_samples;
    std::vector<std::uint32_t> fiber_bound_samples;
};

PartitionReport verify_partition(const std::vector<PartitionClass>& classes,
                                 const ShellIndex& shell, const Parameters& p, double n);

// Analytic fiber-size bound
//   (n - v)^(1/alpha) - max(n - v', 0)^(1/alpha) + 1,
// v = sum i_r^alpha, v' = sum (i_r+1)^alpha over the prefix.  The inner
// term is clamped below at zero so the root is always defined.  Being a
// real-valued bound on a lattice interval it can undershoot the true
// fiber size by up to one (two rounded ends); |fiber| <= bound + 1 is
// the sharp form, and what verify_partition checks.
double fiber_size_bound(const std::vector<std::int64_t>& prefix, const Parameters& p, double n);

// JSON object {n, k, alpha, s, max_class, D2, violations:{...}, slopes:{...}}.
std::string partition_report_json(
    const PartitionReport& rep, const ShellIndex& shell,
    const std::vector<std::pair<std::string, double>>& slopes = {});

}  // namespace sumset
