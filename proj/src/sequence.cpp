#include "sumset/sequence.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sumset/rng.hpp"

namespace sumset {

namespace {

std::vector<std::int64_t> derive_values(const std::vector<double>& thetas, double alpha) {
    std::vector<std::int64_t> a;
    a.reserve(thetas.size());
    for (const double t : thetas) a.push_back(power_floor(t, alpha));
    return a;
}

}  // namespace

SampledSequence sample_sequence(const Parameters& p, std::size_t m, std::uint64_t seed,
                                bool keep_thetas) {
    if (m < 1) throw std::invalid_argument("sample_sequence: m must be >= 1");
    Stream stream(seed);
    std::vector<double> thetas(m);
    for (std::size_t i = 0; i < m; ++i)
        thetas[i] = static_cast<double>(i) + stream.unit(i);
    SampledSequence seq{p, SequenceMode::Random, seed, std::move(thetas), {}};
    seq.a = derive_values(seq.thetas, p.alpha());
    if (!keep_thetas) seq.thetas.clear();
    return seq;
}

SampledSequence midpoint_sequence(const Parameters& p, std::size_t m) {
    if (m < 1) throw std::invalid_argument("midpoint_sequence: m must be >= 1");
    std::vector<double> thetas(m);
    for (std::size_t i = 0; i < m; ++i) thetas[i] = static_cast<double>(i) + 0.5;
    SampledSequence seq{p, SequenceMode::Midpoint, std::nullopt, std::move(thetas), {}};
    seq.a = derive_values(seq.thetas, p.alpha());
    return seq;
}

std::int64_t index_bound_for_n(const Parameters& p, double n) {
    if (!(n >= 1.0)) throw std::invalid_argument("index_bound_for_n: n must be >= 1");
    return floor_root(n, p) + 1;
}

std::int64_t sequence_length_for(const Parameters& p, std::int64_t n) {
    // +1 row beyond the bound: the first excluded index can still carry
    // a-value exactly n, and histogram coverage is checked via a.back().
    return index_bound_for_n(p, static_cast<double>(n + p.k())) + 1;
}

void save_sequence(const SampledSequence& seq, std::ostream& os) {
    if (!seq.has_thetas())
        throw std::invalid_argument("save_sequence: slim sequences are not persistable");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", seq.params.beta());
    os << seq.params.k() << ' ' << buf << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", seq.params.alpha());
    os << buf << ' ';
    if (seq.mode == SequenceMode::Random) os << *seq.seed << ' ';
    os << seq.size() << ' '
       << (seq.mode == SequenceMode::Random ? "random" : "midpoint") << '\n';
    for (std::size_t i = 0; i < seq.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", seq.thetas[i]);
        os << i << ' ' << buf << ' ' << seq.a[i] << '\n';
    }
}

void save_sequence_file(const SampledSequence& seq, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_sequence: cannot open " + path);
    save_sequence(seq, os);
    if (!os) throw std::runtime_error("save_sequence: write failed for " + path);
}

SampledSequence load_sequence(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("load_sequence: empty input");
    std::istringstream hs(header);
    std::vector<std::string> tok;
    for (std::string t; hs >> t;) tok.push_back(t);
    if (tok.size() != 5 && tok.size() != 6)
        throw std::runtime_error("load_sequence: malformed header");
    const bool random = tok.back() == "random";
    if (!random && tok.back() != "midpoint")
        throw std::runtime_error("load_sequence: unknown mode " + tok.back());
    if (random != (tok.size() == 6))
        throw std::runtime_error("load_sequence: header/mode field mismatch");
    const int k = std::stoi(tok[0]);
    const double beta = std::stod(tok[1]);
    const std::size_t m = std::stoull(tok[random ? 4 : 3]);
    // Recover the regime from the stored alpha string when beta is not a
    // short decimal; short decimals reconstruct the exact rational.
    Parameters params = [&] {
        std::ostringstream b;
        b.precision(17);
        b << beta;
        try {
            return Parameters(k, parse_decimal_rational(b.str()));
        } catch (const std::exception&) {
            const double alpha = std::stod(tok[2]);
            const Regime reg = alpha > 2 ? Regime::AlphaGreater2
                               : alpha < 2 ? Regime::AlphaLess2
                                           : Regime::AlphaEqual2;
            return Parameters(k, beta, reg);
        }
    }();

    SampledSequence seq{params,
                        random ? SequenceMode::Random : SequenceMode::Midpoint,
                        random ? std::optional<std::uint64_t>(std::stoull(tok[3]))
                               : std::nullopt,
                        {},
                        {}};
    seq.thetas.reserve(m);
    seq.a.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t idx;
        double theta;
        std::int64_t av;
        if (!(is >> idx >> theta >> av) || idx != i)
            throw std::runtime_error("load_sequence: truncated or misnumbered row");
        seq.thetas.push_back(theta);
        seq.a.push_back(av);
    }
    return seq;
}

SampledSequence load_sequence_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_sequence: cannot open " + path);
    return load_sequence(is);
}

}  // namespace sumset
