// Workbench driver: every experiment in the library is exposed as a
// subcommand that reads a flat key = value config (flags override it,
// flags win) and writes CSV/JSON artifacts plus a content hash per file.
//
// Commands:
//   generate     sample sequences and persist them
//   repcount     exact r/S table up to the largest grid point
//   sigma        sigma_n at every (n, seed) pair
//   shell        boundary-shell sizes per grid point
//   partition    build + verify the class partition, JSON report per n
//   scaling      log-log slope fits of the partition statistics
//   hoeffding    empirical tail of the largest class vs 2 exp(-2 y^2)
//   discrepancy  deviations of sigma_n and S(n) from C n^beta, plus fits
//
// Contract: outputs are a pure function of (config, master seed); the
// worker count never changes a single output byte.  Files are write-once
// unless --overwrite is passed.  Exit codes: 0 success, 1 assertion
// violation, 2 usage error, 3 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sumset/concentration.hpp"
#include "sumset/csvio.hpp"
#include "sumset/parallel.hpp"
#include "sumset/params.hpp"
#include "sumset/repcount.hpp"
#include "sumset/rng.hpp"
#include "sumset/sequence.hpp"
#include "sumset/shell.hpp"

namespace {

using namespace sumset;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag state as parsed; nothing validated yet.
struct RawArgs {
    std::string config_path;
    std::optional<int> k;
    std::optional<std::string> beta;
    std::vector<std::int64_t> n_grid;
    std::vector<std::uint64_t> seeds;
    std::optional<std::string> mode;
    std::optional<std::int64_t> trials;
    std::optional<std::string> out;
    std::optional<int> workers;
    bool overwrite = false;
};

struct RunConfig {
    int k = 2;
    Rational beta{1, 1};
    std::vector<std::int64_t> n_grid;
    std::vector<std::uint64_t> seeds;
    SequenceMode mode = SequenceMode::Random;
    std::int64_t trials = 10000;
    std::string output_dir;
    int workers = 1;
    bool overwrite = false;
};

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(v);
    while (std::getline(is, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) parts.push_back(cur);
    }
    return parts;
}

std::int64_t parse_i64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw UsageError(key + ": not an integer: " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size() || v.front() == '-') throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw UsageError(key + ": not a non-negative integer: " + v);
    }
}

Rational parse_beta_text(const std::string& s) {
    try {
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            return Rational(parse_i64("beta", s.substr(0, slash)),
                            parse_i64("beta", s.substr(slash + 1)));
        }
        return parse_decimal_rational(s);
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(std::string("beta: ") + e.what());
    }
}

SequenceMode parse_mode(const std::string& s) {
    if (s == "random") return SequenceMode::Random;
    if (s == "midpoint") return SequenceMode::Midpoint;
    throw UsageError("mode: expected random or midpoint, got " + s);
}

void load_config_file(const std::string& path, RunConfig& cfg,
                      std::optional<std::uint64_t>& master_seed,
                      std::optional<std::int64_t>& seed_count) {
    std::ifstream is(path);
    if (!is) throw UsageError("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(entry.substr(0, eq));
        std::string val = trim(entry.substr(eq + 1));
        if (val.size() >= 2 && ((val.front() == '"' && val.back() == '"') ||
                                (val.front() == '\'' && val.back() == '\''))) {
            val = val.substr(1, val.size() - 2);
        }
        if (key == "k") {
            cfg.k = static_cast<int>(parse_i64(key, val));
        } else if (key == "beta") {
            cfg.beta = parse_beta_text(val);
        } else if (key == "n_grid") {
            cfg.n_grid.clear();
            for (const std::string& part : split_list(val)) cfg.n_grid.push_back(parse_i64(key, part));
        } else if (key == "seeds") {
            cfg.seeds.clear();
            for (const std::string& part : split_list(val)) cfg.seeds.push_back(parse_u64(key, part));
        } else if (key == "master_seed") {
            master_seed = parse_u64(key, val);
        } else if (key == "seed_count") {
            seed_count = parse_i64(key, val);
        } else if (key == "mode") {
            cfg.mode = parse_mode(val);
        } else if (key == "trials") {
            cfg.trials = parse_i64(key, val);
        } else if (key == "output_dir") {
            cfg.output_dir = val;
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(parse_i64(key, val));
        } else {
            throw UsageError("unknown config key: " + key);
        }
    }
}

RunConfig resolve_config(const RawArgs& raw) {
    RunConfig cfg;
    std::optional<std::uint64_t> master_seed;
    std::optional<std::int64_t> seed_count;
    if (!raw.config_path.empty()) load_config_file(raw.config_path, cfg, master_seed, seed_count);
    if (raw.k) cfg.k = *raw.k;
    if (raw.beta) cfg.beta = parse_beta_text(*raw.beta);
    if (!raw.n_grid.empty()) cfg.n_grid = raw.n_grid;
    if (!raw.seeds.empty()) cfg.seeds = raw.seeds;
    if (raw.mode) cfg.mode = parse_mode(*raw.mode);
    if (raw.trials) cfg.trials = *raw.trials;
    if (raw.out) cfg.output_dir = *raw.out;
    if (raw.workers) cfg.workers = *raw.workers;
    cfg.overwrite = raw.overwrite;

    if (cfg.output_dir.empty()) {
        const char* env = std::getenv("SUMSET_FUCHS_OUT");
        cfg.output_dir = env != nullptr && *env != '\0' ? env : ".";
    }
    if (cfg.seeds.empty() && master_seed) {
        if (!seed_count || *seed_count < 1) {
            throw UsageError("seed_count: must be >= 1 when master_seed is set");
        }
        for (std::int64_t i = 0; i < *seed_count; ++i) {
            cfg.seeds.push_back(derive_seed(*master_seed, "seed", static_cast<std::uint64_t>(i)));
        }
    }
    if (cfg.workers < 1) throw UsageError("workers: must be >= 1");
    if (cfg.trials < 1) throw UsageError("trials: must be >= 1");
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] < 0) throw UsageError("n_grid: values must be >= 0");
        if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
            throw UsageError("n_grid: must be strictly increasing");
        }
    }
    return cfg;
}

Parameters make_params(const RunConfig& cfg) {
    try {
        return Parameters(cfg.k, cfg.beta);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

void require_n_grid(const RunConfig& cfg) {
    if (cfg.n_grid.empty()) throw UsageError("n_grid: required (empty)");
}

// Random-mode commands need explicit seeds; midpoint ignores the values,
// so a placeholder keeps one run.
std::vector<std::uint64_t> working_seeds(const RunConfig& cfg) {
    if (cfg.mode == SequenceMode::Midpoint) {
        return cfg.seeds.empty() ? std::vector<std::uint64_t>{0} : cfg.seeds;
    }
    if (cfg.seeds.empty()) throw UsageError("seeds: required in random mode");
    return cfg.seeds;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_artifact(const fs::path& path, const std::string& bytes, bool overwrite) {
    if (!overwrite && fs::exists(path)) {
        throw UsageError("refusing to overwrite " + path.string() + " (pass --overwrite)");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << bytes;
    os.close();
    if (!os) throw std::runtime_error("write failed: " + path.string());
    std::cout << "wrote " << path.string() << " " << hash_hex(content_hash(bytes)) << "\n";
}

// ---- commands ----

int cmd_generate(const RunConfig& cfg) {
    const Parameters p = make_params(cfg);
    require_n_grid(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    const std::int64_t n_max = cfg.n_grid.back();
    const std::size_t m = static_cast<std::size_t>(index_bound_for_n(p, static_cast<double>(n_max)));
    if (cfg.mode == SequenceMode::Midpoint) {
        std::ostringstream os;
        save_sequence(midpoint_sequence(p, m), os);
        write_artifact(dir / "sequence_midpoint.txt", os.str(), cfg.overwrite);
        return 0;
    }
    for (const std::uint64_t seed : working_seeds(cfg)) {
        std::ostringstream os;
        save_sequence(sample_sequence(p, m, seed), os);
        write_artifact(dir / ("sequence_s" + std::to_string(seed) + ".txt"), os.str(),
                       cfg.overwrite);
    }
    return 0;
}

int cmd_repcount(const RunConfig& cfg) {
    const Parameters p = make_params(cfg);
    require_n_grid(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    const std::int64_t n_max = cfg.n_grid.back();
    const std::size_t m = static_cast<std::size_t>(sequence_length_for(p, n_max));
    if (cfg.mode == SequenceMode::Midpoint) {
        const RepSeries rep = rep_counts(multiplicities(midpoint_sequence(p, m), n_max), p.k(), n_max);
        std::ostringstream os;
        write_repcount_csv(rep, os);
        write_artifact(dir / "repcount_midpoint.csv", os.str(), cfg.overwrite);
        return 0;
    }
    for (const std::uint64_t seed : working_seeds(cfg)) {
        const SampledSequence seq = sample_sequence(p, m, seed, /*keep_thetas=*/false);
        const RepSeries rep = rep_counts(multiplicities(seq, n_max), p.k(), n_max);
        std::ostringstream os;
        write_repcount_csv(rep, os);
        write_artifact(dir / ("repcount_s" + std::to_string(seed) + ".csv"), os.str(),
                       cfg.overwrite);
    }
    return 0;
}

int cmd_sigma(const RunConfig& cfg) {
    const Parameters p = make_params(cfg);
    require_n_grid(cfg);
    const std::vector<std::uint64_t> seeds = working_seeds(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    std::vector<std::uint64_t> sigma(cfg.n_grid.size() * seeds.size());
    parallel_for(sigma.size(), cfg.workers, [&](std::size_t idx) {
        const std::int64_t n = cfg.n_grid[idx / seeds.size()];
        const std::uint64_t seed = seeds[idx % seeds.size()];
        const std::size_t m = static_cast<std::size_t>(index_bound_for_n(p, static_cast<double>(n)));
        const SampledSequence seq = cfg.mode == SequenceMode::Midpoint
                                        ? midpoint_sequence(p, m)
                                        : sample_sequence(p, m, seed);
        sigma[idx] = sigma_direct(seq, static_cast<double>(n));
    });
    std::ostringstream os;
    os << "n,seed,sigma\n";
    for (std::size_t idx = 0; idx < sigma.size(); ++idx) {
        os << cfg.n_grid[idx / seeds.size()] << ',' << seeds[idx % seeds.size()] << ','
           << sigma[idx] << '\n';
    }
    write_artifact(dir / "sigma.csv", os.str(), cfg.overwrite);
    return 0;
}

int cmd_shell(const RunConfig& cfg) {
    const Parameters p = make_params(cfg);
    require_n_grid(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    std::ostringstream os;
    os << "n,prefixes,tuples\n";
    for (const std::int64_t n : cfg.n_grid) {
        const ShellIndex shell = enumerate_shell(p, static_cast<double>(n));
        os << n << ',' << shell.prefix_count() << ',' << shell.tuple_count() << '\n';
    }
    write_artifact(dir / "shell.csv", os.str(), cfg.overwrite);
    return 0;
}

double d2_target_slope(const Parameters& p) {
    switch (p.regime()) {
        case Regime::AlphaGreater2:
            return 2.0 * (p.alpha() - 1.0) / (p.alpha() * p.alpha());
        case Regime::AlphaLess2:
            return 1.0 / p.alpha();
        case Regime::AlphaEqual2:
            return 0.5;
    }
    return 0.0;  // unreachable
}

struct PartitionPoint {
    std::int64_t n = 0;
    PartitionReport rep;
    std::string json;
};

PartitionPoint run_partition(const Parameters& p, std::int64_t n, bool want_json) {
    PartitionPoint pt;
    pt.n = n;
    const ShellIndex shell = enumerate_shell(p, static_cast<double>(n));
    const std::vector<PartitionClass> classes = build_partition(p, static_cast<double>(n), shell);
    pt.rep = verify_partition(classes, shell, p, static_cast<double>(n));
    if (want_json) pt.json = partition_report_json(pt.rep, shell);
    return pt;
}

void push_fit(std::vector<FitRow>& rows, const std::string& name,
              const std::vector<std::pair<double, double>>& pts, double target) {
    if (pts.size() < 3) return;
    for (const auto& [n, value] : pts) {
        if (!(value > 0.0)) return;  // log-log fit undefined; skip the row
    }
    FitRow row;
    row.quantity = name;
    row.fit = fit_scaling(pts);
    row.target_slope = target;
    rows.push_back(std::move(row));
}

std::vector<FitRow> partition_fit_rows(const Parameters& p,
                                       const std::vector<PartitionPoint>& pts) {
    std::vector<std::pair<double, double>> shell_pts, s_pts, max_pts, d2_pts;
    for (const PartitionPoint& pt : pts) {
        const double n = static_cast<double>(pt.n);
        shell_pts.emplace_back(n, static_cast<double>(pt.rep.tuple_count));
        s_pts.emplace_back(n, static_cast<double>(pt.rep.class_count));
        max_pts.emplace_back(n, static_cast<double>(pt.rep.max_class_size));
        d2_pts.emplace_back(n, static_cast<double>(pt.rep.d2));
    }
    const double a = p.alpha();
    std::vector<FitRow> rows;
    push_fit(rows, "weighted_shell", shell_pts, static_cast<double>(p.k() - 1) / a);
    push_fit(rows, "class_count", s_pts, static_cast<double>(p.k() - 2) / a);
    push_fit(rows, "max_class_size", max_pts, 1.0 / a);
    push_fit(rows, "max_class_fiber_sq", d2_pts, d2_target_slope(p));
    return rows;
}

int cmd_partition(const RunConfig& cfg) {
    const Parameters p = make_params(cfg);
    require_n_grid(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    std::vector<PartitionPoint> pts;
    bool violated = false;
    for (const std::int64_t n : cfg.n_grid) {
        PartitionPoint pt = run_partition(p, n, /*want_json=*/true);
        const PartitionReport& rep = pt.rep;
        std::cout << "n=" << n << " s=" << rep.class_count << " max_class=" << rep.max_class_size
                  << " D2=" << rep.d2 << " overlap=" << rep.fiber_overlap_pairs
                  << " collision=" << rep.coord_collision_pairs
                  << " band_multiplicity=" << rep.y_band_multiplicity_pairs << "\n";
        if (rep.fiber_overlap_pairs + rep.coord_collision_pairs + rep.y_band_multiplicity_pairs >
            0) {
            violated = true;
        }
        write_artifact(dir / ("partition_n" + std::to_string(n) + ".json"), pt.json,
                       cfg.overwrite);
        pts.push_back(std::move(pt));
    }
    const std::vector<FitRow> rows = partition_fit_rows(p, pts);
    if (!rows.empty()) {
        std::ostringstream os;
        write_fits_csv(os, rows);
        write_artifact(dir / "partition_fits.csv", os.str(), cfg.overwrite);
    }
    // disjointness claims hold for k >= 3 only; k = 2 reports them as data
    return p.k() >= 3 && violated ? 1 : 0;
}

int cmd_scaling(const RunConfig& cfg) {
    const Parameters p = make_params(cfg);
    require_n_grid(cfg);
    if (cfg.n_grid.size() < 3) throw UsageError("n_grid: need at least 3 points for slope fits");
    const fs::path dir = ensure_out_dir(cfg);
    std::vector<PartitionPoint> pts;
    for (const std::int64_t n : cfg.n_grid) pts.push_back(run_partition(p, n, false));
    const std::vector<FitRow> rows = partition_fit_rows(p, pts);
    std::ostringstream os;
    write_fits_csv(os, rows);
    write_artifact(dir / "scaling.csv", os.str(), cfg.overwrite);
    for (const FitRow& r : rows) {
        std::cout << r.quantity << " slope=" << format_double(r.fit.slope)
                  << " target=" << format_double(r.target_slope) << "\n";
    }
    return 0;
}

int cmd_hoeffding(const RunConfig& cfg) {
    const Parameters p = make_params(cfg);
    require_n_grid(cfg);
    const std::uint64_t seed = working_seeds(cfg).front();
    const fs::path dir = ensure_out_dir(cfg);
    const std::int64_t n = cfg.n_grid.back();
    const ShellIndex shell = enumerate_shell(p, static_cast<double>(n));
    const std::vector<PartitionClass> classes = build_partition(p, static_cast<double>(n), shell);
    if (classes.empty()) throw std::runtime_error("hoeffding: empty partition at n=" + std::to_string(n));
    std::size_t best = 0;
    for (std::size_t i = 1; i < classes.size(); ++i) {
        if (classes[i].members.size() > classes[best].members.size()) best = i;
    }
    const HoeffdingReport rep = hoeffding_empirical(classes[best], shell, p,
                                                    static_cast<double>(n), cfg.trials, seed,
                                                    cfg.workers);
    std::cout << "n=" << n << " class_size=" << classes[best].members.size()
              << " d_t=" << format_double(rep.d_t) << " mean=" << format_double(rep.mean)
              << " trials=" << rep.trials << "\n";
    std::ostringstream os;
    os << "y,freq,bound,stderr\n";
    for (std::size_t i = 0; i < rep.y.size(); ++i) {
        os << format_double(rep.y[i]) << ',' << format_double(rep.freq[i]) << ','
           << format_double(rep.bound[i]) << ',' << format_double(rep.std_err[i]) << '\n';
    }
    write_artifact(dir / "hoeffding.csv", os.str(), cfg.overwrite);
    return 0;
}

int cmd_discrepancy(const RunConfig& cfg) {
    const Parameters p = make_params(cfg);
    require_n_grid(cfg);
    if (cfg.n_grid.size() < 3) throw UsageError("n_grid: need at least 3 points for slope fits");
    const std::vector<std::uint64_t> seeds = working_seeds(cfg);
    const fs::path dir = ensure_out_dir(cfg);
    const DeviationRun run = empirical_deviation(p, cfg.n_grid, seeds, cfg.mode, cfg.workers);
    {
        std::ostringstream os;
        write_deviations_csv(os, run.samples);
        write_artifact(dir / "deviations.csv", os.str(), cfg.overwrite);
    }
    const double target = predicted_error_exponent(p).exponent;
    std::vector<std::pair<double, double>> med_S, med_sigma;
    for (const DeviationSummary& s : run.summary) {
        med_S.emplace_back(static_cast<double>(s.n), s.median_abs_dev_S);
        med_sigma.emplace_back(static_cast<double>(s.n), s.median_abs_dev_sigma);
    }
    std::vector<FitRow> rows;
    push_fit(rows, "median_abs_dev_S", med_S, target);
    push_fit(rows, "median_abs_dev_sigma", med_sigma, target);
    std::ostringstream os;
    write_fits_csv(os, rows);
    write_artifact(dir / "deviation_fits.csv", os.str(), cfg.overwrite);
    for (const FitRow& r : rows) {
        std::cout << r.quantity << " slope=" << format_double(r.fit.slope)
                  << " target=" << format_double(r.target_slope) << "\n";
    }
    if (rows.empty()) std::cout << "fits skipped: a median is zero at some grid point\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-fold sumset counting workbench"};
    app.require_subcommand(1);
    RawArgs raw;
    const auto add_common = [&raw](CLI::App* sub) {
        sub->add_option("--config", raw.config_path, "key = value config file");
        sub->add_option("--k", raw.k, "number of summands (>= 2)");
        sub->add_option("--beta", raw.beta, "target exponent, decimal or p/q");
        sub->add_option("--n", raw.n_grid, "threshold grid, comma separated, strictly increasing")
            ->delimiter(',');
        sub->add_option("--seed", raw.seeds, "seed list, comma separated")->delimiter(',');
        sub->add_option("--mode", raw.mode, "random | midpoint");
        sub->add_option("--trials", raw.trials, "Monte-Carlo trial count");
        sub->add_option("--out", raw.out, "output directory (default $SUMSET_FUCHS_OUT or .)");
        sub->add_option("--workers", raw.workers, "worker threads (wall time only, never output)");
        sub->add_flag("--overwrite", raw.overwrite, "allow replacing existing output files");
    };
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"generate", "sample sequences and persist them"},
        {"repcount", "exact r/S table up to the largest grid point"},
        {"sigma", "sigma_n at every (n, seed) pair"},
        {"shell", "boundary-shell sizes per grid point"},
        {"partition", "build and verify the class partition"},
        {"scaling", "log-log slope fits of partition statistics"},
        {"hoeffding", "empirical tail of the largest class"},
        {"discrepancy", "deviations from C n^beta with slope fits"},
    };
    for (const auto& [name, desc] : commands) add_common(app.add_subcommand(name, desc));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = resolve_config(raw);
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "generate") return cmd_generate(cfg);
        if (name == "repcount") return cmd_repcount(cfg);
        if (name == "sigma") return cmd_sigma(cfg);
        if (name == "shell") return cmd_shell(cfg);
        if (name == "partition") return cmd_partition(cfg);
        if (name == "scaling") return cmd_scaling(cfg);
        if (name == "hoeffding") return cmd_hoeffding(cfg);
        if (name == "discrepancy") return cmd_discrepancy(cfg);
        throw UsageError("unknown command: " + name);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
