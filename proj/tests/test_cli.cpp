#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

// Workbench binary: flag/config resolution, write-once artifact policy,
// deterministic outputs independent of worker count, and exit codes
// (0 ok, 2 usage, 3 runtime).

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#ifndef SUMSET_CLI_PATH
#error "SUMSET_CLI_PATH must point at the workbench binary"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_root() {
    static fs::path root = [] {
        auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        fs::path p = fs::temp_directory_path() /
                     ("sumset_cli_test_" + std::to_string(static_cast<long long>(stamp)));
        fs::create_directories(p);
        return p;
    }();
    return root;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& tag) {
    fs::path out = scratch_root() / (tag + ".out");
    fs::path err = scratch_root() / (tag + ".err");
    std::string cmd = std::string(SUMSET_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                      err.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("generate writes one row per participating index") {
    fs::path dir = scratch_root() / "gen";
    RunResult r = run_cli("generate --k 3 --beta 1 --n 10000 --seed 7 --out " + dir.string(),
                          "gen1");
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    fs::path file = dir / "sequence_s7.txt";
    REQUIRE(fs::exists(file));
    std::string text = slurp(file);
    CHECK(count_lines(text) == 1 + 22);  // header + floor(10000^(1/3)) + 1 rows
    CHECK(text.rfind("3 1 3 7 22 random", 0) == 0);
}

TEST_CASE("artifacts are write-once unless overwrite is passed") {
    fs::path dir = scratch_root() / "once";
    std::string cmd = "generate --k 2 --beta 1 --n 100 --seed 3 --out " + dir.string();
    RunResult first = run_cli(cmd, "once1");
    REQUIRE(first.exit_code == 0);
    std::string bytes = slurp(dir / "sequence_s3.txt");

    RunResult second = run_cli(cmd, "once2");
    CHECK(second.exit_code == 2);
    CHECK(second.err.find("refusing to overwrite") != std::string::npos);

    RunResult third = run_cli(cmd + " --overwrite", "once3");
    CHECK(third.exit_code == 0);
    CHECK(slurp(dir / "sequence_s3.txt") == bytes);
    CHECK(first.out == third.out);  // same "wrote <path> <hash>" line
}

TEST_CASE("midpoint sequences carry no seed") {
    fs::path dir = scratch_root() / "mid";
    RunResult r = run_cli("generate --k 3 --beta 1 --n 1000 --mode midpoint --out " + dir.string(),
                          "mid1");
    REQUIRE(r.exit_code == 0);
    std::string text = slurp(dir / "sequence_midpoint.txt");
    CHECK(text.find("midpoint") != std::string::npos);
    CHECK(text.find("random") == std::string::npos);
}

TEST_CASE("worker count never changes bytes") {
    fs::path d1 = scratch_root() / "w1";
    fs::path d4 = scratch_root() / "w4";
    fs::path d1b = scratch_root() / "w1b";
    std::string base = "sigma --k 2 --beta 1 --n 100,200,400 --seed 1,2,3 ";
    REQUIRE(run_cli(base + "--workers 1 --out " + d1.string(), "wk1").exit_code == 0);
    REQUIRE(run_cli(base + "--workers 4 --out " + d4.string(), "wk4").exit_code == 0);
    REQUIRE(run_cli(base + "--workers 1 --out " + d1b.string(), "wk1b").exit_code == 0);
    std::string a = slurp(d1 / "sigma.csv");
    CHECK(a == slurp(d4 / "sigma.csv"));
    CHECK(a == slurp(d1b / "sigma.csv"));
    CHECK(!a.empty());
}

TEST_CASE("flags override config values") {
    fs::path dir_cfg = scratch_root() / "cfgdir";
    fs::path dir_flag = scratch_root() / "flagdir";
    fs::path cfg = scratch_root() / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "# sigma run\n";
        out << "k = 2\n";
        out << "beta = 1\n";
        out << "n_grid = 100\n";
        out << "seeds = 1\n";
        out << "output_dir = " << dir_cfg.string() << "\n";
    }
    RunResult r = run_cli("sigma --config " + cfg.string() + " --n 200 --out " + dir_flag.string(),
                          "cfg1");
    REQUIRE(r.exit_code == 0);
    CHECK(!fs::exists(dir_cfg / "sigma.csv"));
    std::string text = slurp(dir_flag / "sigma.csv");
    CHECK(text.find("\n200,1,") != std::string::npos);
    CHECK(text.find("\n100,") == std::string::npos);
}

TEST_CASE("environment variable supplies only the default output directory") {
    fs::path dir_env = scratch_root() / "envdir";
    fs::create_directories(dir_env);
    setenv("SUMSET_FUCHS_OUT", dir_env.string().c_str(), 1);
    RunResult r = run_cli("generate --k 2 --beta 1 --n 50 --seed 9", "env1");
    unsetenv("SUMSET_FUCHS_OUT");
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(dir_env / "sequence_s9.txt"));
}

TEST_CASE("usage errors name the offending field and exit 2") {
    fs::path cfg = scratch_root() / "bad.cfg";
    {
        std::ofstream out(cfg);
        out << "bogus = 3\n";
    }
    RunResult bad_key = run_cli("sigma --config " + cfg.string(), "bad1");
    CHECK(bad_key.exit_code == 2);
    CHECK(bad_key.err.find("bogus") != std::string::npos);

    RunResult no_grid = run_cli("scaling --k 2 --beta 1 --seed 1", "bad2");
    CHECK(no_grid.exit_code == 2);
    CHECK(no_grid.err.find("n_grid") != std::string::npos);

    RunResult no_seed = run_cli("sigma --k 2 --beta 1 --n 100", "bad3");
    CHECK(no_seed.exit_code == 2);
    CHECK(no_seed.err.find("seeds") != std::string::npos);

    RunResult bad_cmd = run_cli("frobnicate", "bad4");
    CHECK(bad_cmd.exit_code == 2);

    RunResult bad_trials = run_cli("hoeffding --k 3 --beta 1 --n 100 --seed 1 --trials 0", "bad5");
    CHECK(bad_trials.exit_code == 2);
}

TEST_CASE("repcount and partition emit their artifacts") {
    fs::path dir = scratch_root() / "rc";
    RunResult r = run_cli("repcount --k 2 --beta 1 --n 25 --mode midpoint --out " + dir.string(),
                          "rc1");
    REQUIRE(r.exit_code == 0);
    std::string text = slurp(dir / "repcount_midpoint.csv");
    CHECK(count_lines(text) == 1 + 26);  // header + rows 0..25
    CHECK(text.rfind("m,r,S", 0) == 0);

    fs::path pdir = scratch_root() / "pt";
    RunResult pr = run_cli("partition --k 3 --beta 1 --n 1000 --seed 1 --out " + pdir.string(),
                           "pt1");
    REQUIRE(pr.exit_code == 0);
    CHECK(fs::exists(pdir / "partition_n1000.json"));
    CHECK(pr.out.find("overlap=0") != std::string::npos);
}
