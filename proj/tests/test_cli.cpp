#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HOPFSPEC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("help and version succeed") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("spectrum --help") == 0);
    CHECK(run_cli("--version") == 0);
}

TEST_CASE("spectrum: outputs, determinism, manifest") {
    TempDir a("hopfspec_cli_a"), b("hopfspec_cli_b");
    const std::string flags =
        "spectrum --delta -1 --gamma 1 --beta 0 --epsilon 1 --nx 32 --ny 32 "
        "--k 4 --solver shift-invert --output-dir ";
    REQUIRE(run_cli(flags + a.path.string()) == 0);
    REQUIRE(run_cli(flags + b.path.string()) == 0);

    CHECK(fs::exists(a.path / "spectrum.csv"));
    CHECK(fs::exists(a.path / "invariant_density.csv"));
    CHECK(fs::exists(a.path / "eigenfunction_00.csv"));
    CHECK(fs::exists(a.path / "manifest.json"));

    // identical flags give identical CSV bytes
    CHECK(slurp(a.path / "spectrum.csv") == slurp(b.path / "spectrum.csv"));
    CHECK(slurp(a.path / "invariant_density.csv") == slurp(b.path / "invariant_density.csv"));

    const std::string manifest = slurp(a.path / "manifest.json");
    CHECK(manifest.find("\"command\": \"spectrum\"") != std::string::npos);
    CHECK(manifest.find("fnv1a64") != std::string::npos);
}

TEST_CASE("degenerate diffusion fails fast with exit 1") {
    TempDir dir("hopfspec_cli_eps0");
    CHECK(run_cli("spectrum --delta -1 --epsilon 0 --nx 16 --ny 16 --output-dir " +
                  dir.path.string()) == 1);
    CHECK_FALSE(fs::exists(dir.path / "spectrum.csv"));
}

TEST_CASE("analytic command and its critical-point error") {
    TempDir dir("hopfspec_cli_analytic");
    CHECK(run_cli("analytic --delta -1 --epsilon 0.4 --l-max 2 --n-max 2 --output-dir " +
                  dir.path.string()) == 0);
    const std::string csv = slurp(dir.path / "analytic.csv");
    CHECK(csv.find("family,l,n,re_lambda,im_lambda") == 0);
    CHECK(csv.find("stable_point") != std::string::npos);

    CHECK(run_cli("analytic --delta 1.5 --epsilon 0.4 --output-dir " + dir.path.string()) ==
          0);
    const std::string csv2 = slurp(dir.path / "analytic.csv");
    CHECK(csv2.find("limit_cycle") != std::string::npos);
    CHECK(csv2.find("unstable_point") != std::string::npos);

    CHECK(run_cli("analytic --delta 0 --epsilon 1 --output-dir " + dir.path.string()) == 1);
}

TEST_CASE("config file fills unset flags, flags win") {
    TempDir dir("hopfspec_cli_config");
    const fs::path cfg = dir.path / "config.json";
    {
        std::ofstream out(cfg);
        out << "{\"delta\": -2.0, \"epsilon\": 0.5, \"l_max\": 1, \"n_max\": 1}\n";
    }
    REQUIRE(run_cli("analytic --config " + cfg.string() + " --delta -1 --output-dir " +
                    dir.path.string()) == 0);
    const std::string manifest = slurp(dir.path / "manifest.json");
    // delta from the flag, epsilon from the config file
    CHECK(manifest.find("\"delta\": -1.0") != std::string::npos);
    CHECK(manifest.find("\"epsilon\": 0.5") != std::string::npos);
}

TEST_CASE("simulate and bound round trips") {
    TempDir dir("hopfspec_cli_sim");
    REQUIRE(run_cli("simulate --delta 1 --epsilon 0.3 --dt 0.001 --steps 200 --seed 3 "
                    "--x0 1 --y0 0 --output-dir " +
                    dir.path.string()) == 0);
    const std::string traj = slurp(dir.path / "trajectory.csv");
    CHECK(traj.find("t,x,y") == 0);

    REQUIRE(run_cli("bound --delta 0 --epsilon 1 --r0 1.5 --horizon 2 --trajectories 300 "
                    "--dt 0.002 --seed 5 --output-dir " +
                    dir.path.string()) == 0);
    const std::string report = slurp(dir.path / "bound_report.json");
    CHECK(report.find("\"passed\": true") != std::string::npos);
    CHECK(report.find("\"c\": 4.0") != std::string::npos);
}

TEST_CASE("isochron rank report") {
    TempDir dir("hopfspec_cli_iso");
    REQUIRE(run_cli("isochron --delta 1 --beta 0 --forcing radial --points 6 --output-dir " +
                    dir.path.string()) == 0);
    std::string manifest = slurp(dir.path / "manifest.json");
    CHECK(manifest.find("\"rank_max\": 1") != std::string::npos);

    REQUIRE(run_cli("isochron --delta 1 --beta 0.8 --forcing radial --points 6 "
                    "--output-dir " +
                    dir.path.string()) == 0);
    manifest = slurp(dir.path / "manifest.json");
    CHECK(manifest.find("\"rank_min\": 2") != std::string::npos);
}

TEST_CASE("floquet report carries the closed-form diffusion coefficient") {
    TempDir dir("hopfspec_cli_floquet");
    REQUIRE(run_cli("floquet --delta 1 --beta 0 --epsilon 1 --output-dir " +
                    dir.path.string()) == 0);
    const auto doc = nlohmann::json::parse(slurp(dir.path / "floquet.json"));
    CHECK(doc.at("phase_diffusion_coefficient").get<double>() ==
          doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(doc.at("characteristic_exponents")[0].get<double>() == doctest::Approx(-2.0));
    CHECK(doc.at("multipliers")[1].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("unknown observable fails before any heavy work") {
    TempDir dir("hopfspec_cli_obs");
    CHECK(run_cli("power --delta 1 --epsilon 1 --nx 16 --ny 16 --obs x9 --output-dir " +
                  dir.path.string()) == 1);
}

TEST_SUITE_END();
