#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sys/wait.h>

#include "tdqmc/errors.hpp"
#include "tdqmc/run.hpp"

using namespace tdqmc;
namespace fs = std::filesystem;

namespace {
const char* kMinimal = R"(
[lattice]
sites = 0..1
d = 4
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tdqmc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string small_run_ini(const std::string& out) {
  return "[lattice]\nsites = 0..1\nd = 4\n[grid]\nextent = 18\npoints = 32\n"
         "[ensemble]\nM = 20\nseed = 3\n[stepping]\nmax_steps = 30\n[sigma]\ncandidates = 1, inf\n"
         "[output]\ndirectory = " + out + "\n";
}

int exit_code(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST_SUITE("cli_io") {
  TEST_CASE("minimal config takes the lattice defaults") {
    const RunConfig c = parse_config(kMinimal);
    CHECK(c.lattice.a == 1.0);
    CHECK(c.lattice.V0 == -1.0);
    CHECK(c.lattice.lambda == 1.11);
    CHECK(c.zones == 21);
    CHECK(c.ensemble.N == 2);
    CHECK(c.lattice.sites.size() == 2);
  }

  TEST_CASE("validation names the offending key") {
    const std::string bad = std::string(kMinimal) + "[stepping]\ndtau = -0.01\n";
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("stepping.dtau"), ConfigError);
    CHECK_THROWS_AS(parse_config("[lattice]\nd = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "[grid]\npoints = many\n"), ConfigError);
  }

  TEST_CASE("unknown keys get a suggestion") {
    const std::string typo = std::string(kMinimal) + "vacancys = 1\n";
    CHECK_THROWS_WITH_AS(parse_config(typo), doctest::Contains("did you mean 'vacancies'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(std::string(kMinimal) + "[gird]\npoints = 64\n"),
                         doctest::Contains("did you mean [grid]"), ConfigError);
  }

  TEST_CASE("parse errors carry the line") {
    CHECK_THROWS_WITH_AS(parse_config("[lattice]\nsites = 0..1\n[grid\n", "x.ini"),
                         doctest::Contains("x.ini:3"), ConfigError);
  }

  TEST_CASE("sites syntax") {
    CHECK(parse_sites("0..3", 1).size() == 4);
    CHECK(parse_sites("0, 2,5", 1) == std::vector<Site>{{0, 0}, {2, 0}, {5, 0}});
    CHECK(parse_sites("0..1:0..2", 2).size() == 6);
    CHECK(format_sites(parse_sites("0..2:0", 2), 2) == "0:0, 1:0, 2:0");
    CHECK_THROWS_AS(parse_sites("1:1", 1), ConfigError);
    CHECK(std::isinf(parse_number("inf", "k")));
  }

  TEST_CASE("canonical INI round-trips") {
    RunConfig c = parse_config(std::string(kMinimal) +
                               "vacancies = 1\n[sigma]\ncandidates = 0.5, 1, inf\n"
                               "[partition]\nview = electron:0\nmode = strip_x\n[stepping]\ndtau = 0.0123\n");
    c.lattice.sites.push_back({2, 0});
    c.ensemble.sigma = 0.1 + 0.2;  // not exactly representable in short form
    const std::string text = to_ini(c);
    const RunConfig back = parse_config(text);
    CHECK(to_ini(back) == text);
    CHECK(back.ensemble.sigma == c.ensemble.sigma);
    CHECK(back.view.view == EnsembleView::electron);
    CHECK(back.zone_mode == ZoneMode::strip_x);
    CHECK(std::isinf(back.sigma_candidates.back()));
  }

  TEST_CASE("map export: row count, empty zones, exact round trip") {
    const fs::path dir = scratch("map");
    const Grid g = make_grid(1, 10.0, 32);
    EntropyMap m;
    m.partition = make_partition(g);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int z = 0; z < 21; ++z) {
      m.values.push_back(u(rng));
      m.walker_counts.push_back(z + 1);
    }
    m.values[4] = std::numeric_limits<double>::quiet_NaN();
    m.walker_counts[4] = 0;
    export_map(m, (dir / "m.csv").string());
    const std::string text = read_text((dir / "m.csv").string());
    CHECK(std::count(text.begin(), text.end(), '\n') == 22);
    CHECK(text.rfind("zone_x,zone_y,value,walker_count\n", 0) == 0);
    const auto rows = read_map((dir / "m.csv").string());
    REQUIRE(rows.size() == 21);
    CHECK(std::isnan(rows[4].value));
    CHECK(rows[4].walker_count == 0);
    for (int z = 0; z < 21; ++z)
      if (z != 4) CHECK(rows[z].value == m.values[z]);

    Field f(g);
    for (auto& v : f.values()) v = u(rng) * 1e-7;
    export_field(f, (dir / "f.csv").string());
    const ProfileData p = read_profile((dir / "f.csv").string());
    CHECK(p.columns == std::vector<std::string>{"x", "value"});
    for (std::size_t r = 0; r < g.size(); ++r) {
      CHECK(p.rows[r][0] == g.coordinate(static_cast<int>(r)));
      CHECK(p.rows[r][1] == f[r]);
    }
    CHECK_THROWS_AS(read_map((dir / "missing.csv").string()), IoError);
  }

  TEST_CASE("pearson and comparisons") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(pearson({1, 2, 3, nan}, {2, 4, 6, 1}) == doctest::Approx(1.0));
    CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    const Comparison c = compare_values({1, 2, nan}, {1, 2, 5});
    CHECK(c.compared == 2);
    CHECK(c.max_abs == 0.0);
  }

  TEST_CASE("run writes the artifacts and a re-runnable manifest") {
    const fs::path dir = scratch("run");
    const RunConfig c = parse_config(small_run_ini((dir / "a").string()));
    const RunResult r = run(c);
    CHECK(r.scan.has_value());
    for (const char* name : {"potential.csv", "density.csv", "entropy_map.csv", "coherence_map.csv",
                             "energy_trace.csv", "sigma_scan.csv", "summary.csv", "manifest.json"})
      CHECK(fs::exists(dir / "a" / name));

    RunConfig again = config_from_manifest(r.manifest_path);
    CHECK(again.sigma_candidates.empty());
    RunOptions o;
    o.output_directory = (dir / "b").string();
    run(again, o);
    for (const char* name : {"density.csv", "entropy_map.csv", "coherence_map.csv", "energy_trace.csv"})
      CHECK(read_text((dir / "a" / name).string()) == read_text((dir / "b" / name).string()));
  }

  TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    const std::string cli = TDQMC_CLI;
    write_text((dir / "ok.ini").string(), small_run_ini((dir / "out").string()));
    write_text((dir / "bad.ini").string(), "[lattice]\nsites = 0..1\nvacancys = 1\n");
    CHECK(exit_code(cli + " run " + (dir / "ok.ini").string()) == 0);
    CHECK(exit_code(cli + " run " + (dir / "bad.ini").string()) == 1);
    CHECK(exit_code(cli + " run " + (dir / "absent.ini").string()) == 3);
    CHECK(exit_code(cli + " frobnicate") == 1);
    CHECK(exit_code(cli + " compare " + (dir / "out/entropy_map.csv").string() + " " +
                    (dir / "out/entropy_map.csv").string()) == 0);
  }
}
