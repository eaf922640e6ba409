#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "thinfilm/branch_io.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/continuation.hpp"
#include "thinfilm/errors.hpp"

using namespace thinfilm;

namespace {

std::string thrown_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const config_error& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config text parses with defaults, comments and overrides") {
  RunConfig d = parse_config("");
  CHECK(d.g == 1.0);
  CHECK(d.k0 == 1.0);
  CHECK(d.M == 8.0);
  CHECK(d.out_dir == "out");
  CHECK_FALSE(d.E_set);
  CHECK_FALSE(d.K_set);

  RunConfig c = parse_config("# leading comment\n\n  g = 2.5 \nk0 = 0.5\n");
  CHECK(c.g == 2.5);
  CHECK(c.k0 == 0.5);
  CHECK(c.model().M_star() == 10.0);

  RunConfig e = parse_config("E = -5.5\nK = -0.25\n");
  CHECK(e.E_set);
  CHECK(e.E == -5.5);
  CHECK(e.K_set);
  CHECK(e.K == -0.25);
}

TEST_CASE("config errors carry line numbers and key names") {
  auto msg = thrown_message([] { (void)parse_config("g = -1\n"); });
  CHECK(msg.find("line 1") != std::string::npos);
  CHECK(msg.find("'g'") != std::string::npos);

  msg = thrown_message([] { (void)parse_config("g = 1\nbogus = 2\n"); });
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("bogus") != std::string::npos);

  msg = thrown_message([] { (void)parse_config("g = 1\n\n# c\nk0: 3\n"); });
  CHECK(msg.find("line 4") != std::string::npos);
  CHECK(msg.find("key = value") != std::string::npos);

  CHECK_THROWS_AS((void)parse_config("M = abc\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("eps = 0.5\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("grid = 17\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("grid = 8\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("rupture_threshold = 1.5\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("K = 0\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("max_steps = 1\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("mode = 0\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("n_modes = 3\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("samples = 0\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("point_index = -2\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("amplitude = -0.1\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("bloch_sweep = maybe\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("branch_file =\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("out_dir =\n"), config_error);
  CHECK_THROWS_AS((void)parse_config("v0 = -1.5\n"), config_error);

  CHECK_THROWS_AS((void)parse_config_file("/nonexistent/thinfilm.cfg"),
                  config_error);
}

TEST_CASE("echoed configuration round-trips exactly") {
  RunConfig cfg;
  cfg.g = 1.25;
  cfg.k0 = 0.75;
  cfg.M = 7.3;
  cfg.eps = 0.2;
  cfg.amplitude = 1.0 / 3.0;
  cfg.K = K0 - 0.05;
  cfg.K_set = true;
  cfg.E = -5.4321;
  cfg.E_set = true;
  cfg.v0 = -0.3;
  cfg.w0 = 0.125;
  cfg.t_end = 2.5;
  cfg.dt = 1e-5;
  cfg.ds = 0.01;
  cfg.max_steps = 37;
  cfg.rupture_threshold = 0.05;
  cfg.grid = 128;
  cfg.n_modes = 48;
  cfg.snapshot_every = 17;
  cfg.point_index = 3;
  cfg.mode_ell = 2;
  cfg.samples = 11;
  cfg.seed = 987654321ULL;
  cfg.bloch_sweep = true;
  cfg.branch_file = "some/branch/dir";
  cfg.out_dir = "elsewhere";

  std::string echoed = echo_config(cfg);
  RunConfig back = parse_config(echoed);
  CHECK(back.g == cfg.g);
  CHECK(back.k0 == cfg.k0);
  CHECK(back.M == cfg.M);
  CHECK(back.eps == cfg.eps);
  CHECK(back.amplitude == cfg.amplitude);
  CHECK(back.K == cfg.K);
  CHECK(back.K_set);
  CHECK(back.E == cfg.E);
  CHECK(back.E_set);
  CHECK(back.v0 == cfg.v0);
  CHECK(back.w0 == cfg.w0);
  CHECK(back.t_end == cfg.t_end);
  CHECK(back.dt == cfg.dt);
  CHECK(back.ds == cfg.ds);
  CHECK(back.max_steps == cfg.max_steps);
  CHECK(back.rupture_threshold == cfg.rupture_threshold);
  CHECK(back.grid == cfg.grid);
  CHECK(back.n_modes == cfg.n_modes);
  CHECK(back.snapshot_every == cfg.snapshot_every);
  CHECK(back.point_index == cfg.point_index);
  CHECK(back.mode_ell == cfg.mode_ell);
  CHECK(back.samples == cfg.samples);
  CHECK(back.seed == cfg.seed);
  CHECK(back.bloch_sweep == cfg.bloch_sweep);
  CHECK(back.branch_file == cfg.branch_file);
  CHECK(back.out_dir == cfg.out_dir);

  CHECK(echo_config(back) == echoed);
}

TEST_CASE("branch emission round-trips through the csv layer") {
  ContinuationSettings st;
  st.N = 16;
  st.max_steps = 3;
  BranchRecord rec = Continuation{st}.run();
  REQUIRE(rec.points.size() == 3);

  auto dir = fresh_dir("thinfilm_branch_io_a");
  emit_branch(rec, dir.string());
  CHECK(std::filesystem::exists(dir / "branch.csv"));
  CHECK(std::filesystem::exists(dir / "profile_2.csv"));
  CHECK(std::filesystem::exists(dir / "bifurcation.csv"));

  EmittedBranch eb = read_branch_dir(dir.string());
  REQUIRE(eb.rows.size() == 3);
  REQUIRE(eb.profiles.size() == 3);
  REQUIRE(eb.bifurcation.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const BranchPoint& p = rec.points[i];
    CHECK(eb.rows[i][0] == p.s);
    CHECK(eb.rows[i][1] == p.M);
    CHECK(eb.rows[i][2] == p.K);
    CHECK(eb.rows[i][3] == p.min_h);
    CHECK(eb.rows[i][4] == p.max_h);
    CHECK(eb.rows[i][5] == p.l2_norm);
    CHECK(eb.rows[i][6] == p.h2_norm);
    CHECK(eb.rows[i][7] == p.flux_residual);
    CHECK(std::isnan(eb.rows[i][8]));
    CHECK(eb.bifurcation[i][0] == p.M);
    CHECK(eb.bifurcation[i][1] == p.l2_norm);

    REQUIRE(eb.profiles[i].size() == 4u * 16u);
    auto x = PeriodicProfile::grid(1.0, 64);
    for (int j = 0; j < 64; ++j) {
      CHECK(eb.profiles[i][j][0] == x[j]);
      CHECK(eb.profiles[i][j][1] == p.profile.eval(x[j]));
      CHECK(eb.profiles[i][j][2] == 1.0 + p.profile.eval(x[j]));
    }
  }

  auto dir2 = fresh_dir("thinfilm_branch_io_b");
  emit_branch(rec, dir2.string());
  CHECK(slurp(dir / "branch.csv") == slurp(dir2 / "branch.csv"));
  CHECK(slurp(dir / "profile_1.csv") == slurp(dir2 / "profile_1.csv"));
  CHECK(slurp(dir / "bifurcation.csv") == slurp(dir2 / "bifurcation.csv"));
}

TEST_CASE("independent continuation runs emit byte-identical branches") {
  ContinuationSettings st;
  st.N = 16;
  st.max_steps = 3;
  BranchRecord r1 = Continuation{st}.run();
  BranchRecord r2 = Continuation{st}.run();
  auto d1 = fresh_dir("thinfilm_det_a");
  auto d2 = fresh_dir("thinfilm_det_b");
  emit_branch(r1, d1.string());
  emit_branch(r2, d2.string());
  CHECK(slurp(d1 / "branch.csv") == slurp(d2 / "branch.csv"));
  CHECK(slurp(d1 / "profile_0.csv") == slurp(d2 / "profile_0.csv"));
}

TEST_CASE("branch points reconstruct from emitted samples") {
  ContinuationSettings st;
  st.N = 16;
  st.max_steps = 3;
  BranchRecord rec = Continuation{st}.run();
  auto dir = fresh_dir("thinfilm_branch_pt");
  emit_branch(rec, dir.string());

  BranchPoint bp = read_branch_point(dir.string(), 1);
  CHECK(bp.M == rec.points[1].M);
  CHECK(bp.s == rec.points[1].s);
  const auto& a0 = rec.points[1].profile.coeffs();
  const auto& a1 = bp.profile.coeffs();
  REQUIRE(a1.size() == a0.size());
  for (std::size_t l = 0; l < a0.size(); ++l)
    CHECK(std::abs(a1[l] - a0[l]) < 1e-12);

  BranchPoint last = read_branch_point(dir.string(), -1);
  CHECK(last.M == rec.points[2].M);
  CHECK_THROWS_AS(read_branch_point(dir.string(), 99), config_error);
  CHECK_THROWS_AS(read_branch_dir("/nonexistent/dir"), config_error);
}

TEST_CASE("csv reader rejects malformed input") {
  auto dir = fresh_dir("thinfilm_csv_bad");
  {
    std::ofstream f(dir / "bad.csv", std::ios::binary);
    f << "a,b\n1.0,zz\n";
  }
  CHECK_THROWS_AS(read_csv((dir / "bad.csv").string(), "a,b"), config_error);
  auto msg = thrown_message(
      [&] { (void)read_csv((dir / "bad.csv").string(), "a,b"); });
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK_THROWS_AS(read_csv((dir / "bad.csv").string(), "x,y"), config_error);
  CHECK_THROWS_AS(read_csv((dir / "missing.csv").string(), "a,b"),
                  config_error);
}
