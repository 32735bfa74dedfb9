#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "stabman/cli.hpp"

using namespace stabman;
namespace fs = std::filesystem;

namespace {

cli::RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return cli::parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::map<std::string, std::string> key_values(const fs::path& p) {
  std::map<std::string, std::string> kv;
  for (const std::string& l : lines(p)) {
    const auto eq = l.find('=');
    if (eq != std::string::npos) kv[l.substr(0, eq)] = l.substr(eq + 1);
  }
  return kv;
}

/// Scratch directory removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path = fs::temp_directory_path() / ("stabman_" + std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STABMAN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

TEST(Config, DefaultsForEmptyFile) {
  const cli::RunConfig c = parse("");
  EXPECT_EQ(c.model, "growth");
  EXPECT_EQ(c.order, 2);
  EXPECT_FALSE(c.r_u);
  EXPECT_EQ(c.T, 50);
  EXPECT_EQ(c.grid, 501);
}

TEST(Config, ReadsAllSections) {
  const cli::RunConfig c = parse(
      "[model]\nname = exo_test\ng_uu = 0.2\n"
      "[solve]\norder = 3\nradius = 0.4\nsample_count = 100\n"
      "[tolerances]\ninner = 1e-10\n"
      "[simulate]\nT = 7\nz0 = 0.1\nshock_scale = 0.01\nseed = 42\n"
      "[ep]\nhorizon = 5\nsweeps = 2\nu0 = 0.3\n"
      "[policy]\ngrid = 11\n[output]\ndir = out dir\n");
  EXPECT_EQ(c.model, "exo_test");
  EXPECT_EQ(c.g_uu, 0.2);
  EXPECT_EQ(c.order, 3);
  EXPECT_EQ(*c.r_u, 0.4);
  EXPECT_EQ(*c.r_v, 0.4);
  EXPECT_EQ(c.search.sample_count, 100);
  EXPECT_EQ(c.inner_tol, 1e-10);
  EXPECT_EQ(c.T, 7);
  EXPECT_EQ(c.z0, std::vector<double>{0.1});
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.horizon, 5);
  EXPECT_EQ(c.sweeps, 2);
  EXPECT_EQ(c.grid, 11);
  EXPECT_EQ(c.output_dir, "out dir");
}

TEST(Config, AutoRadiusAndLists) {
  const cli::RunConfig c = parse("[solve]\nradius = auto\n[model]\nname = linear\nmatrix = 1, -2.5; 0 1\n");
  EXPECT_FALSE(c.r_u);
  EXPECT_EQ(c.linear_matrix, (std::vector<double>{1, -2.5, 0, 1}));
}

TEST(Config, ErrorsAreConfigErrors) {
  EXPECT_THROW(parse("[model]\nname = rbc\n"), ConfigError);
  EXPECT_THROW(parse("[solve]\norder = two\n"), ConfigError);
  EXPECT_THROW(parse("[solve]\nr_u = 0.1\n"), ConfigError);
  EXPECT_THROW(parse("[solve]\nradius = -1\n"), ConfigError);
  EXPECT_THROW(parse("[simulate]\nx0 = 0.1 abc\n"), ConfigError);
  EXPECT_THROW(parse("[tolerances]\ninner = 0\n"), ConfigError);
  EXPECT_THROW(parse("[solve\n"), ConfigError);
  EXPECT_THROW(cli::load_config("/nonexistent/run.ini"), ConfigError);
}

TEST(Config, LinearMatrixSizeChecked) {
  cli::RunConfig c = parse("[model]\nname = linear\nmatrix = 1 2 3\n");
  EXPECT_THROW(cli::make_model(c), ConfigError);
}

TEST(Format, ExactRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 2.3668778163610238e-4, -7e-300}) EXPECT_EQ(std::stod(cli::format_exact(x)), x);
  EXPECT_EQ(cli::format_exact(NAN), "nan");
  EXPECT_EQ(cli::format_exact(-INFINITY), "-inf");
}

TEST(ExitCode, MapsErrorKinds) {
  EXPECT_EQ(cli::exit_code(ConfigError("x")), cli::kConfig);
  EXPECT_EQ(cli::exit_code(UnitRootError("x")), cli::kSpectral);
  EXPECT_EQ(cli::exit_code(NonContractionError("x", 1.0, 2)), cli::kNonContraction);
  EXPECT_EQ(cli::exit_code(InfeasibleInitialError("x")), cli::kInfeasibleInitial);
  EXPECT_EQ(cli::exit_code(cli::Failure(cli::kSteadyState, "x")), cli::kSteadyState);
  EXPECT_EQ(cli::exit_code(std::runtime_error("x")), cli::kOther);
}

TEST(Shocks, SeededAndSigned) {
  const auto a = cli::draw_shocks(2, 20, 0.01, 5);
  EXPECT_EQ(a.size(), 20u);
  for (const Vec& e : a) EXPECT_EQ(e.cwiseAbs().minCoeff(), 0.01);
  const auto b = cli::draw_shocks(2, 20, 0.01, 5);
  for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(a[t], b[t]);
}

// ---------------------------------------------------------------------------
// Commands in process

TEST(Commands, CheckReportsGrowthBall) {
  TempDir dir;
  cli::RunConfig c = parse("");
  c.output_dir = dir.path.string();
  const auto kv = key_values(cli::cmd_check(c));
  EXPECT_EQ(kv.at("model"), "growth");
  EXPECT_EQ(kv.at("radius_mode"), "auto");
  EXPECT_EQ(kv.at("verified"), "true");
  EXPECT_NEAR(std::stod(kv.at("x_bar_0")), 0.19948151091998428, 1e-12);
  EXPECT_NEAR(std::stod(kv.at("r_u")), 0.00866, 1e-5);
  EXPECT_NEAR(std::stod(kv.at("cond2_rhs")), 0.6114, 1e-4);
  EXPECT_EQ(kv.at("cond1_ok"), "true");
  EXPECT_TRUE(kv.count("apriori_bound"));
}

TEST(Commands, CheckFixedRadiusFailureIsData) {
  TempDir dir;
  cli::RunConfig c = parse("[solve]\nradius = 0.5\n");
  c.output_dir = dir.path.string();
  const auto kv = key_values(cli::cmd_check(c));
  EXPECT_EQ(kv.at("radius_mode"), "fixed");
  EXPECT_EQ(kv.at("verified"), "false");
}

TEST(Commands, PolicyCsvShapeForGrowth) {
  TempDir dir;
  cli::RunConfig c = parse("[policy]\ngrid = 21\n");
  c.output_dir = dir.path.string();
  const auto rows = lines(cli::cmd_policy(c));
  ASSERT_EQ(rows.size(), 22u);
  EXPECT_EQ(rows[0], "k,closed_form,h11,h1,h2,h3,taylor1,taylor2,taylor5,taylor16");
  EXPECT_EQ(std::count(rows[5].begin(), rows[5].end(), ','), 9);
}

TEST(Commands, PolicyRowAtSteadyStateIsFixedPoint) {
  // 500 points on [0.01 k_bar, 5 k_bar] put row 99 at k_bar.
  TempDir dir;
  cli::RunConfig c = parse("[policy]\ngrid = 500\n");
  c.output_dir = dir.path.string();
  const auto rows = lines(cli::cmd_policy(c));
  ASSERT_EQ(rows.size(), 501u);
  std::istringstream row(rows[1 + 99]);
  const double kb = growth::steady_capital({});
  for (std::string cell; std::getline(row, cell, ',');) EXPECT_NEAR(std::stod(cell), kb, 1e-9) << rows[100];
}

TEST(Commands, PolicyDefaultGridHasAllColumnsFinite) {
  TempDir dir;
  cli::RunConfig c = parse("");
  c.output_dir = dir.path.string();
  const auto rows = lines(cli::cmd_policy(c));
  ASSERT_EQ(rows.size(), 502u);
  for (std::size_t r = 1; r < rows.size(); ++r) EXPECT_EQ(rows[r].find("nan"), std::string::npos) << rows[r];
}

TEST(Commands, CheckLinearModelHasZeroLipschitz) {
  TempDir dir;
  cli::RunConfig c = parse("[model]\nname = linear\nmatrix = 1 -2.5 0 1  0 -1 1 0\n[solve]\nradius = 1\n");
  c.output_dir = dir.path.string();
  const auto kv = key_values(cli::cmd_check(c));
  EXPECT_EQ(std::stod(kv.at("L")), 0.0);
  EXPECT_EQ(std::stod(kv.at("sup_G")), 0.0);
  EXPECT_EQ(kv.at("verified"), "true");
}

TEST(Commands, SimulateFromSteadyStateIsConstant) {
  TempDir dir;
  cli::RunConfig c = parse("[simulate]\nT = 10\n");
  c.output_dir = dir.path.string();
  const auto rows = lines(cli::cmd_simulate(c));
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t r = 2; r < rows.size(); ++r) EXPECT_EQ(rows[r].substr(rows[r].find(',')), rows[1].substr(rows[1].find(',')));
}

TEST(Commands, PolicyCsvShapeForExogenousModel) {
  TempDir dir;
  cli::RunConfig c = parse("[model]\nname = exo_test\n[policy]\ngrid = 5\n");
  c.output_dir = dir.path.string();
  const auto rows = lines(cli::cmd_policy(c));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "u,h11,h1,h2,h3");
  EXPECT_EQ(rows[3].substr(0, 2), "0,");
}

TEST(Commands, SimulateWritesConvergingPath) {
  TempDir dir;
  cli::RunConfig c = parse("[simulate]\nT = 30\nx0_scale = 0.5\nradius = 0.5\n[solve]\norder = 3\n");
  c.output_dir = dir.path.string();
  const auto rows = lines(cli::cmd_simulate(c));
  ASSERT_EQ(rows.size(), 32u);
  EXPECT_EQ(rows[0], "t,x_0,y_0,u_0,v_0,residual_norm");
  std::istringstream last(rows.back());
  std::string t, x;
  std::getline(last, t, ',');
  std::getline(last, x, ',');
  EXPECT_EQ(t, "30");
  EXPECT_NEAR(std::stod(x), 0.19948151091998428, 1e-10);
}

TEST(Commands, EpGapsVanish) {
  TempDir dir;
  cli::RunConfig c = parse("[model]\nname = exo_test\n[ep]\nhorizon = 6\nsweeps = 3\n");
  c.output_dir = dir.path.string();
  const auto rows = lines(cli::cmd_ep(c));
  ASSERT_EQ(rows.size(), 1u + 3 * 7);
  EXPECT_EQ(rows[0], "j,i,u_0,V_j_i,h_j_u_i,gap,delta");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string gap = rows[r].substr(0, rows[r].rfind(','));
    EXPECT_LE(std::stod(gap.substr(gap.rfind(',') + 1)), 1e-11) << rows[r];
  }
}

TEST(Commands, EpRejectsEndogenousModel) {
  TempDir dir;
  cli::RunConfig c = parse("");
  c.output_dir = dir.path.string();
  try {
    cli::cmd_ep(c);
    FAIL() << "expected failure";
  } catch (const std::exception& e) {
    EXPECT_EQ(cli::exit_code(e), cli::kConfig);
  }
}

// ---------------------------------------------------------------------------
// Binary

TEST(Binary, ExitCodes) {
  TempDir dir;
  const std::string out = " --out " + dir.path.string();
  EXPECT_EQ(run_cli("check --config " + dir.write("ok.ini", "").string() + out), 0);
  EXPECT_TRUE(fs::exists(dir.path / "report.txt"));
  EXPECT_EQ(run_cli("check --config " + dir.write("bad.ini", "[model]\nname = nope\n").string() + out), 1);
  EXPECT_EQ(run_cli("check --config /nonexistent.ini" + out), 1);
  EXPECT_EQ(run_cli("frobnicate --config x.ini"), 1);
  EXPECT_EQ(run_cli("check --config " + dir.write("unit.ini", "[model]\nalpha = 0.5\nbeta = 2\n").string() + out), 3);
  EXPECT_EQ(run_cli("policy --config " + dir.write("big.ini", "[solve]\nradius = 0.5\n").string() + out), 4);
  EXPECT_EQ(run_cli("simulate --config " + dir.write("far.ini", "[simulate]\nx0_scale = 0.5\n").string() + out), 5);
}

TEST(Binary, OutputIsDeterministic) {
  TempDir dir;
  const fs::path cfg = dir.write("run.ini", "[model]\nname = exo_test\n[simulate]\nT = 20\nz0 = 0.2\nshock_scale = 0.05\n");
  fs::create_directories(dir.path / "a");
  fs::create_directories(dir.path / "b");
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --seed 9 --out " + (dir.path / "a").string()), 0);
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --seed 9 --out " + (dir.path / "b").string()), 0);
  const std::string a = slurp(dir.path / "a" / "simulate.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir.path / "b" / "simulate.csv"));
  ASSERT_EQ(run_cli("simulate --config " + cfg.string() + " --seed 10 --out " + (dir.path / "b").string()), 0);
  EXPECT_NE(a, slurp(dir.path / "b" / "simulate.csv"));
}

TEST(Binary, CommandLineOverridesConfig) {
  TempDir dir;
  const fs::path cfg = dir.write("run.ini", "[policy]\ngrid = 21\n");
  ASSERT_EQ(run_cli("policy --config " + cfg.string() + " --grid 7 --out " + dir.path.string()), 0);
  EXPECT_EQ(lines(dir.path / "policy.csv").size(), 8u);
}
