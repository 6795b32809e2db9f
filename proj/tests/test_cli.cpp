#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "epiwelfare_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

int run(const std::string& args) {
  const std::string cmd = std::string(EPIWELFARE_CLI) + " " + args + " 2>/dev/null >/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Small grid so each solve is quick.
fs::path small_config() {
  const fs::path cfg = kRoot / "small.cfg";
  write(cfg, "n_S = 61\nn_I = 61\nn_L = 21\nsamples = 200\nrepugnant_n_max = 2000\n");
  return cfg;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
};

}  // namespace

TEST_F(Cli, SolveWritesFieldsAndManifest) {
  const fs::path out = kRoot / "solve";
  ASSERT_EQ(run("--config " + small_config().string() + " --out " + out.string() + " solve"), 0);
  EXPECT_EQ(first_line(out / "value.csv"), "S,I,V,L");
  EXPECT_EQ(first_line(out / "policy.csv"), "S,I,L");
  const std::string manifest = slurp(out / "run_manifest");
  EXPECT_NE(manifest.find("subcommand=solve\n"), std::string::npos);
  EXPECT_NE(manifest.find("config_hash="), std::string::npos);
  EXPECT_NE(manifest.find("file.value.csv="), std::string::npos);
  EXPECT_NE(slurp(out / "solve_summary").find("R0=3.6\n"), std::string::npos);
}

TEST_F(Cli, SimulateTrajectoryContract) {
  const fs::path out = kRoot / "simulate";
  ASSERT_EQ(run("--config " + small_config().string() + " --out " + out.string() + " simulate --tau 0"), 0);
  EXPECT_EQ(first_line(out / "trajectory.csv"), "t,S,I,R,D,L");
  EXPECT_NE(slurp(out / "summary").find("total_deaths="), std::string::npos);

  const fs::path none = kRoot / "simulate_none";
  ASSERT_EQ(run("--config " + small_config().string() + " --out " + none.string() + " simulate --no-control"), 0);
  EXPECT_NE(slurp(none / "summary").find("peak_lockdown=0\n"), std::string::npos);
}

TEST_F(Cli, EthicsFlags) {
  const fs::path out = kRoot / "ethics";
  ASSERT_EQ(run("--out " + out.string() +
                " ethics --criterion 'RDCLU(beta=0.9,c=1)' --criterion AU --samples 300 --seed 5"),
            0);
  const std::string csv = slurp(out / "axioms.csv");
  EXPECT_EQ(first_line(out / "axioms.csv"), "criterion,property,verdict,witness");
  EXPECT_NE(csv.find("\"RDCLU(beta=0.9,c=1)\",A6 existence of a critical level,pass"), std::string::npos);
  EXPECT_EQ(csv.find("CLU(c=1)"), std::string::npos);
  EXPECT_EQ(first_line(out / "matrix.csv"), "criterion,property,verdict,witness");
  EXPECT_NE(slurp(out / "run_manifest").find("seed=5\n"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "conclusions"));
}

TEST_F(Cli, SensitivityFiles) {
  const fs::path out = kRoot / "sensitivity";
  ASSERT_EQ(run("--config " + small_config().string() + " --out " + out.string() + " sensitivity"), 0);
  EXPECT_EQ(first_line(out / "sensitivity.csv"), "criterion,cost_per_death,peak_L,lockdown_years,deaths,gdp_loss,value");
  EXPECT_EQ(first_line(out / "policy_diff.csv"), "criterion_a,criterion_b,policy_supnorm_diff");
  EXPECT_TRUE(fs::exists(out / "ladder.csv"));
  EXPECT_TRUE(fs::exists(out / "ladder_policy_diff.csv"));
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  for (const std::string sub : {"solve", "simulate", "ethics", "sensitivity"}) {
    const fs::path a = kRoot / ("det_a_" + sub);
    const fs::path b = kRoot / ("det_b_" + sub);
    const std::string cfg = "--config " + small_config().string();
    ASSERT_EQ(run(cfg + " --out " + a.string() + " " + sub), 0) << sub;
    ASSERT_EQ(run(cfg + " --out " + b.string() + " " + sub), 0) << sub;
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << sub << " " << entry.path();
    }
    EXPECT_GE(files, 2u);
  }
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("simulate --tau 3"), 1);
  EXPECT_EQ(run("--help"), 0);

  const fs::path bad = kRoot / "bad.cfg";
  write(bad, "theta = 1.5\n");
  EXPECT_EQ(run("--config " + bad.string() + " --out " + (kRoot / "bad").string() + " solve"), 1);
  EXPECT_FALSE(fs::exists(kRoot / "bad"));
  EXPECT_EQ(run("--config " + (kRoot / "missing.cfg").string() + " solve"), 1);
  EXPECT_EQ(run("--out " + (kRoot / "x").string() + " ethics --criterion 'CLU(c=1'"), 1);

  const fs::path stiff = kRoot / "stiff.cfg";
  write(stiff, "n_S = 41\nn_I = 81\nn_L = 11\nmax_iters = 1\n");
  EXPECT_EQ(run("--config " + stiff.string() + " --out " + (kRoot / "stiff").string() + " solve"), 2);

  const fs::path blocker = kRoot / "blocker";
  write(blocker, "not a directory\n");
  EXPECT_EQ(run("--config " + small_config().string() + " --out " + (blocker / "sub").string() + " solve"), 3);
}
