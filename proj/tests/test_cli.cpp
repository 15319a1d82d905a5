#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SSM_SIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "ssm_cli_test";
  fs::create_directories(dir);
  return dir;
}

const char* kQuick = "--trials 2 --nsamp 20 --es-grid 5 --snr-min 0 --snr-max 10 --snr-step 10";

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run_cli("--help"), 0); }

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("--nt 3"), 2);
  EXPECT_EQ(run_cli("--no-such-flag"), 2);
  EXPECT_EQ(run_cli("--method fixed:7"), 2);
}

TEST(Cli, UnwritableOutputExitsThree) {
  EXPECT_EQ(run_cli(std::string(kQuick) + " --method fixed:0.5 --out /nonexistent-dir/out.csv"), 3);
}

TEST(Cli, SweepWritesCsvAndPlotScriptDeterministically) {
  const fs::path dir = scratch();
  const std::string common = std::string(kQuick) + " --method es,co,mpsan,fixed:0.25 --seed 3";
  ASSERT_EQ(run_cli(common + " --out " + (dir / "a.csv").string() + " --plot-script " +
                    (dir / "a_plot.py").string()),
            0);
  ASSERT_EQ(run_cli(common + " --out " + (dir / "b.csv").string()), 0);
  const std::string a = slurp(dir / "a.csv");
  EXPECT_EQ(a, slurp(dir / "b.csv"));
  EXPECT_EQ(a.substr(0, a.find('\n')), "snr_db,method,mean_beta,mean_sr,sr_std_error,mean_iterations,trials");
  int lines = 0;
  for (char c : a) lines += c == '\n';
  EXPECT_EQ(lines, 1 + 2 * 4);
  EXPECT_NE(slurp(dir / "a_plot.py").find("\"a.csv\""), std::string::npos);
}

TEST(Cli, BetaProfileWritesProfileCsv) {
  const fs::path dir = scratch();
  ASSERT_EQ(run_cli(std::string(kQuick) + " --beta-profile --out " + (dir / "p.csv").string()), 0);
  const std::string p = slurp(dir / "p.csv");
  EXPECT_EQ(p.substr(0, p.find('\n')), "snr_db,beta,mean_sr,sr_std_error,trials");
}

}  // namespace
