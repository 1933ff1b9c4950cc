#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "nvmpr/cli.hpp"
#include "nvmpr/sweep_grid.hpp"

using namespace nvmpr;

namespace {

namespace fs = std::filesystem;

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("nvmpr_cli_" + name);
  std::ofstream(p) << text;
  return p.string();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nvmpr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("sweep to a CSV file") {
  const std::string cfg = write_temp("sweep.cfg", "mode = sweep\nB_points = 4\nf_points = 5\n");
  const std::string out = (fs::temp_directory_path() / "nvmpr_cli_sweep.csv").string();
  const Result r = cli({"sweep", "--config", cfg, "--out", out, "--format", "csv", "--threads", "2"});
  CHECK(r.code == kExitOk);
  const SweepGrid g = read_grid(out, GridFormat::Csv);
  CHECK(g.rows.values.size() == 4);
  CHECK(g.cols.values.size() == 5);
  CHECK(fs::exists(out + ".meta.json"));
}

TEST_CASE("identical config gives byte-identical JSON") {
  const std::string cfg = write_temp("det.cfg", "mode = sweep\nB_points = 6\nf_points = 7\n");
  const Result a = cli({"sweep", "--config", cfg, "--format", "json"});
  const Result b = cli({"sweep", "--config", cfg, "--format", "json", "--threads", "3"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("config errors exit with 2") {
  const std::string bad = write_temp("bad.cfg", "mode = sweep\ngamma_2_MHz = 0\n");
  const Result r = cli({"sweep", "--config", bad});
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK(r.err.find("gamma_2_MHz") != std::string::npos);
  CHECK(cli({"sweep", "--config", "/no/such.cfg"}).code == kExitConfigError);
  CHECK(cli({"sweep"}).code == kExitConfigError);
  CHECK(cli({"frobnicate"}).code == kExitConfigError);
  const std::string cfg = write_temp("ok.cfg", "mode = sweep\n");
  CHECK(cli({"sweep", "--config", cfg, "--format", "xml"}).code == kExitConfigError);
  CHECK(cli({"atlas", "--config", cfg}).code == kExitConfigError);  // mode mismatch
}

TEST_CASE("non-convergence exits with 3") {
  const std::string cfg = write_temp("ode.cfg", "mode = ode-check\nl_values = 1\neta_points = 2\nmax_periods = 2\n");
  const Result r = cli({"ode-check", "--config", cfg, "--format", "csv"});
  CHECK(r.code == kExitNonConvergence);
  CHECK(r.out.find("converged") != std::string::npos);
}

TEST_CASE("other subcommands") {
  CHECK(cli({"transitions", "--config", write_temp("t.cfg", "B_mT = 50\n")}).code == 0);
  CHECK(cli({"atlas", "--config", write_temp("a.cfg", "mode = atlas\n"), "--format", "csv"}).code == 0);
  CHECK(cli({"coupling", "--config", write_temp("c.cfg", "mode = coupling\nsynthetic_points = 11\n")}).code == 0);
}

TEST_CASE("unwritable output is an I/O failure") {
  const std::string cfg = write_temp("io.cfg", "mode = atlas\n");
  const Result r = cli({"atlas", "--config", cfg, "--out", "/nonexistent_dir/out.json"});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("/nonexistent_dir/out.json") != std::string::npos);
}

TEST_CASE("the executable reports exit codes") {
  const std::string bad = write_temp("proc.cfg", "mode = sweep\nbogus = 1\n");
  const std::string cmd = std::string(NVMPR_CLI_PATH) + " sweep --config " + bad + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 2);
  const std::string help = std::string(NVMPR_CLI_PATH) + " --help > /dev/null 2>&1";
  const int hs = std::system(help.c_str());
  CHECK(WEXITSTATUS(hs) == 0);
}
