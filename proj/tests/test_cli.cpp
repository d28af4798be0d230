#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>
#include <string>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = SWEXP_CLI_PATH;

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "swexp_cli_stdout.txt";
  const std::string cmd = kCli + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.stdout_text = ss.str();
  return r;
}

std::string source_arg() { return "--source " + testutil::data_path("paper_example.json"); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("rates subcommand reports the published thresholds") {
  const RunResult r = run_cli("rates " + source_arg() + " --metric hamming:0.1 --format json");
  REQUIRE(r.exit_code == 0);
  CHECK(r.stdout_text.find("\"h_xy\": 0.4653817") != std::string::npos);
  CHECK(r.stdout_text.find("\"h_q_std\": 0.5020040") != std::string::npos);
  CHECK(r.stdout_text.find("\"h_q_tt\": 0.4904163") != std::string::npos);
}

TEST_CASE("exponents subcommand: stable header, zero region, ordering") {
  const fs::path out = fs::temp_directory_path() / "swexp_curves.csv";
  const RunResult r = run_cli("exponents " + source_arg() +
                              " --metric hamming:0.1 --rates 0.1:0.4:4 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("rate,E_std_rc,E_std_ex,E_std,E_tt_rc,E_tt_ex,E_tt,E_r_gallager,E_sp,",
                   0) == 0);
  // the whole grid sits below H(X|Y): every exponent column is exactly 0
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    int idx = 0;
    while (std::getline(cells, cell, ',') && idx < 9) {
      if (idx > 0) CHECK(cell == "0");
      ++idx;
    }
  }
}

TEST_CASE("exponents with a matched metric: std rc column equals E_r") {
  const fs::path out = fs::temp_directory_path() / "swexp_matched.csv";
  const RunResult r = run_cli("exponents " + source_arg() +
                              " --metric matched --rates 0.5:0.9:5 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(slurp(out));
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 9);
    const double e_std_rc = std::stod(cells[1]);
    const double e_r = std::stod(cells[7]);
    CHECK(std::abs(e_std_rc - e_r) <= 1e-6);
  }
}

TEST_CASE("same config and seed produce byte-identical outputs") {
  const fs::path out1 = fs::temp_directory_path() / "swexp_rep1.json";
  const fs::path out2 = fs::temp_directory_path() / "swexp_rep2.json";
  const std::string args = "simulate " + source_arg() +
                           " --metric matched --n 3 --M 6 --rho 1 --seed 9 --trials 50 --out ";
  REQUIRE(run_cli(args + out1.string()).exit_code == 0);
  REQUIRE(run_cli(args + out2.string()).exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(!slurp(out1).empty());

  // curve evaluation is threaded; assembly must stay deterministic
  const fs::path csv1 = fs::temp_directory_path() / "swexp_curves1.csv";
  const fs::path csv2 = fs::temp_directory_path() / "swexp_curves2.csv";
  const std::string eargs =
      "exponents " + source_arg() + " --metric hamming:0.1 --rates 0.45:1.0:6 --out ";
  REQUIRE(run_cli(eargs + csv1.string()).exit_code == 0);
  REQUIRE(run_cli(eargs + csv2.string()).exit_code == 0);
  CHECK(slurp(csv1) == slurp(csv2));
}

TEST_CASE("exit codes: input errors are 1") {
  CHECK(run_cli("rates --source /nonexistent.json").exit_code == 1);
  CHECK(run_cli("rates " + source_arg() + " --metric hamming:0.9").exit_code == 1);
  CHECK(run_cli("simulate " + source_arg() + " --metric matched --n 30 --M 8").exit_code == 1);
  CHECK(run_cli("exponents " + source_arg() + " --rates 1.0:0.5:4").exit_code == 1);

  const fs::path ragged = fs::temp_directory_path() / "swexp_ragged.json";
  std::ofstream(ragged) << R"({"pmf": [[0.5, 0.2], [0.3]]})";
  CHECK(run_cli("rates --source " + ragged.string()).exit_code == 1);
}

TEST_CASE("simulate on the type-by-type ensemble") {
  const fs::path out = fs::temp_directory_path() / "swexp_tt_sim.json";
  const RunResult r = run_cli("simulate " + source_arg() +
                              " --metric hamming:0.1 --ensemble tt --n 3 --M 20 --rho 1 "
                              "--seed 4 --trials 20 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("\"ensemble\": \"tt\"") != std::string::npos);
  CHECK(text.find("\"per_sequence\"") != std::string::npos);
  CHECK(r.stdout_text.find("all bounds satisfied         = yes") != std::string::npos);
}

TEST_CASE("exit codes: verification failure is 2") {
  // an absurdly tight tolerance cannot be met by the numeric oracle
  const RunResult r = run_cli("verify-duality " + source_arg() +
                              " --metric hamming:0.1 --rates 0.7:0.8:2 --tol 1e-14 "
                              "--restarts 6");
  CHECK(r.exit_code == 2);

  const RunResult ok = run_cli("verify-duality " + source_arg() +
                               " --metric hamming:0.1 --rates 0.7:0.8:2 --tol 5e-3 "
                               "--restarts 12");
  CHECK(ok.exit_code == 0);
  CHECK(ok.stdout_text.find("PASS") != std::string::npos);
}

TEST_CASE("--bits rescales the display only") {
  const RunResult nats = run_cli("rates " + source_arg() + " --metric matched --format json");
  const RunResult bits =
      run_cli("rates " + source_arg() + " --metric matched --format json --bits");
  REQUIRE(nats.exit_code == 0);
  REQUIRE(bits.exit_code == 0);
  // H(X|Y) = 0.46538 nats = 0.67140 bits
  CHECK(nats.stdout_text.find("0.4653817") != std::string::npos);
  CHECK(bits.stdout_text.find("0.6714039") != std::string::npos);
}
