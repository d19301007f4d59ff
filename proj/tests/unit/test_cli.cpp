#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cli/commands.hpp"
#include "robustq/families.hpp"

using namespace robustq;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "robustq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return (fs::path(ROBUSTQ_TEST_DATA) / name).string(); }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) row.push_back(f);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(row);
  }
  return rows;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("robustq_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                                  ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& s) const { return path_ / s; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({}).code, 1);
  const auto bad = run_cli({"rdr-family", "--bogus"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("error:"), std::string::npos);
  EXPECT_EQ(run_cli({"simulate", "--threads", "0"}).code, 1);
}

TEST(Cli, MissingInputNamesThePath) {
  const auto r = run_cli({"rdr-renewal", "-i", "no_such_file.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no_such_file.json"), std::string::npos);
  EXPECT_EQ(run_cli({"rdr-renewal"}).code, 1);
}

TEST(Cli, RdrFamilyTable) {
  TempDir dir;
  const std::string in = write_file(dir / "fam.json",
                                    R"({"alpha_min": 1.5, "alpha_max": 2.5,
                                        "families": [{"kind": "Q2", "a": 0.5, "b": 2},
                                                     {"kind": "Q4", "alpha0": 2.5, "u": 0.2, "name": "budget"}]})");
  const auto r = run_cli({"rdr-family", "-i", in, "--grid-points", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"family", "alpha", "rdr"}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"Q2_a0.5_b2", "2", "0.5"}));
  // The Q4 grid stops short of alpha0.
  for (std::size_t i = 4; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][0], "budget");
    EXPECT_LT(std::stod(rows[i][1]), 2.5);
    EXPECT_DOUBLE_EQ(std::stod(rows[i][2]), rdr_q4(FamilyQ4{2.5, 0.2}, PoissonReference{1.0, std::nullopt}, std::stod(rows[i][1])));
  }
}

TEST(Cli, RdrFamilyDefaultsAreReproducible) {
  const auto a = run_cli({"rdr-family"});
  const auto b = run_cli({"rdr-family"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_GT(parse_csv(a.out).size(), 400u);
}

TEST(Cli, RdrRenewalReportsAndRefusals) {
  const auto r = run_cli({"rdr-renewal", "-i", data("exp2.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("reports").size(), 3u);
  for (const auto& rep : doc.at("reports")) {
    const double a = rep.at("alpha");
    const double exact = (std::pow(2.0, a) - 1.0 - a) / (a * (a - 1.0));
    EXPECT_NEAR(rep.at("g2").at("value").get<double>(), exact, 1e-3 * exact);
    EXPECT_NEAR(rep.at("closed_form").get<double>(), exact, 1e-12);
  }
  const auto gap = run_cli({"rdr-renewal", "-i", data("gap_density.json")});
  EXPECT_EQ(gap.code, 2);
  EXPECT_EQ(nlohmann::json::parse(gap.out).at("reports")[0].at("g2").at("value"), nullptr);
}

TEST(Cli, BoundSchedulingHeaderAndIntensities) {
  for (auto [preset, rho] : {std::pair{"left", 0.790}, std::pair{"right", 0.395}}) {
    TempDir dir;
    const std::string in = write_file(dir / "s.json", std::string(R"({"instance": {"preset": ")") + preset + R"("}})");
    const auto r = run_cli({"bound-scheduling", "-i", in, "--grid-points", "5", "--threads", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"curve", "beta", "bound", "gamma_star", "priority", "traffic_intensity"}));
    ASSERT_EQ(rows.size(), 1u + 5u * 5u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][5]), rho, 1e-3);
  }
}

TEST(Cli, BoundRenegingReferenceVanishesAtTheTypicalRate) {
  const auto r = run_cli({"bound-reneging", "--grid-points", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0][0], "gamma");
  EXPECT_EQ(rows[0][1], "ref_decay");
  bool seen = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][0]) == 1.0) {
      EXPECT_EQ(rows[i][1], "0");
      seen = true;
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Cli, SimulateIsReproducibleAndWritesLogs) {
  TempDir dir;
  auto scenario = nlohmann::json::parse(slurp(data("reneging_small_log.json")));
  scenario["event_log"] = (dir / "small_log.csv").string();
  const auto in = write_file(dir / "small.json", scenario.dump());
  const auto a = run_cli({"simulate", "-i", in, "--threads", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  const std::string log_a = slurp(dir / "small_log.csv");
  const auto b = run_cli({"simulate", "-i", in});
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(dir / "small_log.csv"), log_a);
  EXPECT_EQ(log_a.rfind("t,kind,customer_id,server_id\n", 0), 0u);
  const auto doc = nlohmann::json::parse(a.out);
  EXPECT_EQ(doc.at("model"), "reneging");
  EXPECT_EQ(doc.at("reneging_counts").size(), 8u);
  const auto c = run_cli({"simulate", "-i", in, "--seed", "99"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, SimulateOtherModels) {
  const auto p = run_cli({"simulate", "-i", data("priority_mm1.json"), "--assert"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(nlohmann::json::parse(p.out).at("mean_terminal_queue").size(), 2u);
  const auto c = run_cli({"simulate", "-i", data("renyi_cox.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto doc = nlohmann::json::parse(c.out);
  const auto est = doc.contains("estimate") ? doc.at("estimate") : doc;
  EXPECT_NEAR(est.at("point").get<double>(), 0.25, 1e-9);
  const auto t = run_cli({"simulate", "-i", data("tail_unreachable.json")});
  EXPECT_EQ(t.code, 2);
}

TEST(Cli, OutputDirectoryVariable) {
  TempDir dir;
  ::setenv("ROBUSTQ_OUTPUT_DIR", dir.path().c_str(), 1);
  const auto r = run_cli({"rdr-family", "--grid-points", "2", "-o", "nested/table.csv"});
  ::unsetenv("ROBUSTQ_OUTPUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(dir / "nested/table.csv").rfind("family,alpha,rdr\n", 0), 0u);
  EXPECT_EQ(cli::resolve_output("/abs/path.csv"), fs::path("/abs/path.csv"));
}

#ifdef ROBUSTQ_CLI_EXE
TEST(Cli, ExecutableExitCodes) {
  const std::string exe = ROBUSTQ_CLI_EXE;
  EXPECT_EQ(std::system((exe + " --help > /dev/null").c_str()), 0);
  const int bad = std::system((exe + " rdr-renewal -i " + data("gap_density.json") + " > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 2);
  const int missing = std::system((exe + " rdr-renewal -i /nonexistent.json 2> /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(missing), 1);
}
#endif
