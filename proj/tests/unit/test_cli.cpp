#include "cli/app.hpp"
#include "cli/config_file.hpp"

#include <chorin/errors.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using chorin::cli::parse_and_dispatch;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("chorin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "chorin");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  // Drops the last CSV column, which holds timings.
  static std::string without_wall_time(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
    return out;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, RunStudyWritesArtifacts) {
  const int rc = run({"run-study", "--preset", "fig5_1", "--scale", "0.25", "--seed", "42", "--set",
                      "study.realizations=2", "--set", "study.k0=1/256", "--output-dir", dir_.string()});
  ASSERT_EQ(rc, 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "fig5_1.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "fig5_1.json"));
  EXPECT_TRUE(fs::exists(dir_ / "fig5_1.gp"));
  const std::string json = slurp(dir_ / "fig5_1.json");
  EXPECT_NE(json.find("\"study.seed\": \"42\""), std::string::npos);

  // plot-emit regenerates the script from the summary.
  const auto gp = (dir_ / "again.gp").string();
  ASSERT_EQ(run({"plot-emit", "--input", (dir_ / "fig5_1.json").string(), "--output", gp}), 0) << err_.str();
  EXPECT_NE(slurp(gp).find("$errors << EOD"), std::string::npos);

  // A summary doubles as a configuration file.
  ASSERT_EQ(run({"run-study", "--config", (dir_ / "fig5_1.json").string(), "--output-dir",
                 (dir_ / "rerun").string()}),
            0)
      << err_.str();
  EXPECT_EQ(without_wall_time(slurp(dir_ / "rerun" / "study.csv")), without_wall_time(slurp(dir_ / "fig5_1.csv")));
}

TEST_F(CliTest, SingleRunDumpsFields) {
  const int rc = run({"single-run", "--variant", "modified", "--N", "16", "--k", "0.0625", "--seed", "7",
                      "--dump-fields", "--dump-path", "--output-dir", dir_.string()});
  ASSERT_EQ(rc, 0) << err_.str();
  const std::string fields = slurp(dir_ / "fields.csv");
  EXPECT_EQ(fields.rfind("# chorin-fields v1 N=16", 0), 0u);
  EXPECT_NE(fields.find("step,time,vertex,x1,x2,u1,u2,p,P,R\n"), std::string::npos);
  // 17 snapshots of 256 vertices plus two header lines.
  EXPECT_EQ(std::count(fields.begin(), fields.end(), '\n'), 17 * 256 + 2);
  EXPECT_TRUE(fs::exists(dir_ / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "path.csv"));
}

TEST_F(CliTest, ValidatePasses) {
  EXPECT_EQ(run({"validate"}), 0) << out_.str();
  EXPECT_NE(out_.str().find("PASS helmholtz_orthogonality"), std::string::npos);
}

TEST_F(CliTest, ConfigurationErrorsExitOne) {
  EXPECT_EQ(run({"run-study", "--set", "study.bogus=3"}), 1);
  EXPECT_NE(err_.str().find("error[E_INVALID_ARGUMENT]"), std::string::npos);
  EXPECT_EQ(run({"run-study", "--preset", "nope"}), 1);
  EXPECT_EQ(run({"no-such-command"}), 1);
  EXPECT_EQ(run({"single-run", "--k", "0.3"}), 1);
  const auto bad_ini = write("bad.ini", "realizations = 3\n");
  EXPECT_EQ(run({"run-study", "--config", bad_ini}), 1);
  EXPECT_EQ(run({"run-study", "--config", (dir_ / "missing.ini").string()}), 1);
}

TEST_F(CliTest, NumericalFailureExitsTwo) {
  const auto ini = write("fail.ini",
                         "[study]\nmesh_cells = 8\nreference_cells = 8\nsteps = 4,8\nfine_steps = 16\n"
                         "realizations = 4\n[solver]\nmethod = cg\nmax_iter = 1\n");
  EXPECT_EQ(run({"run-study", "--config", ini, "--output-dir", dir_.string()}), 2);
  EXPECT_NE(err_.str().find("error[E_STUDY_ABORTED]"), std::string::npos);
}

TEST_F(CliTest, IniFileIsFlattened) {
  const auto ini = write("ok.ini", "[study]\nvariant = modified\nk = 1/8, 1/16\n\n[noise]\ncoefficient = 2.5\n");
  const auto cfg = chorin::cli::read_config_file(ini);
  EXPECT_EQ(cfg.at("study.variant"), "modified");
  EXPECT_EQ(cfg.at("study.k"), "1/8, 1/16");
  EXPECT_EQ(cfg.at("noise.coefficient"), "2.5");
  const auto over = chorin::cli::parse_overrides({"a.b=1", "c.d = x y"});
  EXPECT_EQ(over.at("a.b"), "1");
  EXPECT_EQ(over.at("c.d"), "x y");
  EXPECT_THROW(chorin::cli::parse_overrides({"novalue"}), chorin::InvalidArgument);
  const auto round = chorin::cli::read_config_file(write("round.ini", chorin::cli::to_ini(cfg)));
  EXPECT_EQ(round, cfg);
}
