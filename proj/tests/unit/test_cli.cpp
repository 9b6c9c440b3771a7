#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "handsoff/lti_model.hpp"
#include "handsoff_app/artifacts.hpp"
#include "handsoff_app/commands.hpp"
#include "handsoff_app/config.hpp"

namespace handsoff::app {
namespace {

namespace fs = std::filesystem;

const char* const kReferenceConfig = R"({
  "system": {
    "a": [[1, 1], [0, -1]],
    "b": [[1], [1]]
  },
  "endpoints": { "x0": [1, -2], "xf": [1, 0] },
  "horizons": [2, 4, 8, 16, 32]
})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("handsoff_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunConfig reference(const std::string& sub = "out") const {
    RunConfig cfg = parse_config(kReferenceConfig, "reference.json");
    cfg.output_dir = dir_ / sub;
    return cfg;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, ParsesReferenceConfigWithDefaults) {
  const RunConfig cfg = parse_config(kReferenceConfig, "ref");
  EXPECT_EQ(cfg.a, (Matrix{{1.0, 1.0}, {0.0, -1.0}}));
  EXPECT_EQ(cfg.b, (Matrix{{1.0}, {1.0}}));
  EXPECT_EQ(cfg.horizons.size(), 5U);
  EXPECT_EQ(cfg.steps_per_unit_time, 200);
  EXPECT_EQ(cfg.epsilons, kDefaultEpsilons);
  EXPECT_EQ(cfg.support_threshold, 1e-6);
}

TEST_F(CliTest, ConfigRoundTripsThroughJson) {
  RunConfig cfg = reference();
  cfg.steps_per_unit_time = 50;
  cfg.epsilons = {0.2};
  const RunConfig back = parse_config(to_json(cfg), "again");
  EXPECT_EQ(back.a, cfg.a);
  EXPECT_EQ(back.x0, cfg.x0);
  EXPECT_EQ(back.horizons, cfg.horizons);
  EXPECT_EQ(back.steps_per_unit_time, 50);
  EXPECT_EQ(back.epsilons, cfg.epsilons);
  EXPECT_EQ(back.output_dir, cfg.output_dir);
}

void expect_config_error(const std::string& text, const std::string& fragment) {
  try {
    (void)parse_config(text, "cfg.json");
    FAIL() << "expected ConfigError mentioning " << fragment;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST_F(CliTest, ConfigDiagnostics) {
  std::string bad = kReferenceConfig;
  bad.replace(bad.find("[1, -2]"), 7, "[1, -2, 3]");
  expect_config_error(bad, "cfg.json:6: field 'endpoints.x0'");

  expect_config_error("{\n  \"system\": {\n    \"a\": [[1, 1],\n  }\n}", "cfg.json:4:");

  std::string unknown = kReferenceConfig;
  unknown.insert(unknown.rfind('}'), ", \"horizon\": 3");
  expect_config_error(unknown, "field 'horizon': unknown key");

  std::string unsorted = kReferenceConfig;
  unsorted.replace(unsorted.find("[2, 4"), 5, "[4, 2");
  expect_config_error(unsorted, "strictly ascending");

  std::string ragged = kReferenceConfig;
  ragged.replace(ragged.find("[0, -1]"), 7, "[0]");
  expect_config_error(ragged, "system.a");

  std::string missing = kReferenceConfig;
  missing.replace(missing.find("\"xf\""), 4, "\"xF\"");
  expect_config_error(missing, "endpoints");
}

TEST_F(CliTest, CheckReferenceIsCertified) {
  EXPECT_EQ(cmd_check(reference(), out_, err_), kExitOk);
  EXPECT_NE(out_.str().find("classification: turnpike-certified"), std::string::npos);
}

TEST_F(CliTest, CheckSingularPlant) {
  RunConfig cfg = reference();
  cfg.a = Matrix{{0.0, 1.0}, {0.0, 0.0}};
  EXPECT_EQ(cmd_check(cfg, out_, err_), kExitCheckFailed);
  EXPECT_NE(out_.str().find("A singular (normality fails)"), std::string::npos);
}

TEST_F(CliTest, SolveWritesTrajectoryAndSummary) {
  const RunConfig cfg = reference();
  ASSERT_EQ(cmd_solve(cfg, 2.0, out_, err_), kExitOk) << err_.str();
  const std::string csv = slurp(cfg.output_dir / "traj_T2.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,u_1,x_1,x_2,p_1,p_2");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 402);

  const auto summary = nlohmann::json::parse(slurp(cfg.output_dir / "summary_T2.json"));
  EXPECT_NEAR(summary["l0_measure"].get<double>(), 0.356, 0.01);
  const auto& ivs = summary["support_intervals"];
  ASSERT_EQ(ivs.size(), 2U);
  EXPECT_NEAR(ivs[0][1].get<double>(), 0.046, 0.005);
  EXPECT_NEAR(ivs[1][0].get<double>(), 1.69, 0.005);
  EXPECT_TRUE(summary.contains("bangoffbang_violation"));
  EXPECT_TRUE(summary.contains("l1_cost"));
  EXPECT_TRUE(fs::exists(cfg.output_dir / "fig1_control_T2.svg"));
}

TEST_F(CliTest, CsvRoundTripReverifies) {
  const RunConfig cfg = reference();
  for (double t : cfg.horizons) ASSERT_EQ(cmd_solve(cfg, t, out_, err_), kExitOk);
  for (double t : cfg.horizons) {
    const LoadedTrajectory tr =
        read_trajectory_csv(cfg.output_dir / ("traj_" + horizon_tag(t) + ".csv"));
    const BoundaryProblem bp = cfg.problem(t);
    EXPECT_EQ(tr.control.cells(), bp.grid_size());
    EXPECT_LE(dynamics_residual(bp.sys, tr.state, tr.control), 1e-8) << t;
    EXPECT_LE(norm_inf(tr.state.values.front() - bp.x0), 1e-8) << t;
    EXPECT_LE(norm_inf(tr.state.values.back() - bp.xf), 1e-8) << t;
  }
}

TEST_F(CliTest, RepeatedSolveIsByteIdentical) {
  ASSERT_EQ(cmd_solve(reference("a"), 8.0, out_, err_), kExitOk);
  ASSERT_EQ(cmd_solve(reference("b"), 8.0, out_, err_), kExitOk);
  EXPECT_EQ(slurp(dir_ / "a" / "traj_T8.csv"), slurp(dir_ / "b" / "traj_T8.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "summary_T8.json"), slurp(dir_ / "b" / "summary_T8.json"));
}

TEST_F(CliTest, RestToRestGivesZeroControl) {
  RunConfig cfg = reference();
  cfg.x0 = Vector(2);
  cfg.xf = Vector(2);
  ASSERT_EQ(cmd_solve(cfg, 4.0, out_, err_), kExitOk);
  const LoadedTrajectory tr = read_trajectory_csv(cfg.output_dir / "traj_T4.csv");
  for (const Vector& u : tr.control.values) EXPECT_EQ(u[0], 0.0);
  const auto summary = nlohmann::json::parse(slurp(cfg.output_dir / "summary_T4.json"));
  EXPECT_EQ(summary["l0_measure"].get<double>(), 0.0);
}

TEST_F(CliTest, SolveInfeasibleHorizon) {
  RunConfig cfg = reference();
  cfg.horizons = {0.05, 1.0};
  EXPECT_EQ(cmd_solve(cfg, 0.05, out_, err_), kExitSolverFailure);
  EXPECT_NE(err_.str().find("hint: smallest feasible horizon"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SolveUnlistedHorizon) {
  EXPECT_EQ(cmd_solve(reference(), 3.0, out_, err_), kExitInputError);
}

TEST_F(CliTest, SweepNeedsTwoHorizons) {
  RunConfig cfg = reference();
  cfg.horizons = {2.0};
  EXPECT_EQ(cmd_sweep(cfg, 1, out_, err_), kExitInputError);
  EXPECT_NE(err_.str().find("sweep needs >= 2 horizons"), std::string::npos);
}

TEST_F(CliTest, SweepWritesReport) {
  const RunConfig cfg = reference();
  ASSERT_EQ(cmd_sweep(cfg, 2, out_, err_), kExitOk) << err_.str();
  const auto report = nlohmann::json::parse(slurp(cfg.output_dir / "turnpike_report.json"));
  EXPECT_TRUE(report["residence_monotone"].get<bool>());
  EXPECT_TRUE(report["mid_norm_monotone"].get<bool>());
  EXPECT_EQ(report["envelope_cross_check"]["fit_horizon"].get<double>(), 8.0);
  EXPECT_TRUE(report["envelope_cross_check"]["passed"].get<bool>());
  double prev = -1.0;
  for (const auto& row : report["per_horizon"]) {
    const double r = row["residence_fraction"][1].get<double>();
    EXPECT_GE(r, prev);
    prev = r;
  }
  for (const char* f : {"fig2_states.svg", "fig3_state_norm.svg", "fig3_state_norm_T32.dat",
                        "traj_T32.csv", "summary_T32.json"}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / f)) << f;
  }
}

TEST_F(CliTest, SweepFlagsFailedHorizon) {
  RunConfig cfg = reference();
  cfg.horizons = {0.05, 2.0, 4.0};
  EXPECT_EQ(cmd_sweep(cfg, 2, out_, err_), kExitSolverFailure);
  const auto report = nlohmann::json::parse(slurp(cfg.output_dir / "turnpike_report.json"));
  EXPECT_FALSE(report["per_horizon"][0]["solved"].get<bool>());
  EXPECT_TRUE(report["per_horizon"][1]["solved"].get<bool>());
}

TEST_F(CliTest, ReproduceAnchorsPass) {
  RunConfig cfg = reference_config();
  cfg.output_dir = dir_ / "repro";
  EXPECT_EQ(cmd_reproduce(cfg, 2, out_, err_), kExitOk) << out_.str() << err_.str();
  const auto anchors = nlohmann::json::parse(slurp(cfg.output_dir / "anchors.json"));
  ASSERT_EQ(anchors.size(), 5U);
  for (const auto& a : anchors) {
    EXPECT_TRUE(a["passed"].get<bool>()) << a.dump();
    EXPECT_FALSE(a["tolerance"].get<std::string>().empty());
  }
}

TEST_F(CliTest, ReproduceOnRefinedGrid) {
  RunConfig coarse = reference_config();
  coarse.output_dir = dir_ / "coarse";
  RunConfig fine = coarse;
  fine.output_dir = dir_ / "fine";
  apply_overrides(fine, Overrides{400, std::nullopt, std::nullopt});
  ASSERT_EQ(cmd_reproduce(coarse, 1, out_, err_), kExitOk);
  ASSERT_EQ(cmd_reproduce(fine, 1, out_, err_), kExitOk);
  const auto a = nlohmann::json::parse(slurp(coarse.output_dir / "summary_T2.json"));
  const auto b = nlohmann::json::parse(slurp(fine.output_dir / "summary_T2.json"));
  const double h = a["step"].get<double>();
  EXPECT_LT(std::abs(a["l0_measure"].get<double>() - b["l0_measure"].get<double>()), 2.0 * h);
}

TEST_F(CliTest, ThreadsFromEnvironment) {
  ::setenv("HANDSOFF_THREADS", "3", 1);
  EXPECT_EQ(sweep_threads(), 3U);
  ::setenv("HANDSOFF_THREADS", "zero", 1);
  EXPECT_GE(sweep_threads(), 1U);
  ::unsetenv("HANDSOFF_THREADS");
  EXPECT_GE(sweep_threads(), 1U);
}

TEST_F(CliTest, OverridesAreValidated) {
  RunConfig cfg = reference();
  EXPECT_THROW(apply_overrides(cfg, Overrides{0, std::nullopt, std::nullopt}), ConfigError);
  EXPECT_THROW(apply_overrides(cfg, Overrides{std::nullopt, -1.0, std::nullopt}), ConfigError);
  apply_overrides(cfg, Overrides{100, 1e-4, std::nullopt});
  EXPECT_EQ(cfg.steps_per_unit_time, 100);
  EXPECT_EQ(cfg.support_threshold, 1e-4);
}

TEST_F(CliTest, CsvParserRejectsMalformedInput) {
  EXPECT_THROW((void)parse_trajectory_csv(""), ArtifactError);
  EXPECT_THROW((void)parse_trajectory_csv("t,x_1,u_1,p_1\n0,1,2,3\n1,1,2,3\n"), ArtifactError);
  EXPECT_THROW((void)parse_trajectory_csv("t,u_1,x_1,p_1\n0,1,2\n1,1,2,3\n"), ArtifactError);
  EXPECT_THROW((void)parse_trajectory_csv("t,u_1,x_1,p_1\n0,1,abc,3\n1,1,2,3\n"), ArtifactError);
}

TEST_F(CliTest, NumberFormattingIsLossless) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
  EXPECT_EQ(horizon_tag(2.0), "T2");
  EXPECT_EQ(horizon_tag(0.5), "T0.5");
}

// The executable itself: exit codes and argument handling.
class ExecutableTest : public CliTest {
 protected:
  int run(const std::string& args) {
    const std::string cmd = std::string(HANDSOFF_EXE) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  fs::path write_config(const std::string& text) {
    const fs::path p = dir_ / "config.json";
    std::ofstream(p) << text;
    return p;
  }
};

TEST_F(ExecutableTest, CheckExitCodes) {
  EXPECT_EQ(run("check " + write_config(kReferenceConfig).string()), 0);
  std::string bad = kReferenceConfig;
  bad.replace(bad.find("[1, -2]"), 7, "[1]");
  EXPECT_EQ(run("check " + write_config(bad).string()), 1);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("endpoints.x0"), std::string::npos);
  EXPECT_EQ(run("check " + (dir_ / "missing.json").string()), 1);
  EXPECT_EQ(run("frobnicate"), 1);
}

TEST_F(ExecutableTest, SolveAndOverrides) {
  std::string text = kReferenceConfig;
  text.insert(text.rfind('}'), ", \"output_dir\": \"" + (dir_ / "exe_out").string() + "\"");
  const fs::path cfg = write_config(text);
  EXPECT_EQ(run("solve " + cfg.string() + " --horizon 2 --steps-per-unit 100"), 0);
  const std::string csv = slurp(dir_ / "exe_out" / "traj_T2.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 202);
  EXPECT_EQ(run("solve " + cfg.string() + " --horizon 3"), 1);
  EXPECT_EQ(run("solve " + cfg.string()), 1);
}

}  // namespace
}  // namespace handsoff::app
