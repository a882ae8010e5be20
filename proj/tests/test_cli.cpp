#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
  static const fs::path d = [] {
    auto p = fs::temp_directory_path() / ("levyctl_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

fs::path write_config(const std::string& name, const json& j) {
  const auto p = work_dir() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int cli(const std::string& args, const std::string& err_name = "stderr.txt") {
  const std::string cmd = std::string(LEVYCTL_CLI_PATH) + " " + args + " 2> " + (work_dir() / err_name).string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const json kBm = {{"sigma", 1.0}, {"gamma", 0.0}};

json quadratic_singular() {
  return {{"model", kBm},
          {"q", 0.5},
          {"problem", {{"type", "singular"}, {"f", {0.0, 0.0, 1.0}}, {"C_U", 0.5}, {"C_D", 0.5}}},
          {"grid", {{"lo", -2.0}, {"hi", 2.0}, {"n", 41}}}};
}

}  // namespace

TEST(Cli, ScaleTableBrownian) {
  const auto cfg = write_config("bm.json", {{"model", kBm}, {"q", 0.5}, {"grid", {{"lo", 0.0}, {"hi", 2.0}, {"n", 21}}}});
  const auto out = work_dir() / "table.csv";
  ASSERT_EQ(cli("scale-table -c " + cfg.string() + " -o " + out.string()), 0);
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,W,W_prime,Z,Wbar,Zbar,Theta");
  int rows = 0;
  while (std::getline(in, line)) {
    double x, w;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf", &x, &w), 2);
    EXPECT_NEAR(w, std::exp(x) - std::exp(-x), 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 21);
}

TEST(Cli, DualDividendClosedForm) {
  const double beta = 1.5;
  const auto cfg = write_config(
      "dual.json", {{"model", kBm},
                    {"q", 0.5},
                    {"problem", {{"type", "singular"}, {"f", {0.0}}, {"C_U", -1.0}, {"C_D", beta}, {"interval", {nullptr, 0.0}}}}});
  const auto out = work_dir() / "dual_out.json";
  ASSERT_EQ(cli("solve-singular -c " + cfg.string() + " -o " + out.string()), 0);
  const auto j = json::parse(slurp(out));
  EXPECT_NEAR(j["solution"]["a_star"].get<double>(), -std::acosh(beta), 1e-10);
  EXPECT_EQ(j["solution"]["b_star"].get<double>(), 0.0);
}

TEST(Cli, VerifyQuadraticSingularPasses) {
  const auto cfg = write_config("quad.json", quadratic_singular());
  const auto out = work_dir() / "verify.json";
  EXPECT_EQ(cli("verify --mc --paths 20000 -c " + cfg.string() + " -o " + out.string()), 0);
  const auto j = json::parse(slurp(out));
  EXPECT_EQ(j["checks"]["fail"].get<int>(), 0);
  EXPECT_GT(j["checks"]["pass"].get<int>(), 0);
  EXPECT_EQ(j["mc"][0]["status"], "PASS");
}

TEST(Cli, VerifyReportsFailureWithExitFour) {
  auto c = quadratic_singular();
  c["tolerances"] = {{"tol_vi", 1e-30}};
  const auto cfg = write_config("quad_tight.json", c);
  EXPECT_EQ(cli("verify -c " + cfg.string() + " -o " + (work_dir() / "v4.json").string()), 4);
}

TEST(Cli, ValidationErrors) {
  struct Case {
    json problem;
    std::string needle;
  } cases[] = {
      {{{"type", "singular"}, {"C_U", -0.5}, {"C_D", 0.2}}, "C_U + C_D must be > 0"},
      {{{"type", "impulse"}, {"f", {0, 0, 1}}, {"K", 0.0}}, "K must be > 0"},
      {{{"type", "game"}, {"p", 0.1}, {"gamma_S", -0.2}, {"gamma_I", 0.1}}, "gamma_S + gamma_I must be > 0"},
      {{{"type", "singular"}, {"C_U", "x"}, {"C_D", 0.2}}, "problem.C_U"},
  };
  int i = 0;
  for (const auto& c : cases) {
    const auto cfg = write_config("bad" + std::to_string(i) + ".json", {{"model", kBm}, {"q", 0.5}, {"problem", c.problem}});
    const std::string err = "err" + std::to_string(i++) + ".txt";
    EXPECT_EQ(cli("solve-singular -c " + cfg.string(), err), 2);
    EXPECT_NE(slurp(work_dir() / err).find(c.needle), std::string::npos) << slurp(work_dir() / err);
  }
  EXPECT_EQ(cli("solve-game -c " + (work_dir() / "missing.json").string()), 2);
  EXPECT_EQ(cli("no-such-command"), 2);
}

TEST(Cli, DeterministicOutputs) {
  auto c = quadratic_singular();
  const auto cfg = write_config("det.json", c);
  for (int k = 0; k < 2; ++k) {
    const auto d = work_dir() / ("det" + std::to_string(k));
    fs::create_directories(d);
    ASSERT_EQ(cli("solve-singular -c " + cfg.string() + " -o " + (d / "r.json").string() + " --value-csv " +
                  (d / "v.csv").string() + " --curves-csv " + (d / "c.csv").string()),
              0);
    ASSERT_EQ(cli("verify --mc --paths 4000 -c " + cfg.string() + " -o " + (d / "m.json").string() + " --mc-csv " +
                  (d / "m.csv").string()),
              0);
  }
  for (const char* f : {"r.json", "v.csv", "c.csv", "m.json", "m.csv"})
    EXPECT_EQ(slurp(work_dir() / "det0" / f), slurp(work_dir() / "det1" / f)) << f;
}

TEST(Cli, SolutionRoundTrip) {
  const json game = {{"model", {{"sigma", 1.0}, {"delta", 2.0}, {"jumps", {{2.0, 1.0}}}}},
                     {"q", 0.5},
                     {"problem", {{"type", "game"}, {"p", 0.2}, {"gamma_S", 0.3}, {"gamma_I", 0.1}}},
                     {"grid", {{"lo", 0.0}, {"hi", 8.0}, {"n", 81}}}};
  const auto cfg = write_config("game.json", game);
  const auto r = work_dir() / "game_out.json";
  ASSERT_EQ(cli("solve-game -c " + cfg.string() + " -o " + r.string() + " --value-csv " + (work_dir() / "g1.csv").string()), 0);
  ASSERT_EQ(cli("solve-game --from-solution " + r.string() + " -o " + (work_dir() / "game_out2.json").string() +
                " --value-csv " + (work_dir() / "g2.csv").string()),
            0);
  EXPECT_EQ(slurp(work_dir() / "g1.csv"), slurp(work_dir() / "g2.csv"));
  EXPECT_EQ(slurp(r), slurp(work_dir() / "game_out2.json"));
  EXPECT_EQ(json::parse(slurp(r))["solution"]["case"].get<int>(), 1);
}
