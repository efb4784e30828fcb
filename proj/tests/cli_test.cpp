#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "oracles.hpp"
#include "panelcast/checkpoint.hpp"
#include "panelcast/panel.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "panelcast");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = panelcast::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  testing_support::TempDir dir;

  std::string synth(int states) {
    const auto path = (dir / "panel.csv").string();
    const auto r = run({"--seed", "7", "synth", "--states", std::to_string(states), "-o", path});
    EXPECT_EQ(r.code, 0) << r.err;
    return path;
  }
};

}  // namespace

TEST_F(CliTest, SynthWritesRequestedRows) {
  const auto r = run({"--seed", "7", "--out", dir.path().string(), "synth", "--states", "5", "--first-year", "2000",
                      "--years", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(dir / "panel.csv");
  EXPECT_EQ(count_lines(text), 101);
  EXPECT_TRUE(r.out.empty());
  ASSERT_EQ(run({"--seed", "7", "synth", "--states", "5", "-o", (dir / "again.csv").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "again.csv"), text);
}

TEST_F(CliTest, SynthRejectsTooManyStates) {
  const auto r = run({"synth", "--states", "60", "-o", (dir / "x.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("50"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(dir / "x.csv"));
}

TEST_F(CliTest, ValidateCleanFile) {
  const auto r = run({"validate", synth(3)});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0 errors\n");
}

TEST_F(CliTest, ValidateReportsGenderSum) {
  const auto path = synth(2);
  auto text = slurp(path);
  const auto line_start = text.find('\n') + 1;
  const auto line_end = text.find('\n', line_start);
  auto line = text.substr(line_start, line_end - line_start);
  line = line.substr(0, line.rfind(',')) + ",10.00";
  text.replace(line_start, line_end - line_start, line);
  std::ofstream(path, std::ios::binary) << text;
  const auto r = run({"validate", path});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(count_lines(r.out), 2);
  EXPECT_EQ(r.out.substr(0, 9), "1 errors\n");
  EXPECT_NE(r.out.find("pct_male+pct_female"), std::string::npos);
}

TEST_F(CliTest, ValidateMissingFile) {
  EXPECT_EQ(run({"validate", (dir / "nope.csv").string()}).code, 3);
}

TEST_F(CliTest, ValidateMalformedFile) {
  std::ofstream(dir / "bad.csv") << panelcast::kPanelCsvHeader << "\nAL,xyz,1,1,1,1,1,S,50,50\n";
  EXPECT_EQ(run({"validate", (dir / "bad.csv").string()}).code, 1);
}

TEST_F(CliTest, TrainWritesArtifacts) {
  const auto data = synth(5);
  const auto out = (dir / "train").string();
  const auto r = run({"--out", out, "train", "--data", data, "--epochs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_NO_THROW(panelcast::read_checkpoint(dir / "train" / "model.ckpt"));
  const auto log = slurp(dir / "train" / "train_log.csv");
  EXPECT_EQ(count_lines(log), 4);
  const auto preds = slurp(dir / "train" / "predictions.csv");
  EXPECT_EQ(count_lines(preds), 6);
  ASSERT_EQ(run({"--out", (dir / "train2").string(), "train", "--data", data, "--epochs", "3"}).code, 0);
  EXPECT_EQ(slurp(dir / "train2" / "predictions.csv"), preds);
}

TEST_F(CliTest, TrainFromConfigWithBadBatch) {
  const auto data = synth(3);
  std::ofstream(dir / "c.json") << R"({"data_path": ")" << data << R"(", "train": {"batch_size": 0}})";
  const auto r = run({"--config", (dir / "c.json").string(), "--out", (dir / "o").string(), "train"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("batch_size"), std::string::npos);
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const auto data = synth(3);
  std::ofstream(dir / "c.json") << R"({"data_path": ")" << data << R"(", "train": {"batch_size": 0}})";
  const auto r = run({"--config", (dir / "c.json").string(), "--out", (dir / "o").string(), "train", "--batch-size",
                      "8", "--epochs", "2"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, TrialsWritesFourFiles) {
  const auto data = synth(5);
  const auto out = dir / "trials";
  const auto r = run({"--out", out.string(), "trials", "--data", data, "--n-trials", "3", "--epochs", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"trials.csv", "per_state.csv", "report.json", "error_bars.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  EXPECT_EQ(count_lines(slurp(out / "trials.csv")), 4);
  EXPECT_EQ(count_lines(slurp(out / "per_state.csv")), 6);
}

TEST_F(CliTest, SingleTrialReportMatchesTrial) {
  const auto data = synth(3);
  const auto out = dir / "one";
  ASSERT_EQ(run({"--out", out.string(), "trials", "--data", data, "--n-trials", "1", "--epochs", "2"}).code, 0);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  std::istringstream trials(slurp(out / "trials.csv"));
  std::string header, row;
  std::getline(trials, header);
  std::getline(trials, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  EXPECT_DOUBLE_EQ(report["total_loss"]["mean"].get<double>(), std::stod(cells[2]));
  EXPECT_DOUBLE_EQ(report["test_mse"]["mean"].get<double>(), std::stod(cells[3]));
}

TEST_F(CliTest, TrialsUnwritableOutDir) {
  const auto data = synth(3);
  std::ofstream(dir / "blocker") << "x";
  const auto r = run({"--out", (dir / "blocker" / "sub").string(), "trials", "--data", data, "--n-trials", "1"});
  EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, BadArguments) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"train", "--epochs", "zero"}).code, 2);
  EXPECT_EQ(run({"--jobs", "0", "synth"}).code, 2);
  EXPECT_EQ(run({"train"}).code, 2);
}

TEST_F(CliTest, HelpShowsDefaults) {
  const auto r = run({"trials", "--help"});
  EXPECT_EQ(r.code, 0);
  const auto text = r.out + r.err;
  EXPECT_NE(text.find("--n-trials"), std::string::npos);
  EXPECT_NE(text.find("50"), std::string::npos);
  EXPECT_NE(text.find("0.001"), std::string::npos);
}
