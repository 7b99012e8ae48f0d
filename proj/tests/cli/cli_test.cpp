#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kScratch = fs::temp_directory_path() / "flatgrasp_cli_test";

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" FLATGRASP_CLI_PATH "\" " + args + " >" +
                          (kScratch / "stdout.txt").string() + " 2>" + (kScratch / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
};

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("train"), 2);
  EXPECT_EQ(run("train --config /nonexistent.json"), 2);
}

TEST_F(Cli, BadConfigExitsWithTwo) {
  write_json(kScratch / "bad.json", {{"no_such_key", 1}});
  EXPECT_EQ(run("train --config " + (kScratch / "bad.json").string()), 2);
  std::ofstream(kScratch / "broken.json") << "{ not json";
  EXPECT_EQ(run("train --config " + (kScratch / "broken.json").string()), 2);
}

TEST_F(Cli, GenObjectsWritesManifestAndPreviews) {
  const fs::path out = kScratch / "objects";
  ASSERT_EQ(run("gen-objects --families training --count 1 --seed 3 --out " + out.string()), 0);
  const json m = read_json(out / "manifest.json");
  ASSERT_TRUE(m.is_array());
  EXPECT_EQ(m.size(), 4u);
  EXPECT_TRUE(fs::exists(out / "previews"));
  EXPECT_EQ(std::distance(fs::directory_iterator(out / "previews"), fs::directory_iterator{}), 4);
  EXPECT_EQ(run("gen-objects --families nonsense --out " + out.string()), 2);
}

TEST_F(Cli, TrainEvalAndSeedPrecedence) {
  const fs::path cfg = kScratch / "run.json";
  write_json(cfg, {{"seed", 5}, {"total_episodes", 64}, {"checkpoint_every", 1000}, {"ppo", {{"epochs", 1}}}});
  const fs::path a = kScratch / "run_a", b = kScratch / "run_b", c = kScratch / "run_c";
  ASSERT_EQ(run("train --config " + cfg.string() + " --out " + a.string()), 0);
  EXPECT_EQ(read_json(a / "config.json")["seed"], 5);
  ASSERT_EQ(run("train --config " + cfg.string() + " --out " + b.string(), "FLATGRASP_SEED=6"), 0);
  EXPECT_EQ(read_json(b / "config.json")["seed"], 6);
  ASSERT_EQ(run("train --config " + cfg.string() + " --out " + c.string() + " --seed 7", "FLATGRASP_SEED=6"), 0);
  EXPECT_EQ(read_json(c / "config.json")["seed"], 7);
  EXPECT_EQ(run("train --config " + cfg.string() + " --out " + c.string(), "FLATGRASP_SEED=abc"), 2);

  const fs::path objects = kScratch / "eval_objects";
  ASSERT_EQ(run("gen-objects --families beveled-square,irregular-L --count 1 --out " + objects.string()), 0);
  const fs::path report = kScratch / "report";
  ASSERT_EQ(run("eval --checkpoint " + (a / "final.fgsp").string() + " --objects " +
                (objects / "manifest.json").string() + " --runs 3 --out " + report.string()),
            0);
  const json r = read_json(report / "report.json");
  ASSERT_EQ(r["objects"].size(), 2u);
  EXPECT_EQ(r["objects"][0]["runs"], 3);
  EXPECT_TRUE(fs::exists(report / "report.txt"));

  std::ofstream(kScratch / "garbage.fgsp") << "not a checkpoint";
  EXPECT_EQ(run("eval --checkpoint " + (kScratch / "garbage.fgsp").string() + " --objects " +
                (objects / "manifest.json").string()),
            2);
}

TEST_F(Cli, DecodeFromImages) {
  const fs::path obs = kScratch / "obs";
  ASSERT_EQ(run("gen-objects --families training-square --count 1 --out " + obs.string()), 0);
  // Record one episode and render its heightmaps to get mask/depth PNGs.
  const fs::path cfg = kScratch / "rec.json";
  write_json(cfg, {{"total_episodes", 32}, {"record_episodes", true}, {"ppo", {{"epochs", 1}}}});
  const fs::path run_dir = kScratch / "rec_run";
  ASSERT_EQ(run("train --config " + cfg.string() + " --out " + run_dir.string()), 0);
  const fs::path rendered = kScratch / "rendered";
  ASSERT_EQ(run("render --record " + (run_dir / "episodes.jsonl").string() + " --episode 0 --out " +
                rendered.string()),
            0);
  fs::path mask, depth;
  for (const auto& e : fs::directory_iterator(rendered)) {
    const std::string n = e.path().filename().string();
    if (n.ends_with("_g.png")) mask = e.path();
    if (n.ends_with("_d.png")) depth = e.path();
  }
  ASSERT_FALSE(mask.empty());
  ASSERT_FALSE(depth.empty());
  const fs::path out = kScratch / "decoded";
  ASSERT_EQ(run("decode --mask " + mask.string() + " --depth " + depth.string() + " --cell 0,0 --out " +
                out.string()),
            0);
  const json plan = read_json(out / "plan.json");
  EXPECT_EQ(plan["valid"], false);
  EXPECT_EQ(plan["failure_reason"], "off-object");
  EXPECT_TRUE(fs::exists(out / "overlay.png"));
  EXPECT_EQ(run("decode --mask " + mask.string() + " --depth " + depth.string() + " --cell 99,1 --out " +
                out.string()),
            2);
}

}  // namespace
