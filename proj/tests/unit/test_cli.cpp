#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "amplab/cli/cli.hpp"
#include "amplab/harness/config.hpp"
#include "amplab/harness/protocols.hpp"
#include "amplab/harness/report.hpp"

using namespace amplab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "amplab_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The single run directory under `root`.
fs::path run_dir(const fs::path& root) {
  fs::path found;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) found = e.path();
  }
  REQUIRE_FALSE(found.empty());
  return found;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  auto r = invoke({});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.rfind("error:usage:", 0) == 0);
  r = invoke({"audit", "--no-such-flag"});
  CHECK(r.code == cli::kExitUsage);
  r = invoke({"frobnicate"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("config and data errors exit 2") {
  auto r = invoke({"audit", "--config", "missing.cfg"});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("missing.cfg") != std::string::npos);
  CHECK(r.err.rfind("error:data:config:", 0) == 0);
  r = invoke({"audit", "--set", "train.no_such_key=1"});
  CHECK(r.code == cli::kExitData);
  r = invoke({"pairwise", "--quick", "--out", fresh_dir("pairwise_binary").string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("task.kind") != std::string::npos);
}

TEST_CASE("numeric failures exit 3") {
  const auto r = invoke({"audit", "--quick", "--set", "train.learning_rate=1e12", "--out",
                         fresh_dir("diverge").string()});
  CHECK(r.code == cli::kExitNumeric);
  CHECK(r.err.find("error:numeric:divergence:") != std::string::npos);
}

TEST_CASE("generate is deterministic") {
  const auto dir = fresh_dir("generate");
  const auto a = (dir / "a.csv").string();
  const auto b = (dir / "b.csv").string();
  CHECK(invoke({"generate", "--task", "teaser", "--n", "400", "--seed", "1", "--out", a}).code == 0);
  CHECK(invoke({"generate", "--task", "teaser", "--n", "400", "--seed", "1", "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(invoke({"generate", "--task", "teaser", "--n", "400", "--seed", "2", "--out", b}).code == 0);
  CHECK(slurp(a) != slurp(b));
}

TEST_CASE("audit writes a run directory and prints the hash") {
  const auto root = fresh_dir("audit");
  const auto r = invoke({"audit", "--quick", "--seed", "3", "--out", root.string(), "--json"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("config_hash=") != std::string::npos);
  const auto dir = run_dir(root);
  for (const char* f : {"report.json", "disparity.csv", "trajectory.csv", "manifest.json"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto printed = nlohmann::json::parse(r.out);
  CHECK(printed == nlohmann::json::parse(slurp(dir / "report.json")));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["config_hash"] == printed["config_hash"]);

  SUBCASE("thin binding: same numbers as the harness called directly") {
    harness::ExperimentConfig c;
    harness::apply_quick_preset(c);
    c.seed = 3;
    const auto direct = harness::audit(harness::load_task(c.task), c);
    harness::ReportBundle b;
    b.audit = harness::AuditSummary::from(direct);
    CHECK(harness::to_json(b)["audit"] == printed["audit"]);
    CHECK(printed["config_hash"] == harness::config_hash(c));
  }
  SUBCASE("same seed, different root: identical outputs") {
    const auto root2 = fresh_dir("audit2");
    REQUIRE(invoke({"audit", "--quick", "--seed", "3", "--out", root2.string()}).code == 0);
    const auto dir2 = run_dir(root2);
    CHECK(dir.filename() == dir2.filename());
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().filename() == "manifest.json") continue;
      CHECK(slurp(e.path()) == slurp(dir2 / e.path().filename()));
    }
  }
  SUBCASE("report re-emits tables") {
    const auto root3 = fresh_dir("report");
    REQUIRE(invoke({"report", "--from", dir.string(), "--out", root3.string()}).code == 0);
    const auto dir3 = run_dir(root3);
    CHECK(slurp(dir3 / "disparity.csv") == slurp(dir / "disparity.csv"));
  }
}

TEST_CASE("flags override config files") {
  const auto dir = fresh_dir("precedence");
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "[protocol]\nruns = 3\nseed = 4\n[train]\nepochs = 5\n";
  const auto r = invoke({"audit", "--config", cfg.string(), "--set", "protocol.runs=2", "--seed", "9",
                         "--n", "80", "--out", dir.string(), "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  harness::ExperimentConfig c;
  c.n_runs = 2;
  c.seed = 9;
  c.train.epochs = 5;
  c.task.teaser.n = 80;
  CHECK(doc["config_hash"] == harness::config_hash(c));
}

TEST_CASE("other subcommands") {
  SUBCASE("amplify") {
    const auto root = fresh_dir("amplify");
    REQUIRE(invoke({"amplify", "--tasks", "8", "--runs", "2", "--quick", "--out", root.string()}).code == 0);
    const auto doc = nlohmann::json::parse(slurp(run_dir(root) / "report.json"));
    CHECK(doc["amplification"]["records"].size() == 8);
  }
  SUBCASE("sweep") {
    const auto root = fresh_dir("sweep");
    REQUIRE(invoke({"sweep", "--variable", "width", "--grid", "8,16", "--tasks", "7", "--quick", "--out",
                    root.string()})
                .code == 0);
    const auto doc = nlohmann::json::parse(slurp(run_dir(root) / "report.json"));
    CHECK(doc["sweep"]["points"].size() == 2);
    CHECK(invoke({"sweep", "--variable", "width", "--grid", "16,8", "--quick", "--out", root.string()}).code ==
          cli::kExitData);
  }
  SUBCASE("mitigate") {
    const auto root = fresh_dir("mitigate");
    REQUIRE(invoke({"mitigate", "--quick", "--out", root.string()}).code == 0);
    CHECK(fs::exists(run_dir(root) / "mitigation.csv"));
  }
  SUBCASE("pairwise on blobs") {
    const auto root = fresh_dir("pairwise");
    REQUIRE(invoke({"pairwise", "--quick", "--set", "task.kind=blobs", "--set", "task.classes=4", "--out",
                    root.string()})
                .code == 0);
    const auto dir = run_dir(root);
    CHECK(fs::exists(dir / "tau.csv"));
    CHECK(fs::exists(dir / "pairwise_model0.csv"));
  }
  SUBCASE("train") {
    const auto root = fresh_dir("train");
    REQUIRE(invoke({"train", "--quick", "--out", root.string()}).code == 0);
    CHECK(fs::exists(run_dir(root) / "model.txt"));
  }
}

TEST_CASE("binary exit codes") {
  const char* tool = std::getenv("AMPLAB_TOOL");
  if (tool == nullptr) {
    MESSAGE("AMPLAB_TOOL not set; skipping process-level checks");
    return;
  }
  auto status = [&](const std::string& args) {
    const int raw = std::system((std::string(tool) + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("") == 1);
  CHECK(status("audit --bogus") == 1);
  CHECK(status("audit --config /nonexistent/x.cfg") == 2);
  const auto dir = fresh_dir("binary");
  CHECK(status("generate --task teaser --n 40 --seed 1 --out " + (dir / "d.csv").string()) == 0);
}
