#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "helpers.hpp"
#include "rtnet/config.hpp"
#include "rtnet/pipeline.hpp"

using namespace rtnet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run cli(const std::string& args, const fs::path& scratch) {
  const auto log = scratch / "cli.log";
  const std::string cmd = std::string(RTNET_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = testing::read_file(log);
  return r;
}

std::string out_flag(const fs::path& dir) { return " --out " + dir.string(); }

// A small dataset pushed through every stage but fit.
fs::path prepared(const std::string& name) {
  const auto dir = testing::scratch_dir(name);
  const auto art = dir / "art";
  const auto o = out_flag(art);
  REQUIRE(cli("synth --events 30000 --seed 3" + o, dir).code == 0);
  for (const char* stage : {"backbone", "diagnose", "align", "growth"}) {
    const auto r = cli(std::string(stage) + o, dir);
    CAPTURE(r.output);
    REQUIRE(r.code == 0);
  }
  return dir;
}

const std::string kSmallFit = " --r0-step 0.25 --r0-max 3 --runs 10";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config validation") {
    PipelineConfig c;
    CHECK(validate_config(c).empty());
    c.alpha = 0.05;
    CHECK(validate_config(c).empty());
    c.step_days = 40;
    auto v = validate_config(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].key == "step-days");
    CHECK(v[0].message == "window step exceeds length");
    c = PipelineConfig{};
    c.fit.tolerance_pct = 0.0;
    v = validate_config(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].key == "tolerance");
    c = PipelineConfig{};
    c.theta = 1.5;
    c.alpha = 0.0;
    CHECK(validate_config(c).size() == 2);
  }

  TEST_CASE("config values and files") {
    PipelineConfig c;
    CHECK_FALSE(set_config_value(c, "theta", "0.9").has_value());
    CHECK(c.theta == 0.9);
    CHECK_FALSE(set_config_value(c, "fit-mode", "single-pass").has_value());
    CHECK(c.fit.mode == FitMode::kSinglePass);
    CHECK_FALSE(set_config_value(c, "range-start", "2020-03-01").has_value());
    CHECK(c.range_start == 1583020800);
    CHECK(set_config_value(c, "theta", "high").has_value());
    CHECK(set_config_value(c, "colour", "red")->message == "unknown key");
    const auto dir = testing::scratch_dir("config_file");
    testing::write_file(dir / "run.cfg", "# sweep\nalpha = 0.1\n\ntheta=0.8 # inline\nbroken line\n");
    std::vector<ConfigViolation> v;
    const auto values = read_config_file(dir / "run.cfg", v);
    CHECK(values.at("alpha") == "0.1");
    CHECK(values.at("theta") == "0.8");
    REQUIRE(v.size() == 1);
    CHECK(v[0].key == "run.cfg:5");
    CHECK_THROWS(read_config_file(dir / "absent.cfg", v));
    for (const auto& key : config_keys()) CHECK_FALSE(key.empty());
  }

  TEST_CASE("exit codes") {
    const auto dir = testing::scratch_dir("exit_codes");
    const auto o = out_flag(dir / "art");
    auto r = cli("align --theta 1.5" + o, dir);
    CHECK(r.code == 1);
    CHECK(r.output.find("theta") != std::string::npos);
    r = cli("growth --step-days 40" + o, dir);
    CHECK(r.code == 1);
    CHECK(r.output.find("window step exceeds length") != std::string::npos);
    CHECK(cli("fit --tolerance 0" + o, dir).code == 1);
    CHECK(cli("backbone --alpha nope" + o, dir).code == 1);
    CHECK(cli("frobnicate" + o, dir).code == 1);
    CHECK(cli("backbone --theta 0.9" + o, dir).code == 1);
    r = cli("backbone" + o, dir);
    CHECK(r.code == 2);
    CHECK(r.output.find("ingest") != std::string::npos);
    CHECK(cli("ingest --input " + (dir / "none.jsonl").string() + o, dir).code == 2);
    CHECK(cli("--config " + (dir / "none.cfg").string() + " backbone" + o, dir).code == 2);
    CHECK(cli("--help", dir).code == 0);
  }

  TEST_CASE("ingest reports bad lines and runtime failures") {
    const auto dir = testing::scratch_dir("ingest_cli");
    const std::string good =
        "{\"ts\":\"2020-01-0%d\",\"src\":\"a\",\"dst\":\"b\",\"cat\":\"MSM\",\"src_followers\":1,"
        "\"dst_followers\":2,\"src_bot\":false,\"dst_bot\":false,\"src_verified\":false,"
        "\"dst_verified\":false}";
    std::string text;
    for (int d = 1; d <= 3; ++d) {
      std::string line = good;
      line.replace(line.find("%d"), 2, std::to_string(d));
      text += line + "\n";
    }
    text += "{\"ts\":\"not-a-date\"}\n";
    testing::write_file(dir / "events.jsonl", text);
    const auto o = out_flag(dir / "art");
    const auto r = cli("ingest --input " + (dir / "events.jsonl").string() + o, dir);
    CAPTURE(r.output);
    CHECK(r.code == 0);
    const auto errors = testing::read_file(dir / "art" / artifact::kIngestErrors);
    CHECK(errors.find("4,") != std::string::npos);
    CHECK(fs::exists(dir / "art" / artifact::kGraph));
    testing::write_file(dir / "bad.csv", "ts,src\n1,a\n");
    CHECK(cli("ingest --input " + (dir / "bad.csv").string() + o, dir).code == 3);
  }

  TEST_CASE("config file values apply and flags win") {
    const auto dir = prepared("config_precedence");
    const auto art = dir / "art";
    testing::write_file(dir / "run.cfg", "alpha = 0.2\n");
    REQUIRE(cli("--config " + (dir / "run.cfg").string() + " backbone" + out_flag(art), dir).code ==
            0);
    auto manifest = testing::read_file(art / "backbone.manifest.json");
    CHECK(manifest.find("\"alpha\": 0.2") != std::string::npos);
    REQUIRE(cli("--config " + (dir / "run.cfg").string() + " backbone --alpha 0.05" + out_flag(art),
                dir)
                .code == 0);
    manifest = testing::read_file(art / "backbone.manifest.json");
    CHECK(manifest.find("\"alpha\": 0.05") != std::string::npos);
    testing::write_file(dir / "bad.cfg", "theta = 2\n");
    CHECK(cli("--config " + (dir / "bad.cfg").string() + " align" + out_flag(art), dir).code == 1);
  }

  TEST_CASE("pipeline outputs are reproducible and report is complete") {
    const auto dir = prepared("pipeline");
    const auto art = dir / "art";
    const auto o = out_flag(art);

    // Report before fit: the simulation panel is absent, the rest present.
    auto r = cli("report" + o, dir);
    CAPTURE(r.output);
    REQUIRE(r.code == 0);
    for (const auto& f : report_files()) {
      CAPTURE(f);
      CHECK(fs::exists(art / artifact::kReportDir / f) == (f.rfind("fig4", 0) != 0));
    }
    const auto retention = testing::read_file(art / artifact::kReportDir / "fig1b_retention.csv");
    CHECK(retention.find("factual") != std::string::npos);

    r = cli("fit --n 3 --tolerance 0.10 --seed 7" + kSmallFit + o, dir);
    CAPTURE(r.output);
    REQUIRE(r.code == 0);
    const auto fit1 = testing::read_file(art / artifact::kFitJson);
    const auto win1 = testing::read_file(art / artifact::kFitWindows);
    REQUIRE(cli("fit --n 3 --tolerance 0.10 --seed 7 --threads 2" + kSmallFit + o, dir).code == 0);
    CHECK(testing::read_file(art / artifact::kFitJson) == fit1);
    CHECK(testing::read_file(art / artifact::kFitWindows) == win1);
    const auto manifest = testing::read_file(art / "fit.manifest.json");
    CHECK(manifest.find("\"seed\": 7") != std::string::npos);
    CHECK(manifest.find("growth.csv") != std::string::npos);

    REQUIRE(cli("report" + o, dir).code == 0);
    for (const auto& f : report_files()) CHECK(fs::exists(art / artifact::kReportDir / f));

    REQUIRE(cli("simulate --r0 1.5 --delta 0.05" + o, dir).code == 0);
    CHECK(fs::exists(art / artifact::kSimulate));
  }

  TEST_CASE("stages are byte-identical across runs and thread counts") {
    const auto a = prepared("repro_a");
    const auto b = testing::scratch_dir("repro_b");
    const auto ob = out_flag(b / "art");
    REQUIRE(cli("synth --events 30000 --seed 3 --threads 3" + ob, b).code == 0);
    for (const char* stage : {"backbone", "diagnose", "align", "growth"}) {
      REQUIRE(cli(std::string(stage) + " --threads 3" + ob, b).code == 0);
    }
    for (const char* f : {artifact::kEvents, artifact::kGraph, artifact::kBackbone,
                          artifact::kSignificance, artifact::kSizeCurve, artifact::kDiagnostics,
                          artifact::kHeterogeneity, artifact::kAlignment, artifact::kTernary,
                          artifact::kCoverage, artifact::kGrowth, artifact::kDailyCounts}) {
      CAPTURE(f);
      CHECK(testing::read_file(a / "art" / f) == testing::read_file(b / "art" / f));
    }
  }
}
