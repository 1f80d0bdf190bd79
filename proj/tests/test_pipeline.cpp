#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "svcal/error.hpp"
#include "svcal/io.hpp"
#include "svcal/pipeline.hpp"

using namespace svcal;

namespace {

const fs::path kToy = fs::path(SVCAL_TEST_DATA_DIR) / "toy";

RunConfig toy_config(const std::string& out) {
  RunConfig c;
  c.predictions = kToy / "predictions.jsonl";
  c.votes = kToy / "votes.jsonl";
  c.soft_predictions = kToy / "predictions_soft.jsonl";
  c.null_predictions = kToy / "predictions_null.jsonl";
  c.proxies = kToy / "proxies.csv";
  c.output_dir = fs::temp_directory_path() / "svcal_pipeline_tests" / out;
  fs::remove_all(c.output_dir);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("pipeline output is deterministic") {
  const auto a = run_pipeline(toy_config("a"));
  const auto b = run_pipeline(toy_config("b"));
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].filename() == b.files[i].filename());
    CHECK(slurp(a.files[i]) == slurp(b.files[i]));
  }
  CHECK(a.unanimous + a.split_vote == a.all);
  CHECK(a.split_vote > 0);
  REQUIRE(a.temperature.has_value());
  CHECK(a.temperature->t > 1.0);
}

TEST_CASE("report numbers can be recomputed from the emitted pairs") {
  const auto cfg = toy_config("recompute");
  run_pipeline(cfg);
  const auto report = nlohmann::json::parse(slurp(cfg.output_dir / "report.json"));
  const auto table = read_csv(cfg.output_dir / "pairs_ts.csv");
  const auto c_group = table.column("group"), c_conf = table.column("confidence"),
             c_correct = table.column("correct"), c_dist = table.column("dist_ce");

  for (const std::string group : {"unanimous", "split_vote", "all"}) {
    std::vector<ConfidencePoint> pts;
    double dist = 0.0;
    for (const auto& row : table.rows) {
      if (group != "all" && row[c_group] != group) continue;
      pts.push_back({std::stod(row[c_conf]), row[c_correct] == "1"});
      dist += std::stod(row[c_dist]);
    }
    const auto& g = report["variants"]["ts"][group];
    REQUIRE(g["count"].get<std::size_t>() == pts.size());
    CHECK(std::abs(ece(pts, 10).ece - g["ece"].get<double>()) <= 1e-9);
    CHECK(std::abs(dist / pts.size() - g["mean_dist_ce"].get<double>()) <= 1e-9);

    double from_bins = 0.0;
    for (const auto& bin : g["ece_bins"]) {
      const double n = bin["count"].get<double>();
      from_bins += n / pts.size() * std::abs(bin["accuracy"].get<double>() - bin["mean_confidence"].get<double>());
    }
    CHECK(std::abs(from_bins - g["ece"].get<double>()) <= 1e-12);
  }

  // Temperature scaling cannot move the F1 suite.
  for (const std::string group : {"unanimous", "split_vote", "all"}) {
    CHECK(report["variants"]["ts"][group]["micro_f1"] == report["variants"]["base"][group]["micro_f1"]);
    CHECK(report["variants"]["ts"][group]["hard_macro_f1"] == report["variants"]["base"][group]["hard_macro_f1"]);
  }
}

TEST_CASE("pipeline input errors") {
  auto cfg = toy_config("errors");
  cfg.articles = std::set<int>{99};
  try {
    run_pipeline(cfg);
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }

  auto no_votes = toy_config("no_votes");
  no_votes.votes.reset();
  no_votes.proxies.reset();
  try {
    run_pipeline(no_votes);
    FAIL("expected MissingHumanLabel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingHumanLabel);
  }

  auto bad = toy_config("bad");
  bad.ece_bins = 0;
  CHECK_THROWS_AS(run_pipeline(bad), Error);
}

TEST_CASE("pipeline without temperature scaling or extras") {
  auto cfg = toy_config("plain");
  cfg.temperature_scaling = false;
  cfg.soft_predictions.reset();
  cfg.null_predictions.reset();
  cfg.proxies.reset();
  const auto out = run_pipeline(cfg);
  CHECK_FALSE(out.temperature.has_value());
  CHECK(fs::exists(cfg.output_dir / "pairs_base.csv"));
  CHECK_FALSE(fs::exists(cfg.output_dir / "pairs_ts.csv"));
  CHECK_FALSE(fs::exists(cfg.output_dir / "pvi.csv"));
}
