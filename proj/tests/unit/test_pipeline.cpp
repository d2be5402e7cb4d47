#include <gtest/gtest.h>

#include <map>

#include <unistd.h>

#include "satd/io.hpp"
#include "satd/pipeline.hpp"

using namespace satd;
namespace fs = std::filesystem;
namespace p = satd::pipeline;

namespace {

const fs::path kFixtures = SATD_FIXTURE_DIR;

const std::vector<std::string> kGoldenFiles = {
    "instances.ndjson",         "baseline.ndjson",          "instances_full.ndjson",
    "intro_distribution.csv",   "removal_distribution.csv", "removal_rate_cumulative.csv",
    "removal_rate_incremental.csv", "removal_rate_total.csv", "frequency_evolution.csv",
    "remover_breakdown.csv",    "half_life.csv",            "km_curves.csv",
    "parametric_fits.csv",      "tests.csv",                "cox.csv",
    "ph_check.csv",             "summary.md"};

fs::path temp_dir(const std::string& tag) {
  auto d = fs::temp_directory_path() / ("satd_pipeline_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

p::RunConfig fixture_config(const fs::path& out) {
  auto c = p::load_config(kFixtures / "fixture.conf");
  c.repo = SATD_FIXTURE_REPO;
  c.out = out.string();
  p::validate_config(c);
  return c;
}

const fs::path& fixture_run() {
  static const fs::path out = [] {
    auto d = temp_dir("golden");
    p::cmd_run(fixture_config(d));
    return d;
  }();
  return out;
}

} // namespace

TEST(Config, ParsesKeysAndResolvesPaths) {
  auto c = p::parse_config("# c\nrepo = r\nphases = 4\n\nwindow_days=30.5\nevolution_range = window\n", "/base");
  EXPECT_EQ(c.repo, "/base/r");
  EXPECT_EQ(c.phases, 4u);
  EXPECT_EQ(c.window_days, 30.5);
  EXPECT_EQ(c.branch, "master");
}

TEST(Config, ErrorsAreConfigKind) {
  for (const char* text : {"nope = 1\n", "phases = x\n", "missing equals\n"}) {
    try {
      p::parse_config(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(exit_code_for(e.kind()), 2) << text;
    }
  }
  auto c = p::parse_config("repo = /r\nout = /o\nphases = 1\n");
  EXPECT_THROW(p::validate_config(c), Error);
  c.phases = 2;
  c.evolution_range = "sometimes";
  EXPECT_THROW(p::validate_config(c), Error);
}

TEST(Pipeline, FixtureOutputsMatchGoldens) {
  const auto& out = fixture_run();
  for (const auto& f : kGoldenFiles)
    EXPECT_EQ(io::read_file(out / f), io::read_file(kFixtures / "golden" / f)) << f;
}

TEST(Pipeline, HandCheckedInstanceTable) {
  // intro ordinal, removal ordinal (-1 = censored), type, remover class
  const std::vector<std::tuple<long, long, std::string, std::string>> expected = {
      {0, 5, "Requirement", "FewerActive"}, {0, -1, "Design", "None"},       {0, 8, "Defect", "Self"},
      {1, 7, "Documentation", "Self"},      {1, 6, "Algorithm", "MoreActive"}, {2, 3, "Compatibility", "Self"},
      {7, -1, "Documentation", "None"},     {7, 11, "Test", "Self"},        {10, 13, "Requirement", "FewerActive"},
      {10, -1, "Design", "None"}};
  auto rows = p::read_ndjson_file(fixture_run() / "instances.ndjson", "track");
  ASSERT_EQ(rows.size(), expected.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& j = rows[i];
    const auto& [intro, removal, type, remover] = expected[i];
    EXPECT_EQ(j.at("intro_ordinal").get<long>(), intro) << i;
    EXPECT_EQ(j.at("censored").get<bool>(), removal < 0) << i;
    if (removal >= 0) {
      EXPECT_EQ(j.at("removal_ordinal").get<long>(), removal) << i;
    }
    EXPECT_EQ(j.at("debt_type").get<std::string>(), type) << i;
    const auto& rc = j.at("remover_class");
    EXPECT_EQ(rc.is_null() ? std::string("None") : rc.get<std::string>(), remover) << i;
  }
  // the deleted file ends its SATD with a deletion, not an edit
  EXPECT_EQ(rows[2].at("removal_reason").get<std::string>(), "FileDeleted");
}

TEST(Pipeline, ConservationHoldsOnFixture) {
  auto inst = p::load_instances(fixture_run() / "instances.ndjson");
  EXPECT_TRUE(phases::conservation_violations(inst, {}).empty());
  std::map<std::string, std::size_t> keys;
  for (const auto& i : inst) ++keys[i.key.lineage_id + ":" + i.key.normalized_text + ":" + std::to_string(i.key.occurrence_index)];
  for (const auto& [k, n] : keys) EXPECT_EQ(n, 1u) << k;
}

TEST(Pipeline, SecondRunIsByteIdentical) {
  const auto d = temp_dir("again");
  p::cmd_run(fixture_config(d));
  for (const auto& f : kGoldenFiles) EXPECT_EQ(io::read_file(d / f), io::read_file(fixture_run() / f)) << f;
  // rerun into the same directory reuses the cache and changes nothing
  p::cmd_run(fixture_config(d));
  for (const auto& f : kGoldenFiles) EXPECT_EQ(io::read_file(d / f), io::read_file(fixture_run() / f)) << f;
  fs::remove_all(d);
}

TEST(Pipeline, ReportWithoutBundleIsBundleError) {
  const auto d = temp_dir("nobundle");
  fs::create_directories(d);
  try {
    p::cmd_report(fixture_config(d));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code_for(e.kind()), 5);
  }
  io::write_file(d / "bundle.json", "{\"format\": \"satd-analysis-bundle\", \"truncated");
  EXPECT_THROW(p::cmd_report(fixture_config(d)), Error);
  fs::remove_all(d);
}
