// satd: command-line front end for the mining and analysis pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "satd/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> repo, branch, release, out, model, corpus, labels, mailmap;
  std::optional<double> window_days;
  std::optional<std::size_t> phases;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value config file")->required();
  cmd->add_option("--repo", o.repo, "repository path");
  cmd->add_option("--branch", o.branch, "branch to linearize");
  cmd->add_option("--release", o.release, "release commit (censoring point)");
  cmd->add_option("--window-days", o.window_days, "censor window in days");
  cmd->add_option("--phases", o.phases, "number of development phases");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--model", o.model, "classifier model file");
  cmd->add_option("--corpus", o.corpus, "labeled training corpus CSV");
  cmd->add_option("--labels", o.labels, "label import CSV (comment_key,debt_type)");
  cmd->add_option("--mailmap", o.mailmap, "mailmap identity file");
}

satd::pipeline::RunConfig build_config(const Overrides& o) {
  auto c = satd::pipeline::load_config(o.config);
  const auto cwd = std::filesystem::current_path();
  auto path = [&](const std::string& v) { return satd::pipeline::detail::resolve_path(cwd, v); };
  if (o.repo) c.repo = path(*o.repo);
  if (o.branch) c.branch = *o.branch;
  if (o.release) c.release = *o.release;
  if (o.window_days) c.window_days = *o.window_days;
  if (o.phases) c.phases = *o.phases;
  if (o.out) c.out = path(*o.out);
  if (o.model) c.model = path(*o.model);
  if (o.corpus) c.corpus = path(*o.corpus);
  if (o.labels) c.labels = path(*o.labels);
  if (o.mailmap) c.mailmap = path(*o.mailmap);
  satd::pipeline::validate_config(c);
  return c;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine self-admitted technical debt lifecycles from git history"};
  app.require_subcommand(1);
  Overrides o;
  auto* extract = app.add_subcommand("extract", "linearize history and extract comments");
  auto* train = app.add_subcommand("train", "train the SATD detector and typer from a corpus");
  auto* classify = app.add_subcommand("classify", "label every extracted comment");
  auto* track = app.add_subcommand("track", "build SATD instances with censoring");
  auto* analyze = app.add_subcommand("analyze", "compute tables, tests and survival models");
  auto* report = app.add_subcommand("report", "render the markdown summary");
  auto* run = app.add_subcommand("run", "extract, classify, track, analyze and report");
  for (auto* cmd : {extract, train, classify, track, analyze, report, run}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  namespace p = satd::pipeline;
  try {
    const auto config = build_config(o);
    if (*extract) {
      auto r = p::cmd_extract(config);
      std::cout << "commits (first-parent): " << r.first_parent_commits << "\n"
                << "commits (all ancestors): " << r.all_ancestor_commits << "\n"
                << "file versions: " << r.versions << "\n"
                << "comments (raw): " << r.raw_comments << "\n"
                << "comments (distinct): " << r.distinct_comments << "\n"
                << "lexed: " << r.counters.lexed << " reused: " << r.counters.reused << "\n";
    } else if (*train) {
      auto m = p::cmd_train(config);
      std::cout << "detector sub-models: " << m.detector.sub_models.size() << (m.typer ? ", typer trained" : ", no typer") << "\n";
    } else if (*classify) {
      const auto n = p::cmd_classify(config);
      std::cout << "labeled comment keys: " << n << "\n";
    } else if (*track) {
      auto r = p::cmd_track(config);
      std::cout << "SATD instances: " << r.instances.size() << "\n"
                << "baseline comments: " << r.baseline.size() << "\n";
    } else if (*analyze) {
      p::cmd_analyze(config);
      std::cout << "analysis written to " << config.out << "\n";
    } else if (*report) {
      std::cout << p::cmd_report(config);
    } else if (*run) {
      std::cout << p::cmd_run(config);
    }
  } catch (const satd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return satd::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
