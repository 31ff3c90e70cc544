#pragma once

// Command-line front end. Lives in a header so tests can drive it in-process.
// Exit codes: 0 success, 1 replay failures, 2 usage or I/O errors.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "restex/explorer.hpp"
#include "restex/fixture.hpp"
#include "restex/report.hpp"
#include "restex/runner.hpp"
#include "restex/store.hpp"

namespace restex {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailures = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<BehaviourId> parse_behaviour_list(const std::string& csv) {
  std::vector<BehaviourId> out;
  for (const auto& name : split_csv(csv)) {
    auto b = parse_behaviour(name);
    if (!b) throw UsageError("unknown behaviour '" + name + "' (expected b1,b2,b3,b4,fuzz)");
    if (std::find(out.begin(), out.end(), *b) == out.end()) out.push_back(*b);
  }
  if (out.empty()) throw UsageError("--behaviours is empty");
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A local path, or an http:// URL fetched with GET.
inline std::string load_spec_text(const std::string& location) {
  if (location.rfind("http://", 0) != 0) return read_file(location);
  const auto base = parse_base_url(location);
  httplib::Client client(base.origin);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(10, 0);
  auto res = client.Get(base.prefix.empty() ? "/" : base.prefix);
  if (!res) throw std::runtime_error("cannot fetch " + location + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw std::runtime_error("fetching " + location + " answered " + std::to_string(res->status));
  return res->body;
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw std::runtime_error("cannot write " + path);
}

inline void summary_table(const ExplorationResult& result, std::ostream& err) {
  std::size_t key_width = 10;
  for (const auto& o : result.outcomes) key_width = std::max(key_width, o.key.size());
  err << std::left << std::setw(10) << "behaviour" << std::setw(static_cast<int>(key_width) + 2) << "recipe"
      << std::setw(18) << "outcome" << std::setw(8) << "trials" << "length\n";
  for (const auto& o : result.outcomes) {
    err << std::setw(10) << to_string(o.behaviour) << std::setw(static_cast<int>(key_width) + 2) << o.key
        << std::setw(18) << to_string(o.outcome) << std::setw(8) << o.trials;
    err << (o.example ? std::to_string(o.example->sequence.steps.size()) : "-") << "\n";
  }
  err << "explored in " << result.duration.count() << " ms\n";
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Generates and replays examples of REST API behaviour from an OpenAPI document", "restex"};
  app.require_subcommand(1);

  std::string spec_path, base_url, out_path, behaviours_csv = "b1,b2,b3,b4,fuzz", volatile_csv, examples_path;
  std::string format = "curl", variant_name = "lax", report_behaviours;
  std::uint64_t seed = 0;
  std::size_t trials = kDefaultTrials, shrink_budget = kDefaultShrinkBudget;
  bool include_responses = false, highlight_diffs = false, no_observations = false, parallel = false;
  bool configurations = false, quiet = false;
  int port = 0;

  auto* explore_cmd = app.add_subcommand("explore", "search for examples and write an example document");
  explore_cmd->add_option("--spec", spec_path, "OpenAPI JSON document, path or http:// URL")->required();
  explore_cmd->add_option("--base-url", base_url, "base URL of the system under test")->required();
  explore_cmd->add_option("--seed", seed, "random seed");
  explore_cmd->add_option("--out", out_path, "output file, stdout when omitted");
  explore_cmd->add_option("--behaviours", behaviours_csv, "comma-separated subset of b1,b2,b3,b4,fuzz");
  explore_cmd->add_option("--trials", trials, "trials per recipe")->check(CLI::PositiveNumber);
  explore_cmd->add_option("--shrink-budget", shrink_budget, "sequence executions allowed per shrink");
  explore_cmd->add_option("--volatile", volatile_csv, "comma-separated dotted field paths ignored in responses");
  explore_cmd->add_flag("--no-observations", no_observations, "do not store observations");
  explore_cmd->add_flag("--quiet", quiet, "no progress lines");

  auto* run_cmd = app.add_subcommand("run", "replay an example document as a regression suite");
  run_cmd->add_option("--examples", examples_path, "example document")->required();
  run_cmd->add_option("--base-url", base_url, "base URL of the system under test")->required();
  run_cmd->add_option("--volatile", volatile_csv, "comma-separated dotted field paths ignored in responses");
  run_cmd->add_flag("--parallel", parallel, "replay examples concurrently; only for isolated systems");

  auto* report_cmd = app.add_subcommand("report", "render an example document");
  report_cmd->add_option("--examples", examples_path, "example document")->required();
  report_cmd->add_option("--format", format, "curl, markdown or json")
      ->check(CLI::IsMember({"curl", "markdown", "json"}));
  report_cmd->add_option("--base-url", base_url, "URL used in commands instead of the recorded one");
  report_cmd->add_option("--behaviours", report_behaviours, "behaviours to list even without entries");
  report_cmd->add_option("--out", out_path, "output file, stdout when omitted");
  report_cmd->add_flag("--include-responses", include_responses, "show status and body after each request");
  report_cmd->add_flag("--highlight-diffs", highlight_diffs, "list fields that differ between compared responses");

  auto* graph_cmd = app.add_subcommand("graph-dump", "write the relation graph in DOT format");
  graph_cmd->add_option("--spec", spec_path, "OpenAPI JSON document, path or http:// URL")->required();
  graph_cmd->add_option("--out", out_path, "output file, stdout when omitted");

  auto* serve_cmd = app.add_subcommand("serve-fixture", "serve a built-in product service until interrupted");
  serve_cmd->add_option("--variant", variant_name, "lax, strict, no-delete or crashy")
      ->check(CLI::IsMember({"lax", "strict", "no-delete", "crashy"}));
  serve_cmd->add_option("--port", port, "TCP port, 0 picks a free one");
  serve_cmd->add_flag("--configurations", configurations, "also serve product configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (explore_cmd->parsed()) {
      ExplorationConfig config;
      config.trials = trials;
      config.seed = seed;
      config.behaviours = detail::parse_behaviour_list(behaviours_csv);
      config.shrink_budget = shrink_budget;
      config.volatile_fields = detail::split_csv(volatile_csv);
      config.base_url = base_url;
      if (!quiet) config.progress = &err;
      const auto spec = parse_spec(detail::load_spec_text(spec_path));
      for (const auto& w : spec.warnings) err << "warning: " << w << "\n";
      HttpExecutor executor(base_url);
      const auto result = explore_all(spec, config, executor);
      detail::write_output(out_path, serialize(to_document(result, base_url, !no_observations)), out);
      detail::summary_table(result, err);
      return kExitOk;
    }
    if (run_cmd->parsed()) {
      RunConfig config;
      config.volatile_fields = detail::split_csv(volatile_csv);
      config.parallel = parallel;
      const auto doc = load_examples(examples_path);
      parse_base_url(base_url);
      const auto results = run_suite(doc, base_url, config);
      std::size_t passed = 0;
      for (const auto& r : results) {
        out << to_string(r.status) << ' ' << to_string(r.behaviour) << ' ' << r.key;
        if (r.status != RunStatus::pass) out << ": " << r.clause;
        if (r.caveat) out << " (replays only while the entity does not already exist)";
        out << "\n";
        if (r.status == RunStatus::pass) ++passed;
      }
      out << passed << "/" << results.size() << " examples passed\n";
      return suite_passed(results) ? kExitOk : kExitFailures;
    }
    if (report_cmd->parsed()) {
      ReportOptions opt;
      opt.format = *parse_report_format(format);
      opt.include_responses = include_responses;
      opt.highlight_diffs = highlight_diffs;
      opt.base_url = base_url;
      if (!report_behaviours.empty()) opt.behaviours = detail::parse_behaviour_list(report_behaviours);
      detail::write_output(out_path, render(load_examples(examples_path), opt), out);
      return kExitOk;
    }
    if (graph_cmd->parsed()) {
      const auto spec = parse_spec(detail::load_spec_text(spec_path));
      detail::write_output(out_path, to_dot(build_schema_graph(spec)), out);
      return kExitOk;
    }
    if (serve_cmd->parsed()) {
      FixtureOptions options;
      options.variant = *parse_fixture_variant(variant_name);
      options.port = port;
      options.configurations = configurations;
      Fixture fixture(options);
      out << fixture.base_url() << std::endl;
      fixture.wait();
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace restex
