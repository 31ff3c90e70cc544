#pragma once

// Human-readable renderings of an example document: runnable curl commands,
// a markdown summary, or the document itself.

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "restex/executor.hpp"
#include "restex/http_request.hpp"
#include "restex/store.hpp"

namespace restex {

enum class ReportFormat { curl, markdown, json };

inline std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "curl") return ReportFormat::curl;
  if (text == "markdown") return ReportFormat::markdown;
  if (text == "json") return ReportFormat::json;
  return std::nullopt;
}

struct ReportOptions {
  ReportFormat format = ReportFormat::curl;
  bool include_responses = false;
  bool highlight_diffs = false;
  std::vector<BehaviourId> behaviours;  // sections to print even when empty
  std::string base_url;                 // overrides the document's sut
};

inline std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

/// The request a stored step sends. Stored literals are the sent values;
/// copies send their source's values.
inline HttpRequest stored_request(const PlannedSequence& seq, std::size_t position) {
  const auto& step = seq.steps.at(position);
  const auto& source = step.copy_of ? seq.steps.at(*step.copy_of) : step;
  RealizedInvocation inv{step.operation, step.method, step.path, {}};
  for (const auto& a : source.arguments) inv.arguments.push_back({a.name, a.location, a.literal});
  return build_request(inv);
}

inline std::string curl_command(const HttpRequest& req, std::string_view base_url) {
  std::string base(base_url);
  while (!base.empty() && base.back() == '/') base.pop_back();
  std::string cmd = "curl -X " + std::string(to_string(req.method)) + " " + shell_quote(base + req.target);
  if (req.has_body) cmd += " -H 'Content-Type: application/json' -d " + shell_quote(req.body);
  return cmd;
}

namespace detail {

inline std::string observation_text(const Observation& o) {
  return std::to_string(o.status) + " " + (o.opaque ? o.body.get<std::string>() : o.body.dump());
}

/// Structural differences between the two observations that decide the
/// behaviour: the anchor pair for B3/B4, the pair for B1/B2.
inline std::vector<std::string> decisive_diffs(const StoredEntry& e) {
  std::vector<std::string> out;
  if (!e.observations || e.observations->empty()) return out;
  const auto& obs = *e.observations;
  std::size_t a = 0, b = obs.size() - 1;
  if (e.behaviour == BehaviourId::fuzz || a == b) return out;
  if (obs[a].status != obs[b].status) {
    out.push_back("status: " + std::to_string(obs[a].status) + " -> " + std::to_string(obs[b].status));
  }
  const auto& before = obs[a].body;
  const auto& after = obs[b].body;
  if (before.is_array() && after.is_array()) {
    // Element-wise, since index-based diffs of sorted lists shift everything.
    for (const auto& x : after) {
      if (std::find(before.begin(), before.end(), x) == before.end()) out.push_back("added element " + x.dump());
    }
    for (const auto& x : before) {
      if (std::find(after.begin(), after.end(), x) == after.end()) out.push_back("removed element " + x.dump());
    }
    return out;
  }
  for (const auto& op : Value::diff(before, after)) {
    std::string line = op.at("op").get<std::string>() + " " + op.at("path").get<std::string>();
    if (op.contains("value")) line += " = " + op.at("value").dump();
    out.push_back(line);
  }
  return out;
}

inline std::string absence_line(const StoredEntry& e) {
  switch (e.outcome) {
    case Outcome::no_example_found:
      return "no example of " + std::string(to_string(e.behaviour)) + " was found within " +
             std::to_string(e.trials) + " trials" + (e.note.empty() ? "" : " (" + e.note + ")");
    case Outcome::skipped: return std::string(to_string(e.behaviour)) + " skipped: " + e.note;
    case Outcome::unreachable: return "system under test unreachable: " + e.note;
    case Outcome::example: break;
  }
  return "";
}

inline std::vector<BehaviourId> sections(const ExampleDocument& doc, const ReportOptions& opt) {
  std::set<BehaviourId> present;
  for (const auto& e : doc.entries) present.insert(e.behaviour);
  for (auto b : opt.behaviours) present.insert(b);
  std::vector<BehaviourId> out;
  for (auto b : kAllBehaviours) {
    if (present.contains(b)) out.push_back(b);
  }
  return out;
}

}  // namespace detail

inline std::string render_curl(const ExampleDocument& doc, const ReportOptions& opt) {
  const std::string base = opt.base_url.empty() ? doc.sut : opt.base_url;
  std::ostringstream os;
  os << "# examples for " << base << "\n";
  for (auto b : detail::sections(doc, opt)) {
    os << "\n# " << to_string(b) << ": " << describe(b) << "\n";
    bool any = false;
    for (const auto& e : doc.entries) {
      if (e.behaviour != b) continue;
      any = true;
      os << "\n# " << e.key << "\n";
      if (e.outcome != Outcome::example) {
        os << "# " << detail::absence_line(e) << "\n";
        continue;
      }
      for (std::size_t i = 0; i < e.sequence.steps.size(); ++i) {
        os << curl_command(stored_request(e.sequence, i), base) << "\n";
        if (opt.include_responses && e.observations && i < e.observations->size()) {
          os << "#   -> " << detail::observation_text((*e.observations)[i]) << "\n";
        }
      }
      if (opt.highlight_diffs) {
        for (const auto& d : detail::decisive_diffs(e)) os << "#   changed: " << d << "\n";
      }
    }
    if (!any) os << "# no examples found\n";
  }
  return os.str();
}

inline std::string render_markdown(const ExampleDocument& doc, const ReportOptions& opt) {
  const std::string base = opt.base_url.empty() ? doc.sut : opt.base_url;
  std::ostringstream os;
  os << "# Examples for " << base << "\n";
  for (auto b : detail::sections(doc, opt)) {
    os << "\n## " << to_string(b) << ": " << describe(b) << "\n";
    bool any = false;
    for (const auto& e : doc.entries) {
      if (e.behaviour != b) continue;
      any = true;
      os << "\n### " << e.key << "\n\n";
      if (e.outcome != Outcome::example) {
        os << detail::absence_line(e) << "\n";
        continue;
      }
      os << "```sh\n";
      for (std::size_t i = 0; i < e.sequence.steps.size(); ++i) {
        os << curl_command(stored_request(e.sequence, i), base) << "\n";
      }
      os << "```\n";
      if (opt.include_responses && e.observations) {
        os << "\n| step | operation | status | body |\n|---|---|---|---|\n";
        for (std::size_t i = 0; i < e.observations->size() && i < e.sequence.steps.size(); ++i) {
          const auto& o = (*e.observations)[i];
          std::string body = o.opaque ? o.body.get<std::string>() : o.body.dump();
          std::string escaped;
          for (char c : body) escaped += c == '|' ? std::string("\\|") : std::string(1, c);
          os << "| " << i << " | " << e.sequence.steps[i].operation << " | " << o.status << " | `" << escaped
             << "` |\n";
        }
      }
      if (opt.highlight_diffs) {
        const auto diffs = detail::decisive_diffs(e);
        if (!diffs.empty()) {
          os << "\nChanged between the compared responses:\n\n";
          for (const auto& d : diffs) os << "- `" << d << "`\n";
        }
      }
    }
    if (!any) os << "\nno examples found\n";
  }
  return os.str();
}

inline std::string render(const ExampleDocument& doc, const ReportOptions& opt) {
  switch (opt.format) {
    case ReportFormat::curl: return render_curl(doc, opt);
    case ReportFormat::markdown: return render_markdown(doc, opt);
    case ReportFormat::json: return serialize(doc);
  }
  return {};
}

}  // namespace restex
