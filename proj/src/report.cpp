#include "msm/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace msm {

using nlohmann::json;

namespace {

json verdict_json(const Verdict& v) {
  return {{"kind", std::string(to_string(v.kind))}, {"node", v.node}, {"note", v.note}};
}

json step_json(const TraceStep& s);

json branch_json(const Branch& b) {
  json j = {{"node", b.node},
            {"pattern", std::string(to_string(b.pattern))},
            {"share", b.share},
            {"note", b.note},
            {"expanded", b.expanded}};
  j["verdict"] = b.verdict ? verdict_json(*b.verdict) : json(nullptr);
  j["next"] = json::array();
  for (const auto& n : b.next) j["next"].push_back(step_json(n));
  return j;
}

json step_json(const TraceStep& s) {
  const auto& r = s.result;
  json scores = json::array();
  for (std::size_t i = 0; i < r.players.size(); ++i) {
    scores.push_back({{"node", r.players[i]}, {"phi", r.phi[i]}, {"share", r.shares[i]}});
  }
  json j = {{"level", "AQ" + std::to_string(s.level)},
            {"view", s.view.label()},
            {"target", s.target},
            {"pattern", std::string(to_string(s.pattern))},
            {"pattern_name", std::string(describe(s.pattern))},
            {"note", s.note},
            {"mode", std::string(to_string(r.mode))},
            {"permutations", r.permutations},
            {"total", r.total},
            {"sampled_marginals", r.sampled_marginals},
            {"scores", scores},
            {"classification",
             {{"kind", std::string(to_string(r.classification.kind))}, {"nodes", r.classification.nodes}}}};
  j["branches"] = json::array();
  for (const auto& b : s.branches) j["branches"].push_back(branch_json(b));
  j["verdict"] = s.verdict ? verdict_json(*s.verdict) : json(nullptr);
  return j;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string general(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string verdict_text(const Verdict& v) {
  std::string s = std::string(to_string(v.kind));
  if (!v.node.empty()) s += " " + v.node;
  if (!v.note.empty()) s += " (" + v.note + ")";
  return s;
}

void render_step(std::ostringstream& out, const TraceStep& s, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out << indent << step_line(s) << "\n";
  if (!s.note.empty()) out << indent << "  note: " << s.note << "\n";
  if (s.verdict) out << indent << "  => " << verdict_text(*s.verdict) << "\n";
  const bool distributed = s.pattern == Pattern::DistributedBranch;
  for (const auto& b : s.branches) {
    int child = depth + 1;
    if (distributed) {
      out << indent << "  branch " << b.node << " pattern=" << to_string(b.pattern) << " share=" << fixed(b.share, 2)
          << (b.expanded ? "" : " (not expanded)") << "\n";
      child = depth + 2;
    }
    if (!distributed && !b.note.empty() && b.note != s.note) out << indent << "  note: " << b.note << "\n";
    if (b.verdict) out << std::string(static_cast<std::size_t>(child) * 2, ' ') << "=> " << verdict_text(*b.verdict) << "\n";
    for (const auto& n : b.next) render_step(out, n, child);
  }
}

}  // namespace

std::string step_line(const TraceStep& s) {
  std::string line = "AQ" + std::to_string(s.level) + " [" + s.view.label() + "] target=" + s.target +
                     " pattern=" + std::string(to_string(s.pattern));
  const int top = s.result.top();
  if (top >= 0) {
    line += " top=" + s.result.players[static_cast<std::size_t>(top)] +
            " share=" + fixed(s.result.shares[static_cast<std::size_t>(top)], 2);
  }
  return line;
}

std::string render_json(const ReportDocument& doc) {
  const auto& c = doc.config;
  json j;
  j["schema"] = doc.schema;
  j["map"] = doc.map_name;
  j["config"] = {{"bins", c.bins},
                 {"alpha", c.alpha},
                 {"tau", c.tau},
                 {"epsilon", c.epsilon},
                 {"permutations", c.permutations},
                 {"seed", c.seed},
                 {"mode", std::string(to_string(c.mode))},
                 {"divergence", std::string(to_string(c.divergence))},
                 {"eager_environment", c.eager_environment}};
  if (doc.detection) {
    json alerts = json::array();
    for (const auto& a : doc.detection->alerts) {
      alerts.push_back({{"node", a.node}, {"statistic", a.statistic}, {"p_value", a.p_value}});
    }
    json tests = json::array();
    for (const auto& t : doc.detection->tests) {
      tests.push_back({{"node", t.node},
                       {"statistic", t.statistic},
                       {"p_value", t.p_value},
                       {"ref_rows", t.ref_rows},
                       {"cur_rows", t.cur_rows}});
    }
    j["alerts"] = alerts;
    j["tests"] = tests;
    j["skipped"] = doc.detection->skipped;
  }
  if (doc.trace) {
    const auto& t = *doc.trace;
    json verdicts = json::array();
    for (const auto& v : t.verdicts) verdicts.push_back(verdict_json(v));
    j["trace"] = {{"alert", t.alert},
                  {"root", step_json(t.root)},
                  {"verdicts", verdicts},
                  {"excluded_environment", t.excluded_environment}};
  }
  j["warnings"] = doc.warnings;
  return j.dump(2) + "\n";
}

std::string render_text(const ReportDocument& doc) {
  std::ostringstream out;
  out << "map " << doc.map_name << "\n";
  if (doc.detection) {
    out << "alerts (alpha=" << general(doc.config.alpha) << ", B=" << doc.config.permutations << "):";
    if (doc.detection->alerts.empty()) out << " none";
    out << "\n";
    for (const auto& a : doc.detection->alerts) {
      out << "  " << a.node << " p=" << general(a.p_value) << " stat=" << general(a.statistic) << "\n";
    }
  }
  if (doc.trace) {
    const auto& t = *doc.trace;
    out << "trace " << t.alert << "\n";
    render_step(out, t.root, 1);
    out << "verdicts:\n";
    for (const auto& v : t.verdicts) out << "  " << verdict_text(v) << "\n";
    if (!t.excluded_environment.empty()) {
      out << "excluded environment nodes:";
      for (const auto& e : t.excluded_environment) out << " " << e;
      out << "\n";
    }
  }
  for (const auto& w : doc.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace msm
