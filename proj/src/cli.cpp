#include "msm/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "msm/format.hpp"
#include "msm/report.hpp"
#include "msm/simulator.hpp"

namespace msm::cli {

namespace {

struct Options {
  std::string map_path;
  std::string data_path;
  std::string alert;
  std::string format = "text";
  std::string out_path;
  std::string mode = "auto";
  std::string divergence = "jsd";
  int bins = 8;
  double alpha = 0.01;
  double tau = 0.5;
  double epsilon = 1e-3;
  int permutations = 1000;
  std::uint64_t seed = 0;
  bool eager = false;
  // simulate
  std::string scenario = "S0";
  std::size_t n = 5000;
  std::string out_data;
  std::string out_map;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
  } else {
    write_file(o.out_path, text);
  }
}

ReportConfig echo(const Options& o) {
  ReportConfig c;
  c.bins = o.bins;
  c.alpha = o.alpha;
  c.tau = o.tau;
  c.epsilon = o.epsilon;
  c.permutations = o.permutations;
  c.seed = o.seed;
  c.mode = shapley_mode_from_string(o.mode);
  c.divergence = divergence_from_string(o.divergence);
  c.eager_environment = o.eager;
  return c;
}

std::string render(const Options& o, const ReportDocument& doc) {
  return o.format == "json" ? render_json(doc) : render_text(doc);
}

int cmd_validate(const Options& o, std::ostream& out) {
  const SystemMap map = load_map_file(o.map_path);
  out << "ok: map " << map.name() << " (" << map.nodes().size() << " nodes, " << map.relations().size()
      << " relations, " << map.views().size() << " views)\n";
  return 0;
}

int cmd_detect(const Options& o, std::ostream& out) {
  const SystemMap map = load_map_file(o.map_path);
  const WindowedDataset ds = load_csv_file(map, o.data_path);
  ReportDocument doc;
  doc.map_name = map.name();
  doc.config = echo(o);
  DetectOptions d;
  d.alpha = o.alpha;
  d.permutations = o.permutations;
  d.bins = o.bins;
  d.seed = o.seed;
  d.divergence = doc.config.divergence;
  doc.detection = detect(map, ds, d);
  doc.warnings = ds.warnings();
  for (const auto& s : doc.detection->skipped) doc.warnings.push_back("not tested (insufficient data): " + s);
  emit(o, render(o, doc), out);
  return 0;
}

int cmd_trace(const Options& o, std::ostream& out) {
  const SystemMap map = load_map_file(o.map_path);
  const WindowedDataset ds = load_csv_file(map, o.data_path);
  ReportDocument doc;
  doc.map_name = map.name();
  doc.config = echo(o);
  TraceConfig t;
  t.bins = o.bins;
  t.tau = o.tau;
  t.epsilon = o.epsilon;
  t.mode = doc.config.mode;
  t.permutations = o.permutations;
  t.seed = o.seed;
  t.eager_environment = o.eager;
  t.divergence = doc.config.divergence;
  doc.trace = trace(map, ds, o.alert, t);
  doc.warnings = ds.warnings();
  for (const auto& e : doc.trace->excluded_environment) {
    doc.warnings.push_back("environment node without data (possible hidden variable): " + e);
  }
  for (const auto& w : doc.trace->warnings) doc.warnings.push_back(w);
  emit(o, render(o, doc), out);
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  ScenarioConfig c;
  c.scenario = o.scenario;
  c.n = o.n;
  c.seed = o.seed;
  const Simulation sim = generate(c);
  if (o.out_data.empty()) {
    out << sim.csv;
  } else {
    write_file(o.out_data, sim.csv);
  }
  if (!o.out_map.empty()) write_file(o.out_map, std::string(churn_map_text()));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ML system maps: validate, detect shifts, trace them to a source"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check a .msm map file");
  validate->add_option("map", o.map_path, "Map file")->required();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("map", o.map_path, "Map file")->required();
    cmd->add_option("data", o.data_path, "CSV with a window column")->required();
    cmd->add_option("--bins", o.bins, "Quantile bins per numeric variable")->check(CLI::Range(2, 1000));
    cmd->add_option("--permutations", o.permutations, "Permutations (shift test / sampled Shapley)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--divergence", o.divergence, "jsd or tv")->check(CLI::IsMember({"jsd", "tv"}));
    cmd->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out", o.out_path, "Write the report here instead of stdout");
  };

  auto* det = app.add_subcommand("detect", "Permutation shift tests on ML system variables");
  add_common(det);
  det->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));

  auto* tr = app.add_subcommand("trace", "Trace one alert from symptom to source");
  add_common(tr);
  tr->add_option("--alert", o.alert, "ML system data variable")->required();
  tr->add_option("--tau", o.tau, "Concentration threshold")->check(CLI::Range(0.0, 1.0));
  tr->add_option("--epsilon", o.epsilon, "Negligible total divergence")->check(CLI::NonNegativeNumber);
  tr->add_option("--mode", o.mode, "auto, exact or sampled")->check(CLI::IsMember({"auto", "exact", "sampled"}));
  tr->add_flag("--eager-environment", o.eager, "Open the environment view on AP1.2 as well");

  auto* sim = app.add_subcommand("simulate", "Generate churn example data");
  sim->add_option("--scenario", o.scenario, "S0..S6");
  sim->add_option("--n", o.n, "Rows per window")->check(CLI::PositiveNumber);
  sim->add_option("--seed", o.seed, "Random seed");
  sim->add_option("--out-data", o.out_data, "CSV path (stdout if omitted)");
  sim->add_option("--out-map", o.out_map, "Where to write churn.msm");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*validate) return cmd_validate(o, out);
    if (*det) return cmd_detect(o, out);
    if (*tr) return cmd_trace(o, out);
    if (*sim) return cmd_simulate(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? 2 : 1;
  }
  return 2;
}

}  // namespace msm::cli
