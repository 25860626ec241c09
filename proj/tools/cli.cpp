#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "planettt/plane_io.hpp"
#include "planettt/record.hpp"
#include "planettt/service.hpp"
#include "planettt/solver.hpp"
#include "planettt/strategy.hpp"

namespace planettt::cli {

namespace {

using json = nlohmann::json;

// Bad input data (unreadable file, malformed plane or record): exit 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flag combinations CLI11 cannot express: exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool builtin_plane_name(const std::string& spec) {
  return spec == "pi2" || spec == "pi3" || spec == "pi4" || spec == "pi5" || spec == "pi7";
}

AffinePlane load_plane(const std::string& spec) {
  if (spec == "pi4") return canonical_pi4();
  if (builtin_plane_name(spec)) return affine_plane_prime(spec[2] - '0');
  try {
    return read_plane(read_file(spec));
  } catch (const DesignError& e) {
    throw InputError(spec + ": " + e.what());
  }
}

std::string line_text(const PositionalGame& game, std::size_t line) {
  std::string out = "{";
  for (std::size_t i = 0; i < game.lines()[line].size(); ++i) {
    if (i) out += ",";
    out += game.point_name(game.lines()[line][i]);
  }
  return out + "}";
}

std::string pv_text(const GameState& start, const std::vector<PointId>& pv) {
  GameState end = start;
  for (PointId p : pv) end = end.apply_move(p);
  return format_record(record_from_history(end, start.ply()));
}

struct Options {
  std::string format = "text";

  std::string build_from = "mols";
  std::string build_emit = "plane";
  int build_order = 4;

  std::string validate_source;

  std::string plane = "pi4";
  bool symmetry = false;
  bool no_symmetry = false;
  int symmetry_depth = 6;
  std::string from_file;
  std::string record_text;
  bool projective = false;
  bool stretch = false;

  std::optional<std::uint64_t> relabel_seed;
  std::string tables_file;

  std::string replay_file;

  std::string bind;
};

void emit(std::ostream& out, const Options& o, const json& doc, const std::string& text) {
  if (o.format == "json") {
    out << doc.dump(2) << "\n";
  } else {
    out << text;
  }
}

int cmd_plane_build(const Options& o, std::ostream& out) {
  const bool json_out = o.format == "json";
  if (o.build_from == "field") {
    if (o.build_emit != "plane") throw UsageError("--from field only builds planes");
    try {
      const AffinePlane plane = affine_plane_prime(o.build_order);
      out << (json_out ? write_plane_json(plane) : write_plane_text(plane));
    } catch (const DesignError& e) {
      throw InputError(e.what());
    }
    return kOk;
  }
  MolsSet mols;
  try {
    mols = o.build_order == 4 ? canonical_mols() : prime_mols(o.build_order);
  } catch (const DesignError& e) {
    throw InputError("no MOLS construction for order " + std::to_string(o.build_order) + ": " + e.what());
  }
  try {
    if (o.build_emit == "mols") {
      out << (json_out ? write_mols_json(mols) : write_mols_text(mols));
    } else if (o.build_emit == "td") {
      const auto td = mols_to_transversal_design(mols);
      out << (json_out ? write_transversal_design_json(td) : write_transversal_design_text(td));
    } else if (o.build_emit == "rtd") {
      const auto rtd = resolve_by_last_square(mols);
      out << (json_out ? write_transversal_design_json(rtd) : write_transversal_design_text(rtd));
    } else {
      const AffinePlane plane = build_affine_plane(resolve_by_last_square(mols));
      out << (json_out ? write_plane_json(plane) : write_plane_text(plane));
    }
  } catch (const DesignError& e) {
    throw InputError(e.what());
  }
  return kOk;
}

int cmd_plane_validate(const Options& o, std::ostream& out) {
  const AffinePlane plane = load_plane(o.validate_source);
  const PlaneReport report = validate_plane(plane);
  json violations = json::array();
  std::string text;
  for (const auto& v : report.violations) {
    violations.push_back({{"kind", to_string(v.kind)}, {"witness", v.witness}});
    text += std::string("violation: ") + to_string(v.kind) + " " + v.witness + "\n";
  }
  const json doc = {{"ok", report.ok()},
                    {"points", plane.num_points()},
                    {"lines", plane.lines.size()},
                    {"parallel_classes", plane.classes.size()},
                    {"violations", violations}};
  const std::string counts = std::to_string(plane.num_points()) + " points, " + std::to_string(plane.lines.size()) +
                             " lines, " + std::to_string(plane.classes.size()) + " parallel classes";
  text = (report.ok() ? "ok: " : "invalid: ") + counts + "\n" + text;
  emit(out, o, doc, text);
  return report.ok() ? kOk : kFailed;
}

int cmd_solve(const Options& o, std::ostream& out) {
  std::shared_ptr<const PositionalGame> game;
  if (o.plane == "ttt3") {
    if (o.projective) throw UsageError("--projective needs an affine plane");
    game = PositionalGame::tic_tac_toe();
  } else {
    const AffinePlane plane = load_plane(o.plane);
    const std::string name = builtin_plane_name(o.plane) ? o.plane : "plane";
    if (o.projective) {
      if (plane.order >= 4 && !o.stretch) {
        throw UsageError("the projective plane of order 4 or more is gated behind --stretch");
      }
      game = PositionalGame::projective_closure(plane);
    } else {
      game = PositionalGame::from_plane(plane, name);
    }
  }
  GameState start(game);
  std::string start_text;
  if (!o.from_file.empty() || !o.record_text.empty()) {
    start_text = o.from_file.empty() ? o.record_text : read_file(o.from_file);
    try {
      start = replay_record(parse_record(start_text), start);
    } catch (const RecordError& e) {
      throw InputError(std::string("start position: ") + e.what());
    }
  }
  SolveOptions options;
  options.use_symmetry = o.symmetry;
  options.symmetry_depth = o.symmetry_depth;
  const auto t0 = std::chrono::steady_clock::now();
  const GameValue v = solve(game, start, options);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const std::string start_record = format_record(record_from_history(start));
  const std::string pv = pv_text(start, v.principal_variation);
  const json doc = {{"game", game->name()},
                    {"points", game->num_points()},
                    {"lines", game->lines().size()},
                    {"start", start_record},
                    {"symmetry", o.symmetry},
                    {"value", to_string(v.value)},
                    {"pv", pv},
                    {"nodes", v.stats.nodes},
                    {"table_hits", v.stats.table_hits},
                    {"time_ms", ms}};
  std::ostringstream text;
  text << "game: " << game->name() << " (" << game->num_points() << " points, " << game->lines().size()
       << " lines)\n";
  text << "start: " << (start_record.empty() ? "empty board" : start_record) << "\n";
  text << "symmetry: " << (o.symmetry ? "on" : "off") << "\n";
  text << "value: " << to_string(v.value) << "\n";
  text << "pv: " << pv << "\n";
  text << "nodes: " << v.stats.nodes << "\n";
  text << "table_hits: " << v.stats.table_hits << "\n";
  text << "time: " << std::fixed << std::setprecision(1) << ms << " ms\n";
  emit(out, o, doc, text.str());
  return kOk;
}

int cmd_verify_strategy(const Options& o, std::ostream& out) {
  AffinePlane plane = load_plane(o.plane);
  if (o.relabel_seed) plane = random_relabeling(plane, *o.relabel_seed);
  StrategyTables tables;
  if (o.tables_file.empty()) {
    tables = builtin_tables();
  } else {
    try {
      tables = parse_tables(read_file(o.tables_file));
    } catch (const StrategyError& e) {
      throw InputError(o.tables_file + ": " + e.what());
    }
  }
  VerificationReport r;
  try {
    r = verify_strategy(plane, tables);
  } catch (const StrategyError& e) {
    throw InputError(e.what());
  }
  json lengths = json::object();
  std::string lengths_text;
  for (const auto& [len, count] : r.length_histogram) {
    lengths[std::to_string(len)] = count;
    lengths_text += " " + std::to_string(len) + ":" + std::to_string(count);
  }
  const json doc = {{"plane", o.plane},
                    {"relabel_seed", o.relabel_seed ? json(*o.relabel_seed) : json(nullptr)},
                    {"ok", r.ok()},
                    {"leaves", r.leaves},
                    {"xeno_wins", r.xeno_wins},
                    {"ophelia_wins", r.ophelia_wins},
                    {"draws", r.draws},
                    {"protocol_failures", r.protocol_failures},
                    {"decision_points", r.decision_points},
                    {"max_length", r.max_length},
                    {"length_histogram", lengths},
                    {"refutation", r.refutation ? json(*r.refutation) : json(nullptr)}};
  std::ostringstream text;
  text << "plane: " << o.plane;
  if (o.relabel_seed) text << " (relabeled, seed " << *o.relabel_seed << ")";
  text << "\n";
  text << "leaves: " << r.leaves << "\n";
  text << "xeno_wins: " << r.xeno_wins << "\n";
  text << "ophelia_wins: " << r.ophelia_wins << "\n";
  text << "draws: " << r.draws << "\n";
  text << "protocol_failures: " << r.protocol_failures << "\n";
  text << "decision_points: " << r.decision_points << "\n";
  text << "max_length: " << r.max_length << "\n";
  text << "length_histogram:" << lengths_text << "\n";
  if (r.refutation) text << "refutation: " << *r.refutation << "\n";
  text << "result: " << (r.ok() ? "every playout is a Xeno win" : "FAILED") << "\n";
  emit(out, o, doc, text.str());
  return r.ok() ? kOk : kFailed;
}

int cmd_replay(const Options& o, std::ostream& out) {
  const AffinePlane plane = load_plane(o.plane);
  const auto game = PositionalGame::from_plane(plane, builtin_plane_name(o.plane) ? o.plane : "plane");
  const std::string source = o.replay_file.empty() ? o.record_text : read_file(o.replay_file);
  GameRecord record;
  GameState end(game);
  try {
    record = parse_record(source);
    end = replay_record(record, end);
  } catch (const RecordError& e) {
    throw InputError(e.what());
  }
  const Outcome outcome = winner(end);
  std::string outcome_text = to_string(outcome.kind);
  if (outcome.line) outcome_text += " " + line_text(*game, *outcome.line);
  json doc = {{"moves", end.ply()},
              {"record", format_record(record)},
              {"outcome", to_string(outcome.kind)},
              {"line", outcome.line ? json(line_text(*game, *outcome.line)) : json(nullptr)},
              {"double_threat", nullptr}};
  if (record.double_threat) {
    const std::string xw = "XW(" + record.double_threat->first + "," + record.double_threat->second + ")";
    outcome_text += ", Xeno double threat " + xw;
    doc["double_threat"] = xw;
  }
  std::ostringstream text;
  text << "moves: " << end.ply() << "\n";
  text << "record: " << format_record(record) << "\n";
  text << "outcome: " << outcome_text << "\n";
  emit(out, o, doc, text.str());
  return kOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  auto [host, port] = default_bind();
  if (!o.bind.empty()) {
    const auto colon = o.bind.rfind(':');
    if (colon == std::string::npos) throw UsageError("--bind must look like host:port");
    host = o.bind.substr(0, colon);
    try {
      port = std::stoi(o.bind.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("--bind must look like host:port");
    }
  }
  Service service;
  HttpServer server(service);
  const int bound = server.bind(host, port);
  out << "serving on http://" << host << ":" << bound << "\n" << std::flush;
  server.listen();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tic-tac-toe on finite affine planes", "planettt"};
  app.set_version_flag("--version", "planettt 0.1.0");
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* plane = app.add_subcommand("plane", "Build or validate affine planes");
  plane->require_subcommand(1, 1);
  auto* build = plane->add_subcommand("build", "Construct a plane, its MOLS, or its transversal designs");
  build->add_option("--order", o.build_order, "Order of the plane")->required();
  build->add_option("--from", o.build_from, "Construction")->check(CLI::IsMember({"mols", "field"}));
  build->add_option("--emit", o.build_emit, "What to print")->check(CLI::IsMember({"plane", "mols", "td", "rtd"}));
  auto* validate = plane->add_subcommand("validate", "Check the affine plane axioms");
  validate->add_option("source", o.validate_source, "pi2|pi3|pi4|pi5|pi7 or a plane file")->required();

  auto* solve_cmd = app.add_subcommand("solve", "Compute the game value by exhaustive search");
  solve_cmd->add_option("--plane", o.plane, "pi2|pi3|pi4|pi5|pi7|ttt3 or a plane file");
  auto* sym = solve_cmd->add_flag("--symmetry", o.symmetry, "Canonicalize shallow positions under automorphisms");
  auto* nosym = solve_cmd->add_flag("--no-symmetry", o.no_symmetry, "Search without symmetry reduction");
  sym->excludes(nosym);
  solve_cmd->add_option("--symmetry-depth", o.symmetry_depth, "Canonicalize positions up to this many moves")
      ->check(CLI::Range(0, 64));
  auto* from = solve_cmd->add_option("--from", o.from_file, "Start from the position in a record file");
  auto* rec = solve_cmd->add_option("--record", o.record_text, "Start from an inline record");
  from->excludes(rec);
  solve_cmd->add_flag("--projective", o.projective, "Play on the projective closure of the plane");
  solve_cmd->add_flag("--stretch", o.stretch, "Allow the projective plane of order 4");

  auto* verify = app.add_subcommand("verify-strategy", "Check the Xeno strategy against every Ophelia reply");
  verify->add_option("--plane", o.plane, "pi4 or a plane file of order 4");
  verify->add_option("--relabel-seed", o.relabel_seed, "Shuffle the point ids first");
  verify->add_option("--tables", o.tables_file, "Strategy tables file (default: built in)");

  auto* replay = app.add_subcommand("replay", "Replay a game record and report the outcome");
  auto* replay_file = replay->add_option("record-file", o.replay_file, "Record file");
  auto* replay_inline = replay->add_option("--record", o.record_text, "Inline record");
  replay_file->excludes(replay_inline);
  replay->add_option("--plane", o.plane, "pi2|pi3|pi4|pi5|pi7 or a plane file");

  auto* serve = app.add_subcommand("serve", "Run the HTTP play service");
  serve->add_option("--bind", o.bind, "host:port (default from PLANETTT_BIND or 127.0.0.1:8080)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (replay->parsed() && o.replay_file.empty() && o.record_text.empty()) {
      throw CLI::RequiredError("replay needs a record file or --record");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (build->parsed()) return cmd_plane_build(o, out);
    if (validate->parsed()) return cmd_plane_validate(o, out);
    if (solve_cmd->parsed()) return cmd_solve(o, out);
    if (verify->parsed()) return cmd_verify_strategy(o, out);
    if (replay->parsed()) return cmd_replay(o, out);
    if (serve->parsed()) return cmd_serve(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  }
  err << app.help();
  return kUsage;
}

}  // namespace planettt::cli
