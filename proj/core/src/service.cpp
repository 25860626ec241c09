#include "planettt/service.hpp"

#include <cstdlib>
#include <list>
#include <mutex>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "planettt/plane_io.hpp"
#include "planettt/record.hpp"
#include "planettt/solver.hpp"
#include "planettt/strategy.hpp"

namespace planettt {

namespace {

using json = nlohmann::json;

enum class Engine { kTableStrategy, kSolver };

struct ApiError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw ApiError{status, std::move(code), std::move(message)};
}

const char* side_name(Player p) { return p == Player::kXeno ? "xeno" : "ophelia"; }

const char* status_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::kOngoing:
      return "ongoing";
    case Outcome::Kind::kXenoWin:
      return "xeno_win";
    case Outcome::Kind::kOpheliaWin:
      return "ophelia_win";
    case Outcome::Kind::kDraw:
      return "draw";
  }
  return "?";
}

struct Session {
  std::mutex mu;
  std::string id;
  Engine engine = Engine::kSolver;
  Player human = Player::kOphelia;
  GameState state;
  std::optional<LabelingState> labeling;
  std::optional<PointId> last_engine_move;

  explicit Session(GameState s) : state(std::move(s)) {}
};

std::string join_names(const PositionalGame& game, const std::vector<PointId>& points) {
  std::string out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) out += i + 1 == points.size() ? " and " : ", ";
    out += game.point_name(points[i]);
  }
  return out;
}

json names(const PositionalGame& game, const std::vector<PointId>& points) {
  json out = json::array();
  for (PointId p : points) out.push_back(game.point_name(p));
  return out;
}

json threats_json(const GameState& state, Player p) {
  json out = json::array();
  for (const auto& t : threats(state, p)) {
    out.push_back({{"line", t.line}, {"missing", state.game().point_name(t.missing)}});
  }
  return out;
}

std::string message_for(const Session& s) {
  const GameState& st = s.state;
  const auto& game = st.game();
  const Outcome outcome = winner(st);
  if (outcome.terminal()) {
    if (outcome.kind == Outcome::Kind::kDraw) return "the game is drawn";
    const std::string who = outcome.kind == Outcome::Kind::kXenoWin ? "Xeno" : "Ophelia";
    return who + " wins with " + join_names(game, game.lines()[*outcome.line]);
  }
  if (st.to_move() != s.human) return "";
  const auto forced = forced_moves(st, s.human);
  if (forced.empty()) return "";
  if (forced.size() == 1) return "your only non-losing reply is " + game.point_name(forced.front());
  return std::string(to_string(opponent(s.human))) + " threatens " + join_names(game, forced) +
         "; every reply loses";
}

json session_json(const Session& s) {
  const GameState& st = s.state;
  const auto& game = st.game();
  const Outcome outcome = winner(st);
  json points = json::array();
  for (PointId p = 0; p < game.num_points(); ++p) {
    json owner = nullptr;
    if (st.x_mask() & bit(p)) owner = "xeno";
    if (st.o_mask() & bit(p)) owner = "ophelia";
    points.push_back({{"name", game.point_name(p)}, {"owner", owner}});
  }
  json lines = json::array();
  for (const auto& line : game.lines()) lines.push_back(names(game, line));
  json out = {
      {"id", s.id},
      {"engine", s.engine == Engine::kTableStrategy ? "paper_strategy" : "solver"},
      {"human_side", side_name(s.human)},
      {"status", status_name(outcome.kind)},
      {"to_move", outcome.terminal() ? json(nullptr) : json(side_name(st.to_move()))},
      {"ply", st.ply()},
      {"winning_line", outcome.line ? names(game, game.lines()[*outcome.line]) : json(nullptr)},
      {"points", points},
      {"lines", lines},
      {"threats", {{"xeno", threats_json(st, Player::kXeno)}, {"ophelia", threats_json(st, Player::kOphelia)}}},
      {"forced_moves", outcome.terminal() ? json::array() : names(game, forced_moves(st, st.to_move()))},
      {"message", message_for(s)},
      {"record", format_record(record_from_history(st))},
      {"last_engine_move", s.last_engine_move ? json(game.point_name(*s.last_engine_move)) : json(nullptr)},
  };
  return out;
}

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump(2) + "\n"}; }

HttpResponse error_response(const ApiError& e) {
  return json_response(e.status, {{"error", {{"code", e.code}, {"message", e.message}}}});
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) fail(400, "bad_request", "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    fail(400, "bad_request", std::string("invalid JSON: ") + e.what());
  }
}

std::string string_field(const json& j, const char* key, std::optional<std::string> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    fail(400, "bad_request", std::string("missing field '") + key + "'");
  }
  if (!j[key].is_string()) fail(400, "bad_request", std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

std::vector<std::string> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return parts;
}

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  std::shared_ptr<const PositionalGame> game = PositionalGame::from_plane(canonical_pi4(), "pi4");
  XenoStrategy strategy{canonical_pi4()};

  std::mutex solver_mu;
  Solver solver{game};

  mutable std::mutex store_mu;
  std::list<std::string> recency;  // front: most recent
  struct Entry {
    std::shared_ptr<Session> session;
    std::list<std::string>::iterator pos;
  };
  std::unordered_map<std::string, Entry> sessions;
  std::mt19937_64 rng;

  explicit Impl(ServiceConfig c) : config(c), rng(c.seed ? c.seed : std::random_device{}()) {
    if (config.capacity == 0) config.capacity = 1;
  }

  std::string new_id() {
    static const char* hex = "0123456789abcdef";
    for (;;) {
      std::uint64_t v = rng();
      std::string id(16, '0');
      for (int i = 15; i >= 0; --i, v >>= 4) id[i] = hex[v & 15];
      if (!sessions.contains(id)) return id;
    }
  }

  void store(const std::shared_ptr<Session>& s) {
    std::lock_guard lock(store_mu);
    s->id = new_id();
    while (sessions.size() >= config.capacity) {
      sessions.erase(recency.back());
      recency.pop_back();
    }
    recency.push_front(s->id);
    sessions[s->id] = {s, recency.begin()};
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(store_mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) fail(404, "not_found", "no game '" + id + "'");
    recency.splice(recency.begin(), recency, it->second.pos);
    return it->second.session;
  }

  PointId engine_move(Session& s) {
    const GameState& st = s.state;
    if (s.engine == Engine::kTableStrategy) {
      auto [p, lab] = strategy.next_move(*s.labeling, st);
      s.labeling = std::move(lab);
      return p;
    }
    const auto wins = winning_moves(st, st.to_move());
    if (!wins.empty()) return wins.front();
    std::lock_guard lock(solver_mu);
    return solver.most_resistant_move(st).first;
  }

  void advance_engine(Session& s) {
    while (!winner(s.state).terminal() && s.state.to_move() != s.human) {
      const PointId p = engine_move(s);
      s.state = s.state.apply_move(p);
      s.last_engine_move = p;
    }
  }

  HttpResponse create(std::string_view body) {
    const json req = parse_body(body);
    const std::string engine = string_field(req, "engine", "paper_strategy");
    const std::string side = string_field(req, "human_side", "ophelia");
    auto s = std::make_shared<Session>(GameState(game));
    if (engine == "paper_strategy") {
      s->engine = Engine::kTableStrategy;
    } else if (engine == "solver") {
      s->engine = Engine::kSolver;
    } else {
      fail(400, "bad_request", "engine must be paper_strategy or solver");
    }
    if (side == "xeno") {
      s->human = Player::kXeno;
    } else if (side == "ophelia") {
      s->human = Player::kOphelia;
    } else {
      fail(400, "bad_request", "human_side must be xeno or ophelia");
    }
    if (s->engine == Engine::kTableStrategy && s->human == Player::kXeno) {
      fail(422, "unsupported", "the table strategy only plays Xeno; choose human_side ophelia or the solver engine");
    }
    if (req.contains("record")) {
      const std::string text = string_field(req, "record");
      try {
        s->state = replay_record(parse_record(text), s->state);
      } catch (const RecordError& e) {
        fail(422, "illegal_move", std::string("record rejected: ") + e.what());
      }
    }
    if (s->engine == Engine::kTableStrategy) {
      try {
        s->labeling = strategy.labeling_for(s->state);
      } catch (const StrategyError& e) {
        fail(422, "unsupported", std::string("record leaves the strategy: ") + e.what());
      }
    }
    advance_engine(*s);
    store(s);
    return json_response(201, session_json(*s));
  }

  HttpResponse get(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return json_response(200, session_json(*s));
  }

  HttpResponse move(const std::string& id, std::string_view body) {
    const json req = parse_body(body);
    const std::string name = string_field(req, "point");
    auto s = find(id);
    std::lock_guard lock(s->mu);
    if (req.contains("ply")) {
      if (!req["ply"].is_number_unsigned()) fail(400, "bad_request", "field 'ply' must be a non-negative integer");
      if (req["ply"].get<std::size_t>() != s->state.ply()) {
        fail(409, "conflict", "the game is at ply " + std::to_string(s->state.ply()));
      }
    }
    if (winner(s->state).terminal()) fail(409, "conflict", "the game is over");
    if (s->state.to_move() != s->human) fail(409, "conflict", "it is the engine's turn");
    const auto p = game->find_point(name);
    if (!p) fail(422, "illegal_move", "'" + name + "' is not a point");
    if (!s->state.is_empty(*p)) fail(422, "illegal_move", "'" + name + "' is already taken");
    s->state = s->state.apply_move(*p);
    s->last_engine_move.reset();
    advance_engine(*s);
    return json_response(200, session_json(*s));
  }

  HttpResponse hint(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    const GameState& st = s->state;
    if (winner(st).terminal()) fail(409, "conflict", "the game is over");
    if (st.to_move() != s->human) fail(409, "conflict", "it is the engine's turn");
    json out;
    auto answer = [&](PointId p, const char* tag) {
      out["point"] = game->point_name(p);
      out["tag"] = tag;
    };
    const auto wins = winning_moves(st, s->human);
    const auto forced = forced_moves(st, s->human);
    std::optional<PointId> table;
    if (wins.empty() && forced.empty() && s->human == Player::kXeno) {
      try {
        table = strategy.next_move(strategy.labeling_for(st), st).first;
      } catch (const StrategyError&) {
      }
    }
    if (!wins.empty()) {
      answer(wins.front(), "immediate_win");
    } else if (!forced.empty()) {
      answer(forced.front(), "forced_block");
    } else if (table) {
      answer(*table, "table_move");
    } else {
      std::lock_guard solver_lock(solver_mu);
      const auto [p, score] = solver.most_resistant_move(st);
      answer(p, "solver_best");
      out["score"] = score;
    }
    return json_response(200, out);
  }

  HttpResponse record(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return {200, "text/plain", format_record(record_from_history(s->state))};
  }

  HttpResponse route(std::string_view method, std::string_view path, std::string_view body) {
    const auto parts = split_path(path);
    auto allow = [&](const char* want) {
      if (method != want) fail(405, "method_not_allowed", std::string(method) + " is not supported here");
    };
    if (parts.size() >= 2 && parts[0] == "v1") {
      if (parts.size() == 2 && parts[1] == "plane") {
        allow("GET");
        return {200, "application/json", write_plane_json(canonical_pi4())};
      }
      if (parts[1] == "games") {
        if (parts.size() == 2) {
          allow("POST");
          return create(body);
        }
        if (parts.size() == 3) {
          allow("GET");
          return get(parts[2]);
        }
        if (parts.size() == 4 && parts[3] == "moves") {
          allow("POST");
          return move(parts[2], body);
        }
        if (parts.size() == 4 && parts[3] == "hint") {
          allow("GET");
          return hint(parts[2]);
        }
        if (parts.size() == 4 && parts[3] == "record") {
          allow("GET");
          return record(parts[2]);
        }
      }
    }
    fail(404, "not_found", "no route for " + std::string(path));
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(config)) {}
Service::~Service() = default;

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    return impl_->route(method, path, body);
  } catch (const ApiError& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return error_response({500, "internal", e.what()});
  }
}

std::size_t Service::session_count() const {
  std::lock_guard lock(impl_->store_mu);
  return impl_->sessions.size();
}

std::size_t Service::capacity() const { return impl_->config.capacity; }

std::pair<std::string, int> default_bind() {
  std::string spec = "127.0.0.1:8080";
  if (const char* env = std::getenv("PLANETTT_BIND"); env && *env) spec = env;
  const auto colon = spec.rfind(':');
  if (colon == std::string::npos) return {spec, 8080};
  try {
    return {spec.substr(0, colon), std::stoi(spec.substr(colon + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("PLANETTT_BIND must look like host:port, got '" + spec + "'");
  }
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      const HttpResponse r = service.handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
    server.Patch(".*", handler);
    server.set_payload_max_length(1 << 16);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::wait_until_ready() { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace planettt
