#include <gtest/gtest.h>

#include <httplib.h>

#include <json.hpp>
#include <random>
#include <thread>

#include "planettt/service.hpp"

using namespace planettt;
using nlohmann::json;

namespace {

struct Reply {
  int status;
  json body;
};

Reply call(Service& svc, const char* method, const std::string& path, const json& body = json::object()) {
  const HttpResponse r = svc.handle(method, path, body.dump());
  if (r.content_type != "application/json") return {r.status, json(r.body)};
  return {r.status, json::parse(r.body)};
}

std::string create(Service& svc, const json& body = json::object()) {
  const Reply r = call(svc, "POST", "/v1/games", body);
  EXPECT_EQ(r.status, 201) << r.body.dump();
  return r.body.value("id", "");
}

std::vector<std::string> empty_points(const json& game) {
  std::vector<std::string> out;
  for (const auto& p : game["points"]) {
    if (p["owner"].is_null()) out.push_back(p["name"]);
  }
  return out;
}

}  // namespace

TEST(Service, StrategyOpensWithR1) {
  Service svc({8, 1});
  const std::string id = create(svc);
  const Reply r = call(svc, "GET", "/v1/games/" + id);
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["engine"], "paper_strategy");
  EXPECT_EQ(r.body["human_side"], "ophelia");
  EXPECT_EQ(r.body["status"], "ongoing");
  EXPECT_EQ(r.body["ply"], 1);
  EXPECT_EQ(r.body["to_move"], "ophelia");
  EXPECT_EQ(r.body["last_engine_move"], "r1");
  EXPECT_EQ(r.body["record"], "r1");
  EXPECT_EQ(r.body["points"].size(), 16u);
  EXPECT_EQ(r.body["lines"].size(), 20u);
}

TEST(Service, IntroGameThroughMoves) {
  Service svc({8, 2});
  const std::string id = create(svc);
  const std::string path = "/v1/games/" + id + "/moves";
  EXPECT_EQ(call(svc, "POST", path, {{"point", "r2"}, {"ply", 1}}).body["last_engine_move"], "r3");
  EXPECT_EQ(call(svc, "POST", path, {{"point", "c1"}}).body["last_engine_move"], "a2");
  EXPECT_EQ(call(svc, "POST", path, {{"point", "r4"}}).body["last_engine_move"], "c2");
  Reply r = call(svc, "GET", "/v1/games/" + id);
  EXPECT_EQ(r.body["forced_moves"], json::array({"b2"}));
  EXPECT_NE(r.body["message"].get<std::string>().find("b2"), std::string::npos);
  EXPECT_EQ(call(svc, "POST", path, {{"point", "b2"}}).body["last_engine_move"], "a4");
  EXPECT_EQ(call(svc, "POST", path, {{"point", "b1"}}).body["last_engine_move"], "c4");
  r = call(svc, "GET", "/v1/games/" + id);
  EXPECT_EQ(r.body["threats"]["xeno"].size(), 2u);
  r = call(svc, "POST", path, {{"point", "b3"}});
  EXPECT_EQ(r.body["status"], "xeno_win");
  EXPECT_EQ(r.body["winning_line"], json::array({"r1", "c4", "a4", "b4"}));
  const HttpResponse rec = svc.handle("GET", "/v1/games/" + id + "/record", "");
  EXPECT_EQ(rec.content_type, "text/plain");
  EXPECT_EQ(rec.body, "r1, (r2), r3, (c1), a2, (r4), c2, (!b2), a4, (!b1), c4, (!b3), b4");
}

TEST(Service, ErrorsAreTyped) {
  Service svc({8, 3});
  const std::string id = create(svc);
  const std::string moves = "/v1/games/" + id + "/moves";
  auto code = [](const Reply& r) { return r.body["error"]["code"].get<std::string>(); };
  Reply r = call(svc, "POST", moves, {{"point", "r1"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(code(r), "illegal_move");
  r = call(svc, "POST", moves, {{"point", "zz"}});
  EXPECT_EQ(code(r), "illegal_move");
  r = call(svc, "POST", moves, {{"point", "r2"}, {"ply", 5}});
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(code(r), "conflict");
  r = call(svc, "POST", moves, {{"ply", 1}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(code(r), "bad_request");
  EXPECT_EQ(svc.handle("POST", moves, "{oops").status, 400);
  r = call(svc, "GET", "/v1/games/ffffffffffffffff");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(code(r), "not_found");
  r = call(svc, "DELETE", "/v1/games/" + id);
  EXPECT_EQ(r.status, 405);
  EXPECT_EQ(code(r), "method_not_allowed");
  EXPECT_EQ(call(svc, "GET", "/nope").status, 404);
  r = call(svc, "POST", "/v1/games", {{"engine", "paper_strategy"}, {"human_side", "xeno"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(code(r), "unsupported");
  EXPECT_EQ(call(svc, "POST", "/v1/games", {{"engine", "minimax"}}).status, 400);
  EXPECT_EQ(call(svc, "POST", "/v1/games", {{"human_side", "both"}}).status, 400);
}

TEST(Service, RecordImportAndReplay) {
  Service svc({8, 4});
  Reply r = call(svc, "POST", "/v1/games", {{"record", "r1, (r2), r3, (c1)"}});
  ASSERT_EQ(r.status, 201);
  EXPECT_EQ(r.body["last_engine_move"], "a2");
  EXPECT_EQ(r.body["ply"], 5);
  // Exported text re-imports to the same position.
  const std::string text = svc.handle("GET", "/v1/games/" + r.body["id"].get<std::string>() + "/record", "").body;
  const Reply again = call(svc, "POST", "/v1/games", {{"record", text}});
  ASSERT_EQ(again.status, 201);
  EXPECT_EQ(again.body["ply"], r.body["ply"]);
  EXPECT_EQ(again.body["points"], r.body["points"]);

  r = call(svc, "POST", "/v1/games", {{"record", "r1, (r1)"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body["error"]["code"], "illegal_move");
  r = call(svc, "POST", "/v1/games", {{"record", "r2, (r1)"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body["error"]["code"], "unsupported");
}

TEST(Service, ReplayConsistency) {
  // Same Ophelia moves on two sessions give the same engine replies.
  Service svc({8, 5});
  const std::string a = create(svc);
  const std::string b = create(svc);
  for (const char* p : {"c3", "a1"}) {
    const Reply ra = call(svc, "POST", "/v1/games/" + a + "/moves", {{"point", p}});
    const Reply rb = call(svc, "POST", "/v1/games/" + b + "/moves", {{"point", p}});
    if (ra.status != 200) break;
    EXPECT_EQ(ra.body["record"], rb.body["record"]);
  }
}

TEST(Service, HintTags) {
  Service svc({8, 6});
  // Human Xeno against the solver at the intro game's ply 10: c4 is in the tables.
  Reply r = call(svc, "POST", "/v1/games",
                 {{"engine", "solver"}, {"human_side", "xeno"}, {"record", "r1, (r2), r3, (c1), a2, (r4), c2, (!b2), a4, (!b1)"}});
  ASSERT_EQ(r.status, 201);
  std::string id = r.body["id"];
  r = call(svc, "GET", "/v1/games/" + id + "/hint");
  EXPECT_EQ(r.body["tag"], "table_move");
  EXPECT_EQ(r.body["point"], "c4");

  r = call(svc, "POST", "/v1/games",
           {{"engine", "solver"}, {"human_side", "xeno"}, {"record", "r1, (r2), r3, (c1), a2, (r4), c2, (!b2), a4, (!b1), c4, (!b3)"}});
  id = r.body["id"];
  r = call(svc, "GET", "/v1/games/" + id + "/hint");
  EXPECT_EQ(r.body["tag"], "immediate_win");
  EXPECT_EQ(r.body["point"], "b4");

  id = create(svc, {{"record", "r1, (r2), r3, (c1), a2, (r4)"}});
  r = call(svc, "GET", "/v1/games/" + id + "/hint");
  EXPECT_EQ(r.body["tag"], "forced_block");
  EXPECT_EQ(r.body["point"], "b2");

  id = create(svc);
  r = call(svc, "GET", "/v1/games/" + id + "/hint");
  EXPECT_EQ(r.body["tag"], "solver_best");
  EXPECT_TRUE(r.body["score"].is_number_integer());
}

TEST(Service, SolverEnginePlaysBothSides) {
  Service svc({8, 7});
  Reply r = call(svc, "POST", "/v1/games", {{"engine", "solver"}, {"human_side", "xeno"}});
  ASSERT_EQ(r.status, 201);
  EXPECT_EQ(r.body["ply"], 0);
  const std::string id = r.body["id"];
  r = call(svc, "POST", "/v1/games/" + id + "/moves", {{"point", "r1"}});
  EXPECT_EQ(r.body["ply"], 2);
  r = call(svc, "POST", "/v1/games", {{"engine", "solver"}});
  EXPECT_EQ(r.body["ply"], 1);
}

TEST(Service, LeastRecentlyUsedEviction) {
  Service svc({3, 8});
  const std::string first = create(svc);
  const std::string second = create(svc);
  create(svc);
  call(svc, "GET", "/v1/games/" + first);  // touch
  create(svc);
  EXPECT_EQ(svc.session_count(), 3u);
  EXPECT_EQ(call(svc, "GET", "/v1/games/" + first).status, 200);
  EXPECT_EQ(call(svc, "GET", "/v1/games/" + second).status, 404);
}

TEST(Service, RandomOpheliaAlwaysLoses) {
  Service svc({16, 9});
  std::mt19937 rng(20261016);
  int wins = 0;
  for (int game = 0; game < 200; ++game) {
    const std::string id = create(svc);
    json state = call(svc, "GET", "/v1/games/" + id).body;
    while (state["status"] == "ongoing") {
      const auto free = empty_points(state);
      const Reply r = call(svc, "POST", "/v1/games/" + id + "/moves",
                           {{"point", free[rng() % free.size()]}, {"ply", state["ply"]}});
      ASSERT_EQ(r.status, 200) << r.body.dump();
      state = r.body;
    }
    EXPECT_EQ(state["status"], "xeno_win") << state["record"];
    wins += state["status"] == "xeno_win";
  }
  EXPECT_EQ(wins, 200);
}

TEST(HttpServer, LoopbackRoundTrip) {
  Service svc({8, 10});
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  std::thread t([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Post("/v1/games", "{}", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const json g = json::parse(res->body);
  res = cli.Post("/v1/games/" + g["id"].get<std::string>() + "/moves", R"({"point":"r2"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["last_engine_move"], "r3");
  res = cli.Get("/v1/plane");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["order"], 4);
  res = cli.Delete("/v1/plane");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 405);
  server.stop();
  t.join();
}

TEST(DefaultBind, ReadsEnvironment) {
  setenv("PLANETTT_BIND", "0.0.0.0:9099", 1);
  EXPECT_EQ(default_bind(), std::make_pair(std::string("0.0.0.0"), 9099));
  unsetenv("PLANETTT_BIND");
  EXPECT_EQ(default_bind(), std::make_pair(std::string("127.0.0.1"), 8080));
}
