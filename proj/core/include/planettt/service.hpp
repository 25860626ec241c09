#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace planettt {

// JSON API for playing tic-tac-toe on pi4 against an engine.
//
//   POST /v1/games                {"engine", "human_side", "record"?}
//   GET  /v1/games/{id}
//   POST /v1/games/{id}/moves     {"point", "ply"?}
//   GET  /v1/games/{id}/hint
//   GET  /v1/games/{id}/record    text/plain
//   GET  /v1/plane
//
// engine is "paper_strategy" (plays Xeno only) or "solver". Errors are
// {"error": {"code", "message"}} with code one of bad_request, not_found,
// method_not_allowed, illegal_move, conflict, unsupported.
struct ServiceConfig {
  std::size_t capacity = 1024;  // sessions kept; least recently used go first
  std::uint64_t seed = 0;       // session ids; 0 picks a random seed
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Thread-safe; never throws for bad input, errors become responses.
  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

  std::size_t session_count() const;
  std::size_t capacity() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Default bind address, from PLANETTT_BIND ("host:port") or 127.0.0.1:8080.
std::pair<std::string, int> default_bind();

// Serves a Service over HTTP with cpp-httplib.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Port 0 binds any free port. Returns the bound port; throws on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  // Waits until listen() is accepting connections.
  void wait_until_ready();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace planettt
