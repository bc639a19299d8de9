#pragma once

#include <string>

// Eigen must come first: <resolv.h>, pulled in by httplib, defines _res.
#include "housegan/service/api.hpp"

#include <httplib.h>

namespace housegan::service {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Upper bound on requests handled at once.
  std::size_t workers = 4;
  ServiceConfig service;
  /// Served verbatim at GET /openapi.json when non-empty.
  std::string openapi_document;
};

/// HTTP front end over a read-only registry.
class Server {
 public:
  Server(const ModelRegistry& registry, Palette palette, ServerOptions options)
      : registry_(registry), palette_(std::move(palette)), options_(std::move(options)) {
    const std::size_t workers = std::max<std::size_t>(1, options_.workers);
    http_.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    routes();
  }

  /// Binds; returns the bound port (useful with port 0).
  int bind() {
    if (options_.port == 0) {
      port_ = http_.bind_to_any_port(options_.host);
    } else {
      port_ = http_.bind_to_port(options_.host, options_.port) ? options_.port : -1;
    }
    if (port_ < 0) throw std::runtime_error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    return port_;
  }

  /// Blocks until stop().
  void listen() { http_.listen_after_bind(); }
  void stop() { http_.stop(); }
  void wait_until_ready() const { http_.wait_until_ready(); }
  int port() const { return port_; }

 private:
  static void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void routes() {
    http_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                               {"Access-Control-Allow-Headers", "Content-Type"},
                               {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    http_.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http_.Get("/roomtypes", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, roomtypes_json(palette_));
    });
    http_.Get("/checkpoints", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, checkpoints_json(registry_));
    });
    http_.Get("/openapi.json", [this](const httplib::Request&, httplib::Response& res) {
      if (options_.openapi_document.empty()) {
        send_json(res, 404, error_body(404, "no API document configured"));
      } else {
        res.set_content(options_.openapi_document, "application/json");
      }
    });
    http_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
      Json body;
      try {
        body = Json::parse(req.body);
      } catch (const Json::parse_error& e) {
        send_json(res, 400, error_body(400, std::string("malformed JSON: ") + e.what()));
        return;
      }
      try {
        send_json(res, 200, handle_generate(body, registry_, options_.service));
      } catch (const ApiError& e) {
        send_json(res, e.status(), error_body(e.status(), e.what()));
      } catch (const ValidationError& e) {
        send_json(res, 400, error_body(400, e.what()));
      } catch (const std::exception& e) {
        send_json(res, 500, error_body(500, e.what()));
      }
    });
    http_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) send_json(res, res.status, error_body(res.status, httplib::status_message(res.status)));
    });
  }

  const ModelRegistry& registry_;
  Palette palette_;
  ServerOptions options_;
  httplib::Server http_;
  int port_ = -1;
};

}  // namespace housegan::service
