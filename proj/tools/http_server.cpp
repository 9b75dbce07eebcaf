#include "http_server.hpp"

#include <cstdio>

#include <httplib.h>
#include <json.hpp>

#include "ppdm/session.hpp"

namespace ppdm {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, const json& body) {
  if (body.value("op", "") == "error") {
    const std::string code = body.value("code", "");
    res.status = code == "schema_error" ? 400 : code == "superseded" ? 409 : 422;
  } else {
    res.status = 200;
  }
  res.set_content(body.dump(), "application/json");
}

}  // namespace

void register_routes(httplib::Server& server, Session& session) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"op":"health","ok":true})", "application/json");
  });
  for (const char* op : {"load", "list_faces", "select", "preview", "commit", "undo", "export_mesh"}) {
    std::string name = op;
    server.Post("/" + name, [&session, name](const httplib::Request& req, httplib::Response& res) {
      json body;
      if (req.body.empty()) {
        body = json::object();
      } else {
        try {
          body = json::parse(req.body);
        } catch (const json::parse_error& e) {
          reply(res, {{"op", "error"}, {"code", "schema_error"}, {"message", std::string("malformed JSON: ") + e.what()}});
          return;
        }
      }
      reply(res, session.handle(name, body));
    });
  }
  for (const char* op : {"list_faces", "export_mesh"}) {
    std::string name = op;
    server.Get("/" + name, [&session, name](const httplib::Request& req, httplib::Response& res) {
      json body = json::object();
      for (const auto& [k, v] : req.params) body[k] = v;
      reply(res, session.handle(name, body));
    });
  }
}

int serve(const std::string& host, int port) {
  Session session;
  httplib::Server server;
  register_routes(server, session);
  std::fprintf(stderr, "serving on http://%s:%d\n", host.c_str(), port);
  if (!server.listen(host, port)) {
    std::fprintf(stderr, "error: invalid_argument: cannot listen on %s:%d\n", host.c_str(), port);
    return 1;
  }
  return 0;
}

}  // namespace ppdm
