#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "http_server.hpp"
#include "ppdm/session.hpp"

using namespace ppdm;
using nlohmann::json;

namespace {

struct Running {
  Session session;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  Running() {
    register_routes(server, session);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Running() {
    server.stop();
    thread.join();
  }
};

json post(httplib::Client& c, const std::string& path, const json& body, int expect) {
  auto r = c.Post(path, body.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == expect);
  return json::parse(r->body);
}

}  // namespace

TEST_CASE("http session round trip") {
  Running srv;
  REQUIRE(srv.port > 0);
  httplib::Client c("127.0.0.1", srv.port);

  auto h = c.Get("/health");
  REQUIRE(h);
  CHECK(h->status == 200);
  CHECK(h->get_header_value("Access-Control-Allow-Origin") == "*");

  CHECK(post(c, "/load", {{"fixture", "box"}}, 200)["op"] == "model_meta");
  CHECK(post(c, "/select", {{"tags", {"top"}}}, 200)["selection"] == json::array({"top"}));
  json motion = {{"type", "translate"}, {"vector", {0, 0, 0.5}}};
  json pv = post(c, "/preview", {{"motion", motion}}, 200);
  CHECK(pv["volume"].get<double>() == doctest::Approx(1.5));
  CHECK(post(c, "/commit", {{"motion", motion}}, 200)["volume"].get<double>() == doctest::Approx(1.5));
  CHECK(post(c, "/undo", json::object(), 200)["volume"].get<double>() == doctest::Approx(1.0));

  auto faces = c.Get("/list_faces");
  REQUIRE(faces);
  CHECK(json::parse(faces->body)["faces"].size() == 6);
  auto obj = c.Get("/export_mesh?format=obj");
  REQUIRE(obj);
  CHECK(json::parse(obj->body)["data"].get<std::string>().find("\nf ") != std::string::npos);

  auto bad = c.Post("/load", "{not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body)["code"] == "schema_error");
  CHECK(post(c, "/select", {{"tags", {"nope"}}}, 422)["code"] == "unknown_entity");
  CHECK(post(c, "/undo", json::object(), 422)["op"] == "error");
}
