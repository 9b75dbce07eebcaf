#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "http_server.hpp"
#include "ppdm/error.hpp"
#include "ppdm/fixtures.hpp"
#include "ppdm/io.hpp"
#include "ppdm/mass.hpp"
#include "ppdm/pushpull.hpp"
#include "ppdm/tessellate.hpp"
#include "ppdm/validate.hpp"

using namespace ppdm;
using nlohmann::json;

namespace {

const char* kindName(ViolationKind k) {
  switch (k) {
    case ViolationKind::kStructural: return "structural";
    case ViolationKind::kOpenLoop: return "open_loop";
    case ViolationKind::kOffPlane: return "off_plane";
    case ViolationKind::kOrientation: return "orientation";
    case ViolationKind::kDegenerateFace: return "degenerate_face";
    case ViolationKind::kSelfIntersection: return "self_intersection";
    case ViolationKind::kHoleOutside: return "hole_outside";
    case ViolationKind::kEdgeUse: return "edge_use";
    case ViolationKind::kVertexFan: return "vertex_fan";
    case ViolationKind::kInterference: return "interference";
  }
  return "?";
}

std::vector<double> numbers(const std::string& csv, size_t n, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    }
  }
  if (out.size() != n) throw CLI::ValidationError(flag, "expects " + std::to_string(n) + " comma-separated numbers");
  return out;
}

std::vector<std::string> splitTags(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar B-rep push-pull kernel"};
  app.require_subcommand(1);

  std::string file, out, report = "text", format, name, faces, translate, rotate, tracePath, host = "127.0.0.1";
  std::vector<std::string> params;
  int steps = 0, port = 8080;

  auto* cValidate = app.add_subcommand("validate", "Check a BREP-JSON document for solidity");
  cValidate->add_option("file", file, "Document")->required();
  cValidate->add_option("--report", report, "Report format")->check(CLI::IsMember({"text", "json"}));

  auto* cVolume = app.add_subcommand("volume", "Print the enclosed volume");
  cVolume->add_option("file", file, "Document")->required();

  auto* cFixture = app.add_subcommand("fixture", "Write a catalog fixture");
  cFixture->add_option("name", name, "Fixture name")->required();
  cFixture->add_option("--params", params, "Parameters as k=v");
  cFixture->add_option("--out", out, "Output document")->required();

  auto* cPush = app.add_subcommand("pushpull", "Push or pull faces");
  cPush->add_option("file", file, "Document")->required();
  cPush->add_option("--faces", faces, "Face tags, comma separated")->required();
  auto* oT = cPush->add_option("--translate", translate, "x,y,z");
  auto* oR = cPush->add_option("--rotate", rotate, "ux,uy,uz,px,py,pz,deg");
  oT->excludes(oR);
  cPush->add_option("--out", out, "Output document")->required();
  cPush->add_option("--trace", tracePath, "Trace JSON output");
  cPush->add_option("--steps", steps, "Sampled volume trace steps")->check(CLI::NonNegativeNumber);

  auto* cExport = app.add_subcommand("export", "Export a triangle mesh");
  cExport->add_option("file", file, "Document")->required();
  cExport->add_option("--format", format, "Mesh format")->required()->check(CLI::IsMember({"obj", "stl"}));
  cExport->add_option("--out", out, "Output file")->required();

  auto* cServe = app.add_subcommand("serve", "Run the HTTP session server");
  cServe->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  cServe->add_option("--host", host, "Bind address");

  try {
    app.parse(argc, argv);
    if (cPush->parsed() && translate.empty() && rotate.empty())
      throw CLI::RequiredError("--translate or --rotate");
    if (cPush->parsed()) {
      if (!translate.empty()) numbers(translate, 3, "--translate");
      if (!rotate.empty()) numbers(rotate, 7, "--rotate");
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cValidate->parsed()) {
      Document d = load_document(read_file(file));
      auto rep = validate(d.body);
      if (report == "json") {
        json vs = json::array();
        for (const auto& v : rep.violations)
          vs.push_back({{"condition", v.condition}, {"kind", kindName(v.kind)}, {"entities", v.entities}, {"message", v.message}});
        std::cout << json{{"valid", rep.valid}, {"violations", vs}}.dump(2) << "\n";
      } else {
        std::cout << (rep.valid ? "valid" : "invalid") << "\n";
        for (const auto& v : rep.violations)
          std::cout << "condition " << v.condition << " " << kindName(v.kind) << ": " << v.message << "\n";
      }
      return rep.valid ? 0 : 1;
    }
    if (cVolume->parsed()) {
      Document d = load_document(read_file(file));
      auto rep = validate(d.body);
      if (!rep.valid) throw Error(ErrorCode::kInvalidBody, "body is not a valid solid: " + rep.violations.front().message);
      std::cout << std::setprecision(12) << std::showpoint << volume(d.body) << "\n";
      return 0;
    }
    if (cFixture->parsed()) {
      Params p;
      for (const auto& kv : params) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "parameter '" + kv + "' is not k=v");
        try {
          p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
          throw Error(ErrorCode::kInvalidArgument, "parameter '" + kv + "' has no numeric value");
        }
      }
      write_file(out, save_document(make_fixture(name, p)));
      return 0;
    }
    if (cPush->parsed()) {
      Document d = load_document(read_file(file));
      PushPullRequest req;
      req.tags = splitTags(faces);
      if (!translate.empty()) {
        auto v = numbers(translate, 3, "--translate");
        req.motion = Motion::translate({v[0], v[1], v[2]});
      } else {
        auto v = numbers(rotate, 7, "--rotate");
        req.motion = Motion::rotate({v[3], v[4], v[5]}, {v[0], v[1], v[2]}, v[6] * M_PI / 180.0);
      }
      auto res = apply_push_pull(d.body, req);
      if (!res.trace.final_report.valid)
        throw Error(ErrorCode::kRobustnessFailure, "result failed validation: " + res.trace.final_report.violations.front().message);
      write_file(out, save_document(res.body, d.units));
      if (!tracePath.empty()) {
        auto samples = volume_samples(d.body, req, steps);
        write_file(tracePath, trace_json(res.trace, samples).dump(2) + "\n");
      }
      std::cout << "events " << res.trace.events.size();
      for (const auto& e : res.trace.events) std::cout << " " << e.t << ":" << tcp_kind_name(e.kind);
      std::cout << "\nvolume " << std::setprecision(12) << std::showpoint << (res.body.empty() ? 0.0 : volume(res.body)) << "\n";
      return 0;
    }
    if (cExport->parsed()) {
      Document d = load_document(read_file(file));
      auto rep = validate(d.body);
      if (!rep.valid) throw Error(ErrorCode::kInvalidBody, "body is not a valid solid: " + rep.violations.front().message);
      TriangleMesh mesh = tessellate(d.body);
      for (const auto& w : mesh.warnings) std::cerr << "warning: " << w << "\n";
      write_file(out, format == "obj" ? toObj(mesh) : toStl(mesh));
      return 0;
    }
    if (cServe->parsed()) return serve(host, port);
  } catch (const Error& e) {
    std::cerr << "error: " << code_name(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument && cFixture->parsed() ? 2 : 1;
  }
  return 2;
}
