#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ppdm/fixtures.hpp"
#include "ppdm/io.hpp"

using namespace ppdm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("ppdm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  fs::path log = scratch() / "out.txt";
  std::string cmd = std::string(PPDM_CLI) + " " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("cli usage errors exit 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("validate").code == 2);
  CHECK(run("validate x.json --bogus").code == 2);
  CHECK(run("pushpull x.json --faces top --out y.json").code == 2);
  CHECK(run("pushpull x.json --faces top --translate 1,2 --out y.json").code == 2);
  CHECK(run("fixture no_such_fixture --out " + path("n.json")).code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("cli fixture, validate, volume, pushpull, export") {
  REQUIRE(run("fixture slotted_block --out " + path("slot.json")).code == 0);
  Result v = run("validate " + path("slot.json"));
  CHECK(v.code == 0);
  CHECK(v.out.find("valid") == 0);
  Result vol = run("volume " + path("slot.json"));
  CHECK(vol.code == 0);
  CHECK(std::stod(vol.out) == doctest::Approx(56.0));

  Result pp = run("pushpull " + path("slot.json") + " --faces top --translate 0,0,-2.5 --out " + path("pushed.json") +
                  " --trace " + path("trace.json") + " --steps 5");
  CHECK(pp.code == 0);
  CHECK(pp.out.find("events 1") == 0);
  CHECK(load_document(read_file(path("pushed.json"))).body.faces.size() > 0);
  json trace = json::parse(read_file(path("trace.json")));
  CHECK(trace["events"].size() == 1);
  CHECK(trace["samples"].size() == 6);

  CHECK(run("export " + path("slot.json") + " --format stl --out " + path("slot.stl")).code == 0);
  CHECK(read_file(path("slot.stl")).rfind("solid", 0) == 0);
  CHECK(run("pushpull " + path("slot.json") + " --faces nope --translate 0,0,1 --out " + path("z.json")).code == 1);
}

TEST_CASE("cli validate reports violations") {
  json doc = json::parse(save_document(make_fixture("box", {})));
  doc["faces"].erase(doc["faces"].size() - 1);
  for (auto& s : doc["shells"]) {
    json kept = json::array();
    for (auto& f : s["faces"])
      if (f.get<int>() < 5) kept.push_back(f);
    s["faces"] = kept;
  }
  write_file(path("broken.json"), doc.dump());
  Result r = run("validate " + path("broken.json") + " --report json");
  CHECK(r.code == 1);
  json rep = json::parse(r.out);
  CHECK(rep["valid"] == false);
  bool cond2 = false;
  for (auto& v : rep["violations"]) cond2 = cond2 || v["condition"] == 2;
  CHECK(cond2);
  CHECK(run("volume " + path("broken.json")).code == 1);

  write_file(path("trunc.json"), save_document(make_fixture("box", {})).substr(0, 100));
  Result t = run("validate " + path("trunc.json"));
  CHECK(t.code == 1);
  CHECK(t.out.find("schema_error") != std::string::npos);
  CHECK(run("validate " + path("missing.json")).code == 1);
}
