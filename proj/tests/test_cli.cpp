#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli_runner.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

using Result = testing::CliResult;

Result run(const std::string& args) { return testing::run_cli(args); }

std::string fx(const std::string& name) { return std::string(DEFTOP_FIXTURES) + "/" + name + ".top"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("deftop_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("analyze writes the verdict of the non-regular example") {
  TempDir t;
  Result r = run("analyze " + fx("nonregular") + " --json " + (t / "out.json"));
  CHECK(r.code == 0);
  Json j = Json::parse(slurp(t / "out.json"));
  CHECK(j["hausdorff"] == true);
  CHECK(j["affinizable"] == false);
  CHECK(j["regular"] == false);
  CHECK(j["exceptional"]["E"] == "(0,1) ∪ (1,2) ∪ (2,3)");
  CHECK(j["components"]["result"] == "NoFiniteDecomposition");
  CHECK(j["witnesses"]["regularity"]["a"] == "1/2");
  for (const char* key : {"hausdorff", "regular", "exceptional", "conditions", "affinizable", "components", "witnesses"})
    CHECK_MESSAGE(j.contains(key), key);
}

TEST_CASE("embed writes one anchor and two loops for the figure eight") {
  TempDir t;
  Result r = run("embed " + fx("infty") + " --json " + (t / "emb.json"));
  CHECK(r.code == 0);
  Json j = Json::parse(slurp(t / "emb.json"));
  Json e = j.contains("embedding") ? j["embedding"] : j;
  REQUIRE(e["anchors"].size() == 1);
  REQUIRE(e["curves"].size() == 2);
  for (const auto& c : e["curves"]) CHECK(c["loop"] == true);
  CHECK(j["certificate"]["ok"] == true);
}

TEST_CASE("exit codes") {
  CHECK(run("check " + fx("affine")).code == 0);
  Result bad = run("check " + fx("broken_membership"));
  CHECK(bad.code == 1);
  CHECK(bad.out.find("membership") != std::string::npos);
  CHECK(bad.out.find("a=1/2 eps=1/4") != std::string::npos);
  CHECK(run("check /nonexistent/none.top").code == 2);
  CHECK(run("embed " + fx("nonregular")).code == 2);
  CHECK(run("closure " + fx("infty") + " --set \"(3,5)\"").code == 2);

  TempDir t;
  std::ofstream(t / "syntax.top") << "space { (0,1) }\ntopology {\n  on (0,1) at a: { (a, };\n}\n";
  Result syn = run("check " + (t / "syntax.top"));
  CHECK(syn.code == 1);
  CHECK(syn.out.find("line 3") != std::string::npos);
}

TEST_CASE("point queries print canonical sets") {
  CHECK(run("shadows " + fx("infty") + " --at 2").out == "S(2) = {0} ∪ {2} ∪ {4}\n");
  CHECK(run("closure " + fx("infty") + " --set \"(0,1/8)\"").out == "cl((0,1/8)) = (0,1/8] ∪ {2}\n");
}

TEST_CASE("the suite matches the pristine manifest and catches a flipped entry") {
  Result ok = run("suite --fixtures " + std::string(DEFTOP_FIXTURES));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("MISMATCH") == std::string::npos);

  TempDir t;
  Json m = Json::parse(slurp(std::string(DEFTOP_FIXTURES) + "/expected.json"));
  bool flipped = false;
  for (auto& [k, v] : m.items())
    if (k.find("lex") != std::string::npos) {
      v["affinizable"] = true;
      flipped = true;
    }
  REQUIRE(flipped);
  std::ofstream(t / "flipped.json") << m.dump(2);
  Result bad = run("suite --fixtures " + std::string(DEFTOP_FIXTURES) + " --manifest " + (t / "flipped.json"));
  CHECK(bad.code == 2);
  std::size_t rows = 0, pos = 0;
  while ((pos = bad.out.find("MISMATCH", pos)) != std::string::npos) {
    ++rows;
    ++pos;
  }
  CHECK(rows == 1);
  CHECK(bad.out.find("lex.top") < bad.out.find("MISMATCH"));
  CHECK(bad.out.find("affinizable: expected true, got false") != std::string::npos);
}

TEST_CASE("JSON output is byte-identical across runs") {
  TempDir t;
  for (const char* cmd : {"analyze", "embed", "oracle"}) {
    CAPTURE(cmd);
    std::string name = std::string(cmd) == "analyze" ? "lex" : "infty";
    REQUIRE(run(std::string(cmd) + " " + fx(name) + " --json " + (t / "a.json")).code == 0);
    REQUIRE(run(std::string(cmd) + " " + fx(name) + " --json " + (t / "b.json")).code == 0);
    CHECK(slurp(t / "a.json") == slurp(t / "b.json"));
  }
}
