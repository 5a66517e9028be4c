// End-to-end checks of the command-line binary, located via MOVELAB_BIN.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "movelab/families.hpp"
#include "movelab/measure_io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace movelab;

const std::string& scratch() {
  static const std::string dir = [] {
    fs::path p = fs::temp_directory_path() / "movelab_cli_test";
    fs::create_directories(p);
    return p.string();
  }();
  return dir;
}

std::string bin() {
  const char* p = std::getenv("MOVELAB_BIN");
  REQUIRE_MESSAGE(p != nullptr, "MOVELAB_BIN must point at the cli binary");
  return p;
}

struct RunResult {
  int code;
  std::string out;
};

RunResult run(const std::string& args) {
  static int counter = 0;
  const std::string capture = scratch() + "/out_" + std::to_string(counter++) + ".txt";
  const std::string cmd = bin() + " " + args + " > " + capture + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  std::ifstream f(capture);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::string path_of(const std::string& name) { return scratch() + "/" + name; }

}  // namespace

TEST_CASE("family emits a file that analyze reads back") {
  const std::string f = path_of("h3.json");
  CHECK(run("family hajek --k 3 -o " + f).code == 0);
  const auto r = run("analyze " + f);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "insertion tolerance: 1/3"));
  CHECK(contains(r.out, "deletion tolerance:  1/3"));
  CHECK(contains(r.out, "rigid: yes"));
  CHECK(contains(r.out, "(I)   uniformly upwards extractable: yes"));
  CHECK(contains(r.out, "supp(mu) is an up-set"));
}

TEST_CASE("emitted measure files re-parse byte-exact and match the library") {
  const std::string f = path_of("h3_roundtrip.json");
  CHECK(run("family hajek --k 3 -o " + f).code == 0);
  const auto printed = run("family hajek --k 3");
  CHECK(printed.code == 0);
  CHECK(printed.out == slurp(f));  // stdout document == file document
  const AnyMeasure m = measure_from_json(printed.out);
  CHECK(std::get<MeasureQ>(m) == hajek_block<Rat>(3));
  CHECK(measure_to_json(m) == printed.out);
}

TEST_CASE("noise thins a fair coin to 3/8") {
  const std::string f = path_of("half.json");
  std::ofstream(f) << R"({"n":1,"mode":"exact","entries":[["0","1/2"],["1","1/2"]]})";
  const auto r = run("noise " + f + " --down 0.25");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"5/8\""));
  CHECK(contains(r.out, "\"3/8\""));
}

TEST_CASE("dominate reports both verdicts with matching exit codes") {
  const std::string orig = path_of("b3.json"), thinned = path_of("b3n.json");
  CHECK(run("family blocks --k 3 -o " + orig).code == 0);
  CHECK(run("noise " + orig + " --down 1/4 -o " + thinned).code == 0);

  const auto yes = run("dominate " + thinned + " " + orig + " --sup-eps-down");
  CHECK(yes.code == 0);
  CHECK(contains(yes.out, "mu1 <= mu2: yes"));
  CHECK(contains(yes.out, "sup eps down: 1/4"));

  const std::string cert = path_of("cert.json");
  const auto no = run("dominate " + orig + " " + thinned + " --certificate " + cert);
  CHECK(no.code == 1);
  CHECK(contains(no.out, "mu1 <= mu2: no"));
  CHECK(contains(slurp(cert), "\"violator\""));
}

TEST_CASE("extract --max returns a genuine measure at half the critical rate") {
  const std::string f = path_of("h4.json"), out = path_of("h4ex.json");
  CHECK(run("family hajek --k 4 -o " + f).code == 0);
  const auto r = run("extract " + f + " --max -o " + out);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "nonnegative (genuine measure): yes"));
  CHECK(contains(r.out, "max extraction rate: 41156353/268435456"));
  const AnyMeasure back = read_measure_file(out);  // written file is a measure again
  CHECK(std::get<MeasureQ>(back).sites() == 4);

  const auto signed_run = run("extract " + f + " --eps 0.2");
  CHECK(signed_run.code == 1);  // above the critical rate: signed vector
  CHECK(contains(signed_run.out, "nonnegative (genuine measure): no"));
  CHECK(contains(signed_run.out, "\"signed\": true"));
}

TEST_CASE("det window of a flat kernel is the fair product") {
  const auto r = run("det --f \"const:0.5\" --window 4");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"mode\": \"float\""));
  int hits = 0;
  for (std::size_t pos = r.out.find("0.0625"); pos != std::string::npos;
       pos = r.out.find("0.0625", pos + 1))
    ++hits;
  CHECK(hits == 16);
}

TEST_CASE("table and json report the same numbers") {
  const auto table = run("det --f \"poly:0,1\" --gm");
  const auto json = run("--json det --f \"poly:0,1\" --gm");
  CHECK(table.code == 0);
  CHECK(json.code == 0);
  // lift the value out of each rendering; both must carry the same string
  const std::string key = "geometric mean: ";
  auto pos = table.out.find(key);
  REQUIRE(pos != std::string::npos);
  const std::string val = table.out.substr(pos + key.size(),
                                           table.out.find('\n', pos) - pos - key.size());
  CHECK(contains(json.out, "\"" + val + "\""));
}

TEST_CASE("analyze on a float-mode file skips exact extraction rates") {
  const std::string f = path_of("w3.json");
  CHECK(run("det --f \"poly:0,1\" --window 3 -o " + f).code == 0);
  const auto r = run("analyze " + f);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "mode: float"));
  CHECK(contains(r.out, "max extraction rates: n/a"));
}

TEST_CASE("condbin prints the conditioned count law") {
  const auto r = run("family condbin --k 3 --p 2/3 --m 2");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "P(count = 2) = 3/5"));
  CHECK(contains(r.out, "P(count = 3) = 2/5"));
}

TEST_CASE("usage errors exit 2, numeric and file errors exit 3") {
  CHECK(run("definitely-not-a-command").code == 2);
  CHECK(run("analyze").code == 2);                       // missing positional
  const std::string f = path_of("h3.json");
  run("family hajek --k 3 -o " + f);
  CHECK(run("extract " + f).code == 2);                  // needs --eps or --max
  CHECK(run("analyze " + path_of("missing.json")).code == 3);
  CHECK(run("family hajek --k 0").code == 3);            // rejected by the library
  CHECK(run("det --f \"const:1.5\" --gm").code == 3);    // kernel above 1
  CHECK(run("--help").code == 0);
}

TEST_CASE("mixture family emits the dominated pair") {
  const std::string nu = path_of("nu.json"), mu = path_of("mu.json");
  CHECK(run("family mixture --p 1/2 --q 1/4 --n 3 --out-nu " + nu + " --out-mu " + mu).code == 0);
  const auto r = run("dominate " + nu + " " + mu + " --sup-eps-down");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "sup eps down: 1/2"));  // exactly 1 - q/p
}

TEST_CASE("pairs family emits three measures under one json report") {
  const auto r = run("--json family pairs --n 4");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"even\""));
  CHECK(contains(r.out, "\"odd\""));
  CHECK(contains(r.out, "\"mixed\""));
}
