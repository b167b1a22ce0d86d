#include <doctest.h>

#include <json.hpp>

#include "cdb/debugger/session.hpp"
#include "testkit.hpp"

using namespace cdb;
using nlohmann::json;

namespace {

testkit::Program wf_lookup() {
  return testkit::build({testkit::fixture_source("wf.c", 0x49499895), testkit::fixture_source("lookup.c", 0x494999f8)});
}

struct Scripted {
  std::optional<int> code;
  std::vector<std::string> lines;
  std::string program_output;
};

Scripted drive(const testkit::Program& p, const std::string& input, const std::string& script, bool json_mode,
               bool interleave = false) {
  testkit::Debuggee d(p, input);
  std::istringstream commands(script);
  std::ostringstream out;
  auto io = debugger::stream_io(commands, out, json_mode);
  if (interleave) {
    io.target_output = [&d, seen = std::size_t{0}]() mutable {
      std::string all = d.out.str();
      std::string fresh = all.substr(seen);
      seen = all.size();
      return fresh;
    };
  }
  debugger::Session session(*d.nub, &p.image, io);
  Scripted r;
  r.code = session.run();
  std::istringstream lines(out.str());
  for (std::string l; std::getline(lines, l);) r.lines.push_back(l);
  r.program_output = d.out.str();
  return r;
}

}  // namespace

TEST_SUITE("session") {
  TEST_CASE("text transcript of a breakpoint session") {
    auto p = wf_lookup();
    auto at = testkit::spoint_coord(p, "wf.c", 17).to_string();
    auto r = drive(p, "hi",
                   "break wf.c:26\n"
                   "run\n"
                   "print c\n"
                   "bt\n"
                   "frame 1\n"
                   "print buf\n"
                   "clear " + at + "\n"
                   "continue\n"
                   "print c\n",
                   false);
    CHECK(r.code == 0);
    REQUIRE(r.lines.size() >= 10);
    CHECK(r.lines[0].rfind("program loaded; stopped before main at wf.c:", 0) == 0);
    CHECK(r.lines[1] == "breakpoint 1 at " + at);
    CHECK(r.lines[2] == "stopped at getword " + at);
    CHECK(r.lines[3] == "c = 0");
    CHECK(r.lines[4] == "#0 getword " + at);
    CHECK(r.lines[5].rfind("#1 main wf.c:50.", 0) == 0);
    CHECK(r.lines[6] == r.lines[5]);
    CHECK(r.lines[7].rfind("buf = {104, 105, 0", 0) == 0);
    CHECK(r.lines[7].find("\"hi\"") != std::string::npos);
    CHECK(r.lines[8] == "cleared breakpoint 1 at " + at);
    CHECK(r.lines[9] == "program exited with code 0");
    CHECK(r.lines[10] == "the program is not running");
    CHECK(r.program_output == "1 hi\n");
  }

  TEST_CASE("json mode writes one object per line") {
    auto p = wf_lookup();
    auto r = drive(p, "a a", "spoints lookup.c\nbreak wf.c:26\nrun\nbt\ncontinue\ncontinue\ncontinue\n", true);
    std::vector<std::string> types;
    for (const auto& l : r.lines) {
      auto j = json::parse(l);
      types.push_back(j.at("type"));
      if (types.back() == "spoints") CHECK(j.at("points").size() == 37);
      if (types.back() == "bt") CHECK(j.at("frames").size() == 2);
      if (types.back() == "stopped") CHECK(j.at("line") == 26);
    }
    CHECK(types == std::vector<std::string>{"startup", "spoints", "break", "stopped", "bt", "stopped", "stopped",
                                            "exited"});
    CHECK(r.program_output == "2 a\n");
  }

  TEST_CASE("ambiguous lines list their candidates") {
    auto p = wf_lookup();
    auto r = drive(p, "", "break wf.c:23\nquit\n", true);
    REQUIRE(r.lines.size() == 2);
    auto j = json::parse(r.lines[1]);
    CHECK(j.at("type") == "error");
    CHECK(j.at("candidates").size() == 3);
    CHECK_FALSE(r.code);
  }

  TEST_CASE("errors do not end the session") {
    auto p = wf_lookup();
    auto r = drive(p, "",
                   "frobnicate\n"
                   "break nowhere\n"
                   "break wf.c:1\n"
                   "clear wf.c:26\n"
                   "print nosuch\n"
                   "print\n"
                   "frame 0\n"
                   "frame x\n"
                   "bt\n"
                   "continue\n"
                   "run\n",
                   false);
    CHECK(r.code == 0);
    REQUIRE(r.lines.size() == 12);
    CHECK(r.lines[1] == "unknown command 'frobnicate'; try help");
    CHECK(r.lines[2] == "usage: break file:line[.column]");
    CHECK(r.lines[3] == "no stopping point at wf.c:1");
    CHECK(r.lines[4].rfind("no breakpoint at wf.c:26.", 0) == 0);
    CHECK(r.lines[5] == "nosuch is not visible");
    CHECK(r.lines[6] == "usage: print name");
    CHECK(r.lines[7] == "there are no active frames");
    CHECK(r.lines[8] == "usage: frame n");
    CHECK(r.lines[9] == "no active frames");
    CHECK(r.lines[10] == "program exited with code 0");
    CHECK(r.lines[11] == "the program has exited");
  }

  TEST_CASE("frame past the outermost names the limit") {
    auto p = wf_lookup();
    auto r = drive(p, "x", "break wf.c:26\nrun\nframe 5\nquit\n", false);
    REQUIRE(r.lines.size() == 4);
    CHECK(r.lines[3] == "no frame 5: the outermost frame is 1");
    CHECK_FALSE(r.code);
  }

  TEST_CASE("target output is interleaved ahead of the next record") {
    auto p = wf_lookup();
    auto s = drive(p, "b a", "break " + testkit::spoint_coord(p, "wf.c", 23).to_string() + "\nrun\ncontinue\n", true, true);
    std::vector<std::string> types;
    for (const auto& l : s.lines) types.push_back(json::parse(l).at("type"));
    // The left subtree is printed between the two arrivals at print_int.
    REQUIRE(types.size() >= 5);
    CHECK(types[2] == "stopped");
    CHECK(types[3] == "output");
    CHECK(json::parse(s.lines[3]).at("text") == "1 a\n");
    CHECK(types[4] == "stopped");
  }

  TEST_CASE("stats and help render text") {
    auto p = wf_lookup();
    auto r = drive(p, "", "stats\nhelp\nquit\n", false);
    std::string all;
    for (const auto& l : r.lines) all += l + "\n";
    CHECK(all.find("breakpoint flags") != std::string::npos);
    CHECK(all.find("spoints [file]") != std::string::npos);
  }
}
