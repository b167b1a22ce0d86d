// Acceptance runner: one PASS/FAIL line per primary criterion, each with a
// wall-clock limit. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cdb/debugger/format.hpp"
#include "cdb/debugger/launch.hpp"
#include "cdb/debugger/session.hpp"
#include "cdb/sym/construct.hpp"
#include "cdb/sym/pickle.hpp"
#include "cdb/sym/query.hpp"
#include "progen.hpp"
#include "symgen.hpp"
#include "testkit.hpp"

using namespace cdb;
using nub::NubCoord;
using nub::NubState;

namespace {

constexpr std::uint32_t kWf = 0x49499895, kLookup = 0x494999f8;

// Collects failed expectations; the criterion passes when none failed.
class Outcome {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(std::string s) { notes_ = std::move(s); }
  bool passed() const { return failed_ == 0 && checks_ > 0; }
  std::string summary() const {
    if (passed()) return notes_.empty() ? fmt::format("{} checks", checks_) : notes_;
    std::string out = fmt::format("{} of {} checks failed", failed_, checks_);
    for (const auto& f : failures_) out += "; " + f;
    return out;
  }

 private:
  int checks_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

testkit::Program wf_lookup(bool instrument = true) {
  return testkit::build({testkit::fixture_source("wf.c", kWf), testkit::fixture_source("lookup.c", kLookup)},
                        instrument);
}

std::string render(nub::Nub& nub, const NubState& s, const std::string& name) {
  auto v = nub.resolve_value(s, name);
  if (!v) return "<not visible>";
  return debugger::format_value(*v->module, v->type, v->bytes);
}

NubCoord point_on_line(const testkit::Program& p, const std::string& file, std::uint32_t line) {
  for (const auto& u : p.units)
    if (u.unit.file == file)
      for (const auto& sp : u.plan)
        if (sp.loc.line == line) return testkit::spoint_coord(p, file, static_cast<std::size_t>(sp.index));
  throw Error(fmt::format("no stopping point on {}:{}", file, line));
}

// getword's stopping points, positions read off wf.c by hand.
void getword_points(Outcome& o) {
  const std::pair<std::uint32_t, std::uint32_t> expected[] = {
      {17, 31}, {21, 9}, {21, 34}, {22, 3}, {23, 7}, {23, 16}, {23, 40}, {24, 3}, {25, 2}, {26, 6}, {27, 10}, {28, 9}};
  auto p = wf_lookup();
  const auto& plan = p.units[0].plan;
  int isletter = 0;
  for (const auto& sp : plan) isletter += sp.function && sp.function->decl->name == "isletter";
  o.expect(isletter == 8, fmt::format("isletter has {} points, want 8", isletter));
  int matched = 0;
  for (int i = 8; i <= 19; ++i) {
    auto [line, col] = expected[i - 8];
    bool ok = static_cast<std::size_t>(i) < plan.size() && plan[i].loc.line == line && plan[i].loc.col == col &&
              plan[i].function->decl->name == "getword";
    matched += ok;
    o.expect(ok, fmt::format("point {} not at wf.c:{}.{}", i, line, col));
  }
  auto module = p.modules()[0];
  for (int i = 8; i <= 19; ++i) {
    auto [line, col] = expected[i - 8];
    o.expect(module.spoints.at(i).src == sym::Coordinate{"wf.c", col, line},
             fmt::format("symbol table point {} disagrees", i));
  }
  o.note(fmt::format("{}/12 getword points match", matched));
}

void visible_chain(Outcome& o) {
  auto module = wf_lookup().modules()[0];
  sym::SymbolIndex index(module);
  const sym::Symbol* c = nullptr;
  for (const auto& item : module.items) {
    auto* s = item.symbol();
    if (s && s->id == "c" && s->is<sym::symbols::Local>()) c = s;  // getword's; isletter's c is a parameter
  }
  o.expect(c != nullptr, "no local c");
  if (!c) return;
  std::string got;
  for (auto* s : sym::visible_chain(index, c->uid)) got += (got.empty() ? "" : ", ") + s->id;
  const std::string want = "c, s, buf, words, main, tprint, getword, isletter";
  o.expect(got == want, "chain is " + got);
  o.expect(index.symbol_at(module.globals).id == "words", "globals is not words");
  o.note("chain: " + got + "; globals = words");
}

void pickle_roundtrip(Outcome& o) {
  symgen::ModuleGenerator gen(20240601);
  std::mt19937_64 rng(7);
  int corruptions = 0, caught = 0;
  for (int i = 0; i < 1000; ++i) {
    sym::Module m = gen.generate();
    Bytes a = sym::pickle(m);
    Bytes b = sym::pickle(m);
    o.expect(a == b, fmt::format("module {} pickles nondeterministically", i));
    sym::Module back;
    try {
      back = sym::unpickle(a);
    } catch (const std::exception& e) {
      o.expect(false, fmt::format("module {} rejected: {}", i, e.what()));
      continue;
    }
    o.expect(back == m, fmt::format("module {} changed in a round-trip", i));
    if (i % 10 == 0) {
      Bytes bad = a;
      auto at = rng() % bad.size();
      bad[at] ^= static_cast<std::byte>(1 + rng() % 255);
      ++corruptions;
      bool threw = false;
      try {
        sym::unpickle(bad);
      } catch (const sym::SymtabError&) {
        threw = true;
      }
      caught += threw;
      o.expect(threw, fmt::format("corruption at byte {} of module {} was accepted", at, i));
    }
  }
  o.note(fmt::format("1000 round-trips; {}/{} corruptions rejected", caught, corruptions));
}

void breakpoint_semantics(Outcome& o) {
  // Stop before evaluation: the call and the increment have not happened.
  auto p = testkit::build({{"s.c",
                            "int x;\n"
                            "int main(void) {\n"
                            "\tx = x + 1;\n"
                            "\tprint_int(7);\n"
                            "\treturn x;\n"
                            "}\n",
                            0x5e}});
  {
    testkit::Debuggee d(p);
    std::vector<std::string> seen;
    int code = d.nub->init(
        [&](const NubState&) {
          for (std::uint32_t line : {3u, 4u})
            d.nub->set(point_on_line(p, "s.c", line), [&](const NubState& s) {
              seen.push_back(fmt::format("{} x={} out='{}'", s.src.to_string(), render(*d.nub, s, "x"), d.out.str()));
            });
        },
        {});
    std::vector<std::string> want = {"s.c:3.2 x=0 out=''", "s.c:4.2 x=1 out=''"};
    o.expect(seen == want, "stops before evaluation: " + fmt::format("{}", fmt::join(seen, " | ")));
    o.expect(code == 1 && d.out.str() == "7", "program result changed under breakpoints");
  }
  // Clear: no stop.
  {
    testkit::Debuggee d(p);
    int hits = 0;
    d.nub->init(
        [&](const NubState&) {
          auto at = point_on_line(p, "s.c", 4);
          d.nub->set(at, [&](const NubState&) { ++hits; });
          d.nub->remove(at);
        },
        {});
    o.expect(hits == 0 && d.nub->delivered() == 0 && d.nub->dismissed() == 0, "cleared breakpoint stopped");
  }
  // Set/clear transcript equals the never-set transcript.
  auto wf = wf_lookup();
  auto transcript = [&](bool toggle) {
    testkit::Debuggee d(wf, "the cat and the dog and the end");
    std::vector<std::string> log;
    int code = d.nub->init(
        [&](const NubState& s) {
          log.push_back("start " + s.function() + " " + s.src.to_string());
          if (!toggle) return;
          for (std::size_t i = 0; i < wf.units[0].plan.size(); i += 3) {
            auto at = testkit::spoint_coord(wf, "wf.c", i);
            d.nub->set(at, [&log](const NubState& b) { log.push_back("break " + b.src.to_string()); });
            d.nub->remove(at);
          }
        },
        [&](const NubState& s) { log.push_back("fault " + s.src.to_string()); });
    log.push_back(fmt::format("exit {} events {}/{}", code, d.nub->delivered(), d.nub->dismissed()));
    log.push_back(d.out.str());
    return log;
  };
  o.expect(transcript(true) == transcript(false), "set/clear transcript differs from never-set");

  // Dismissal: A and B share index 5; only B is armed.
  auto dz = testkit::build({testkit::fixture_source("dismiss_a.c", 0xa), testkit::fixture_source("dismiss_b.c", 0xb)});
  testkit::Debuggee d(dz);
  auto b5 = testkit::spoint_coord(dz, "dismiss_b.c", 5);
  int a_events = 0, b_events = 0;
  d.nub->init(
      [&](const NubState&) {
        d.nub->set(b5, [&](const NubState& s) {
          if (s.src == b5 && s.function() == "b_work") ++b_events;
          else ++a_events;
        });
      },
      [&](const NubState&) { ++a_events; });
  o.expect(a_events == 0, fmt::format("{} visible events from unit A", a_events));
  o.expect(b_events == 3, fmt::format("B fired {} times, want 3", b_events));
  o.expect(d.nub->dismissed() == 3, fmt::format("{} dismissed arrivals, want 3", d.nub->dismissed()));
  o.note(fmt::format("stop-before-eval, clear, transcript equality; dismissal A=0 visible ({} dismissed), B={}",
                     d.nub->dismissed(), b_events));
}

void bpflags(Outcome& o) {
  auto p = wf_lookup();
  o.expect(p.image.bpflags_size == 37, fmt::format("wf.c + lookup.c gives {}", p.image.bpflags_size));
  int links = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    std::vector<testkit::Source> sources{{"main.c", "int main(void) { return 0; }\n", 0}};
    std::size_t want = 2;
    std::mt19937_64 rng(seed);
    int n = static_cast<int>(rng() % 5) + 1;
    for (int k = 0; k < n; ++k) {
      std::string prefix = fmt::format("u{}_", k);
      auto unit = progen::Generator(rng(), prefix).generate();
      want = std::max(want, unit.points.size());
      sources.push_back({prefix + ".c", unit.text, 0});
    }
    auto linked = testkit::build(sources);
    o.expect(linked.image.bpflags_size == want,
             fmt::format("seed {}: {} flags, want {}", seed, linked.image.bpflags_size, want));
    ++links;
  }
  o.note(fmt::format("wf.c + lookup.c = {}; {} random links sized by their largest unit", p.image.bpflags_size, links));
}

void shadow_stack(Outcome& o) {
  auto p = testkit::build({testkit::fixture_source("fact.c", 0xfac7)});
  testkit::Debuggee d(p);
  auto base = point_on_line(p, "fact.c", 3);
  auto call_site = point_on_line(p, "fact.c", 4);
  auto main_site = point_on_line(p, "fact.c", 10);
  int stops = 0;
  std::uint32_t tos_before = 0;
  {
    std::array<std::byte, 4> b{};
    d.machine->fetch(0, p.image.tos_address, b);
    tos_before = ByteReader(b).get_u32le();
  }
  d.nub->init(
      [&](const NubState&) {
        d.nub->set(base, [&](const NubState&) {
          ++stops;
          NubState f;
          for (int k = 0; k <= 5; ++k) {
            d.nub->frame(k, f);
            o.expect(f.function() == "fact", fmt::format("frame {} is {}", k, f.function()));
            o.expect(f.src == (k == 0 ? base : call_site), fmt::format("frame {} at {}", k, f.src.to_string()));
            o.expect(render(*d.nub, f, "n") == std::to_string(k), fmt::format("frame {} has n={}", k, render(*d.nub, f, "n")));
          }
          d.nub->frame(6, f);
          o.expect(f.function() == "main" && f.src == main_site, "frame 6 is " + f.function() + " " + f.src.to_string());
          bool errored = false;
          try {
            d.nub->frame(7, f);
          } catch (const nub::FrameRangeError& e) {
            errored = e.max_frame() == 6;
          }
          o.expect(errored, "frame 7 did not report the outermost frame 6");
        });
      },
      {});
  std::array<std::byte, 4> b{};
  d.machine->fetch(0, p.image.tos_address, b);
  std::uint32_t tos_after = ByteReader(b).get_u32le();
  o.expect(stops == 1, fmt::format("{} stops in the base case", stops));
  o.expect(d.out.str() == "120\n", "fact(5) printed " + d.out.str());
  o.expect(tos_after == tos_before && tos_after == p.image.sentinel_address, "_Nub_tos not restored");
  o.note(fmt::format("frames 0..5 fact, 6 main ({}), 7 errors; _Nub_tos {:#x} restored", main_site.to_string(),
                     tos_after));
}

struct CorpusEntry {
  std::string name;
  std::vector<std::string> files;
  std::string input;
  std::vector<std::string> args;
};

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<CorpusEntry> corpus() {
  std::ifstream in(testkit::fixture("corpus/MANIFEST"));
  std::vector<CorpusEntry> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '|');) cols.push_back(trim(c));
    cols.resize(4);
    CorpusEntry e{cols[0], {}, std::regex_replace(cols[2], std::regex("\\\\n"), "\n"), {cols[0]}};
    std::stringstream files(cols[1]);
    for (std::string f; files >> f;) e.files.push_back(f);
    std::stringstream args(cols[3]);
    for (std::string a; args >> a;) e.args.push_back(a);
    out.push_back(std::move(e));
  }
  return out;
}

void transparency(Outcome& o) {
  auto entries = corpus();
  o.expect(entries.size() == 10, fmt::format("corpus has {} programs", entries.size()));
  std::size_t bytes = 0;
  for (const auto& e : entries) {
    std::vector<testkit::Source> sources;
    for (const auto& f : e.files) sources.push_back(testkit::fixture_source("corpus/" + f));
    auto on = testkit::build(sources, true), off = testkit::build(sources, false);
    o.expect(on.image.bpflags_size > 0, e.name + ": instrumented build has no flags");
    auto a = testkit::run(on.image, e.input, e.args);
    auto b = testkit::run(off.image, e.input, e.args);
    o.expect(!a.output.empty(), e.name + ": no output");
    o.expect(a.output == b.output, e.name + ": output differs");
    o.expect(a.exit_code == b.exit_code, e.name + ": exit code differs");
    bytes += a.output.size();
  }
  o.note(fmt::format("{} programs, {} output bytes identical", entries.size(), bytes));
}

const std::vector<std::string>& session_script(const testkit::Program& p) {
  static std::vector<std::string> script;
  if (!script.empty()) return script;
  std::string lk = point_on_line(p, "lookup.c", 40).to_string();
  script = {"spoints lookup.c", "break wf.c:26", "break " + lk, "run", "print c", "bt", "frame 1",
            "print buf",        "print words",   "clear wf.c:26", "continue", "bt", "print word", "print cond",
            "print p",          "frame 1",       "print words", "stats", "clear " + lk, "continue"};
  return script;
}

struct SessionRun {
  std::string transcript;
  std::string program_output;
};

SessionRun run_session(debugger::Target& t, const std::vector<std::string>& script) {
  std::string text;
  for (const auto& s : script) text += s + "\n";
  std::istringstream in(text);
  std::ostringstream out;
  debugger::Session session(*t.nub, &t.image, debugger::stream_io(in, out, true));
  session.run();
  return {out.str(), {}};
}

void transport(Outcome& o, const std::string& nxrun) {
  auto p = wf_lookup();
  const auto& script = session_script(p);
  o.expect(script.size() == 20, fmt::format("script has {} commands", script.size()));
  auto dir = testkit::scratch_dir("acceptance-transport");
  auto image = testkit::write_program(p, dir, "wf.nxe");
  const std::string input = "the cat and the dog and the end";
  {
    std::ofstream(dir / "input.txt") << input;
  }

  std::istringstream target_in(input);
  std::ostringstream target_out;
  vm::MachineOptions opts;
  opts.input = &target_in;
  opts.output = &target_out;
  opts.args = {image.string()};
  auto local = debugger::launch_in_process(image, opts);
  auto single = run_session(*local, script);
  single.program_output = target_out.str();

  testkit::Child server({nxrun, "--listen", "0", image.string()}, dir / "input.txt", dir / "remote.out");
  auto line = server.read_err_line();
  std::smatch m;
  static const std::regex listening("listening on (\\d+)");
  if (!line || !std::regex_search(*line, m, listening)) {
    o.expect(false, "nxrun did not announce a port");
    return;
  }
  SessionRun two;
  {
    auto remote = debugger::launch_remote(image, "127.0.0.1", static_cast<std::uint16_t>(std::stoi(m[1])));
    two = run_session(*remote, script);
  }
  int status = server.wait();
  two.program_output = testkit::read_text(dir / "remote.out");
  std::ofstream(dir / "in-process.jsonl") << single.transcript;
  std::ofstream(dir / "two-process.jsonl") << two.transcript;

  o.expect(status == 0, fmt::format("nxrun exited {}", status));
  o.expect(single.transcript == two.transcript, "transcripts differ");
  o.expect(single.program_output == two.program_output, "program output differs");
  o.expect(single.program_output == "2 and\n1 cat\n1 dog\n1 end\n3 the\n", "unexpected program output");
  std::size_t records = static_cast<std::size_t>(std::count(single.transcript.begin(), single.transcript.end(), '\n'));
  o.expect(single.transcript.find("\"type\":\"error\"") == std::string::npos, "script produced an error record");
  o.note(fmt::format("20 commands, {} records, {} transcript bytes identical", records, single.transcript.size()));
}

void value_formatting(Outcome& o) {
  using namespace sym;
  Module m;
  m.file = "v.c";
  m.uname = 1;
  m.items.push_back(make_item(make_int(4, 4), 1));
  m.items.push_back(make_item(make_unsigned(4, 4), 2));
  m.items.push_back(make_item(make_enum(4, 4, "color", {{"RED", 1}, {"GREEN", 2}, {"BLUE", 3}}), 3));
  m.items.push_back(make_item(make_struct(4, 4, "bits", {make_field("f", 2, 0, 3, 2)}), 4));
  m.items.push_back(make_item(make_struct(8, 4, "point", {make_field("x", 1, 0), make_field("y", 1, 4)}), 5));
  m.items.push_back(make_item(make_pointer(4, 4, 5), 6));
  m.items.push_back(
      make_item(make_struct(12, 4, "seg", {make_field("from", 5, 0), make_field("to", 6, 8)}), 7));
  m.nuids = 7;
  SymbolIndex index(m);
  Bytes green = {std::byte{2}, {}, {}, {}};
  auto g = debugger::format_value(index, 3, green);
  o.expect(g == "GREEN", "enum printed " + g);
  int mismatches = 0;
  for (unsigned v = 0; v < 256; ++v) {
    Bytes unit = {static_cast<std::byte>(v), {}, {}, {}};
    auto want = static_cast<std::int64_t>((v >> 2) & 7);
    if (debugger::extract_bitfield(unit, 3, 2, false) != want) ++mismatches;
    if (debugger::format_value(index, 4, unit) != fmt::format("{{f = {}}}", want)) ++mismatches;
  }
  o.expect(mismatches == 0, fmt::format("{} bit-field mismatches", mismatches));
  Bytes seg = {std::byte{3}, {}, {}, {}, std::byte{0xfc}, std::byte{0xff}, std::byte{0xff}, std::byte{0xff},
               std::byte{0x40}, std::byte{0x10}, {}, {}};
  auto s = debugger::format_value(index, 7, seg);
  o.expect(s == "{from = {x = 3, y = -4}, to = 0x00001040}", "struct printed " + s);

  // The same through a compiled program's memory.
  auto p = testkit::build({testkit::fixture_source("types.c", 0x7e)});
  testkit::Debuggee d(p);
  std::string shade, span;
  d.nub->init(
      [&](const NubState& st) {
        shade = render(*d.nub, st, "shade");
        span = render(*d.nub, st, "span");
      },
      {});
  o.expect(shade == "GREEN", "shade printed " + shade);
  o.expect(std::regex_match(span, std::regex(R"(\{from = \{x = 1, y = 2\}, to = 0x[0-9a-f]{8}\})")),
           "span printed " + span);
  o.note(fmt::format("GREEN; 256/256 bit-field values; {}", s));
}

struct Criterion {
  std::string name;
  double limit_s;
  std::function<void(Outcome&)> run;
  bool needs_remote = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Acceptance criteria");
  bool skip_remote = false;
  std::string only;
  std::string nxrun =
#ifdef CDB_NXRUN
      CDB_NXRUN;
#else
      "";
#endif
  app.add_flag("--skip-remote", skip_remote, "skip the criterion that needs a separate nxrun process");
  app.add_option("--nxrun", nxrun, "path to nxrun for the two-process criterion");
  app.add_option("--only", only, "run criteria whose name contains this text");
  CLI11_PARSE(app, argc, argv);

  std::vector<Criterion> criteria = {
      {"getword-stopping-points", 1, getword_points},
      {"visible-symbol-chain", 1, visible_chain},
      {"pickle-roundtrip-and-corruption", 30, pickle_roundtrip},
      {"breakpoint-semantics-and-dismissal", 5, breakpoint_semantics},
      {"bpflags-sizing", 5, bpflags},
      {"shadow-stack", 5, shadow_stack},
      {"instrumentation-transparency", 10, transparency},
      {"transport-equivalence", 10, [&](Outcome& o) { transport(o, nxrun); }, true},
      {"value-formatting", 5, value_formatting},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && c.name.find(only) == std::string::npos) continue;
    if (c.needs_remote && (skip_remote || nxrun.empty())) {
      fmt::print("SKIP  {:<36} needs nxrun\n", c.name);
      continue;
    }
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("threw: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < c.limit_s;
    bool ok = o.passed() && in_time;
    failed += !ok;
    std::string detail = o.summary();
    if (!in_time) detail += fmt::format("; over the {} s limit", c.limit_s);
    fmt::print("{}  {:<36} {:6.2f}s / {:>2.0f}s  {}\n", ok ? "PASS" : "FAIL", c.name, secs, c.limit_s, detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
