#include "cdb/debugger/session.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cdb/debugger/format.hpp"
#include "cdb/debugger/stats.hpp"
#include "cdb/vm/machine.hpp"

namespace cdb::debugger {

using nlohmann::json;
using nub::NubCoord;
using nub::NubState;

namespace {

struct Quit {};

const char* kHelp =
    "commands:\n"
    "  run | continue        start or resume the program\n"
    "  break file:y[.x]      set a breakpoint at a stopping point\n"
    "  clear file:y[.x]      remove a breakpoint\n"
    "  spoints [file]        list stopping points\n"
    "  print name            show a variable in the selected frame\n"
    "  bt                    show the call stack\n"
    "  frame n               select frame n\n"
    "  stats                 sizes of the debugging data\n"
    "  quit                  end the session";

std::string loc_of(const json& j) {
  return fmt::format("{}:{}.{}", j.at("file").get<std::string>(), j.at("line").get<int>(), j.at("col").get<int>());
}

void put_loc(json& j, const NubCoord& c) {
  j["file"] = c.file_name();
  j["line"] = c.y;
  j["col"] = c.x;
}

json frame_json(int n, const NubState& s) {
  json j{{"frame", n}, {"function", s.function()}};
  put_loc(j, s.src);
  return j;
}

std::string render_text(const json& j) {
  const std::string type = j.at("type");
  if (type == "startup") return fmt::format("program loaded; stopped before main at {}", loc_of(j));
  if (type == "stopped") return fmt::format("stopped at {} {}", j.at("function").get<std::string>(), loc_of(j));
  if (type == "fault") {
    return fmt::format("fault ({}) in {} {}", j.at("kind").get<std::string>(), j.at("function").get<std::string>(),
                       loc_of(j));
  }
  if (type == "exited") return fmt::format("program exited with code {}", j.at("code").get<int>());
  if (type == "break") {
    return fmt::format("breakpoint {} at {}{}", j.at("id").get<int>(), loc_of(j),
                       j.value("existing", false) ? " (already set)" : "");
  }
  if (type == "clear") return fmt::format("cleared breakpoint {} at {}", j.at("id").get<int>(), loc_of(j));
  if (type == "spoints") {
    std::string out;
    for (const auto& p : j.at("points")) {
      if (!out.empty()) out += "\n";
      out += fmt::format("{:>4} {}", p.at("index").get<int>(), loc_of(p));
    }
    return out.empty() ? "no stopping points" : out;
  }
  if (type == "print") return fmt::format("{} = {}", j.at("name").get<std::string>(), j.at("value").get<std::string>());
  if (type == "bt") {
    std::string out;
    for (const auto& f : j.at("frames")) {
      if (!out.empty()) out += "\n";
      out += fmt::format("#{} {} {}", f.at("frame").get<int>(), f.at("function").get<std::string>(), loc_of(f));
    }
    return out.empty() ? "no active frames" : out;
  }
  if (type == "frame") {
    return fmt::format("#{} {} {}", j.at("frame").get<int>(), j.at("function").get<std::string>(), loc_of(j));
  }
  if (type == "stats" || type == "help" || type == "output") return j.at("text");
  if (type == "error") {
    std::string out = j.at("message");
    if (j.contains("candidates")) {
      for (const auto& c : j.at("candidates")) out += "\n  " + loc_of(c);
    }
    return out;
  }
  return j.dump();
}

Record make_record(const json& j) { return {j.at("type"), j.dump(), render_text(j)}; }

struct Target {
  std::string file;
  int line = 0;
  int col = 0;  // 0 when omitted
};

std::optional<Target> parse_target(const std::string& arg) {
  auto colon = arg.rfind(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  Target t;
  t.file = arg.substr(0, colon);
  std::string rest = arg.substr(colon + 1);
  auto dot = rest.find('.');
  auto parse_int = [](std::string_view s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size() && out > 0 && out <= 0xffff;
  };
  if (!parse_int(std::string_view(rest).substr(0, dot), t.line)) return std::nullopt;
  if (dot != std::string::npos && !parse_int(std::string_view(rest).substr(dot + 1), t.col)) return std::nullopt;
  return t;
}

std::pair<std::string, std::string> split_command(const std::string& line) {
  std::istringstream in(line);
  std::string cmd, arg, extra;
  in >> cmd >> arg;
  std::getline(in, extra);
  if (extra.find_first_not_of(" \t\r") != std::string::npos) arg += " " + extra;
  return {cmd, arg};
}

}  // namespace

SessionIo stream_io(std::istream& in, std::ostream& out, bool json_mode, std::string prompt) {
  SessionIo io;
  io.read_command = [&in, &out, prompt]() -> std::optional<std::string> {
    if (!prompt.empty()) out << prompt << std::flush;
    std::string line;
    if (!std::getline(in, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  io.write = [&out, json_mode](const Record& r) { out << (json_mode ? r.json : r.text) << '\n' << std::flush; };
  return io;
}

Session::Session(nub::Nub& nub, const link::ExecutableImage* image, SessionIo io)
    : nub_(nub), image_(image), io_(std::move(io)) {}

std::optional<int> Session::run() {
  try {
    int code = nub_.init([this](const NubState& s) { on_startup(s); }, [this](const NubState& s) { on_fault(s); });
    phase_ = Phase::Exited;
    write(make_record(json{{"type", "exited"}, {"code", code}}));
    repl();
    return code;
  } catch (const Quit&) {
    return nub_.exit_code();
  }
}

void Session::on_startup(const NubState& s) {
  phase_ = Phase::Startup;
  current_ = s;
  selected_ = -1;
  json j{{"type", "startup"}, {"function", s.function()}};
  put_loc(j, s.src);
  write(make_record(j));
  repl();
}

void Session::on_break(const NubState& s) {
  phase_ = Phase::Stopped;
  current_ = s;
  selected_ = 0;
  json j{{"type", "stopped"}, {"function", s.function()}};
  put_loc(j, s.src);
  write(make_record(j));
  repl();
}

void Session::on_fault(const NubState& s) {
  phase_ = Phase::Faulted;
  current_ = s;
  selected_ = 0;
  auto kind = static_cast<vm::FaultKind>(nub_.last_fault().value_or(0));
  json j{{"type", "fault"}, {"kind", vm::to_string(kind)}, {"function", s.function()}};
  put_loc(j, s.src);
  write(make_record(j));
  repl();
}

void Session::repl() {
  while (true) {
    auto line = io_.read_command();
    if (!line) {
      if (phase_ == Phase::Exited) return;
      throw Quit{};
    }
    if (dispatch(*line) == Next::Resume) return;
  }
}

void Session::write(const Record& r) {
  if (io_.target_output) {
    std::string pending = io_.target_output();
    if (!pending.empty()) io_.write(make_record(json{{"type", "output"}, {"text", pending}}));
  }
  io_.write(r);
}

void Session::error(const std::string& message) { write(make_record(json{{"type", "error"}, {"message", message}})); }

bool Session::require_stopped() {
  if (phase_ == Phase::Exited) {
    error("the program is not running");
    return false;
  }
  return true;
}

Session::Next Session::dispatch(const std::string& line) {
  auto [cmd, arg] = split_command(line);
  if (cmd.empty() || cmd[0] == '#') return Next::Read;
  try {
    if (cmd == "run" || cmd == "r" || cmd == "continue" || cmd == "c") {
      if (phase_ == Phase::Exited) {
        error("the program has exited");
        return Next::Read;
      }
      if ((cmd == "run" || cmd == "r") && phase_ != Phase::Startup) {
        error("the program is already running; use continue");
        return Next::Read;
      }
      return Next::Resume;
    }
    if (cmd == "quit" || cmd == "q") throw Quit{};
    if (cmd == "break" || cmd == "b") {
      cmd_break(arg, true);
    } else if (cmd == "clear") {
      cmd_break(arg, false);
    } else if (cmd == "spoints") {
      cmd_spoints(arg);
    } else if (cmd == "print" || cmd == "p") {
      cmd_print(arg);
    } else if (cmd == "bt" || cmd == "where") {
      cmd_bt();
    } else if (cmd == "frame" || cmd == "f") {
      cmd_frame(arg);
    } else if (cmd == "stats") {
      cmd_stats();
    } else if (cmd == "help") {
      write(make_record(json{{"type", "help"}, {"text", kHelp}}));
    } else {
      error(fmt::format("unknown command '{}'; try help", cmd));
    }
  } catch (const Quit&) {
    throw;
  } catch (const Error& e) {
    error(e.what());
  }
  return Next::Read;
}

void Session::cmd_break(const std::string& arg, bool set) {
  const char* verb = set ? "break" : "clear";
  auto target = parse_target(arg);
  if (!target) {
    error(fmt::format("usage: {} file:line[.column]", verb));
    return;
  }
  if (!require_stopped()) return;
  NubCoord coord = NubCoord::make(target->file, static_cast<std::uint16_t>(target->line),
                                  static_cast<std::uint16_t>(target->col));
  if (target->col == 0) {
    std::vector<NubCoord> found;
    nub_.src(coord, [&](int, const NubCoord& c, void*) { found.push_back(c); }, nullptr);
    if (found.empty()) {
      error(fmt::format("no stopping point at {}:{}", target->file, target->line));
      return;
    }
    if (found.size() > 1) {
      json j{{"type", "error"},
             {"message", fmt::format("{}:{} has {} stopping points; use {} {}:{}.column", target->file, target->line,
                                     found.size(), verb, target->file, target->line)}};
      json cands = json::array();
      for (const auto& c : found) {
        json cj;
        put_loc(cj, c);
        cands.push_back(cj);
      }
      j["candidates"] = cands;
      write(make_record(j));
      return;
    }
    coord = found.front();
  }
  std::string key = coord.to_string();
  json j{{"type", verb}};
  put_loc(j, coord);
  if (set) {
    auto existing = breakpoints_.find(key);
    nub_.set(coord, [this](const NubState& s) { on_break(s); });
    if (existing != breakpoints_.end()) {
      j["id"] = existing->second;
      j["existing"] = true;
    } else {
      j["id"] = breakpoints_[key] = next_id_++;
    }
  } else {
    auto it = breakpoints_.find(key);
    if (!nub_.remove(coord) || it == breakpoints_.end()) {
      error(fmt::format("no breakpoint at {}", key));
      return;
    }
    j["id"] = it->second;
    breakpoints_.erase(it);
  }
  write(make_record(j));
}

void Session::cmd_spoints(const std::string& arg) {
  json points = json::array();
  nub_.src(NubCoord::make(arg, 0, 0),
           [&](int i, const NubCoord& c, void*) {
             json p{{"index", i}};
             put_loc(p, c);
             points.push_back(p);
           },
           nullptr);
  write(make_record(json{{"type", "spoints"}, {"points", points}}));
}

void Session::cmd_print(const std::string& name) {
  if (name.empty() || name.find(' ') != std::string::npos) {
    error("usage: print name");
    return;
  }
  if (!require_stopped()) return;
  auto v = nub_.resolve_value(current_, name);
  if (!v) {
    error(fmt::format("{} is not visible", name));
    return;
  }
  write(make_record(json{{"type", "print"},
                         {"name", name},
                         {"ctype", type_spelling(*v->module, v->type)},
                         {"value", format_value(*v->module, v->type, v->bytes)}}));
}

void Session::cmd_bt() {
  if (!require_stopped()) return;
  json frames = json::array();
  if (selected_ >= 0) {
    for (int n = 0;; ++n) {
      NubState s;
      try {
        nub_.frame(n, s);
      } catch (const nub::FrameRangeError&) {
        break;
      }
      frames.push_back(frame_json(n, s));
    }
  }
  write(make_record(json{{"type", "bt"}, {"frames", frames}}));
}

void Session::cmd_frame(const std::string& arg) {
  int n = -1;
  auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
  if (arg.empty() || ec != std::errc{} || p != arg.data() + arg.size() || n < 0) {
    error("usage: frame n");
    return;
  }
  if (!require_stopped()) return;
  if (selected_ < 0) {
    error("there are no active frames");
    return;
  }
  NubState s;
  nub_.frame(n, s);
  current_ = s;
  selected_ = n;
  json j = frame_json(n, s);
  j["type"] = "frame";
  write(make_record(j));
}

void Session::cmd_stats() {
  if (!image_) {
    error("no image loaded");
    return;
  }
  write(make_record(json{{"type", "stats"}, {"text", stats_report(*image_, nub_.symbols()).to_text()}}));
}

}  // namespace cdb::debugger
