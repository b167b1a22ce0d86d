#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "cdb/link/image.hpp"
#include "cdb/nub/nub.hpp"

namespace cdb::debugger {

// One unit of debugger output: a JSON object (one line) and its text form.
struct Record {
  std::string type;  // "stopped", "print", "error", ...
  std::string json;
  std::string text;
};

struct SessionIo {
  // nullopt at end of input, which ends the session like `quit`.
  std::function<std::optional<std::string>()> read_command;
  std::function<void(const Record&)> write;
  // Optional: returns target output produced since the last call. When set,
  // pending output is written as an "output" record ahead of each record.
  std::function<std::string()> target_output;
};

// Line-oriented streams; json selects which form of each record is written.
// A non-empty prompt is printed before each read.
SessionIo stream_io(std::istream& in, std::ostream& out, bool json, std::string prompt = {});

// The command-line debugger: a REPL over the nub interface. Commands:
// run, continue, break file:y[.x], clear file:y[.x], spoints [file],
// print name, bt, frame n, stats, help, quit.
class Session {
 public:
  // image is only used by `stats` and may be null.
  Session(nub::Nub& nub, const link::ExecutableImage* image, SessionIo io);

  // Drives the target to completion under the REPL. Returns the exit code,
  // or nullopt if the session was quit before the program exited.
  std::optional<int> run();

 private:
  enum class Phase { Startup, Stopped, Faulted, Exited };
  enum class Next { Read, Resume };

  void repl();
  Next dispatch(const std::string& line);
  void write(const Record& r);

  void on_startup(const nub::NubState& s);
  void on_break(const nub::NubState& s);
  void on_fault(const nub::NubState& s);

  void cmd_break(const std::string& arg, bool set);
  void cmd_spoints(const std::string& arg);
  void cmd_print(const std::string& name);
  void cmd_bt();
  void cmd_frame(const std::string& arg);
  void cmd_stats();
  void error(const std::string& message);
  bool require_stopped();

  nub::Nub& nub_;
  const link::ExecutableImage* image_;
  SessionIo io_;
  Phase phase_ = Phase::Startup;
  nub::NubState current_;   // selected frame's state
  int selected_ = -1;       // -1 before main has a frame
  int next_id_ = 1;
  std::map<std::string, int> breakpoints_;  // "file:y.x" -> id
};

}  // namespace cdb::debugger
