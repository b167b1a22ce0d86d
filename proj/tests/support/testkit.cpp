#include "testkit.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "cdb/link/image.hpp"
#include "cdb/sym/pickle.hpp"

#ifndef CDB_TEST_FIXTURES
#error "CDB_TEST_FIXTURES must name tests/fixtures"
#endif
#ifndef CDB_TEST_SCRATCH
#error "CDB_TEST_SCRATCH must name a writable directory"
#endif

namespace testkit {

namespace fs = std::filesystem;

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fixture(const std::string& rel) { return fs::path(CDB_TEST_FIXTURES) / rel; }

Source fixture_source(const std::string& rel, std::uint32_t uname) {
  fs::path p = fixture(rel);
  return {p.filename().string(), read_text(p), uname};
}

std::vector<cdb::sym::Module> Program::modules() const {
  std::vector<cdb::sym::Module> out;
  for (const auto& o : objects) out.push_back(cdb::sym::unpickle(o.symfile));
  return out;
}

Program build(const std::vector<Source>& sources, bool instrument) {
  Program p;
  for (const Source& s : sources) {
    cdb::codegen::CodegenOptions opts;
    opts.uname = s.uname ? s.uname : cdb::codegen::make_uname(s.file, "testkit");
    opts.instrument = instrument;
    p.units.push_back(cdb::codegen::compile_source(s.text, s.file, opts));
    p.objects.push_back(p.units.back().object);
  }
  p.image = cdb::link::link(p.objects);
  return p;
}

RunResult run(const cdb::link::ExecutableImage& image, const std::string& input, std::vector<std::string> args) {
  std::istringstream in(input);
  std::ostringstream out;
  cdb::vm::MachineOptions opts;
  opts.input = &in;
  opts.output = &out;
  opts.args = std::move(args);
  cdb::vm::Machine m(image, opts);
  RunResult r;
  for (;;) {
    const auto& s = m.resume();
    if (auto* e = std::get_if<cdb::vm::Exited>(&s)) {
      r.exit_code = e->code;
      r.last = s;
      break;
    }
    if (std::holds_alternative<cdb::vm::Faulted>(s)) {
      r.last = s;
      r.exit_code = std::get<cdb::vm::Exited>(m.resume()).code;
      break;
    }
    throw std::runtime_error("unexpected stop: " + cdb::vm::describe(s));
  }
  r.output = out.str();
  return r;
}

Debuggee::Debuggee(const Program& p, std::string input, std::vector<std::string> args) : in(std::move(input)) {
  cdb::vm::MachineOptions opts;
  opts.input = &in;
  opts.output = &out;
  opts.args = std::move(args);
  machine = std::make_unique<cdb::vm::Machine>(p.image, opts);
  agent = std::make_unique<cdb::comm::TargetAgent>(*machine);
  link = std::make_unique<cdb::comm::DirectLink>(*agent);
  for (auto& m : p.modules()) store.add(std::move(m));
  nub = std::make_unique<cdb::nub::Nub>(*link, store);
}

cdb::nub::NubCoord spoint_coord(const Program& p, const std::string& file, std::size_t index) {
  for (const auto& u : p.units) {
    if (u.unit.file != file) continue;
    const auto& sp = u.plan.at(index);
    return cdb::nub::NubCoord::make(file, static_cast<std::uint16_t>(sp.loc.line),
                                    static_cast<std::uint16_t>(sp.loc.col));
  }
  throw std::runtime_error("no unit " + file);
}

namespace {

std::vector<char*> argv_of(const std::vector<std::string>& argv) {
  std::vector<char*> out;
  for (const auto& a : argv) out.push_back(const_cast<char*>(a.c_str()));
  out.push_back(nullptr);
  return out;
}

void check(int rc, const char* what) {
  if (rc < 0) throw std::runtime_error(std::string(what) + ": " + std::strerror(errno));
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input) {
  int in[2], out[2], err[2];
  check(pipe(in), "pipe");
  check(pipe(out), "pipe");
  check(pipe(err), "pipe");
  pid_t pid = fork();
  check(pid, "fork");
  if (pid == 0) {
    dup2(in[0], 0);
    dup2(out[1], 1);
    dup2(err[1], 2);
    for (int fd : {in[0], in[1], out[0], out[1], err[0], err[1]}) close(fd);
    auto args = argv_of(argv);
    execv(args[0], args.data());
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  close(err[1]);

  // Feed stdin from a thread so large outputs cannot deadlock the pipes.
  std::thread feeder([fd = in[1], &input] {
    signal(SIGPIPE, SIG_IGN);
    std::size_t off = 0;
    while (off < input.size()) {
      ssize_t n = write(fd, input.data() + off, input.size() - off);
      if (n <= 0) break;
      off += static_cast<std::size_t>(n);
    }
    close(fd);
  });

  ProcessResult r;
  pollfd fds[2] = {{out[0], POLLIN, 0}, {err[0], POLLIN, 0}};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    if (poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (int i = 0; i < 2; ++i) {
      if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      ssize_t n = read(fds[i].fd, buf, sizeof buf);
      if (n <= 0) {
        close(fds[i].fd);
        fds[i].fd = -1;
        --open_fds;
        continue;
      }
      (i == 0 ? r.out : r.err).append(buf, static_cast<std::size_t>(n));
    }
  }
  feeder.join();
  int status = 0;
  waitpid(pid, &status, 0);
  r.exit_code = decode_status(status);
  return r;
}

Child::Child(const std::vector<std::string>& argv, const fs::path& stdin_file, const fs::path& stdout_file) {
  int err[2];
  check(pipe(err), "pipe");
  pid_ = fork();
  check(pid_, "fork");
  if (pid_ == 0) {
    int in = open(stdin_file.empty() ? "/dev/null" : stdin_file.c_str(), O_RDONLY);
    int out = stdout_file.empty() ? open("/dev/null", O_WRONLY) : open(stdout_file.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (in < 0 || out < 0) _exit(126);
    dup2(in, 0);
    dup2(out, 1);
    dup2(err[1], 2);
    close(err[0]);
    close(err[1]);
    close(in);
    close(out);
    auto args = argv_of(argv);
    execv(args[0], args.data());
    _exit(127);
  }
  close(err[1]);
  err_fd_ = err[0];
}

Child::~Child() {
  if (!reaped_ && pid_ > 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
  if (err_fd_ >= 0) close(err_fd_);
}

std::optional<std::string> Child::read_err_line() {
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    pollfd p{err_fd_, POLLIN, 0};
    if (poll(&p, 1, 10000) <= 0) return std::nullopt;
    char buf[512];
    ssize_t n = read(err_fd_, buf, sizeof buf);
    if (n <= 0) {
      if (buffer_.empty()) return std::nullopt;
      return std::exchange(buffer_, {});
    }
    buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

int Child::wait() {
  if (!reaped_) {
    waitpid(pid_, &status_, 0);
    reaped_ = true;
  }
  return decode_status(status_);
}

fs::path write_program(const Program& p, const fs::path& dir, const std::string& name) {
  auto put = [](const fs::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
  };
  for (const auto& o : p.objects) put(dir / o.symfile_name, o.symfile);
  put(dir / name, cdb::link::write_image(p.image));
  return dir / name;
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::path(CDB_TEST_SCRATCH) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace testkit
