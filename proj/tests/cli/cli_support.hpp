#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "testkit.hpp"

namespace cli {

inline const std::string kMinicc = CDB_MINICC;
inline const std::string kNld = CDB_NLD;
inline const std::string kNxrun = CDB_NXRUN;
inline const std::string kCdb = CDB_CDB;

// Compiles fixtures with minicc and links them with nld into dir/name.
// Fails the current test on any tool error.
inline std::filesystem::path build_image(const std::filesystem::path& dir, const std::vector<std::string>& fixtures,
                                         const std::string& name, std::vector<std::string> cc_flags = {}) {
  std::vector<std::string> link = {kNld, "-o", (dir / name).string()};
  for (const auto& f : fixtures) {
    auto obj = dir / (std::filesystem::path(f).stem().string() + ".obj");
    std::vector<std::string> cc = {kMinicc, "-o", obj.string()};
    cc.insert(cc.end(), cc_flags.begin(), cc_flags.end());
    cc.push_back(testkit::fixture(f).string());
    auto r = testkit::run_process(cc);
    if (r.exit_code != 0) throw std::runtime_error("minicc " + f + ": " + r.err);
    link.push_back(obj.string());
  }
  auto r = testkit::run_process(link);
  if (r.exit_code != 0) throw std::runtime_error("nld: " + r.err);
  return dir / name;
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

}  // namespace cli
