// minicc: compile one MiniC unit to an object file and its symbol file.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cdb/codegen/codegen.hpp"
#include "cdb/minic/diagnostics.hpp"

using namespace cdb;

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"MiniC compiler"};
  std::string input, output, uname_text, nonce;
  bool no_instrument = false;
  app.add_option("source", input, "MiniC source file")->required()->check(CLI::ExistingFile);
  app.add_option("-o,--output", output, "object file (default: <stem>.obj in the current directory)");
  app.add_option("--uname", uname_text, "unit name as hex, overriding the hashed default");
  app.add_option("--nonce", nonce, "compilation nonce mixed into the default unit name");
  app.add_flag("--no-instrument", no_instrument, "omit breakpoint checks and shadow frames");
  CLI11_PARSE(app, argc, argv);

  fs::path src(input);
  fs::path obj = output.empty() ? fs::path(src.stem().string() + ".obj") : fs::path(output);
  std::string unit_file = src.filename().string();

  codegen::CodegenOptions opts;
  opts.instrument = !no_instrument;
  if (!uname_text.empty()) {
    try {
      opts.uname = static_cast<std::uint32_t>(std::stoul(uname_text, nullptr, 16));
    } catch (const std::exception&) {
      fmt::print(stderr, "minicc: bad --uname '{}'\n", uname_text);
      return 2;
    }
    if (opts.uname == 0) {
      fmt::print(stderr, "minicc: --uname must be nonzero\n");
      return 2;
    }
  } else {
    opts.uname = codegen::make_uname(unit_file, nonce.empty() ? fs::absolute(src).string() : nonce);
  }

  try {
    Bytes text = read_file(src.string());
    std::string_view source(reinterpret_cast<const char*>(text.data()), text.size());
    auto cu = codegen::compile_source(source, unit_file, opts);
    write_file(obj.string(), codegen::write_object(cu.object));
    write_file((obj.parent_path() / cu.object.symfile_name).string(), cu.object.symfile);
  } catch (const minic::CompileError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.to_string() << '\n';
    return 1;
  } catch (const Error& e) {
    fmt::print(stderr, "minicc: {}\n", e.what());
    return 1;
  }
  return 0;
}
