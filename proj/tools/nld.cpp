// nld: link object files into an executable image.

#include <filesystem>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cdb/link/linker.hpp"

using namespace cdb;

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"MiniC linker"};
  std::string output, entry = "main";
  std::vector<std::string> inputs;
  app.add_option("-o,--output", output, "executable image")->required();
  app.add_option("--entry", entry, "entry function");
  app.add_option("objects", inputs, "object files")->required()->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<codegen::ObjectModule> objects;
    for (const auto& in : inputs) objects.push_back(codegen::read_object(read_file(in)));
    auto image = link::link(objects, entry);
    fs::path out(output);
    write_file(out.string(), link::write_image(image));
    // The debugger finds symbol files next to the image.
    for (const auto& om : objects) write_file((out.parent_path() / om.symfile_name).string(), om.symfile);
  } catch (const Error& e) {
    fmt::print(stderr, "nld: {}\n", e.what());
    return 1;
  }
  return 0;
}
