#include <doctest.h>

#include <algorithm>

#include "cdb/link/image.hpp"
#include "cdb/link/linker.hpp"
#include "progen.hpp"
#include "testkit.hpp"

using namespace cdb;
using namespace cdb::link;

namespace {

std::vector<testkit::Source> wf_lookup() {
  return {testkit::fixture_source("wf.c", 0x49499895), testkit::fixture_source("lookup.c", 0x494999f8)};
}

std::uint32_t word(const Bytes& b, std::uint32_t at) {
  ByteReader r(std::span<const std::byte>(b).subspan(at, 4));
  return r.get_u32le();
}

std::string link_error(const std::vector<testkit::Source>& sources) {
  try {
    testkit::build(sources);
  } catch (const LinkError& e) {
    return e.what();
  }
  FAIL("link succeeded");
  return {};
}

}  // namespace

TEST_SUITE("linker") {
  TEST_CASE("wf.c with lookup.c: two records, terminator, 37 flags") {
    auto p = testkit::build(wf_lookup());
    const auto& img = p.image;
    CHECK(img.bpflags_size == 37);
    REQUIRE(img.units.size() == 2);
    CHECK(word(img.metadata, 0) == 0x49499895u);
    CHECK(word(img.metadata, 8) == 0x494999f8u);
    CHECK(word(img.metadata, 16) == 0u);
    CHECK(word(img.metadata, 20) == 0u);
    CHECK(img.units[0].record_address == 0);
    CHECK(img.units[1].record_address == 8);
    CHECK(img.units[0].spoint_count == 36);
    CHECK(img.units[1].spoint_count == 37);
    CHECK(img.manifest().at(0x49499895) == "49499895.sym");
  }

  TEST_CASE("address vectors hold the linked addresses") {
    auto p = testkit::build(wf_lookup());
    const auto& img = p.image;
    auto function_index = [&](const std::string& name, std::uint32_t uname) {
      for (std::uint32_t i = 0; i < img.functions.size(); ++i)
        if (img.functions[i].name == name && img.functions[i].uname == uname) return i;
      FAIL("no function " << name);
      return 0u;
    };
    std::uint32_t vec = word(img.metadata, 4);
    // [&words, main, tprint, getword, isletter]
    std::uint32_t words = word(img.metadata, vec);
    CHECK(words >= img.units[0].data_address);
    CHECK(word(img.data, words - kDataBase) == 0u);
    CHECK(word(img.metadata, vec + 4) == function_address(function_index("main", 0x49499895)));
    CHECK(word(img.metadata, vec + 8) == function_address(function_index("tprint", 0x49499895)));
    CHECK(word(img.metadata, vec + 12) == function_address(function_index("getword", 0x49499895)));
    CHECK(word(img.metadata, vec + 16) == function_address(function_index("isletter", 0x49499895)));
    CHECK(img.entry == function_index("main", 0x49499895));

    // Every STATIC/GLOBAL index of every unit is in range of its vector.
    auto mods = p.modules();
    for (std::size_t u = 0; u < mods.size(); ++u) {
      std::uint32_t v = word(img.metadata, img.units[u].record_address + 4);
      std::uint32_t next = u + 1 < mods.size() ? word(img.metadata, img.units[u + 1].record_address + 4)
                                               : static_cast<std::uint32_t>(img.metadata.size());
      for (const auto& item : mods[u].items) {
        auto* s = item.symbol();
        if (s && s->has_address_index()) CHECK(v + 4 * s->address_index() + 4 <= next);
      }
    }
  }

  TEST_CASE("sentinel frame and _Nub_tos") {
    auto p = testkit::build(wf_lookup());
    const auto& img = p.image;
    CHECK(img.sentinel_address == kDataBase);
    CHECK(img.tos_address == kDataBase + 20);
    CHECK(word(img.data, img.tos_address - kDataBase) == img.sentinel_address);
    for (std::uint32_t i = 0; i < 20; ++i) CHECK(img.data[i] == std::byte{0});
  }

  TEST_CASE("single unit: one record and its own spoint count") {
    auto p = testkit::build({testkit::fixture_source("fact.c", 0xfac7)});
    CHECK(p.image.units.size() == 1);
    CHECK(word(p.image.metadata, 8) == 0u);
    CHECK(p.image.bpflags_size == p.units[0].plan.size());
  }

  TEST_CASE("flag array is sized by the largest unit") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      std::vector<testkit::Source> sources{{"main.c", "int main(void) { return 0; }\n", 0}};
      std::size_t want = 2;
      int n = static_cast<int>(seed % 4) + 1;
      for (int k = 0; k < n; ++k) {
        std::string prefix = "u" + std::to_string(k) + "_";
        auto unit = progen::Generator(seed * 31 + k, prefix).generate();
        want = std::max(want, unit.points.size());
        sources.push_back({prefix + ".c", unit.text, 0});
      }
      CAPTURE(seed);
      auto p = testkit::build(sources);
      CHECK(p.image.bpflags_size == want);
      CHECK(p.image.units.size() == sources.size());
      // Records list every unit exactly once, then the terminator.
      for (std::size_t u = 0; u < sources.size(); ++u)
        CHECK(word(p.image.metadata, static_cast<std::uint32_t>(8 * u)) == p.objects[u].uname);
      CHECK(word(p.image.metadata, static_cast<std::uint32_t>(8 * sources.size())) == 0u);
    }
  }

  TEST_CASE("resolution does not depend on object order") {
    auto a = testkit::build(wf_lookup());
    auto sources = wf_lookup();
    std::reverse(sources.begin(), sources.end());
    auto b = testkit::build(sources);
    const std::string input = "the cat and the dog and the end";
    auto ra = testkit::run(a.image, input), rb = testkit::run(b.image, input);
    CHECK(ra.output == rb.output);
    CHECK(ra.output == "2 and\n1 cat\n1 dog\n1 end\n3 the\n");
  }

  TEST_CASE("link errors name the units involved") {
    auto dup = link_error({{"a.c", "int x; int main(void) { return 0; }", 1}, {"b.c", "int x;", 2}});
    CHECK(dup.find("'x'") != std::string::npos);
    CHECK(dup.find("a.c") != std::string::npos);
    CHECK(dup.find("b.c") != std::string::npos);

    auto undef = link_error({{"a.c", "int f(void); int main(void) { return f(); }", 1}});
    CHECK(undef.find("'f'") != std::string::npos);
    CHECK(undef.find("a.c") != std::string::npos);

    auto kind = link_error({{"a.c", "int f(void); int main(void) { return f(); }", 1}, {"b.c", "int f;", 2}});
    CHECK(kind.find("'f'") != std::string::npos);

    auto collide = link_error({{"a.c", "int main(void) { return 0; }", 7}, {"b.c", "int y;", 7}});
    CHECK(collide.find("0x00000007") != std::string::npos);

    auto reserved = link_error({{"a.c", "int _Nub_tos; int main(void) { return 0; }", 1}});
    CHECK(reserved.find("_Nub_tos") != std::string::npos);

    auto no_main = link_error({{"a.c", "int f(void) { return 0; }", 1}});
    CHECK(no_main.find("main") != std::string::npos);
  }

  TEST_CASE("images round-trip and reject corruption") {
    auto p = testkit::build(wf_lookup());
    Bytes b = write_image(p.image);
    CHECK(read_image(b) == p.image);
    Bytes bad = b;
    bad[40] ^= std::byte{1};
    CHECK_THROWS_AS(read_image(bad), ImageFormatError);
    CHECK_THROWS_AS(read_image(std::span<const std::byte>(b).first(10)), ImageFormatError);
  }
}
