#include <doctest.h>

#include <bit>
#include <map>

#include "cdb/debugger/format.hpp"
#include "cdb/debugger/stats.hpp"
#include "cdb/sym/construct.hpp"
#include "testkit.hpp"

using namespace cdb;
using namespace cdb::sym;
using debugger::format_value;

namespace {

enum : Uid { kInt = 1, kUns, kChar, kDouble, kColor, kFlags, kPoint, kPointPtr, kSegment, kName, kCInt, kVoid, kFn, kPtrPtr };

const SymbolIndex& fixture_types() {
  static const SymbolIndex index([] {
    Module m;
    m.file = "t.c";
    m.uname = 1;
    auto add = [&](Type t, Uid uid) { m.items.push_back(make_item(std::move(t), uid)); };
    add(make_int(4, 4), kInt);
    add(make_unsigned(4, 4), kUns);
    add(make_int(1, 1), kChar);
    add(make_float(8, 8), kDouble);
    add(make_enum(4, 4, "color", {{"RED", 1}, {"GREEN", 2}, {"BLUE", 3}}), kColor);
    add(make_struct(4, 4, "flags",
                    {make_field("lo", kUns, 0, 2, 0), make_field("mid", kUns, 0, 3, 2), make_field("neg", kInt, 0, 3, 5)}),
        kFlags);
    add(make_struct(8, 4, "point", {make_field("x", kInt, 0), make_field("y", kInt, 4)}), kPoint);
    add(make_pointer(4, 4, kPoint), kPointPtr);
    add(make_struct(16, 4, "segment",
                    {make_field("from", kPoint, 0), make_field("to", kPointPtr, 8), make_field("c", kColor, 12)}),
        kSegment);
    add(make_array(6, 1, kChar, 6), kName);
    add(make_const(4, 4, kInt), kCInt);
    add(make_void(), kVoid);
    add(make_function(0, 1, kInt, {kInt, kPointPtr}), kFn);
    add(make_pointer(4, 4, kPointPtr), kPtrPtr);
    m.nuids = kPtrPtr;
    return m;
  }());
  return index;
}

Bytes le(std::initializer_list<std::uint32_t> words) {
  Bytes out;
  for (auto w : words)
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(w >> (8 * i)));
  return out;
}

}  // namespace

TEST_SUITE("format") {
  TEST_CASE("enum values print their names") {
    const auto& m = fixture_types();
    CHECK(format_value(m, kColor, le({2})) == "GREEN");
    CHECK(format_value(m, kColor, le({3})) == "BLUE");
    CHECK(format_value(m, kColor, le({9})) == "9");
    CHECK(format_value(m, kColor, le({0xffffffff})) == "-1");
  }

  TEST_CASE("bit-field extraction agrees with mask and shift over every byte") {
    for (unsigned v = 0; v < 256; ++v) {
      CAPTURE(v);
      Bytes unit = {static_cast<std::byte>(v), std::byte{0}, std::byte{0}, std::byte{0}};
      CHECK(debugger::extract_bitfield(unit, 3, 2, false) == static_cast<std::int64_t>((v >> 2) & 7));
      std::int64_t s = (v >> 2) & 7;
      if (s & 4) s -= 8;
      CHECK(debugger::extract_bitfield(unit, 3, 2, true) == s);
    }
    Bytes b = {std::byte{0b00010100}, {}, {}, {}};
    CHECK(debugger::extract_bitfield(b, 3, 2, false) == 5);
    CHECK(debugger::extract_bitfield(le({0x80000000}), 1, 31, false) == 1);
    CHECK(debugger::extract_bitfield(le({0xffffffff}), 32, 0, true) == -1);
    CHECK_THROWS_AS(debugger::extract_bitfield(b, 0, 0, false), debugger::FormatError);
    CHECK_THROWS_AS(debugger::extract_bitfield(b, 4, 30, false), debugger::FormatError);
  }

  TEST_CASE("bit-field structs print each field") {
    const auto& m = fixture_types();
    // lo=1, mid=5, neg=-2 (0b110)
    std::uint32_t w = 1u | (5u << 2) | (6u << 5);
    CHECK(format_value(m, kFlags, le({w})) == "{lo = 1, mid = 5, neg = -2}");
  }

  TEST_CASE("structs with nested structs and pointers print recursively") {
    const auto& m = fixture_types();
    Bytes b = le({3, 0xfffffffc, 0x1040, 2});
    CHECK(format_value(m, kSegment, b) == "{from = {x = 3, y = -4}, to = 0x00001040, c = GREEN}");
    CHECK(format_value(m, kPointPtr, le({0})) == "0x00000000");
  }

  TEST_CASE("scalars, arrays and qualifiers") {
    const auto& m = fixture_types();
    CHECK(format_value(m, kInt, le({0xfffffff9})) == "-7");
    CHECK(format_value(m, kUns, le({4000000000u})) == "4000000000");
    CHECK(format_value(m, kCInt, le({42})) == "42");
    Bytes half(8);
    std::uint64_t bits = std::bit_cast<std::uint64_t>(0.5);
    for (int i = 0; i < 8; ++i) half[i] = static_cast<std::byte>(bits >> (8 * i));
    CHECK(format_value(m, kDouble, half) == "0.5");
    Bytes name = {std::byte{'h'}, std::byte{'i'}, std::byte{'\n'}, {}, std::byte{'x'}, {}};
    CHECK(format_value(m, kName, name) == "{104, 105, 10, 0, 120, 0} \"hi\\n\"");
    CHECK(format_value(m, kFn, le({0x80000003})) == "function at 0x80000003");
  }

  TEST_CASE("malformed requests are format errors") {
    const auto& m = fixture_types();
    CHECK_THROWS_AS(format_value(m, kVoid, Bytes{}), debugger::FormatError);
    CHECK_THROWS_AS(format_value(m, kInt, Bytes(3)), debugger::FormatError);
    CHECK_THROWS_AS(format_value(m, 999, Bytes(4)), debugger::FormatError);
  }

  TEST_CASE("type spellings") {
    const auto& m = fixture_types();
    CHECK(debugger::type_spelling(m, kPointPtr) == "struct point *");
    CHECK(debugger::type_spelling(m, kPtrPtr) == "struct point **");
    CHECK(debugger::type_spelling(m, kName) == "char [6]");
    CHECK(debugger::type_spelling(m, kCInt) == "const int");
    CHECK(debugger::type_spelling(m, kColor) == "enum color");
    CHECK(debugger::type_spelling(m, kFn) == "int ()");
    CHECK(debugger::type_spelling(m, 999) == "?");
  }

  TEST_CASE("compiled globals format from target memory") {
    auto p = testkit::build({testkit::fixture_source("types.c", 0x7e)});
    testkit::Debuggee d(p);
    std::map<std::string, std::string> at_start, at_exit_point;
    auto render = [&](const nub::NubState& s, const std::string& name) {
      auto v = d.nub->resolve_value(s, name);
      REQUIRE(v);
      return debugger::format_value(*v->module, v->type, v->bytes);
    };
    const std::uint32_t ret_line = 53;
    nub::NubCoord ret;
    for (const auto& sp : p.units[0].plan)
      if (sp.loc.line == ret_line) ret = testkit::spoint_coord(p, "types.c", static_cast<std::size_t>(sp.index));
    REQUIRE(ret.y == ret_line);
    d.nub->init(
        [&](const nub::NubState& s) {
          for (auto n : {"shade", "odd", "bits", "origin", "greeting", "ratio", "third", "big", "small", "letter",
                         "numbers"})
            at_start[n] = render(s, n);
          d.nub->set(ret, [&](const nub::NubState& b) {
            for (auto n : {"bits", "odd", "local", "span"}) at_exit_point[n] = render(b, n);
            auto first = render(b, "first");
            CHECK(first.find("{value = 1, where = 0x") == 0);
            CHECK(first.find("tag = {97, 0, 0, 0} \"a\"}") != std::string::npos);
          });
        },
        {});
    CHECK(at_start["shade"] == "GREEN");
    CHECK(at_start["odd"] == "RED");
    CHECK(at_start["bits"] == "{lo = 0, mid = 0, neg = 0}");
    CHECK(at_start["origin"] == "{x = 3, y = -4}");
    CHECK(at_start["greeting"] == "{104, 105, 0, 0, 0, 0, 0, 0} \"hi\"");
    CHECK(at_start["ratio"] == "0.5");
    CHECK(at_start["third"] == "0.25");
    CHECK(at_start["big"] == "4000000000");
    CHECK(at_start["small"] == "-7");
    CHECK(at_start["letter"] == "113");
    CHECK(at_start["numbers"] == "{10, -20, 30}");
    CHECK(at_exit_point["bits"] == "{lo = 1, mid = 5, neg = -2}");
    CHECK(at_exit_point["odd"] == "7");
    CHECK(at_exit_point["local"] == "{x = 8, y = 9}");
    CHECK(at_exit_point["span"].find("{from = {x = 1, y = 2}, to = 0x") == 0);
    CHECK(d.out.str() == "9");
  }

  TEST_CASE("statistics categories sum to the debugging bytes") {
    auto p = testkit::build({testkit::fixture_source("wf.c", 0x49499895), testkit::fixture_source("lookup.c", 0x494999f8)});
    nub::MemoryStore store;
    std::uint64_t symfiles = 0;
    for (auto& m : p.modules()) store.add(std::move(m));
    for (const auto& o : p.objects) symfiles += o.symfile.size();
    auto r = debugger::stats_report(p.image, store);
    CHECK(r.modules == 2);
    CHECK(r.symfile_bytes == symfiles);
    CHECK(r.image_bytes == p.image.metadata.size() + 37);
    CHECK(r.bytes.total() == r.symfile_bytes + r.image_bytes);
    CHECK(r.bytes[ByteCategory::breakpoint_flags] == 37);
    CHECK(r.bytes[ByteCategory::address_vectors] == p.image.metadata.size() - 3 * 8);
    CHECK(r.absent.empty());
    CHECK(r.to_text().find("total") != std::string::npos);
  }
}
