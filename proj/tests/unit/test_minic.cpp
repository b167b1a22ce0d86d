#include <doctest.h>

#include "cdb/codegen/codegen.hpp"
#include "cdb/minic/lexer.hpp"
#include "cdb/minic/parser.hpp"
#include "cdb/minic/sema.hpp"
#include "cdb/sym/index.hpp"
#include "cdb/sym/pickle.hpp"
#include "testkit.hpp"

using namespace cdb;
using namespace cdb::minic;

namespace {

TypedUnit check(const std::string& src, Diagnostics& diags) {
  auto tu = parse(src, "t.c", diags);
  return typecheck(std::move(tu), diags);
}

sym::Module symbols_of(const std::string& src) {
  codegen::CodegenOptions opts;
  opts.uname = 0x77;
  auto unit = codegen::compile_source(src, "t.c", opts);
  return sym::unpickle(unit.object.symfile);
}

const sym::Symbol& named(const sym::Module& m, const std::string& id) {
  for (const auto& item : m.items)
    if (auto* s = item.symbol(); s && s->id == id) return *s;
  throw std::runtime_error("no symbol " + id);
}

}  // namespace

TEST_SUITE("minic") {
  TEST_CASE("lexer: coordinates count bytes and tabs as one column") {
    Diagnostics d;
    auto toks = tokenize("int\tx;\n  y = 'a' + \"s\\n\";", "t.c", d);
    CHECK(d.empty());
    REQUIRE(toks.size() >= 10);
    CHECK(toks[0].kind == Tok::kw_int);
    CHECK(toks[1].kind == Tok::identifier);
    CHECK(toks[1].loc == Loc{1, 5});
    CHECK(toks[3].loc == Loc{2, 3});
    CHECK(toks[5].kind == Tok::char_literal);
    CHECK(toks[5].int_value == 'a');
    CHECK(toks[7].kind == Tok::string_literal);
    CHECK(toks[7].text == "s\n");
    CHECK(toks.back().kind == Tok::end);
  }

  TEST_CASE("lexer: literals and comments") {
    Diagnostics d;
    auto toks = tokenize("0x1F 017 42u 1.5 2e3 /* c */ // tail\n >>= ->", "t.c", d);
    CHECK(d.empty());
    CHECK(toks[0].int_value == 31);
    CHECK(toks[1].int_value == 15);
    CHECK(toks[2].is_unsigned);
    CHECK(toks[3].kind == Tok::float_literal);
    CHECK(toks[4].float_value == doctest::Approx(2000.0));
    CHECK(toks[5].kind == Tok::shr_assign);
    CHECK(toks[6].kind == Tok::arrow);
  }

  TEST_CASE("lexer: bad characters are reported and skipped") {
    Diagnostics d;
    auto toks = tokenize("int @ x;", "t.c", d);
    REQUIRE(d.size() == 1);
    CHECK(d[0].loc == Loc{1, 5});
    CHECK(toks[1].kind == Tok::identifier);
  }

  TEST_CASE("parse: wf.c declarations") {
    Diagnostics d;
    auto tu = parse(testkit::read_text(testkit::fixture("wf.c")), "wf.c", d);
    CHECK(d.empty());
    std::vector<std::string> functions;
    for (const auto& item : tu.items)
      if (item.function) functions.push_back(item.function->decl.name);
    CHECK(functions == std::vector<std::string>{"isletter", "getword", "tprint", "main"});
    auto unit = typecheck(std::move(tu), d);
    CHECK(d.empty());
    std::vector<std::string> statics;
    for (auto* decl : unit.file_symbols)
      if (decl->kind == DeclKind::Variable) statics.push_back(decl->name);
    CHECK(statics == std::vector<std::string>{"words"});
  }

  TEST_CASE("parse: empty file is an empty unit") {
    Diagnostics d;
    auto tu = parse("", "e.c", d);
    CHECK(d.empty());
    CHECK(tu.items.empty());
  }

  TEST_CASE("parse: missing semicolon is reported at the brace") {
    Diagnostics d;
    parse("int f(void) { return 1 }", "t.c", d);
    REQUIRE_FALSE(d.empty());
    CHECK(d[0].loc == Loc{1, 24});
    CHECK(d[0].to_string().rfind("t.c:1.24: ", 0) == 0);
  }

  TEST_CASE("parse: recovery reports several errors") {
    Diagnostics d;
    parse("int f(void) { x = ; y = ; return 0; }\nint g(void) { return ) ; }", "t.c", d);
    CHECK(d.size() >= 3);
  }

  TEST_CASE("typecheck: undeclared identifier") {
    Diagnostics d;
    check("int f(void) { return nosuch; }", d);
    REQUIRE(d.size() == 1);
    CHECK(d[0].loc == Loc{1, 22});
    CHECK(d[0].message.find("nosuch") != std::string::npos);
  }

  TEST_CASE("typecheck: errors carry coordinates") {
    Diagnostics d;
    check("struct s { int a; };\nint f(struct s v) { return v.b; }\nint g(void) { return 1(2); }", d);
    CHECK(d.size() >= 2);
    for (const auto& diag : d) CHECK(diag.loc.line >= 2);
    CHECK_THROWS_AS(codegen::compile_source("int f(void) { return nosuch; }", "t.c", {}), CompileError);
  }

  TEST_CASE("layout: ILP32 sizes and alignments") {
    auto m = symbols_of(
        "char c; short s; int i; unsigned u; float f; double d; char *p;\n"
        "struct node { int count; struct node *left, *right; char *word; } n;\n"
        "struct mix { char a; double b; char c; } x;\n"
        "int arr[10]; enum color { RED, GREEN = 5, BLUE } col;\n"
        "struct bits { unsigned a : 3; unsigned b : 5; int c; } bf;\n"
        "union u { char c; int i; double d; } un;\n");
    sym::SymbolIndex index(m);
    struct Expect {
      const char* id;
      const char* ctor;
      std::uint32_t size, align;
    };
    // Oracle table: hand-computed from the ILP32 rules.
    const Expect table[] = {
        {"c", "INT", 1, 1},        {"s", "INT", 2, 2},     {"i", "INT", 4, 4},       {"u", "UNSIGNED", 4, 4},
        {"f", "FLOAT", 4, 4},      {"d", "FLOAT", 8, 8},   {"p", "POINTER", 4, 4},   {"n", "STRUCT", 16, 4},
        {"x", "STRUCT", 24, 8},    {"arr", "ARRAY", 40, 4}, {"col", "ENUM", 4, 4},   {"bf", "STRUCT", 8, 4},
        {"un", "UNION", 8, 8},
    };
    for (const auto& e : table) {
      CAPTURE(e.id);
      const auto& t = index.type_at(named(m, e.id).type);
      CHECK(std::string(sym::constructor_name(t.node)) == e.ctor);
      CHECK(t.size == e.size);
      CHECK(t.align == e.align);
    }
    // struct node * refers to the struct's own uid.
    const auto& n = index.type_at(named(m, "n").type);
    const auto* fields = n.as<sym::types::Struct>();
    REQUIRE(fields);
    const auto& left = index.type_at(fields->fields[1].type);
    REQUIRE(left.as<sym::types::Pointer>());
    CHECK(left.as<sym::types::Pointer>()->type == named(m, "n").type);
    CHECK(fields->fields[3].offset == 12);

    const auto* mix = index.type_at(named(m, "x").type).as<sym::types::Struct>();
    CHECK(mix->fields[1].offset == 8);
    CHECK(mix->fields[2].offset == 16);

    const auto* bits = index.type_at(named(m, "bf").type).as<sym::types::Struct>();
    CHECK(bits->fields[0].bitsize == 3);
    CHECK(bits->fields[0].lsb == 0);
    CHECK(bits->fields[1].lsb == 3);
    CHECK(bits->fields[1].offset == 0);
    CHECK(bits->fields[2].offset == 4);

    const auto* color = index.type_at(named(m, "col").type).as<sym::types::Enum>();
    REQUIRE(color->ids.size() == 3);
    CHECK(color->ids[2].value == 6);
    CHECK(std::get<sym::symbols::EnumConst>(named(m, "BLUE").node).value == 6);
  }

  TEST_CASE("layout: types are shared") {
    auto m = symbols_of("char *a; char *b; int f(char *p) { return 0; }");
    CHECK(named(m, "a").type == named(m, "b").type);
    CHECK(named(m, "a").type == named(m, "p").type);
    sym::SymbolIndex index(m);
    // No two type items are structurally equal.
    std::vector<const sym::Type*> types;
    for (const auto& item : m.items)
      if (auto* t = item.type()) types.push_back(t);
    for (std::size_t i = 0; i < types.size(); ++i)
      for (std::size_t j = i + 1; j < types.size(); ++j) {
        bool same_record = types[i]->is<sym::types::Struct>() || types[i]->is<sym::types::Union>();
        if (!same_record) CHECK_FALSE(*types[i] == *types[j]);
      }
  }

  TEST_CASE("typecheck: typedef, const and volatile reach the symbol table") {
    auto m = symbols_of("typedef int count_t; const count_t limit = 3; volatile int flag;");
    sym::SymbolIndex index(m);
    CHECK(named(m, "count_t").is<sym::symbols::Typedef>());
    CHECK(index.type_at(named(m, "limit").type).is<sym::types::Const>());
    CHECK(index.type_at(named(m, "flag").type).is<sym::types::Volatile>());
    CHECK(index.unqualified(named(m, "limit").type).is<sym::types::Int>());
  }

  TEST_CASE("file-scope chain order: typedefs and enumerators, functions, variables") {
    auto m = symbols_of(
        "int late = 1;\nenum e { A, B };\nstatic int helper(void) { return 0; }\n"
        "typedef int T;\nint early;\nint main(void) { return helper(); }\n");
    sym::SymbolIndex index(m);
    std::vector<std::string> chain;
    for (auto* s = index.symbol(m.globals); s; s = s->uplink ? index.symbol(s->uplink) : nullptr) chain.push_back(s->id);
    CHECK(chain == std::vector<std::string>{"early", "late", "main", "helper", "T", "B", "A"});
  }
}
