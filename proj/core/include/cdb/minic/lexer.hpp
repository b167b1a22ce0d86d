#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cdb/minic/diagnostics.hpp"

namespace cdb::minic {

enum class Tok {
  end,
  identifier,
  int_literal,
  float_literal,
  char_literal,
  string_literal,
  // keywords
  kw_char, kw_short, kw_int, kw_long, kw_unsigned, kw_signed, kw_float, kw_double, kw_void,
  kw_struct, kw_union, kw_enum, kw_typedef, kw_static, kw_extern, kw_const, kw_volatile,
  kw_if, kw_else, kw_while, kw_for, kw_return, kw_sizeof,
  // punctuation
  lparen, rparen, lbrace, rbrace, lbracket, rbracket, semi, comma, dot, arrow, colon,
  plus, minus, star, slash, percent, amp, pipe, caret, tilde, bang,
  shl, shr, lt, gt, le, ge, eqeq, ne, ampamp, pipepipe,
  assign, plus_assign, minus_assign, star_assign, slash_assign, percent_assign,
  amp_assign, pipe_assign, caret_assign, shl_assign, shr_assign,
  plusplus, minusminus,
};

const char* spelling(Tok t);

struct Token {
  Tok kind = Tok::end;
  Loc loc;
  std::string text;        // identifier name or decoded string literal
  std::uint64_t int_value = 0;
  double float_value = 0;
  bool is_unsigned = false;  // integer literal with a u suffix
};

// Tokenizes a whole unit. Lexical errors are reported and the offending
// characters skipped.
std::vector<Token> tokenize(std::string_view source, const std::string& file, Diagnostics& diags);

}  // namespace cdb::minic
