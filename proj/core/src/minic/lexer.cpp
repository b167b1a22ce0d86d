#include "cdb/minic/lexer.hpp"

#include <cctype>
#include <cstdlib>
#include <unordered_map>

namespace cdb::minic {

std::string Diagnostic::to_string() const {
  return file + ":" + std::to_string(loc.line) + "." + std::to_string(loc.col) + ": " + message;
}

namespace {

std::string summarize(const Diagnostics& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += '\n';
    out += d.to_string();
  }
  return out.empty() ? "compilation failed" : out;
}

}  // namespace

CompileError::CompileError(Diagnostics diags) : Error(summarize(diags)), diags_(std::move(diags)) {}

const char* spelling(Tok t) {
  switch (t) {
    case Tok::end: return "end of file";
    case Tok::identifier: return "identifier";
    case Tok::int_literal: return "integer constant";
    case Tok::float_literal: return "floating constant";
    case Tok::char_literal: return "character constant";
    case Tok::string_literal: return "string literal";
    case Tok::kw_char: return "char";
    case Tok::kw_short: return "short";
    case Tok::kw_int: return "int";
    case Tok::kw_long: return "long";
    case Tok::kw_unsigned: return "unsigned";
    case Tok::kw_signed: return "signed";
    case Tok::kw_float: return "float";
    case Tok::kw_double: return "double";
    case Tok::kw_void: return "void";
    case Tok::kw_struct: return "struct";
    case Tok::kw_union: return "union";
    case Tok::kw_enum: return "enum";
    case Tok::kw_typedef: return "typedef";
    case Tok::kw_static: return "static";
    case Tok::kw_extern: return "extern";
    case Tok::kw_const: return "const";
    case Tok::kw_volatile: return "volatile";
    case Tok::kw_if: return "if";
    case Tok::kw_else: return "else";
    case Tok::kw_while: return "while";
    case Tok::kw_for: return "for";
    case Tok::kw_return: return "return";
    case Tok::kw_sizeof: return "sizeof";
    case Tok::lparen: return "(";
    case Tok::rparen: return ")";
    case Tok::lbrace: return "{";
    case Tok::rbrace: return "}";
    case Tok::lbracket: return "[";
    case Tok::rbracket: return "]";
    case Tok::semi: return ";";
    case Tok::comma: return ",";
    case Tok::dot: return ".";
    case Tok::arrow: return "->";
    case Tok::colon: return ":";
    case Tok::plus: return "+";
    case Tok::minus: return "-";
    case Tok::star: return "*";
    case Tok::slash: return "/";
    case Tok::percent: return "%";
    case Tok::amp: return "&";
    case Tok::pipe: return "|";
    case Tok::caret: return "^";
    case Tok::tilde: return "~";
    case Tok::bang: return "!";
    case Tok::shl: return "<<";
    case Tok::shr: return ">>";
    case Tok::lt: return "<";
    case Tok::gt: return ">";
    case Tok::le: return "<=";
    case Tok::ge: return ">=";
    case Tok::eqeq: return "==";
    case Tok::ne: return "!=";
    case Tok::ampamp: return "&&";
    case Tok::pipepipe: return "||";
    case Tok::assign: return "=";
    case Tok::plus_assign: return "+=";
    case Tok::minus_assign: return "-=";
    case Tok::star_assign: return "*=";
    case Tok::slash_assign: return "/=";
    case Tok::percent_assign: return "%=";
    case Tok::amp_assign: return "&=";
    case Tok::pipe_assign: return "|=";
    case Tok::caret_assign: return "^=";
    case Tok::shl_assign: return "<<=";
    case Tok::shr_assign: return ">>=";
    case Tok::plusplus: return "++";
    case Tok::minusminus: return "--";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
  static const std::unordered_map<std::string_view, Tok> table = {
      {"char", Tok::kw_char},       {"short", Tok::kw_short},       {"int", Tok::kw_int},
      {"long", Tok::kw_long},       {"unsigned", Tok::kw_unsigned}, {"signed", Tok::kw_signed},
      {"float", Tok::kw_float},     {"double", Tok::kw_double},     {"void", Tok::kw_void},
      {"struct", Tok::kw_struct},   {"union", Tok::kw_union},       {"enum", Tok::kw_enum},
      {"typedef", Tok::kw_typedef}, {"static", Tok::kw_static},     {"extern", Tok::kw_extern},
      {"const", Tok::kw_const},     {"volatile", Tok::kw_volatile}, {"if", Tok::kw_if},
      {"else", Tok::kw_else},       {"while", Tok::kw_while},       {"for", Tok::kw_for},
      {"return", Tok::kw_return},   {"sizeof", Tok::kw_sizeof},
  };
  return table;
}

struct Punct {
  std::string_view text;
  Tok kind;
};

// Longest spellings first so maximal munch falls out of a linear scan.
constexpr Punct kPuncts[] = {
    {"<<=", Tok::shl_assign}, {">>=", Tok::shr_assign}, {"->", Tok::arrow},
    {"++", Tok::plusplus},    {"--", Tok::minusminus},  {"<<", Tok::shl},
    {">>", Tok::shr},         {"<=", Tok::le},          {">=", Tok::ge},
    {"==", Tok::eqeq},        {"!=", Tok::ne},          {"&&", Tok::ampamp},
    {"||", Tok::pipepipe},    {"+=", Tok::plus_assign}, {"-=", Tok::minus_assign},
    {"*=", Tok::star_assign}, {"/=", Tok::slash_assign}, {"%=", Tok::percent_assign},
    {"&=", Tok::amp_assign},  {"|=", Tok::pipe_assign}, {"^=", Tok::caret_assign},
    {"(", Tok::lparen},       {")", Tok::rparen},       {"{", Tok::lbrace},
    {"}", Tok::rbrace},       {"[", Tok::lbracket},     {"]", Tok::rbracket},
    {";", Tok::semi},         {",", Tok::comma},        {".", Tok::dot},
    {":", Tok::colon},        {"+", Tok::plus},         {"-", Tok::minus},
    {"*", Tok::star},         {"/", Tok::slash},        {"%", Tok::percent},
    {"&", Tok::amp},          {"|", Tok::pipe},         {"^", Tok::caret},
    {"~", Tok::tilde},        {"!", Tok::bang},         {"<", Tok::lt},
    {">", Tok::gt},           {"=", Tok::assign},
};

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file, Diagnostics& diags)
      : src_(src), file_(file), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = here();
      if (at_end()) {
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        ident(t);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        number(t);
      } else if (c == '\'') {
        char_lit(t);
      } else if (c == '"') {
        string_lit(t);
      } else if (!punct(t)) {
        error(t.loc, std::string("stray character '") + c + "'");
        advance();
        continue;
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  Loc here() const { return {line_, col_}; }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void error(Loc loc, std::string msg) { diags_.push_back({file_, loc, std::move(msg)}); }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        Loc start = here();
        advance();
        advance();
        while (!at_end() && !(peek() == '*' && peek(1) == '/')) advance();
        if (at_end()) {
          error(start, "unterminated comment");
          return;
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void ident(Token& t) {
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) advance();
    std::string_view word = src_.substr(start, pos_ - start);
    auto it = keywords().find(word);
    if (it != keywords().end()) {
      t.kind = it->second;
    } else {
      t.kind = Tok::identifier;
      t.text = std::string(word);
    }
  }

  void number(Token& t) {
    std::size_t start = pos_;
    bool is_float = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      while (std::isxdigit(static_cast<unsigned char>(peek()))) advance();
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.') {
        is_float = true;
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (is_float) {
      t.kind = Tok::float_literal;
      t.float_value = std::strtod(text.c_str(), nullptr);
      if (peek() == 'f' || peek() == 'F') advance();
      return;
    }
    t.kind = Tok::int_literal;
    errno = 0;
    t.int_value = std::strtoull(text.c_str(), nullptr, 0);
    if (errno == ERANGE || t.int_value > 0xffffffffull) error(t.loc, "integer constant too large");
    while (peek() == 'u' || peek() == 'U' || peek() == 'l' || peek() == 'L') {
      if (peek() == 'u' || peek() == 'U') t.is_unsigned = true;
      advance();
    }
    if (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
      error(here(), "invalid suffix on integer constant");
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
    }
  }

  // Decodes one possibly-escaped character of a char or string literal.
  int escaped() {
    Loc at = here();
    char c = advance();
    if (c != '\\') return static_cast<unsigned char>(c);
    if (at_end()) return 0;
    char e = advance();
    switch (e) {
      case 'n': return '\n';
      case 't': return '\t';
      case 'r': return '\r';
      case '0': return 0;
      case 'a': return '\a';
      case 'b': return '\b';
      case 'f': return '\f';
      case 'v': return '\v';
      case '\\': return '\\';
      case '\'': return '\'';
      case '"': return '"';
      case '?': return '?';
      case 'x': {
        int v = 0;
        while (std::isxdigit(static_cast<unsigned char>(peek()))) {
          char h = advance();
          v = v * 16 + (std::isdigit(static_cast<unsigned char>(h)) ? h - '0' : (std::tolower(h) - 'a' + 10));
        }
        return v & 0xff;
      }
      default:
        error(at, std::string("unknown escape sequence '\\") + e + "'");
        return static_cast<unsigned char>(e);
    }
  }

  void char_lit(Token& t) {
    t.kind = Tok::char_literal;
    advance();
    if (peek() == '\'' || peek() == '\n' || at_end()) {
      error(t.loc, "empty character constant");
    } else {
      int v = escaped();
      t.int_value = static_cast<std::uint64_t>(static_cast<std::int64_t>(static_cast<signed char>(v)));
    }
    if (peek() != '\'') {
      error(t.loc, "unterminated character constant");
      while (!at_end() && peek() != '\'' && peek() != '\n') advance();
    }
    if (peek() == '\'') advance();
  }

  void string_lit(Token& t) {
    t.kind = Tok::string_literal;
    advance();
    while (!at_end() && peek() != '"' && peek() != '\n') t.text.push_back(static_cast<char>(escaped()));
    if (peek() != '"') {
      error(t.loc, "unterminated string literal");
      return;
    }
    advance();
  }

  bool punct(Token& t) {
    for (const auto& p : kPuncts) {
      if (src_.substr(pos_, p.text.size()) == p.text) {
        for (std::size_t i = 0; i < p.text.size(); ++i) advance();
        t.kind = p.kind;
        return true;
      }
    }
    return false;
  }

  std::string_view src_;
  const std::string& file_;
  Diagnostics& diags_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& file, Diagnostics& diags) {
  return Lexer(source, file, diags).run();
}

}  // namespace cdb::minic
