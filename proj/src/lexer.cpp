#include "lexer.hpp"

#include <array>
#include <cctype>

namespace asmweave::detail {
namespace {

constexpr std::array kKeywords = {
    "machine", "static", "controlled", "monitored", "abstract", "rule", "init",   "main",
    "agent",   "runs",   "par",        "endpar",    "if",       "then", "else",   "let",
    "in",      "forall", "choose",     "with",      "do",       "skip", "undef",  "true",
    "false",   "and",    "or",         "not",       "implies",  "mod",
};

// Longest first so that ":=" wins over ":".
constexpr std::array kPuncts = {":=", "!=", "<=", ">=", "..", "=", "<", ">", "+", "-", "*",
                                "/",  "(",  ")",  "{",  "}",  ",", ":", ";"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (at_end()) {
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (ident_start(c)) {
        t.text = take_while(ident_char);
        t.kind = is_keyword(t.text) ? TokenKind::Keyword : TokenKind::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = TokenKind::Int;
        t.text = take_while([](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; });
      } else if (c == '"') {
        t.kind = TokenKind::String;
        t.text = string_literal(t.pos);
      } else if (c == '#') {
        advance();
        if (at_end() || !ident_start(peek())) fail(t.pos, "expected a symbol name after '#'");
        t.kind = TokenKind::Symbol;
        t.text = take_while(ident_char);
      } else {
        t.kind = TokenKind::Punct;
        for (std::string_view p : kPuncts) {
          if (text_.substr(i_).starts_with(p)) {
            t.text = std::string(p);
            for (std::size_t k = 0; k < p.size(); ++k) advance();
            break;
          }
        }
        if (t.text.empty()) {
          unsigned char uc = static_cast<unsigned char>(c);
          std::string shown = std::isprint(uc) ? std::string(1, c) : "\\x" + to_hex(uc).substr(14);
          fail(t.pos, "unexpected character '" + shown + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek(std::size_t k = 0) const { return i_ + k < text_.size() ? text_[i_ + k] : '\0'; }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    std::string out;
    while (!at_end() && pred(peek())) {
      out += peek();
      advance();
    }
    return out;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string string_literal(SourcePos start) {
    advance();  // opening quote
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail(start, "unterminated string literal");
      char c = peek();
      advance();
      if (c == '"') return out;
      if (c == '\\') {
        if (at_end()) fail(start, "unterminated string literal");
        char e = peek();
        advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(start, std::string("unknown escape '\\") + e + "'");
        }
      } else {
        out += c;
      }
    }
  }

  [[noreturn]] void fail(SourcePos pos, std::string message) {
    throw ParseError({Diagnostic{pos, ErrorCode::SyntaxError, std::move(message)}});
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
  for (std::string_view k : kKeywords)
    if (k == word) return true;
  return false;
}

std::string Token::describe() const {
  switch (kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::Int: return "integer " + text;
    case TokenKind::String: return "string literal";
    case TokenKind::Symbol: return "symbol #" + text;
    case TokenKind::Keyword: return "keyword '" + text + "'";
    case TokenKind::Ident: return "identifier '" + text + "'";
    case TokenKind::Punct: return "'" + text + "'";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace asmweave::detail
