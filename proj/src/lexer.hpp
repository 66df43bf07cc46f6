#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "asmweave/error.hpp"
#include "asmweave/value.hpp"

namespace asmweave::detail {

enum class TokenKind { Ident, Keyword, Int, String, Symbol, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier/keyword/punctuation text, string contents, symbol name, digits
  SourcePos pos;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
  bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
  std::string describe() const;
};

bool is_keyword(std::string_view word);

// Throws ParseError (SyntaxError) on a malformed token.
std::vector<Token> tokenize(std::string_view text);

}  // namespace asmweave::detail
