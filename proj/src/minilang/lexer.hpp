#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "evotest/minilang/ast.hpp"

namespace evotest::minilang {

enum class token_kind : std::uint8_t {
    end,
    identifier,
    number,
    kw_int,
    kw_void,
    kw_if,
    kw_else,
    kw_while,
    kw_do,
    kw_for,
    kw_switch,
    kw_case,
    kw_default,
    kw_break,
    kw_continue,
    kw_return,
    lparen,
    rparen,
    lbrace,
    rbrace,
    lbracket,
    rbracket,
    semicolon,
    comma,
    colon,
    assign,
    plus_assign,
    minus_assign,
    star_assign,
    slash_assign,
    percent_assign,
    plus_plus,
    minus_minus,
    plus,
    minus,
    star,
    slash,
    percent,
    less,
    less_equal,
    greater,
    greater_equal,
    equal_equal,
    not_equal,
    and_and,
    or_or,
    bang,
};

[[nodiscard]] const char* describe(token_kind kind) noexcept;

struct token {
    token_kind kind = token_kind::end;
    std::string_view text;
    std::int64_t number = 0;
    source_location loc;
    std::size_t begin = 0;  // byte offsets into the source
    std::size_t end = 0;
};

/// Splits MiniC text into tokens. Comments are skipped; the returned
/// vector always ends with a `token_kind::end` token.
[[nodiscard]] std::vector<token> tokenize(std::string_view text);

}  // namespace evotest::minilang
