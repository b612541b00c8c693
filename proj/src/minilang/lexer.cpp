#include "lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <utility>

namespace evotest::minilang {

const char* describe(token_kind kind) noexcept
{
    switch (kind) {
    case token_kind::end: return "end of input";
    case token_kind::identifier: return "identifier";
    case token_kind::number: return "integer literal";
    case token_kind::kw_int: return "'int'";
    case token_kind::kw_void: return "'void'";
    case token_kind::kw_if: return "'if'";
    case token_kind::kw_else: return "'else'";
    case token_kind::kw_while: return "'while'";
    case token_kind::kw_do: return "'do'";
    case token_kind::kw_for: return "'for'";
    case token_kind::kw_switch: return "'switch'";
    case token_kind::kw_case: return "'case'";
    case token_kind::kw_default: return "'default'";
    case token_kind::kw_break: return "'break'";
    case token_kind::kw_continue: return "'continue'";
    case token_kind::kw_return: return "'return'";
    case token_kind::lparen: return "'('";
    case token_kind::rparen: return "')'";
    case token_kind::lbrace: return "'{'";
    case token_kind::rbrace: return "'}'";
    case token_kind::lbracket: return "'['";
    case token_kind::rbracket: return "']'";
    case token_kind::semicolon: return "';'";
    case token_kind::comma: return "','";
    case token_kind::colon: return "':'";
    case token_kind::assign: return "'='";
    case token_kind::plus_assign: return "'+='";
    case token_kind::minus_assign: return "'-='";
    case token_kind::star_assign: return "'*='";
    case token_kind::slash_assign: return "'/='";
    case token_kind::percent_assign: return "'%='";
    case token_kind::plus_plus: return "'++'";
    case token_kind::minus_minus: return "'--'";
    case token_kind::plus: return "'+'";
    case token_kind::minus: return "'-'";
    case token_kind::star: return "'*'";
    case token_kind::slash: return "'/'";
    case token_kind::percent: return "'%'";
    case token_kind::less: return "'<'";
    case token_kind::less_equal: return "'<='";
    case token_kind::greater: return "'>'";
    case token_kind::greater_equal: return "'>='";
    case token_kind::equal_equal: return "'=='";
    case token_kind::not_equal: return "'!='";
    case token_kind::and_and: return "'&&'";
    case token_kind::or_or: return "'||'";
    case token_kind::bang: return "'!'";
    }
    return "token";
}

namespace {

constexpr std::array<std::pair<std::string_view, token_kind>, 13> keywords{{
    {"int", token_kind::kw_int},
    {"void", token_kind::kw_void},
    {"if", token_kind::kw_if},
    {"else", token_kind::kw_else},
    {"while", token_kind::kw_while},
    {"do", token_kind::kw_do},
    {"for", token_kind::kw_for},
    {"switch", token_kind::kw_switch},
    {"case", token_kind::kw_case},
    {"default", token_kind::kw_default},
    {"break", token_kind::kw_break},
    {"continue", token_kind::kw_continue},
    {"return", token_kind::kw_return},
}};

// Longest match first.
constexpr std::array<std::pair<std::string_view, token_kind>, 31> punctuators{{
    {"+=", token_kind::plus_assign},
    {"-=", token_kind::minus_assign},
    {"*=", token_kind::star_assign},
    {"/=", token_kind::slash_assign},
    {"%=", token_kind::percent_assign},
    {"++", token_kind::plus_plus},
    {"--", token_kind::minus_minus},
    {"<=", token_kind::less_equal},
    {">=", token_kind::greater_equal},
    {"==", token_kind::equal_equal},
    {"!=", token_kind::not_equal},
    {"&&", token_kind::and_and},
    {"||", token_kind::or_or},
    {"(", token_kind::lparen},
    {")", token_kind::rparen},
    {"{", token_kind::lbrace},
    {"}", token_kind::rbrace},
    {"[", token_kind::lbracket},
    {"]", token_kind::rbracket},
    {";", token_kind::semicolon},
    {",", token_kind::comma},
    {":", token_kind::colon},
    {"=", token_kind::assign},
    {"+", token_kind::plus},
    {"-", token_kind::minus},
    {"*", token_kind::star},
    {"/", token_kind::slash},
    {"%", token_kind::percent},
    {"<", token_kind::less},
    {">", token_kind::greater},
    {"!", token_kind::bang},
}};

class scanner {
public:
    explicit scanner(std::string_view text) : text_{text} {}

    std::vector<token> run()
    {
        std::vector<token> out;
        for (;;) {
            skip_trivia();
            token tok;
            tok.loc = {line_, column()};
            tok.begin = pos_;
            if (pos_ >= text_.size()) {
                tok.end = pos_;
                out.push_back(tok);
                return out;
            }
            const char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
                lex_word(tok);
            else if (std::isdigit(static_cast<unsigned char>(c)))
                lex_number(tok);
            else
                lex_punctuator(tok);
            tok.end = pos_;
            tok.text = text_.substr(tok.begin, tok.end - tok.begin);
            out.push_back(tok);
        }
    }

private:
    [[nodiscard]] int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

    [[noreturn]] void fail(const std::string& message) const { throw parse_error(message, line_, column()); }

    void advance()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            line_start_ = pos_ + 1;
        }
        ++pos_;
    }

    void skip_trivia()
    {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (text_.substr(pos_, 2) == "//") {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (text_.substr(pos_, 2) == "/*") {
                const int line = line_;
                const int col = column();
                advance();
                advance();
                while (pos_ < text_.size() && text_.substr(pos_, 2) != "*/")
                    advance();
                if (pos_ >= text_.size())
                    throw parse_error("unterminated block comment", line, col);
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    void lex_word(token& tok)
    {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            advance();
        const auto word = text_.substr(tok.begin, pos_ - tok.begin);
        tok.kind = token_kind::identifier;
        for (const auto& [spelling, kind] : keywords)
            if (spelling == word)
                tok.kind = kind;
    }

    void lex_number(token& tok)
    {
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_])))
            advance();
        const auto digits = text_.substr(tok.begin, pos_ - tok.begin);
        std::int64_t value = 0;
        const auto* first = digits.data();
        const auto* last = digits.data() + digits.size();
        int base = 10;
        if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
            first += 2;
            base = 16;
        }
        const auto [ptr, ec] = std::from_chars(first, last, value, base);
        if (ec == std::errc::result_out_of_range)
            throw parse_error("integer literal out of range", tok.loc.line, tok.loc.column);
        if (ec != std::errc{} || ptr != last)
            throw parse_error("malformed integer literal '" + std::string(digits) + "'", tok.loc.line,
                              tok.loc.column);
        tok.kind = token_kind::number;
        tok.number = value;
    }

    void lex_punctuator(token& tok)
    {
        for (const auto& [spelling, kind] : punctuators) {
            if (text_.substr(pos_, spelling.size()) == spelling) {
                for (std::size_t i = 0; i < spelling.size(); ++i)
                    advance();
                tok.kind = kind;
                return;
            }
        }
        fail(std::string("unexpected character '") + text_[pos_] + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    int line_ = 1;
};

}  // namespace

std::vector<token> tokenize(std::string_view text)
{
    return scanner{text}.run();
}

}  // namespace evotest::minilang
