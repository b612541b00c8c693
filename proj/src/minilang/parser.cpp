#include <limits>
#include <map>
#include <set>
#include <string_view>
#include <unordered_map>

#include "evotest/minilang/ast.hpp"
#include "lexer.hpp"

namespace evotest::minilang {

const char* to_string(compare_op op) noexcept
{
    switch (op) {
    case compare_op::eq: return "==";
    case compare_op::ne: return "!=";
    case compare_op::lt: return "<";
    case compare_op::le: return "<=";
    case compare_op::gt: return ">";
    case compare_op::ge: return ">=";
    case compare_op::truthy: return "truthy";
    }
    return "?";
}

bool apply(compare_op op, std::int64_t lhs, std::int64_t rhs) noexcept
{
    switch (op) {
    case compare_op::eq: return lhs == rhs;
    case compare_op::ne: return lhs != rhs;
    case compare_op::lt: return lhs < rhs;
    case compare_op::le: return lhs <= rhs;
    case compare_op::gt: return lhs > rhs;
    case compare_op::ge: return lhs >= rhs;
    case compare_op::truthy: return lhs != 0;
    }
    return false;
}

const char* to_string(stmt_kind kind) noexcept
{
    switch (kind) {
    case stmt_kind::declare: return "declaration";
    case stmt_kind::assign: return "assignment";
    case stmt_kind::expression: return "expression";
    case stmt_kind::if_else: return "if";
    case stmt_kind::while_loop: return "while";
    case stmt_kind::do_while: return "do-while";
    case stmt_kind::for_loop: return "for";
    case stmt_kind::switch_case: return "switch";
    case stmt_kind::return_value: return "return";
    case stmt_kind::break_loop: return "break";
    case stmt_kind::continue_loop: return "continue";
    case stmt_kind::block: return "block";
    case stmt_kind::empty: return "empty";
    }
    return "?";
}

const char* to_string(decision_kind kind) noexcept
{
    switch (kind) {
    case decision_kind::if_else: return "if";
    case decision_kind::while_loop: return "while";
    case decision_kind::do_while: return "do-while";
    case decision_kind::for_loop: return "for";
    case decision_kind::switch_case: return "case";
    }
    return "?";
}

std::vector<value_range> program::gene_ranges() const
{
    std::vector<value_range> out;
    out.reserve(genes_.size());
    for (const auto& g : genes_)
        out.push_back(g.range);
    return out;
}

namespace {

std::uint64_t fnv1a(std::uint64_t hash, std::string_view bytes)
{
    for (const unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// Marks statements that sit directly under `default:` until the last case
// decision of the switch is known.
constexpr branch pending_default_guard{decision_id{std::numeric_limits<std::uint32_t>::max()}, false};

}  // namespace

class parser {
public:
    explicit parser(const source_program& source) : source_{source}, tokens_{tokenize(source.text)} {}

    program run()
    {
        if (source_.text.find_first_not_of(" \t\r\n") == std::string::npos)
            throw parse_error("empty program text", 1, 1);
        validate_inputs(source_.inputs);

        prog_.name_ = source_.name;
        prog_.inputs_ = source_.inputs;
        scopes_.emplace_back();
        declare_inputs();

        while (peek().kind != token_kind::end)
            parse_top_level();

        choose_entry();
        prog_.fingerprint_ = fingerprint();
        return std::move(prog_);
    }

private:
    struct symbol {
        storage_ref ref;
        bool input = false;
    };

    // ---------------------------------------------------------------- tokens

    [[nodiscard]] const token& peek(std::size_t ahead = 0) const
    {
        const auto i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }

    const token& next()
    {
        const token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size())
            ++pos_;
        last_end_ = t.end;
        return t;
    }

    bool accept(token_kind kind)
    {
        if (peek().kind != kind)
            return false;
        next();
        return true;
    }

    const token& expect(token_kind kind, std::string_view context)
    {
        if (peek().kind != kind)
            fail(peek(), std::string("expected ") + describe(kind) + " " + std::string(context) + ", found " +
                             found(peek()));
        return next();
    }

    static std::string found(const token& t)
    {
        if (t.kind == token_kind::end)
            return "end of input";
        return "'" + std::string(t.text) + "'";
    }

    [[noreturn]] static void fail(const token& t, const std::string& message)
    {
        throw parse_error(message, t.loc.line, t.loc.column);
    }

    [[nodiscard]] std::string slice(std::size_t begin, std::size_t end) const
    {
        return source_.text.substr(begin, end - begin);
    }

    // --------------------------------------------------------------- symbols

    void declare_inputs()
    {
        for (const auto& in : source_.inputs) {
            storage_ref ref{true, prog_.global_size_, static_cast<std::uint32_t>(in.length)};
            prog_.global_size_ += static_cast<std::uint32_t>(in.gene_count());
            scopes_.front()[in.name] = {ref, true};
            if (in.length == 0) {
                prog_.genes_.push_back({in.name, in.range});
            } else {
                for (std::size_t i = 0; i < in.length; ++i)
                    prog_.genes_.push_back({in.name + "[" + std::to_string(i) + "]", in.range});
            }
        }
    }

    [[nodiscard]] const symbol* lookup(const std::string& name) const
    {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end())
                return &found->second;
        }
        return nullptr;
    }

    storage_ref allocate(const token& name, std::uint32_t length, bool global)
    {
        auto& scope = scopes_.back();
        if (scope.count(std::string(name.text)))
            fail(name, "redefinition of '" + std::string(name.text) + "'");
        if (function_index_.count(std::string(name.text)))
            fail(name, "'" + std::string(name.text) + "' is already a function");
        const std::uint32_t width = length == 0 ? 1 : length;
        storage_ref ref;
        ref.global = global;
        ref.length = length;
        if (global) {
            ref.offset = prog_.global_size_;
            prog_.global_size_ += width;
        } else {
            ref.offset = frame_size_;
            frame_size_ += width;
        }
        scope[std::string(name.text)] = {ref, false};
        return ref;
    }

    // ------------------------------------------------------------ top level

    void parse_top_level()
    {
        const bool is_void = peek().kind == token_kind::kw_void;
        if (!accept(token_kind::kw_int) && !accept(token_kind::kw_void))
            fail(peek(), "expected a declaration or function definition, found " + found(peek()));
        const token& name = expect(token_kind::identifier, "after type");
        if (peek().kind == token_kind::lparen) {
            parse_function(name, is_void);
            return;
        }
        if (is_void)
            fail(name, "variables cannot have type void");
        parse_global_declarators(name);
    }

    void parse_global_declarators(const token& first)
    {
        const token* name = &first;
        for (;;) {
            std::uint32_t length = parse_array_suffix();
            const symbol* existing = lookup(std::string(name->text));
            if (existing && existing->input) {
                // `int inp1, inp2;` restating a header-declared input.
                if (existing->ref.length != length)
                    fail(*name, "declaration of input '" + std::string(name->text) + "' does not match its header");
                if (peek().kind == token_kind::assign)
                    fail(peek(), "input '" + std::string(name->text) + "' cannot have an initializer");
            } else {
                global_init init;
                init.slot = allocate(*name, length, true);
                if (accept(token_kind::assign)) {
                    if (length == 0)
                        init.init = parse_expr();
                    else
                        init.list = parse_brace_list(length);
                }
                prog_.global_inits_.push_back(std::move(init));
            }
            if (!accept(token_kind::comma))
                break;
            name = &expect(token_kind::identifier, "in declaration");
        }
        expect(token_kind::semicolon, "after declaration");
    }

    std::uint32_t parse_array_suffix()
    {
        if (!accept(token_kind::lbracket))
            return 0;
        const token& size = expect(token_kind::number, "as array length");
        if (size.number <= 0 || size.number > 1'000'000)
            fail(size, "array length must be between 1 and 1000000");
        expect(token_kind::rbracket, "after array length");
        return static_cast<std::uint32_t>(size.number);
    }

    std::vector<std::unique_ptr<expr>> parse_brace_list(std::uint32_t length)
    {
        const token& open = expect(token_kind::lbrace, "to start array initializer");
        std::vector<std::unique_ptr<expr>> items;
        if (peek().kind != token_kind::rbrace) {
            do {
                items.push_back(parse_expr());
            } while (accept(token_kind::comma) && peek().kind != token_kind::rbrace);
        }
        expect(token_kind::rbrace, "to close array initializer");
        if (items.size() > length)
            fail(open, "too many initializers for array of length " + std::to_string(length));
        return items;
    }

    void parse_function(const token& name, bool is_void)
    {
        const std::string fname{name.text};
        if (function_index_.count(fname))
            fail(name, "redefinition of function '" + fname + "'");
        if (lookup(fname))
            fail(name, "'" + fname + "' is already a variable");

        function_def fn;
        fn.name = fname;
        fn.loc = name.loc;
        frame_size_ = 0;
        current_function_ = static_cast<std::uint32_t>(prog_.functions_.size());
        current_function_name_ = fname;
        current_returns_void_ = is_void;
        scopes_.emplace_back();

        expect(token_kind::lparen, "after function name");
        if (peek().kind == token_kind::kw_void && peek(1).kind == token_kind::rparen) {
            next();
        } else if (peek().kind != token_kind::rparen) {
            do {
                expect(token_kind::kw_int, "for parameter type");
                const token& param = expect(token_kind::identifier, "as parameter name");
                fn.params.push_back(allocate(param, 0, false));
            } while (accept(token_kind::comma));
        }
        expect(token_kind::rparen, "after parameters");

        guard_.reset();
        fn.body = parse_block();
        fn.frame_size = frame_size_;
        scopes_.pop_back();

        function_index_[fname] = *current_function_;
        function_arity_[fname] = fn.params.size();
        function_void_[fname] = is_void;
        prog_.functions_.push_back(std::move(fn));
        current_function_.reset();
    }

    void choose_entry()
    {
        if (prog_.functions_.empty())
            throw parse_error("program defines no function", peek().loc.line, peek().loc.column);
        auto it = function_index_.find("test");
        if (it != function_index_.end()) {
            prog_.entry_ = it->second;
        } else if (prog_.functions_.size() == 1) {
            prog_.entry_ = 0;
        } else {
            throw parse_error("several functions but none named 'test' to use as entry", 1, 1);
        }
        const auto& entry = prog_.functions_[prog_.entry_];
        if (!entry.params.empty())
            throw parse_error("entry function '" + entry.name + "' must take no parameters", entry.loc.line,
                              entry.loc.column);
    }

    [[nodiscard]] std::uint64_t fingerprint() const
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        h = fnv1a(h, source_.text);
        for (const auto& in : source_.inputs) {
            h = fnv1a(h, in.name);
            h = fnv1a(h, std::to_string(in.range.lo) + ":" + std::to_string(in.range.hi) + ":" +
                             std::to_string(in.length));
        }
        return h;
    }

    // ------------------------------------------------------------ statements

    stmt_ptr make_stmt(stmt_kind kind, const token& at, bool numbered = true)
    {
        auto s = std::make_unique<stmt>();
        s->kind = kind;
        s->loc = at.loc;
        if (numbered) {
            statement_id id{static_cast<std::uint32_t>(prog_.statements_.size())};
            s->id = id;
            prog_.statements_.push_back({id, kind, at.loc, *current_function_, guard_});
        }
        return s;
    }

    stmt_ptr parse_block()
    {
        const token& open = expect(token_kind::lbrace, "to open block");
        auto s = make_stmt(stmt_kind::block, open, false);
        scopes_.emplace_back();
        while (peek().kind != token_kind::rbrace) {
            if (peek().kind == token_kind::end)
                fail(peek(), "missing '}' to close block opened at line " + std::to_string(open.loc.line));
            s->children.push_back(parse_statement());
        }
        next();
        scopes_.pop_back();
        return s;
    }

    // A statement in its own scope (the body of if/while/for).
    stmt_ptr parse_scoped_statement()
    {
        scopes_.emplace_back();
        auto s = parse_statement();
        scopes_.pop_back();
        return s;
    }

    stmt_ptr parse_statement()
    {
        const token& t = peek();
        switch (t.kind) {
        case token_kind::lbrace: return parse_block();
        case token_kind::semicolon: next(); return make_stmt(stmt_kind::empty, t, false);
        case token_kind::kw_int: {
            auto s = parse_local_declaration();
            expect(token_kind::semicolon, "after declaration");
            return s;
        }
        case token_kind::kw_if: return parse_if();
        case token_kind::kw_while: return parse_while();
        case token_kind::kw_do: return parse_do_while();
        case token_kind::kw_for: return parse_for();
        case token_kind::kw_switch: return parse_switch();
        case token_kind::kw_return: return parse_return();
        case token_kind::kw_break: {
            next();
            if (loop_depth_ == 0 && switch_depth_ == 0)
                fail(t, "'break' outside of a loop or switch");
            auto s = make_stmt(stmt_kind::break_loop, t);
            expect(token_kind::semicolon, "after 'break'");
            return s;
        }
        case token_kind::kw_continue: {
            next();
            if (loop_depth_ == 0)
                fail(t, "'continue' outside of a loop");
            auto s = make_stmt(stmt_kind::continue_loop, t);
            expect(token_kind::semicolon, "after 'continue'");
            return s;
        }
        case token_kind::kw_else: fail(t, "'else' without a matching 'if'");
        case token_kind::kw_case:
        case token_kind::kw_default: fail(t, std::string(t.text) + " label outside of a switch");
        default: {
            auto s = parse_simple();
            expect(token_kind::semicolon, "after statement");
            return s;
        }
        }
    }

    stmt_ptr parse_local_declaration()
    {
        const token& kw = expect(token_kind::kw_int, "");
        auto s = make_stmt(stmt_kind::declare, kw);
        do {
            const token& name = expect(token_kind::identifier, "in declaration");
            const std::uint32_t length = parse_array_suffix();
            declarator d;
            if (accept(token_kind::assign)) {
                if (length == 0)
                    d.init = parse_expr();
                else
                    d.list = parse_brace_list(length);
            }
            d.slot = allocate(name, length, false);
            s->declarators.push_back(std::move(d));
        } while (accept(token_kind::comma));
        return s;
    }

    stmt_ptr parse_simple()
    {
        const token& first = peek();
        if (first.kind == token_kind::plus_plus || first.kind == token_kind::minus_minus) {
            next();
            auto s = make_stmt(stmt_kind::assign, first);
            parse_lvalue(*s);
            s->compound = first.kind == token_kind::plus_plus ? arith_op::add : arith_op::sub;
            s->value = literal(1, first.loc);
            return s;
        }
        if (first.kind != token_kind::identifier)
            fail(first, "expected a statement, found " + found(first));

        if (peek(1).kind == token_kind::lparen) {
            auto s = make_stmt(stmt_kind::expression, first);
            s->value = parse_expr();
            return s;
        }

        auto s = make_stmt(stmt_kind::assign, first);
        parse_lvalue(*s);
        const token& op = next();
        switch (op.kind) {
        case token_kind::assign: break;
        case token_kind::plus_assign: s->compound = arith_op::add; break;
        case token_kind::minus_assign: s->compound = arith_op::sub; break;
        case token_kind::star_assign: s->compound = arith_op::mul; break;
        case token_kind::slash_assign: s->compound = arith_op::div; break;
        case token_kind::percent_assign: s->compound = arith_op::mod; break;
        case token_kind::plus_plus:
        case token_kind::minus_minus:
            s->compound = op.kind == token_kind::plus_plus ? arith_op::add : arith_op::sub;
            s->value = literal(1, op.loc);
            return s;
        default: fail(op, "expected an assignment operator, found " + found(op));
        }
        s->value = parse_expr();
        return s;
    }

    void parse_lvalue(stmt& s)
    {
        const token& name = expect(token_kind::identifier, "as assignment target");
        const symbol* sym = lookup(std::string(name.text));
        if (!sym)
            fail(name, "use of undeclared variable '" + std::string(name.text) + "'");
        s.target = sym->ref;
        if (accept(token_kind::lbracket)) {
            if (sym->ref.length == 0)
                fail(name, "'" + std::string(name.text) + "' is not an array");
            s.index = parse_expr();
            expect(token_kind::rbracket, "after index");
        } else if (sym->ref.length != 0) {
            fail(name, "cannot assign to whole array '" + std::string(name.text) + "'");
        }
    }

    stmt_ptr parse_if()
    {
        const token& kw = next();
        auto s = make_stmt(stmt_kind::if_else, kw);
        const auto d = parse_decision(*s, decision_kind::if_else, kw);
        const auto saved = guard_;
        guard_ = branch{d, true};
        s->then_branch = parse_scoped_statement();
        if (accept(token_kind::kw_else)) {
            guard_ = branch{d, false};
            s->else_branch = parse_scoped_statement();
        }
        guard_ = saved;
        return s;
    }

    stmt_ptr parse_while()
    {
        const token& kw = next();
        auto s = make_stmt(stmt_kind::while_loop, kw);
        const auto d = parse_decision(*s, decision_kind::while_loop, kw);
        const auto saved = guard_;
        guard_ = branch{d, true};
        ++loop_depth_;
        s->body = parse_scoped_statement();
        --loop_depth_;
        guard_ = saved;
        return s;
    }

    stmt_ptr parse_do_while()
    {
        const token& kw = next();
        auto s = make_stmt(stmt_kind::do_while, kw);
        ++loop_depth_;
        s->body = parse_scoped_statement();
        --loop_depth_;
        const token& w = expect(token_kind::kw_while, "after do-while body");
        parse_decision(*s, decision_kind::do_while, w);
        expect(token_kind::semicolon, "after do-while");
        return s;
    }

    stmt_ptr parse_for()
    {
        const token& kw = next();
        auto s = make_stmt(stmt_kind::for_loop, kw);
        scopes_.emplace_back();
        expect(token_kind::lparen, "after 'for'");
        if (peek().kind == token_kind::kw_int)
            s->init = parse_local_declaration();
        else if (peek().kind != token_kind::semicolon)
            s->init = parse_simple();
        expect(token_kind::semicolon, "after for-loop initializer");

        std::optional<decision_id> d;
        if (peek().kind != token_kind::semicolon)
            d = parse_decision_expr(*s, decision_kind::for_loop, kw);
        expect(token_kind::semicolon, "after for-loop condition");

        const auto saved = guard_;
        if (d)
            guard_ = branch{*d, true};
        if (peek().kind != token_kind::rparen)
            s->step = parse_simple();
        expect(token_kind::rparen, "after for-loop header");
        ++loop_depth_;
        s->body = parse_scoped_statement();
        --loop_depth_;
        guard_ = saved;
        scopes_.pop_back();
        return s;
    }

    stmt_ptr parse_switch()
    {
        const token& kw = next();
        auto s = make_stmt(stmt_kind::switch_case, kw);
        expect(token_kind::lparen, "after 'switch'");
        s->value = parse_expr();
        expect(token_kind::rparen, "after switch expression");
        expect(token_kind::lbrace, "to open switch body");

        const auto saved = guard_;
        std::optional<decision_id> previous_case;
        std::set<std::int64_t> seen_values;
        bool seen_default = false;
        std::size_t default_statements_begin = 0, default_statements_end = 0;
        std::size_t default_decisions_begin = 0, default_decisions_end = 0;
        ++switch_depth_;
        scopes_.emplace_back();
        while (!accept(token_kind::rbrace)) {
            const token& label = peek();
            case_section section;
            section.loc = label.loc;
            if (accept(token_kind::kw_case)) {
                const std::int64_t value = parse_case_value();
                if (!seen_values.insert(value).second)
                    fail(label, "duplicate case value " + std::to_string(value));
                expect(token_kind::colon, "after case value");
                guard_ = previous_case ? std::optional<branch>{branch{*previous_case, false}} : saved;
                section.value = value;
                section.decision = add_case_decision(label, value);
                previous_case = section.decision;
                guard_ = branch{*section.decision, true};
            } else if (accept(token_kind::kw_default)) {
                if (seen_default)
                    fail(label, "multiple default labels in one switch");
                seen_default = true;
                expect(token_kind::colon, "after 'default'");
                guard_ = pending_default_guard;
            } else {
                fail(label, "expected 'case' or 'default' in switch body, found " + found(label));
            }
            const std::size_t stmt_begin = prog_.statements_.size();
            const std::size_t dec_begin = prog_.decisions_.size();
            while (peek().kind != token_kind::kw_case && peek().kind != token_kind::kw_default &&
                   peek().kind != token_kind::rbrace) {
                if (peek().kind == token_kind::end)
                    fail(peek(), "missing '}' to close switch");
                section.body.push_back(parse_statement());
            }
            if (!section.value) {
                default_statements_begin = stmt_begin;
                default_statements_end = prog_.statements_.size();
                default_decisions_begin = dec_begin;
                default_decisions_end = prog_.decisions_.size();
            }
            s->cases.push_back(std::move(section));
        }
        scopes_.pop_back();
        --switch_depth_;
        guard_ = saved;

        if (seen_default) {
            const std::optional<branch> resolved =
                previous_case ? std::optional<branch>{branch{*previous_case, false}} : saved;
            for (std::size_t i = default_statements_begin; i < default_statements_end; ++i)
                if (prog_.statements_[i].guard == pending_default_guard)
                    prog_.statements_[i].guard = resolved;
            for (std::size_t i = default_decisions_begin; i < default_decisions_end; ++i)
                if (prog_.decisions_[i].guard == pending_default_guard)
                    prog_.decisions_[i].guard = resolved;
        }
        return s;
    }

    std::int64_t parse_case_value()
    {
        bool negative = false;
        if (accept(token_kind::minus))
            negative = true;
        else
            accept(token_kind::plus);
        const token& number = expect(token_kind::number, "as case value");
        return negative ? -number.number : number.number;
    }

    decision_id add_case_decision(const token& label, std::int64_t value)
    {
        decision_id id{static_cast<std::uint32_t>(prog_.decisions_.size())};
        decision_info info;
        info.id = id;
        info.kind = decision_kind::switch_case;
        info.loc = label.loc;
        info.text = "case " + std::to_string(value);
        info.function = *current_function_;
        info.guard = guard_;
        info.first_condition = condition_id{static_cast<std::uint32_t>(prog_.conditions_.size())};
        info.condition_count = 1;
        info.logic.push_back({logic_node::kind::leaf, info.first_condition, 0, 0});
        prog_.conditions_.push_back({info.first_condition, id, compare_op::eq, label.loc, info.text});
        prog_.decisions_.push_back(std::move(info));
        return id;
    }

    stmt_ptr parse_return()
    {
        const token& kw = next();
        auto s = make_stmt(stmt_kind::return_value, kw);
        if (peek().kind != token_kind::semicolon) {
            if (current_returns_void_)
                fail(peek(), "void function '" + current_function_name_ + "' cannot return a value");
            s->value = parse_expr();
        } else if (!current_returns_void_) {
            fail(kw, "function '" + current_function_name_ + "' must return a value");
        }
        expect(token_kind::semicolon, "after return");
        return s;
    }

    // ------------------------------------------------------------- decisions

    decision_id parse_decision(stmt& s, decision_kind kind, const token& at)
    {
        expect(token_kind::lparen, std::string("after '") + std::string(at.text) + "'");
        const auto d = parse_decision_expr(s, kind, at);
        expect(token_kind::rparen, "after condition");
        return d;
    }

    decision_id parse_decision_expr(stmt& s, decision_kind kind, const token& at)
    {
        const std::size_t begin = peek().begin;
        in_condition_ = true;
        s.cond = parse_expr();
        in_condition_ = false;

        decision_id id{static_cast<std::uint32_t>(prog_.decisions_.size())};
        decision_info info;
        info.id = id;
        info.kind = kind;
        info.loc = at.loc;
        info.text = slice(begin, last_end_);
        info.function = *current_function_;
        info.guard = guard_;
        info.first_condition = condition_id{static_cast<std::uint32_t>(prog_.conditions_.size())};
        build_logic(*s.cond, id, info.logic);
        info.condition_count =
            static_cast<std::uint32_t>(prog_.conditions_.size()) - info.first_condition.value;
        prog_.decisions_.push_back(std::move(info));
        s.decision = id;
        return id;
    }

    std::uint32_t build_logic(expr& e, decision_id owner, std::vector<logic_node>& logic)
    {
        logic_node node;
        switch (e.kind) {
        case expr_kind::logical_and:
        case expr_kind::logical_or:
            node.type = e.kind == expr_kind::logical_and ? logic_node::kind::all_of : logic_node::kind::any_of;
            node.lhs = build_logic(*e.lhs, owner, logic);
            node.rhs = build_logic(*e.rhs, owner, logic);
            break;
        case expr_kind::logical_not:
            node.type = logic_node::kind::negation;
            node.lhs = build_logic(*e.lhs, owner, logic);
            break;
        default: {
            condition_id id{static_cast<std::uint32_t>(prog_.conditions_.size())};
            e.condition = id;
            const auto [begin, end] = spans_.at(&e);
            prog_.conditions_.push_back({id, owner, e.kind == expr_kind::compare ? e.cmp : compare_op::truthy,
                                         e.loc, slice(begin, end)});
            node.type = logic_node::kind::leaf;
            node.leaf = id;
            break;
        }
        }
        logic.push_back(node);
        return static_cast<std::uint32_t>(logic.size() - 1);
    }

    // ----------------------------------------------------------- expressions

    static std::unique_ptr<expr> literal(std::int64_t value, source_location loc)
    {
        auto e = std::make_unique<expr>();
        e->kind = expr_kind::literal;
        e->literal = value;
        e->loc = loc;
        return e;
    }

    std::unique_ptr<expr> finish(std::unique_ptr<expr> e, std::size_t begin)
    {
        spans_[e.get()] = {begin, last_end_};
        return e;
    }

    std::unique_ptr<expr> binary(expr_kind kind, std::unique_ptr<expr> lhs, std::unique_ptr<expr> rhs,
                                 const token& op, std::size_t begin)
    {
        auto e = std::make_unique<expr>();
        e->kind = kind;
        e->loc = op.loc;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        return finish(std::move(e), begin);
    }

    std::unique_ptr<expr> parse_expr() { return parse_or(); }

    std::unique_ptr<expr> parse_or()
    {
        const std::size_t begin = peek().begin;
        auto lhs = parse_and();
        while (peek().kind == token_kind::or_or) {
            const token& op = next();
            lhs = binary(expr_kind::logical_or, std::move(lhs), parse_and(), op, begin);
        }
        return lhs;
    }

    std::unique_ptr<expr> parse_and()
    {
        const std::size_t begin = peek().begin;
        auto lhs = parse_equality();
        while (peek().kind == token_kind::and_and) {
            const token& op = next();
            lhs = binary(expr_kind::logical_and, std::move(lhs), parse_equality(), op, begin);
        }
        return lhs;
    }

    std::unique_ptr<expr> parse_equality()
    {
        const std::size_t begin = peek().begin;
        auto lhs = parse_relational();
        while (peek().kind == token_kind::equal_equal || peek().kind == token_kind::not_equal) {
            const token& op = next();
            lhs = binary(expr_kind::compare, std::move(lhs), parse_relational(), op, begin);
            lhs->cmp = op.kind == token_kind::equal_equal ? compare_op::eq : compare_op::ne;
        }
        return lhs;
    }

    std::unique_ptr<expr> parse_relational()
    {
        const std::size_t begin = peek().begin;
        auto lhs = parse_additive();
        for (;;) {
            compare_op op;
            switch (peek().kind) {
            case token_kind::less: op = compare_op::lt; break;
            case token_kind::less_equal: op = compare_op::le; break;
            case token_kind::greater: op = compare_op::gt; break;
            case token_kind::greater_equal: op = compare_op::ge; break;
            default: return lhs;
            }
            const token& tok = next();
            lhs = binary(expr_kind::compare, std::move(lhs), parse_additive(), tok, begin);
            lhs->cmp = op;
        }
    }

    std::unique_ptr<expr> parse_additive()
    {
        const std::size_t begin = peek().begin;
        auto lhs = parse_multiplicative();
        while (peek().kind == token_kind::plus || peek().kind == token_kind::minus) {
            const token& op = next();
            lhs = binary(expr_kind::arith, std::move(lhs), parse_multiplicative(), op, begin);
            lhs->arith = op.kind == token_kind::plus ? arith_op::add : arith_op::sub;
        }
        return lhs;
    }

    std::unique_ptr<expr> parse_multiplicative()
    {
        const std::size_t begin = peek().begin;
        auto lhs = parse_unary();
        for (;;) {
            arith_op op;
            switch (peek().kind) {
            case token_kind::star: op = arith_op::mul; break;
            case token_kind::slash: op = arith_op::div; break;
            case token_kind::percent: op = arith_op::mod; break;
            default: return lhs;
            }
            const token& tok = next();
            lhs = binary(expr_kind::arith, std::move(lhs), parse_unary(), tok, begin);
            lhs->arith = op;
        }
    }

    std::unique_ptr<expr> parse_unary()
    {
        const std::size_t begin = peek().begin;
        const token& t = peek();
        if (t.kind == token_kind::minus || t.kind == token_kind::bang) {
            next();
            auto operand = parse_unary();
            if (t.kind == token_kind::minus && operand->kind == expr_kind::literal) {
                operand->literal = -operand->literal;
                operand->loc = t.loc;
                return finish(std::move(operand), begin);
            }
            auto e = std::make_unique<expr>();
            e->kind = t.kind == token_kind::minus ? expr_kind::negate : expr_kind::logical_not;
            e->loc = t.loc;
            e->lhs = std::move(operand);
            return finish(std::move(e), begin);
        }
        if (t.kind == token_kind::plus) {
            next();
            return parse_unary();
        }
        return parse_primary();
    }

    std::unique_ptr<expr> parse_primary()
    {
        const std::size_t begin = peek().begin;
        const token& t = next();
        switch (t.kind) {
        case token_kind::number: return finish(literal(t.number, t.loc), begin);
        case token_kind::lparen: {
            auto inner = parse_expr();
            expect(token_kind::rparen, "to close parenthesis");
            // Keep the parenthesised span for condition text.
            return finish(std::move(inner), begin);
        }
        case token_kind::identifier: {
            if (peek().kind == token_kind::lparen)
                return parse_call(t, begin);
            const symbol* sym = lookup(std::string(t.text));
            if (!sym) {
                if (function_index_.count(std::string(t.text)))
                    fail(t, "function '" + std::string(t.text) + "' used without a call");
                fail(t, "use of undeclared variable '" + std::string(t.text) + "'");
            }
            auto e = std::make_unique<expr>();
            e->loc = t.loc;
            e->var = sym->ref;
            if (accept(token_kind::lbracket)) {
                if (sym->ref.length == 0)
                    fail(t, "'" + std::string(t.text) + "' is not an array");
                e->kind = expr_kind::element;
                e->lhs = parse_expr();
                expect(token_kind::rbracket, "after index");
            } else {
                if (sym->ref.length != 0)
                    fail(t, "array '" + std::string(t.text) + "' used without an index");
                e->kind = expr_kind::variable;
            }
            return finish(std::move(e), begin);
        }
        default: fail(t, "expected an expression, found " + found(t));
        }
    }

    std::unique_ptr<expr> parse_call(const token& name, std::size_t begin)
    {
        const std::string fname{name.text};
        if (in_condition_)
            fail(name, "function calls are not supported inside branch conditions");
        if (fname == current_function_name_ && current_function_)
            fail(name, "recursive call to '" + fname + "' is not supported");
        auto it = function_index_.find(fname);
        if (it == function_index_.end())
            fail(name, "call to undefined function '" + fname + "' (define functions before use)");
        auto e = std::make_unique<expr>();
        e->kind = expr_kind::call;
        e->loc = name.loc;
        e->callee = it->second;
        expect(token_kind::lparen, "after function name");
        if (peek().kind != token_kind::rparen) {
            do {
                e->args.push_back(parse_expr());
            } while (accept(token_kind::comma));
        }
        expect(token_kind::rparen, "after arguments");
        if (e->args.size() != function_arity_.at(fname))
            fail(name, "function '" + fname + "' expects " + std::to_string(function_arity_.at(fname)) +
                           " argument(s), got " + std::to_string(e->args.size()));
        return finish(std::move(e), begin);
    }

    const source_program& source_;
    std::vector<token> tokens_;
    std::size_t pos_ = 0;
    std::size_t last_end_ = 0;

    program prog_;
    std::vector<std::map<std::string, symbol>> scopes_;
    std::map<std::string, std::uint32_t> function_index_;
    std::map<std::string, std::size_t> function_arity_;
    std::map<std::string, bool> function_void_;
    std::unordered_map<const expr*, std::pair<std::size_t, std::size_t>> spans_;

    std::optional<std::uint32_t> current_function_;
    std::string current_function_name_;
    bool current_returns_void_ = false;
    std::uint32_t frame_size_ = 0;
    std::optional<branch> guard_;
    int loop_depth_ = 0;
    int switch_depth_ = 0;
    bool in_condition_ = false;
};

program parse(const source_program& source)
{
    return parser{source}.run();
}

program parse_text(const std::string& name, const std::string& text)
{
    return parse(make_source(name, text));
}

}  // namespace evotest::minilang
