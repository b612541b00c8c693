#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evotest/minilang/source.hpp"

namespace evotest::minilang {

template <typename Tag>
struct strong_id {
    std::uint32_t value = 0;

    friend auto operator<=>(strong_id, strong_id) = default;
};

using statement_id = strong_id<struct statement_tag>;
using decision_id = strong_id<struct decision_tag>;
using condition_id = strong_id<struct condition_tag>;

struct source_location {
    int line = 0;
    int column = 0;

    friend bool operator==(const source_location&, const source_location&) = default;
};

/// Operator of an atomic condition. `truthy` covers non-relational leaves
/// such as `if (flag)`; its operands are recorded as (value, 0).
enum class compare_op : std::uint8_t { eq, ne, lt, le, gt, ge, truthy };

[[nodiscard]] const char* to_string(compare_op op) noexcept;
[[nodiscard]] bool apply(compare_op op, std::int64_t lhs, std::int64_t rhs) noexcept;

/// A decision outcome: the edge taken out of a branching statement.
struct branch {
    decision_id decision;
    bool outcome = true;

    friend auto operator<=>(const branch&, const branch&) = default;
};

enum class arith_op : std::uint8_t { add, sub, mul, div, mod };

/// Location of a variable. Arrays have `length > 0` and occupy
/// `[offset, offset + length)`.
struct storage_ref {
    bool global = false;
    std::uint32_t offset = 0;
    std::uint32_t length = 0;
};

enum class expr_kind : std::uint8_t {
    literal,
    variable,
    element,
    negate,
    logical_not,
    arith,
    compare,
    logical_and,
    logical_or,
    call,
};

struct expr {
    expr_kind kind = expr_kind::literal;
    source_location loc;
    std::int64_t literal = 0;
    storage_ref var;
    arith_op arith = arith_op::add;
    compare_op cmp = compare_op::eq;
    std::unique_ptr<expr> lhs;  // also the operand of unary nodes and the index of `element`
    std::unique_ptr<expr> rhs;
    std::vector<std::unique_ptr<expr>> args;
    std::uint32_t callee = 0;
    // Set on the atomic leaves of a decision's condition expression.
    std::optional<condition_id> condition;
};

enum class stmt_kind : std::uint8_t {
    declare,
    assign,
    expression,
    if_else,
    while_loop,
    do_while,
    for_loop,
    switch_case,
    return_value,
    break_loop,
    continue_loop,
    block,
    empty,
};

[[nodiscard]] const char* to_string(stmt_kind kind) noexcept;

struct stmt;
using stmt_ptr = std::unique_ptr<stmt>;

struct declarator {
    storage_ref slot;
    std::unique_ptr<expr> init;              // scalar initializer
    std::vector<std::unique_ptr<expr>> list;  // array brace initializer
};

struct case_section {
    source_location loc;
    std::optional<std::int64_t> value;  // empty for `default`
    std::optional<decision_id> decision;
    std::vector<stmt_ptr> body;
};

struct stmt {
    stmt_kind kind = stmt_kind::empty;
    source_location loc;
    std::optional<statement_id> id;  // blocks and empty statements carry none

    std::vector<declarator> declarators;

    // assign: target[index] op= value
    storage_ref target;
    std::unique_ptr<expr> index;
    std::optional<arith_op> compound;

    std::unique_ptr<expr> value;  // assign rhs, expression statement, return value, switch scrutinee

    std::optional<decision_id> decision;
    std::unique_ptr<expr> cond;
    stmt_ptr then_branch;
    stmt_ptr else_branch;
    stmt_ptr body;
    stmt_ptr init;
    stmt_ptr step;

    std::vector<stmt_ptr> children;
    std::vector<case_section> cases;
};

struct function_def {
    std::string name;
    source_location loc;
    std::vector<storage_ref> params;
    std::uint32_t frame_size = 0;
    stmt_ptr body;
};

struct global_init {
    storage_ref slot;
    std::unique_ptr<expr> init;
    std::vector<std::unique_ptr<expr>> list;
};

enum class decision_kind : std::uint8_t { if_else, while_loop, do_while, for_loop, switch_case };

[[nodiscard]] const char* to_string(decision_kind kind) noexcept;

/// Boolean structure of a decision over its atomic conditions.
struct logic_node {
    enum class kind : std::uint8_t { leaf, all_of, any_of, negation };
    kind type = kind::leaf;
    condition_id leaf;
    std::uint32_t lhs = 0;  // child indices into decision_info::logic
    std::uint32_t rhs = 0;
};

struct statement_info {
    statement_id id;
    stmt_kind kind = stmt_kind::empty;
    source_location loc;
    std::uint32_t function = 0;
    std::optional<branch> guard;  // innermost enclosing decision edge
};

struct decision_info {
    decision_id id;
    decision_kind kind = decision_kind::if_else;
    source_location loc;
    std::string text;
    std::uint32_t function = 0;
    std::optional<branch> guard;
    condition_id first_condition;
    std::uint32_t condition_count = 0;
    std::vector<logic_node> logic;  // root is the last node
};

struct condition_info {
    condition_id id;
    decision_id decision;
    compare_op op = compare_op::truthy;
    source_location loc;
    std::string text;
};

/// One input gene after array expansion.
struct gene_info {
    std::string name;  // `x` or `a[3]`
    value_range range;
};

/// A parsed, resolved MiniC program. Immutable after construction and safe
/// to share between threads.
class program {
public:
    program() = default;
    program(program&&) noexcept = default;
    program& operator=(program&&) noexcept = default;
    program(const program&) = delete;
    program& operator=(const program&) = delete;

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<input_decl>& inputs() const noexcept { return inputs_; }
    [[nodiscard]] const std::vector<gene_info>& genes() const noexcept { return genes_; }
    [[nodiscard]] std::size_t gene_count() const noexcept { return genes_.size(); }
    [[nodiscard]] std::vector<value_range> gene_ranges() const;

    [[nodiscard]] const std::vector<function_def>& functions() const noexcept { return functions_; }
    [[nodiscard]] const function_def& entry() const { return functions_.at(entry_); }
    [[nodiscard]] std::uint32_t entry_index() const noexcept { return entry_; }
    [[nodiscard]] const std::vector<global_init>& global_inits() const noexcept { return global_inits_; }
    [[nodiscard]] std::uint32_t global_size() const noexcept { return global_size_; }

    [[nodiscard]] const std::vector<statement_info>& statements() const noexcept { return statements_; }
    [[nodiscard]] const std::vector<decision_info>& decisions() const noexcept { return decisions_; }
    [[nodiscard]] const std::vector<condition_info>& conditions() const noexcept { return conditions_; }

    [[nodiscard]] const statement_info& statement(statement_id id) const { return statements_.at(id.value); }
    [[nodiscard]] const decision_info& decision(decision_id id) const { return decisions_.at(id.value); }
    [[nodiscard]] const condition_info& condition(condition_id id) const { return conditions_.at(id.value); }

    /// Hash of the source text and input declarations; traces carry it so
    /// coverage can reject traces from a different program.
    [[nodiscard]] std::uint64_t fingerprint() const noexcept { return fingerprint_; }

private:
    friend class parser;

    std::string name_;
    std::vector<input_decl> inputs_;
    std::vector<gene_info> genes_;
    std::vector<function_def> functions_;
    std::uint32_t entry_ = 0;
    std::vector<global_init> global_inits_;
    std::uint32_t global_size_ = 0;
    std::vector<statement_info> statements_;
    std::vector<decision_info> decisions_;
    std::vector<condition_info> conditions_;
    std::uint64_t fingerprint_ = 0;
};

/// Parses and resolves a MiniC program. Ids are assigned in source order.
[[nodiscard]] program parse(const source_program& source);

/// Convenience: `parse(make_source(name, text))`.
[[nodiscard]] program parse_text(const std::string& name, const std::string& text);

}  // namespace evotest::minilang
