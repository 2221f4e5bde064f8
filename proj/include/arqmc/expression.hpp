#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace arqmc {

/*!
 * Rational expression over state variables, as used for non mass-action
 * propensities:
 *
 *   expr   := term (('+'|'-') term)*
 *   term   := factor (('*'|'/') factor)*
 *   factor := base ('^' uint)?
 *   base   := number | ident | '(' expr ')'
 *
 * Nodes live in a flat arena; children are referenced by index.
 */
class Expression {
  public:
    enum class Op : std::uint8_t { constant, named_constant, variable, add, sub, mul, div, pow };

    struct Node {
        Op op = Op::constant;
        double value = 0;         // constant / named_constant value
        std::uint32_t index = 0;  // variable index, or exponent for pow
        std::uint32_t lhs = 0;
        std::uint32_t rhs = 0;
        std::string name;  // identifier spelling for variables and named constants

        bool operator==(const Node&) const = default;
    };

    // Resolves an identifier: a variable (index into the state) or a named
    // constant. Returning false marks the identifier as unknown.
    struct Symbol {
        bool is_variable = false;
        std::uint32_t index = 0;
        double value = 0;
    };
    using Resolver = std::function<bool(const std::string&, Symbol&)>;

    Expression() = default;

    // Throws ParseError with a 1-based column into `text` on failure.
    static Expression parse(const std::string& text, const Resolver& resolve);

    // Throws ModelError if a denominator vanishes at x.
    double evaluate(std::span<const double> x) const;

    // Canonical text form; parse(to_string()) reproduces the same tree.
    std::string to_string() const;

    bool empty() const { return nodes_.empty(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::uint32_t root() const { return root_; }
    Op root_op() const { return nodes_.at(root_).op; }

    // Largest variable index referenced, or -1 if none.
    std::int64_t max_variable() const;

    bool operator==(const Expression&) const = default;

  private:
    double eval(std::uint32_t node, std::span<const double> x) const;
    void print(std::uint32_t node, int parent_precedence, bool right, std::string& out) const;

    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;

    friend class ExpressionParser;
};

}  // namespace arqmc
