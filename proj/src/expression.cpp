#include "arqmc/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "arqmc/common.hpp"

namespace arqmc {

class ExpressionParser {
  public:
    ExpressionParser(const std::string& text, const Expression::Resolver& resolve)
        : text_(text), resolve_(resolve)
    {
    }

    Expression run()
    {
        Expression e;
        out_ = &e;
        e.root_ = expr();
        skip_space();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

  private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("expression: " + what, 1, pos_ + 1);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::uint32_t add(Expression::Node node)
    {
        out_->nodes_.push_back(std::move(node));
        return static_cast<std::uint32_t>(out_->nodes_.size() - 1);
    }

    std::uint32_t binary(Op op, std::uint32_t lhs, std::uint32_t rhs)
    {
        Expression::Node n;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        return add(std::move(n));
    }

    std::uint32_t expr()
    {
        std::uint32_t lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = binary(Op::add, lhs, term());
            else if (accept('-'))
                lhs = binary(Op::sub, lhs, term());
            else
                return lhs;
        }
    }

    std::uint32_t term()
    {
        std::uint32_t lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = binary(Op::mul, lhs, factor());
            else if (accept('/'))
                lhs = binary(Op::div, lhs, factor());
            else
                return lhs;
        }
    }

    std::uint32_t factor()
    {
        const std::uint32_t b = base();
        if (!accept('^'))
            return b;
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (start == pos_)
            fail("expected unsigned integer exponent");
        const unsigned long e = std::strtoul(text_.substr(start, pos_ - start).c_str(), nullptr, 10);
        if (e > 64) {
            pos_ = start;
            fail("exponent too large");
        }
        Expression::Node n;
        n.op = Op::pow;
        n.lhs = b;
        n.index = static_cast<std::uint32_t>(e);
        return add(std::move(n));
    }

    std::uint32_t base()
    {
        skip_space();
        if (pos_ >= text_.size())
            fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            const std::uint32_t inner = expr();
            if (!accept(')'))
                fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::uint32_t number()
    {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin)
            fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        Expression::Node n;
        n.op = Op::constant;
        n.value = v;
        return add(std::move(n));
    }

    std::uint32_t identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        Expression::Symbol sym;
        if (!resolve_(name, sym)) {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        Expression::Node n;
        n.name = std::move(name);
        if (sym.is_variable) {
            n.op = Op::variable;
            n.index = sym.index;
        } else {
            n.op = Op::named_constant;
            n.value = sym.value;
        }
        return add(std::move(n));
    }

    const std::string& text_;
    const Expression::Resolver& resolve_;
    std::size_t pos_ = 0;
    Expression* out_ = nullptr;
};

Expression Expression::parse(const std::string& text, const Resolver& resolve)
{
    return ExpressionParser(text, resolve).run();
}

double Expression::evaluate(std::span<const double> x) const
{
    return eval(root_, x);
}

double Expression::eval(std::uint32_t i, std::span<const double> x) const
{
    const Node& n = nodes_[i];
    switch (n.op) {
    case Op::constant:
    case Op::named_constant:
        return n.value;
    case Op::variable:
        return x[n.index];
    case Op::add:
        return eval(n.lhs, x) + eval(n.rhs, x);
    case Op::sub:
        return eval(n.lhs, x) - eval(n.rhs, x);
    case Op::mul:
        return eval(n.lhs, x) * eval(n.rhs, x);
    case Op::div: {
        const double den = eval(n.rhs, x);
        if (den == 0)
            throw ModelError("expression: division by zero at the current state");
        return eval(n.lhs, x) / den;
    }
    case Op::pow: {
        const double b = eval(n.lhs, x);
        double r = 1;
        for (std::uint32_t k = 0; k < n.index; ++k)
            r *= b;
        return r;
    }
    }
    return 0;
}

namespace {

int precedence(Expression::Op op)
{
    switch (op) {
    case Expression::Op::add:
    case Expression::Op::sub:
        return 1;
    case Expression::Op::mul:
    case Expression::Op::div:
        return 2;
    case Expression::Op::pow:
        return 3;
    default:
        return 4;
    }
}

}  // namespace

void Expression::print(std::uint32_t i, int parent, bool right, std::string& out) const
{
    const Node& n = nodes_[i];
    const int prec = precedence(n.op);
    // Operators are left associative, so an equal-precedence right operand
    // needs brackets to survive a re-parse; a power base must be atomic.
    const bool wrap = prec < parent || (right && prec == parent) || (parent == 3 && prec < 4);
    if (wrap)
        out += '(';
    switch (n.op) {
    case Op::constant: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        out += buf;
        break;
    }
    case Op::named_constant:
    case Op::variable:
        out += n.name;
        break;
    case Op::pow:
        print(n.lhs, 3, false, out);
        out += '^';
        out += std::to_string(n.index);
        break;
    default: {
        static const char* symbols[] = {"", "", "", " + ", " - ", " * ", " / "};
        print(n.lhs, prec, false, out);
        out += symbols[static_cast<int>(n.op)];
        print(n.rhs, prec, true, out);
    }
    }
    if (wrap)
        out += ')';
}

std::string Expression::to_string() const
{
    std::string out;
    if (!nodes_.empty())
        print(root_, 0, false, out);
    return out;
}

std::int64_t Expression::max_variable() const
{
    std::int64_t m = -1;
    for (const Node& n : nodes_)
        if (n.op == Op::variable && static_cast<std::int64_t>(n.index) > m)
            m = n.index;
    return m;
}

}  // namespace arqmc
