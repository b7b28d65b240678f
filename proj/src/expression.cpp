#include "zeronoise/expression.hpp"

#include "zeronoise/errors.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace zeronoise {

enum class Op { constant, variable, add, sub, mul, div, pow, neg, sin, cos, exp, log, sqrt };

struct Expression::Node {
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
    return std::make_shared<const Expression::Node>(
        Expression::Node{op, value, std::move(lhs), std::move(rhs)});
}

NodePtr number(double v) { return make(Op::constant, nullptr, nullptr, v); }

bool is_number(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::constant; }

double eval(const Expression::Node& n, double x) {
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::variable: return x;
        case Op::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
        case Op::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
        case Op::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
        case Op::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
        case Op::pow: {
            const double base = eval(*n.lhs, x);
            if (is_const(n.rhs)) {
                const double e = n.rhs->value;
                if (e == 2.0) return base * base;
                if (e == 3.0) return base * base * base;
            }
            return std::pow(base, eval(*n.rhs, x));
        }
        case Op::neg: return -eval(*n.lhs, x);
        case Op::sin: return std::sin(eval(*n.lhs, x));
        case Op::cos: return std::cos(eval(*n.lhs, x));
        case Op::exp: return std::exp(eval(*n.lhs, x));
        case Op::log: return std::log(eval(*n.lhs, x));
        case Op::sqrt: return std::sqrt(eval(*n.lhs, x));
    }
    return 0.0;
}

NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return number(a->value + b->value);
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    return make(Op::add, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
    if (is_const(a)) return number(-a->value);
    if (a->op == Op::neg) return a->lhs;
    return make(Op::neg, std::move(a));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return number(a->value - b->value);
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return neg(std::move(b));
    return make(Op::sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return number(a->value * b->value);
    if (is_number(a, 0.0) || is_number(b, 0.0)) return number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    if (is_const(b)) return make(Op::mul, std::move(b), std::move(a));
    return make(Op::mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return number(a->value / b->value);
    if (is_number(a, 0.0)) return number(0.0);
    if (is_number(b, 1.0)) return a;
    return make(Op::div, std::move(a), std::move(b));
}

NodePtr power(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return number(std::pow(a->value, b->value));
    if (is_number(b, 0.0)) return number(1.0);
    if (is_number(b, 1.0)) return a;
    return make(Op::pow, std::move(a), std::move(b));
}

NodePtr unary(Op op, NodePtr a) {
    if (is_const(a)) return number(eval(Expression::Node{op, 0.0, a, nullptr}, 0.0));
    return make(op, std::move(a));
}

NodePtr differentiate(const NodePtr& n) {
    switch (n->op) {
        case Op::constant: return number(0.0);
        case Op::variable: return number(1.0);
        case Op::add: return add(differentiate(n->lhs), differentiate(n->rhs));
        case Op::sub: return sub(differentiate(n->lhs), differentiate(n->rhs));
        case Op::mul:
            return add(mul(differentiate(n->lhs), n->rhs), mul(n->lhs, differentiate(n->rhs)));
        case Op::div: {
            const NodePtr num =
                sub(mul(differentiate(n->lhs), n->rhs), mul(n->lhs, differentiate(n->rhs)));
            return div(num, power(n->rhs, number(2.0)));
        }
        case Op::pow: {
            if (is_const(n->rhs)) {
                const double e = n->rhs->value;
                return mul(mul(number(e), power(n->lhs, number(e - 1.0))),
                           differentiate(n->lhs));
            }
            // d(a^b) = a^b (b' log a + b a' / a)
            const NodePtr term = add(mul(differentiate(n->rhs), unary(Op::log, n->lhs)),
                                     div(mul(n->rhs, differentiate(n->lhs)), n->lhs));
            return mul(n, term);
        }
        case Op::neg: return neg(differentiate(n->lhs));
        case Op::sin: return mul(unary(Op::cos, n->lhs), differentiate(n->lhs));
        case Op::cos: return neg(mul(unary(Op::sin, n->lhs), differentiate(n->lhs)));
        case Op::exp: return mul(n, differentiate(n->lhs));
        case Op::log: return div(differentiate(n->lhs), n->lhs);
        case Op::sqrt: return div(differentiate(n->lhs), mul(number(2.0), n));
    }
    return number(0.0);
}

bool depends_on_x(const NodePtr& n) {
    if (!n) return false;
    if (n->op == Op::variable) return true;
    return depends_on_x(n->lhs) || depends_on_x(n->rhs);
}

bool affine(const NodePtr& n) {
    switch (n->op) {
        case Op::constant:
        case Op::variable: return true;
        case Op::add:
        case Op::sub: return affine(n->lhs) && affine(n->rhs);
        case Op::neg: return affine(n->lhs);
        case Op::mul:
            return (!depends_on_x(n->lhs) && affine(n->rhs)) ||
                   (!depends_on_x(n->rhs) && affine(n->lhs));
        case Op::div: return !depends_on_x(n->rhs) && affine(n->lhs);
        default: return !depends_on_x(n);
    }
}

std::string format_node(const NodePtr& n) {
    auto binary = [&](const char* sym) {
        return fmt::format("({} {} {})", format_node(n->lhs), sym, format_node(n->rhs));
    };
    auto call = [&](const char* name) { return fmt::format("{}({})", name, format_node(n->lhs)); };
    switch (n->op) {
        case Op::constant: return fmt::format("{}", n->value);
        case Op::variable: return "x";
        case Op::add: return binary("+");
        case Op::sub: return binary("-");
        case Op::mul: return binary("*");
        case Op::div: return binary("/");
        case Op::pow: return binary("^");
        case Op::neg: return fmt::format("(-{})", format_node(n->lhs));
        case Op::sin: return call("sin");
        case Op::cos: return call("cos");
        case Op::exp: return call("exp");
        case Op::log: return call("log");
        case Op::sqrt: return call("sqrt");
    }
    return "?";
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        NodePtr result = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return result;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError(
            fmt::format("expression '{}': {} at column {}", text_, what, pos_ + 1));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        while (true) {
            if (accept("+")) {
                lhs = add(lhs, term());
            } else if (accept("-")) {
                lhs = sub(lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = signed_factor();
        while (true) {
            skip_space();
            if (text_.substr(pos_, 2) == "**") return lhs;  // handled in power()
            if (accept("*")) {
                lhs = mul(lhs, signed_factor());
            } else if (accept("/")) {
                lhs = div(lhs, signed_factor());
            } else {
                return lhs;
            }
        }
    }

    NodePtr signed_factor() {
        if (accept("-")) return neg(signed_factor());
        if (accept("+")) return signed_factor();
        return power_expr();
    }

    NodePtr power_expr() {
        NodePtr base = primary();
        if (accept("^") || accept("**")) return power(base, signed_factor());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expression();
            if (!accept(")")) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string rest(text_.substr(pos_));
            char* end = nullptr;
            const double v = std::strtod(rest.c_str(), &end);
            if (end == rest.c_str()) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - rest.c_str());
            return number(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            const std::string_view word = text_.substr(start, pos_ - start);
            if (word == "x") return make(Op::variable);
            if (word == "pi") return number(std::numbers::pi);
            Op op;
            if (word == "sin") op = Op::sin;
            else if (word == "cos") op = Op::cos;
            else if (word == "exp") op = Op::exp;
            else if (word == "log") op = Op::log;
            else if (word == "sqrt") op = Op::sqrt;
            else {
                pos_ = start;
                fail(fmt::format("unknown identifier '{}'", word));
            }
            if (!accept("(")) fail("expected '(' after function name");
            NodePtr arg = expression();
            if (!accept(")")) fail("expected ')'");
            return unary(op, arg);
        }
        fail(fmt::format("unexpected character '{}'", c));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

Expression Expression::constant(double value) { return Expression(number(value)); }

Expression Expression::variable() { return Expression(make(Op::variable)); }

double Expression::operator()(double x) const { return eval(*root_, x); }

Expression Expression::derivative() const { return Expression(differentiate(root_)); }

std::string Expression::to_string() const { return format_node(root_); }

bool Expression::is_constant() const { return !depends_on_x(root_); }

bool Expression::is_affine() const { return affine(root_); }

}  // namespace zeronoise
