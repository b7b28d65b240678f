#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace zeronoise {

/// A closed-form real function of one variable `x`.
///
/// Grammar: numbers, `x`, `pi`, `+ - * /`, `^` (or `**`), unary minus,
/// parentheses and the functions sin, cos, exp, log, sqrt. Derivatives are
/// symbolic and lightly simplified (constant folding, 0/1 identities).
class Expression {
public:
    struct Node;

    /// Throws ValidationError with the offending column on malformed input.
    static Expression parse(std::string_view text);
    static Expression constant(double value);
    static Expression variable();

    double operator()(double x) const;
    Expression derivative() const;
    std::string to_string() const;

    bool is_constant() const;
    /// True when the expression is affine in x (no nonlinear node depends on x).
    bool is_affine() const;

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

}  // namespace zeronoise
