#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace invariance {

/// Compiled arithmetic expression over x1..xn and t.
///
/// Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := ('+' | '-') unary | atom
///   atom   := number | 'x' digits | 't' | '(' expr ')'
///
/// Variables are 1-based (x1 is the first spatial coordinate). Parsing throws
/// InputError with the offending column.
class Expression {
  public:
    struct Node;

    Expression();
    static Expression parse(std::string_view text, int space_dim);
    static Expression constant(double value);

    double operator()(std::span<const double> x, double t) const;

    bool uses_x() const { return uses_x_; }
    bool uses_t() const { return uses_t_; }
    bool is_constant() const { return !uses_x_ && !uses_t_; }
    const std::string& text() const { return text_; }

  private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    bool uses_x_ = false;
    bool uses_t_ = false;
};

}  // namespace invariance
