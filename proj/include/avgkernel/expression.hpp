#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace avgkernel {

/// Immutable expression tree over the two kernel variables x and y.
///
/// Grammar (whitespace insignificant):
///   expr    := term (("+" | "-") term)*
///   term    := factor (("*" | "/") factor)*
///   factor  := unary ("^" factor)?          right-associative
///   unary   := "-" unary | "abs" "(" expr ")" | primary
///   primary := number | "x" | "y" | "eta" | "eta1" | "(" expr ")"
/// Unary minus binds tighter than "^", so "-x^2" is (-x)^2.
class Expression {
 public:
  enum class Kind { constant, var_x, var_y, add, subtract, multiply, divide, power, negate, absolute };

  struct Node {
    Kind kind = Kind::constant;
    double value = 0.0;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  /// Throws SyntaxError with the byte offset (plus offset_base) and the set
  /// of expected tokens.
  static Expression parse(std::string_view text, std::size_t offset_base = 0);

  /// Throws DomainError (carrying x and y) on division by zero, a negative
  /// base raised to a non-integer power, or any non-finite result.
  double evaluate(double x, double y) const;

  /// Fully parenthesized source that parses back to an equivalent tree.
  std::string to_string() const;

  const Node& root() const { return *root_; }

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

/// Splits an optional "q=<number>;" prefix off kernel source text.
/// Returns the degree (if present) and the remaining expression text; the
/// offset of the remainder within text is stored in expr_offset.
std::optional<double> split_degree_prefix(std::string_view text, std::string_view& expr, std::size_t& expr_offset);

}  // namespace avgkernel
