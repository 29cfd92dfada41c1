#include "avgkernel/expression.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <string>
#include <vector>

#include "avgkernel/error.hpp"
#include "avgkernel/format.hpp"

namespace avgkernel {

namespace {

using Node = Expression::Node;
using Kind = Expression::Kind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Kind kind, NodePtr left = nullptr, NodePtr right = nullptr, double value = 0.0) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->value = value;
  node->left = std::move(left);
  node->right = std::move(right);
  return node;
}

const std::vector<std::string> kOperandStart = {"number", "x", "y", "eta", "eta1", "(", "-", "abs"};

class Parser {
 public:
  Parser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ < text_.size()) fail({"+", "-", "*", "/", "^", "end of input"});
    return root;
  }

 private:
  NodePtr expr() {
    NodePtr left = term();
    while (true) {
      skip_space();
      if (accept('+'))
        left = make(Kind::add, left, term());
      else if (accept('-'))
        left = make(Kind::subtract, left, term());
      else
        return left;
    }
  }

  NodePtr term() {
    NodePtr left = factor();
    while (true) {
      skip_space();
      if (accept('*'))
        left = make(Kind::multiply, left, factor());
      else if (accept('/'))
        left = make(Kind::divide, left, factor());
      else
        return left;
    }
  }

  NodePtr factor() {
    NodePtr base = unary();
    skip_space();
    if (accept('^')) return make(Kind::power, base, factor());
    return base;
  }

  NodePtr unary() {
    skip_space();
    if (accept('-')) return make(Kind::negate, unary());
    if (peek_word() == "abs") {
      pos_ += 3;
      skip_space();
      if (!accept('(')) fail({"("});
      NodePtr inner = expr();
      skip_space();
      if (!accept(')')) fail({")"});
      return make(Kind::absolute, inner);
    }
    return primary();
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail(kOperandStart);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      skip_space();
      if (!accept(')')) fail({")"});
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    const std::string_view word = peek_word();
    if (word == "x" || word == "eta") {
      pos_ += word.size();
      return make(Kind::var_x);
    }
    if (word == "y" || word == "eta1") {
      pos_ += word.size();
      return make(Kind::var_y);
    }
    fail(kOperandStart);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_ + 1;
      if (mark < text_.size() && (text_[mark] == '+' || text_[mark] == '-')) ++mark;
      if (mark < text_.size() && std::isdigit(static_cast<unsigned char>(text_[mark]))) {
        pos_ = mark;
        digits();
      }
    }
    double value = 0.0;
    if (!parse_double(text_.substr(start, pos_ - start), value)) {
      pos_ = start;
      fail({"number"});
    }
    return make(Kind::constant, nullptr, nullptr, value);
  }

  std::string_view peek_word() const {
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
    if (end == pos_ || !std::isalpha(static_cast<unsigned char>(text_[pos_]))) return {};
    return text_.substr(pos_, end - pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const std::size_t offset = base_ + pos_;
    std::string message = "syntax error at offset " + std::to_string(offset) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) message += (i ? ", " : "") + expected[i];
    if (pos_ < text_.size())
      message += "; found '" + std::string(1, text_[pos_]) + "'";
    else
      message += "; found end of input";
    throw SyntaxError(offset, std::move(expected), message);
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

[[noreturn]] void domain_failure(const std::string& what, double x, double y) {
  throw DomainError(what + " at (x, y) = (" + format_sci17(x) + ", " + format_sci17(y) + ")");
}

double eval_node(const Node& n, double x, double y) {
  switch (n.kind) {
    case Kind::constant:
      return n.value;
    case Kind::var_x:
      return x;
    case Kind::var_y:
      return y;
    case Kind::add:
      return eval_node(*n.left, x, y) + eval_node(*n.right, x, y);
    case Kind::subtract:
      return eval_node(*n.left, x, y) - eval_node(*n.right, x, y);
    case Kind::multiply:
      return eval_node(*n.left, x, y) * eval_node(*n.right, x, y);
    case Kind::divide: {
      const double denominator = eval_node(*n.right, x, y);
      if (denominator == 0.0) domain_failure("division by zero", x, y);
      return eval_node(*n.left, x, y) / denominator;
    }
    case Kind::power: {
      const double base = eval_node(*n.left, x, y);
      const double exponent = eval_node(*n.right, x, y);
      if (base < 0.0 && exponent != std::trunc(exponent))
        domain_failure("negative base raised to a non-integer power", x, y);
      if (base == 0.0 && exponent < 0.0) domain_failure("zero raised to a negative power", x, y);
      return std::pow(base, exponent);
    }
    case Kind::negate:
      return -eval_node(*n.left, x, y);
    case Kind::absolute:
      return std::abs(eval_node(*n.left, x, y));
  }
  return 0.0;
}

std::string print_node(const Node& n) {
  switch (n.kind) {
    case Kind::constant:
      return format_shortest(n.value);
    case Kind::var_x:
      return "x";
    case Kind::var_y:
      return "y";
    case Kind::add:
      return "(" + print_node(*n.left) + "+" + print_node(*n.right) + ")";
    case Kind::subtract:
      return "(" + print_node(*n.left) + "-" + print_node(*n.right) + ")";
    case Kind::multiply:
      return "(" + print_node(*n.left) + "*" + print_node(*n.right) + ")";
    case Kind::divide:
      return "(" + print_node(*n.left) + "/" + print_node(*n.right) + ")";
    case Kind::power:
      return "(" + print_node(*n.left) + "^" + print_node(*n.right) + ")";
    case Kind::negate:
      return "(-" + print_node(*n.left) + ")";
    case Kind::absolute:
      return "abs(" + print_node(*n.left) + ")";
  }
  return {};
}

}  // namespace

Expression Expression::parse(std::string_view text, std::size_t offset_base) {
  return Expression(Parser(text, offset_base).parse());
}

double Expression::evaluate(double x, double y) const {
  const double value = eval_node(*root_, x, y);
  if (!std::isfinite(value)) domain_failure("expression is not finite", x, y);
  return value;
}

std::string Expression::to_string() const { return print_node(*root_); }

std::optional<double> split_degree_prefix(std::string_view text, std::string_view& expr, std::size_t& expr_offset) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip();
  if (pos + 1 < text.size() && text[pos] == 'q') {
    std::size_t eq = pos + 1;
    while (eq < text.size() && std::isspace(static_cast<unsigned char>(text[eq]))) ++eq;
    if (eq < text.size() && text[eq] == '=') {
      pos = eq + 1;
      skip();
      const std::size_t start = pos;
      const auto semicolon = text.find(';', pos);
      if (semicolon == std::string_view::npos)
        throw SyntaxError(text.size(), {";"}, "syntax error at offset " + std::to_string(text.size()) +
                                                  ": expected ; after the degree prefix");
      std::string_view number = text.substr(start, semicolon - start);
      while (!number.empty() && std::isspace(static_cast<unsigned char>(number.back()))) number.remove_suffix(1);
      double q = 0.0;
      if (number.empty() || !parse_double(number, q))
        throw SyntaxError(start, {"number"}, "syntax error at offset " + std::to_string(start) +
                                                 ": expected number in the degree prefix");
      expr_offset = semicolon + 1;
      expr = text.substr(expr_offset);
      return q;
    }
  }
  expr_offset = 0;
  expr = text;
  return std::nullopt;
}

}  // namespace avgkernel
