#pragma once

// Arithmetic templates with `#(path)` placeholders:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := number | '(' expr ')' | '#(' path ')' | '-' factor

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "srml/detail/strings.hpp"
#include "srml/error.hpp"
#include "srml/path.hpp"

namespace srml {

struct ArithNode;
using ArithPtr = std::shared_ptr<const ArithNode>;

struct ArithNode {
  enum class Kind { constant, placeholder, negate, add, subtract, multiply, divide };

  Kind kind = Kind::constant;
  double number = 0.0;
  PathExpr path;
  ArithPtr left;
  ArithPtr right;
};

struct ArithTemplate {
  std::string source;  // trimmed template text
  ArithPtr root;

  friend bool operator==(const ArithTemplate& a, const ArithTemplate& b) { return a.source == b.source; }
};

// Result of template evaluation. `decimal_form` records whether any resolved
// operand was written with a decimal point.
struct Number {
  double value = 0.0;
  bool decimal_form = false;
};

namespace detail {

class TemplateParser {
 public:
  explicit TemplateParser(std::string_view src) : src_(src) {}

  ArithPtr parse() {
    auto root = parse_expr();
    skip_space();
    if (!at_end()) fail("unexpected '" + std::string(1, peek()) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw TemplateSyntaxError(what, pos_); }

  bool at_end() const noexcept { return pos_ >= src_.size(); }
  char peek() const noexcept { return src_[pos_]; }
  void skip_space() {
    while (!at_end() && is_space(peek())) ++pos_;
  }

  static ArithPtr binary(ArithNode::Kind kind, ArithPtr l, ArithPtr r) {
    auto n = std::make_shared<ArithNode>();
    n->kind = kind;
    n->left = std::move(l);
    n->right = std::move(r);
    return n;
  }

  ArithPtr parse_expr() {
    auto left = parse_term();
    for (;;) {
      skip_space();
      if (at_end() || (peek() != '+' && peek() != '-')) return left;
      auto kind = peek() == '+' ? ArithNode::Kind::add : ArithNode::Kind::subtract;
      ++pos_;
      left = binary(kind, std::move(left), parse_term());
    }
  }

  ArithPtr parse_term() {
    auto left = parse_factor();
    for (;;) {
      skip_space();
      if (at_end() || (peek() != '*' && peek() != '/')) return left;
      auto kind = peek() == '*' ? ArithNode::Kind::multiply : ArithNode::Kind::divide;
      ++pos_;
      left = binary(kind, std::move(left), parse_factor());
    }
  }

  ArithPtr parse_factor() {
    skip_space();
    if (at_end()) fail("unexpected end of template");
    char c = peek();
    if (c == '-') {
      ++pos_;
      auto n = std::make_shared<ArithNode>();
      n->kind = ArithNode::Kind::negate;
      n->left = parse_factor();
      return n;
    }
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      skip_space();
      if (at_end() || peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == '#') return parse_placeholder();
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  ArithPtr parse_number() {
    std::size_t start = pos_;
    while (!at_end() && ((peek() >= '0' && peek() <= '9') || peek() == '.')) ++pos_;
    auto value = parse_decimal(src_.substr(start, pos_ - start));
    if (!value) {
      pos_ = start;
      fail("malformed number");
    }
    auto n = std::make_shared<ArithNode>();
    n->kind = ArithNode::Kind::constant;
    n->number = *value;
    return n;
  }

  // `#(` path `)`; the closing paren is the one balancing `#(`, ignoring
  // parens inside quoted predicate literals.
  ArithPtr parse_placeholder() {
    std::size_t start = pos_;
    ++pos_;
    if (at_end() || peek() != '(') fail("expected '(' after '#'");
    ++pos_;
    std::size_t path_start = pos_;
    int depth = 1;
    char quote = 0;
    while (!at_end()) {
      char c = peek();
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '(') {
        ++depth;
      } else if (c == ')' && --depth == 0) {
        break;
      }
      ++pos_;
    }
    if (at_end()) {
      pos_ = start;
      fail("unterminated placeholder");
    }
    std::string_view path_src = trim_view(src_.substr(path_start, pos_ - path_start));
    ++pos_;
    auto n = std::make_shared<ArithNode>();
    n->kind = ArithNode::Kind::placeholder;
    try {
      n->path = parse_path(path_src);
    } catch (const PathSyntaxError& e) {
      throw TemplateSyntaxError("invalid placeholder path: " + std::string(e.what()), path_start + e.offset());
    }
    return n;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

template <typename Resolver>
Number eval_arith(const ArithNode& node, Resolver& resolve) {
  using K = ArithNode::Kind;
  switch (node.kind) {
    case K::constant: return {node.number, false};
    case K::placeholder: {
      std::string raw = resolve(node.path);
      auto value = parse_decimal(raw);
      if (!value) {
        throw EvalError(EvalErrorKind::not_numeric,
                        "value '" + raw + "' of #(" + to_string(node.path) + ") is not a number");
      }
      return {*value, raw.find('.') != std::string::npos};
    }
    case K::negate: {
      Number v = eval_arith(*node.left, resolve);
      return {-v.value, v.decimal_form};
    }
    default: break;
  }
  Number l = eval_arith(*node.left, resolve);
  Number r = eval_arith(*node.right, resolve);
  Number out{0.0, l.decimal_form || r.decimal_form};
  switch (node.kind) {
    case K::add: out.value = l.value + r.value; break;
    case K::subtract: out.value = l.value - r.value; break;
    case K::multiply: out.value = l.value * r.value; break;
    case K::divide:
      if (r.value == 0.0) throw EvalError(EvalErrorKind::division_by_zero, "division by zero");
      out.value = l.value / r.value;
      break;
    default: break;
  }
  if (!std::isfinite(out.value)) throw EvalError(EvalErrorKind::non_finite, "arithmetic overflow");
  return out;
}

}  // namespace detail

inline ArithTemplate parse_template(std::string_view src) {
  std::string_view trimmed = detail::trim_view(src);
  return ArithTemplate{std::string(trimmed), detail::TemplateParser(trimmed).parse()};
}

// `resolve` maps a placeholder path to the raw string it refers to.
template <typename Resolver>
Number eval_arith(const ArithTemplate& tmpl, Resolver&& resolve) {
  return detail::eval_arith(*tmpl.root, resolve);
}

}  // namespace srml
