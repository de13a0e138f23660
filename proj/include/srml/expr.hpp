#pragma once

// Evaluation of rule expressions to the expected value of a target.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "srml/arith.hpp"
#include "srml/detail/strings.hpp"
#include "srml/error.hpp"
#include "srml/path.hpp"
#include "srml/rules.hpp"
#include "srml/xml.hpp"

namespace srml {

class Value {
 public:
  static Value str(std::string s) { return Value(std::move(s)); }
  static Value num(double d, bool decimal_form = false) {
    Value v(d);
    v.decimal_form_ = decimal_form;
    return v;
  }
  static Value boolean(bool b) { return Value(b); }

  bool is_str() const noexcept { return std::holds_alternative<std::string>(v_); }
  bool is_num() const noexcept { return std::holds_alternative<double>(v_); }
  bool is_bool() const noexcept { return std::holds_alternative<bool>(v_); }

  const std::string& as_str() const { return std::get<std::string>(v_); }
  double as_num() const { return std::get<double>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }

  // Set when a numeric result was computed from operands written with a
  // decimal point.
  bool decimal_form() const noexcept { return decimal_form_; }

  // Rendering used for reports and corrections. With `keep_point`, decimal-form
  // integral numbers print as "1125.0".
  std::string to_string(bool keep_point = false) const {
    if (is_str()) return as_str();
    if (is_bool()) return as_bool() ? "true" : "false";
    return detail::format_number(as_num(), keep_point && decimal_form_);
  }

  std::optional<double> numeric() const {
    if (is_num()) return as_num();
    if (is_str()) return detail::parse_decimal(as_str());
    return std::nullopt;
  }

  std::optional<bool> boolean_form() const {
    if (is_bool()) return as_bool();
    if (is_str()) {
      if (as_str() == "true") return true;
      if (as_str() == "false") return false;
    }
    return std::nullopt;
  }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  explicit Value(std::variant<std::string, double, bool> v) : v_(std::move(v)) {}

  std::variant<std::string, double, bool> v_;
  bool decimal_form_ = false;
};

// For attribute targets `node` is the owning element and `attribute` names the
// attribute; a leading `..` in a path then resolves to `node`.
struct EvalContext {
  const XmlNode& node;
  std::optional<std::string> attribute;
  std::string instance_value;
};

inline constexpr double numeric_tolerance = 1e-9;

inline bool numbers_equal(double a, double b) noexcept {
  return std::fabs(a - b) <= numeric_tolerance * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool coerce_bool(const Value& v) {
  if (auto b = v.boolean_form()) return *b;
  throw EvalError(EvalErrorKind::type, "'" + v.to_string() + "' is not a boolean");
}

// Numeric when both sides read as numbers, boolean when both are booleans,
// exact string comparison otherwise.
inline bool values_equal(const Value& a, const Value& b) {
  auto na = a.numeric();
  auto nb = b.numeric();
  if (na && nb) return numbers_equal(*na, *nb);
  auto ba = a.boolean_form();
  auto bb = b.boolean_form();
  if (ba && bb) return *ba == *bb;
  return a.to_string() == b.to_string();
}

// Negative, zero or positive; numbers use the equality tolerance.
inline int compare_values(const Value& a, const Value& b) {
  auto na = a.numeric();
  auto nb = b.numeric();
  if (na && nb) {
    if (numbers_equal(*na, *nb)) return 0;
    return *na < *nb ? -1 : 1;
  }
  return a.to_string().compare(b.to_string());
}

namespace detail {

inline std::string resolve_first(const PathExpr& path, const EvalContext& ctx) {
  PathResult result = evaluate(path, ctx.node, ctx.attribute.has_value());
  if (result.empty()) {
    throw EvalError(EvalErrorKind::path_unresolved,
                    "path '" + to_string(path) + "' matched nothing from " + node_location(ctx.node));
  }
  return result.value(0);
}

}  // namespace detail

inline Value eval_template(const ArithTemplate& tmpl, const EvalContext& ctx) {
  Number n = eval_arith(tmpl, [&](const PathExpr& path) { return detail::resolve_first(path, ctx); });
  return Value::num(n.value, n.decimal_form);
}

inline Value eval_template(std::string_view tmpl, const EvalContext& ctx) {
  return eval_template(parse_template(tmpl), ctx);
}

inline Value eval(const Expr& expr, const EvalContext& ctx) {
  return std::visit(
      [&](const auto& e) -> Value {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, DataExpr>) {
          return Value::str(e.literal);
        } else if constexpr (std::is_same_v<E, ValueRefExpr>) {
          return Value::str(detail::resolve_first(e.path, ctx));
        } else if constexpr (std::is_same_v<E, InstanceValueExpr>) {
          return Value::str(ctx.instance_value);
        } else if constexpr (std::is_same_v<E, CountChildrenExpr>) {
          return Value::num(static_cast<double>(ctx.node.child_elements(e.name).size()));
        } else if constexpr (std::is_same_v<E, BinaryOpExpr>) {
          if (e.op == BinaryOpKind::logical_and || e.op == BinaryOpKind::logical_or) {
            bool left = coerce_bool(eval(*e.left, ctx));
            if (e.op == BinaryOpKind::logical_or && left) return Value::boolean(true);
            if (e.op == BinaryOpKind::logical_and && !left) return Value::boolean(false);
            return Value::boolean(coerce_bool(eval(*e.right, ctx)));
          }
          Value l = eval(*e.left, ctx);
          Value r = eval(*e.right, ctx);
          switch (e.op) {
            case BinaryOpKind::equal: return Value::boolean(values_equal(l, r));
            case BinaryOpKind::not_equal: return Value::boolean(!values_equal(l, r));
            case BinaryOpKind::greater: return Value::boolean(compare_values(l, r) > 0);
            case BinaryOpKind::greater_equal: return Value::boolean(compare_values(l, r) >= 0);
            case BinaryOpKind::less: return Value::boolean(compare_values(l, r) < 0);
            case BinaryOpKind::less_equal: return Value::boolean(compare_values(l, r) <= 0);
            default: break;
          }
          return Value::boolean(false);
        } else if constexpr (std::is_same_v<E, IfExpr>) {
          return coerce_bool(eval(*e.condition, ctx)) ? eval(*e.then_branch, ctx) : eval(*e.else_branch, ctx);
        } else {
          return eval_template(e.tmpl, ctx);
        }
      },
      expr.node);
}

}  // namespace srml
