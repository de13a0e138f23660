#pragma once

// Typed AST for srml-def rule documents and the parser that builds it.
// Elements are recognized by local name, so `srml:`-prefixed and unprefixed
// documents parse identically.

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "srml/arith.hpp"
#include "srml/detail/strings.hpp"
#include "srml/error.hpp"
#include "srml/path.hpp"
#include "srml/xml.hpp"

namespace srml {

enum class BinaryOpKind { equal, not_equal, greater, greater_equal, less, less_equal, logical_and, logical_or };

inline const char* to_string(BinaryOpKind op) noexcept {
  switch (op) {
    case BinaryOpKind::equal: return "equal";
    case BinaryOpKind::not_equal: return "not-equal";
    case BinaryOpKind::greater: return "greater";
    case BinaryOpKind::greater_equal: return "greater-equal";
    case BinaryOpKind::less: return "less";
    case BinaryOpKind::less_equal: return "less-equal";
    case BinaryOpKind::logical_and: return "and";
    case BinaryOpKind::logical_or: return "or";
  }
  return "equal";
}

inline std::optional<BinaryOpKind> binary_op_from_string(std::string_view s) noexcept {
  for (auto op : {BinaryOpKind::equal, BinaryOpKind::not_equal, BinaryOpKind::greater,
                  BinaryOpKind::greater_equal, BinaryOpKind::less, BinaryOpKind::less_equal,
                  BinaryOpKind::logical_and, BinaryOpKind::logical_or}) {
    if (s == to_string(op)) return op;
  }
  return std::nullopt;
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct DataExpr {
  std::string literal;
  friend bool operator==(const DataExpr&, const DataExpr&) = default;
};

struct ValueRefExpr {
  PathExpr path;
  friend bool operator==(const ValueRefExpr&, const ValueRefExpr&) = default;
};

struct InstanceValueExpr {
  friend bool operator==(const InstanceValueExpr&, const InstanceValueExpr&) = default;
};

struct CountChildrenExpr {
  std::string name;
  friend bool operator==(const CountChildrenExpr&, const CountChildrenExpr&) = default;
};

struct BinaryOpExpr {
  BinaryOpKind op = BinaryOpKind::equal;
  ExprPtr left;
  ExprPtr right;
  friend bool operator==(const BinaryOpExpr& a, const BinaryOpExpr& b);
};

struct IfExpr {
  ExprPtr condition;
  ExprPtr then_branch;
  ExprPtr else_branch;
  friend bool operator==(const IfExpr& a, const IfExpr& b);
};

struct RegEvalExpr {
  ArithTemplate tmpl;
  friend bool operator==(const RegEvalExpr&, const RegEvalExpr&) = default;
};

struct Expr {
  std::variant<DataExpr, ValueRefExpr, InstanceValueExpr, CountChildrenExpr, BinaryOpExpr, IfExpr,
               RegEvalExpr>
      node;

  friend bool operator==(const Expr&, const Expr&) = default;
};

inline bool operator==(const BinaryOpExpr& a, const BinaryOpExpr& b) {
  return a.op == b.op && *a.left == *b.left && *a.right == *b.right;
}

inline bool operator==(const IfExpr& a, const IfExpr& b) {
  return *a.condition == *b.condition && *a.then_branch == *b.then_branch &&
         *a.else_branch == *b.else_branch;
}

template <typename T>
ExprPtr make_expr(T node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}

struct RuleTarget {
  enum class Kind { element_child, attribute };
  Kind kind = Kind::element_child;
  std::string name;

  bool is_attribute() const noexcept { return kind == Kind::attribute; }
  std::string to_string() const { return is_attribute() ? "@" + name : name; }

  friend bool operator==(const RuleTarget&, const RuleTarget&) = default;
};

enum class RuleMode { validate, correct };
enum class RuleMatch { any, all };

struct RuleInstance {
  std::string message;
  ExprPtr expr;

  friend bool operator==(const RuleInstance& a, const RuleInstance& b) {
    return a.message == b.message && *a.expr == *b.expr;
  }
};

struct RuleDef {
  RuleTarget target;
  RuleMode mode = RuleMode::validate;
  RuleMatch match = RuleMatch::any;
  std::vector<RuleInstance> instances;

  friend bool operator==(const RuleDef&, const RuleDef&) = default;
};

struct RulesFor {
  std::string root;
  std::vector<RuleDef> defs;

  friend bool operator==(const RulesFor&, const RulesFor&) = default;
};

struct TableSpec {
  std::string name;
  std::string key;
  friend bool operator==(const TableSpec&, const TableSpec&) = default;
};

// Foreign key: child.child_key references root.root_key.
struct ReferenceSpec {
  std::string root;
  std::string root_key;
  std::string child;
  std::string child_key;
  friend bool operator==(const ReferenceSpec&, const ReferenceSpec&) = default;
};

struct DatabaseSpec {
  std::vector<TableSpec> tables;
  std::vector<ReferenceSpec> references;

  const TableSpec* table(std::string_view name) const noexcept {
    for (const auto& t : tables) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }

  friend bool operator==(const DatabaseSpec&, const DatabaseSpec&) = default;
};

struct RuleSet {
  std::vector<RulesFor> groups;
  std::optional<DatabaseSpec> database;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

namespace detail {

class RuleParser {
 public:
  RuleSet parse(const XmlNode& src) {
    expect(src, "srml-def");
    RuleSet rules;
    for (const XmlNode* child : src.child_elements()) {
      auto local = local_name(child->name());
      if (local == "rules-for") {
        rules.groups.push_back(parse_rules_for(*child));
      } else if (local == "database") {
        if (rules.database) fail(*child, "more than one database section");
        rules.database = parse_database(*child);
      } else {
        fail(*child, "unknown element <" + child->name() + "> in srml-def");
      }
    }
    if (rules.groups.empty() && !rules.database) fail(src, "srml-def has no rules-for groups and no database section");
    return rules;
  }

 private:
  [[noreturn]] static void fail(const XmlNode& at, const std::string& what) {
    throw RuleSyntaxError(what + " at " + node_location(at));
  }

  static void expect(const XmlNode& node, std::string_view local) {
    if (local_name(node.name()) != local) {
      fail(node, "expected <" + std::string(local) + ">, found <" + node.name() + ">");
    }
  }

  static const std::string& required_attr(const XmlNode& node, const char* name) {
    const std::string* v = node.attribute(name);
    if (v == nullptr || v->empty()) fail(node, std::string("<") + node.name() + "> requires attribute '" + name + "'");
    return *v;
  }

  static void no_text(const XmlNode& node) {
    for (const auto& c : node.children()) {
      if (c->is_text() && !is_blank(c->text())) fail(node, "unexpected text '" + trim(c->text()) + "'");
    }
  }

  RulesFor parse_rules_for(const XmlNode& node) {
    RulesFor group;
    group.root = required_attr(node, "root");
    no_text(node);
    for (const XmlNode* child : node.child_elements()) {
      expect(*child, "rule-def");
      group.defs.push_back(parse_rule_def(*child));
    }
    if (group.defs.empty()) fail(node, "rules-for '" + group.root + "' has no rule-def");
    return group;
  }

  RuleDef parse_rule_def(const XmlNode& node) {
    RuleDef def;
    std::string name = required_attr(node, "name");
    if (name.front() == '@') {
      def.target.kind = RuleTarget::Kind::attribute;
      name.erase(0, 1);
    }
    if (!is_xml_name(name)) fail(node, "rule-def name '" + required_attr(node, "name") + "' is not a child or attribute name");
    def.target.name = std::move(name);
    if (const std::string* mode = node.attribute("mode")) {
      if (*mode == "correct") {
        def.mode = RuleMode::correct;
      } else if (*mode != "validate") {
        fail(node, "unknown mode '" + *mode + "'");
      }
    }
    if (const std::string* match = node.attribute("match")) {
      if (*match == "all") {
        def.match = RuleMatch::all;
      } else if (*match != "any") {
        fail(node, "unknown match '" + *match + "'");
      }
    }
    no_text(node);
    for (const XmlNode* child : node.child_elements()) {
      expect(*child, "rule-instance");
      def.instances.push_back(parse_instance(*child));
    }
    if (def.instances.empty()) fail(node, "rule-def '" + def.target.to_string() + "' has no rule-instance");
    return def;
  }

  RuleInstance parse_instance(const XmlNode& node) {
    RuleInstance instance;
    bool have_message = false;
    no_text(node);
    for (const XmlNode* child : node.child_elements()) {
      if (local_name(child->name()) == "validation-error") {
        if (have_message) fail(*child, "more than one validation-error");
        have_message = true;
        instance.message = collapse_whitespace(text_content(*child));
      } else {
        if (instance.expr) fail(*child, "rule-instance has more than one expression");
        instance.expr = parse_slot(*child);
      }
    }
    if (!instance.expr) fail(node, "rule-instance has no expr");
    return instance;
  }

  // An `expr` wrapper around one atom, or the atom itself.
  ExprPtr parse_slot(const XmlNode& node) {
    if (local_name(node.name()) != "expr") return parse_atom(node);
    no_text(node);
    auto kids = node.child_elements();
    if (kids.size() != 1) fail(node, "<expr> must contain exactly one expression");
    return parse_atom(*kids.front());
  }

  std::vector<ExprPtr> parse_operands(const XmlNode& node, std::size_t count) {
    no_text(node);
    auto kids = node.child_elements();
    if (kids.size() != count) {
      fail(node, "<" + node.name() + "> needs " + std::to_string(count) + " operands, found " +
                     std::to_string(kids.size()));
    }
    std::vector<ExprPtr> out;
    for (const XmlNode* k : kids) out.push_back(parse_slot(*k));
    return out;
  }

  ExprPtr parse_atom(const XmlNode& node) {
    auto local = local_name(node.name());
    if (local == "data") {
      if (!node.child_elements().empty()) fail(node, "<data> must contain only text");
      return make_expr(DataExpr{trim(text_content(node))});
    }
    if (local == "value-ref") {
      const std::string& src = required_attr(node, "path");
      try {
        return make_expr(ValueRefExpr{parse_path(src)});
      } catch (const PathSyntaxError& e) {
        fail(node, "invalid path '" + src + "': " + e.what());
      }
    }
    if (local == "instance-value") return make_expr(InstanceValueExpr{});
    if (local == "count-children") return make_expr(CountChildrenExpr{required_attr(node, "name")});
    if (local == "binary-op") {
      const std::string& op_name = required_attr(node, "op");
      auto op = binary_op_from_string(op_name);
      if (!op) fail(node, "unknown binary-op '" + op_name + "'");
      auto operands = parse_operands(node, 2);
      return make_expr(BinaryOpExpr{*op, operands[0], operands[1]});
    }
    if (local == "if-expr") {
      auto operands = parse_operands(node, 3);
      return make_expr(IfExpr{operands[0], operands[1], operands[2]});
    }
    if (local == "reg-eval") {
      if (!node.child_elements().empty()) fail(node, "<reg-eval> must contain only text");
      try {
        return make_expr(RegEvalExpr{parse_template(text_content(node))});
      } catch (const TemplateSyntaxError& e) {
        fail(node, std::string("invalid reg-eval template: ") + e.what());
      }
    }
    fail(node, "unknown expression element <" + node.name() + ">");
  }

  DatabaseSpec parse_database(const XmlNode& node) {
    DatabaseSpec db;
    no_text(node);
    for (const XmlNode* section : node.child_elements()) {
      auto local = local_name(section->name());
      if (local == "tables") {
        for (const XmlNode* t : section->child_elements()) {
          expect(*t, "table");
          TableSpec table{required_attr(*t, "name"), required_attr(*t, "key")};
          if (db.table(table.name)) fail(*t, "duplicate table '" + table.name + "'");
          db.tables.push_back(std::move(table));
        }
      } else if (local == "references") {
        for (const XmlNode* r : section->child_elements()) {
          expect(*r, "reference");
          db.references.push_back({required_attr(*r, "root"), required_attr(*r, "root_key"),
                                   required_attr(*r, "child"), required_attr(*r, "child_key")});
        }
      } else {
        fail(*section, "unknown element <" + section->name() + "> in database");
      }
    }
    for (const auto& ref : db.references) {
      for (const std::string* t : {&ref.root, &ref.child}) {
        if (!db.table(*t)) fail(node, "reference names undeclared table '" + *t + "'");
      }
    }
    return db;
  }
};

inline void print_expr(const Expr& expr, XmlNode& parent) {
  XmlNode& wrapper = parent.append_element("expr");
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, DataExpr>) {
          XmlNode& data = wrapper.append_element("data");
          if (!e.literal.empty()) data.append_text(e.literal);
        } else if constexpr (std::is_same_v<E, ValueRefExpr>) {
          wrapper.append_element("value-ref").set_attribute("path", to_string(e.path));
        } else if constexpr (std::is_same_v<E, InstanceValueExpr>) {
          wrapper.append_element("instance-value");
        } else if constexpr (std::is_same_v<E, CountChildrenExpr>) {
          wrapper.append_element("count-children").set_attribute("name", e.name);
        } else if constexpr (std::is_same_v<E, BinaryOpExpr>) {
          XmlNode& op = wrapper.append_element("binary-op");
          op.set_attribute("op", to_string(e.op));
          print_expr(*e.left, op);
          print_expr(*e.right, op);
        } else if constexpr (std::is_same_v<E, IfExpr>) {
          XmlNode& node = wrapper.append_element("if-expr");
          print_expr(*e.condition, node);
          print_expr(*e.then_branch, node);
          print_expr(*e.else_branch, node);
        } else {
          wrapper.append_element("reg-eval").append_text(e.tmpl.source);
        }
      },
      expr.node);
}

}  // namespace detail

// `src` must be an srml-def element (any prefix).
inline RuleSet parse_ruleset(const XmlNode& src) { return detail::RuleParser().parse(src); }

inline RuleSet parse_standalone(const Document& doc) { return parse_ruleset(doc.root()); }

// Concatenates groups in order; database sections merge table and reference lists.
inline RuleSet merge_rulesets(std::span<const RuleSet> sets) {
  RuleSet out;
  for (const auto& s : sets) {
    out.groups.insert(out.groups.end(), s.groups.begin(), s.groups.end());
    if (s.database) {
      if (!out.database) out.database.emplace();
      for (const auto& t : s.database->tables) {
        if (out.database->table(t.name)) throw RuleSyntaxError("table '" + t.name + "' declared twice");
        out.database->tables.push_back(t);
      }
      out.database->references.insert(out.database->references.end(), s.database->references.begin(),
                                      s.database->references.end());
    }
  }
  return out;
}

// Canonical, unprefixed rendering; parse_standalone of the result yields an
// equal RuleSet.
inline Document print_ruleset(const RuleSet& rules) {
  Document doc("srml-def");
  XmlNode& root = doc.root();
  for (const auto& group : rules.groups) {
    XmlNode& g = root.append_element("rules-for");
    g.set_attribute("root", group.root);
    for (const auto& def : group.defs) {
      XmlNode& d = g.append_element("rule-def");
      d.set_attribute("name", def.target.to_string());
      d.set_attribute("mode", def.mode == RuleMode::correct ? "correct" : "validate");
      d.set_attribute("match", def.match == RuleMatch::all ? "all" : "any");
      for (const auto& instance : def.instances) {
        XmlNode& i = d.append_element("rule-instance");
        XmlNode& msg = i.append_element("validation-error");
        if (!instance.message.empty()) msg.append_text(instance.message);
        detail::print_expr(*instance.expr, i);
      }
    }
  }
  if (rules.database) {
    XmlNode& db = root.append_element("database");
    XmlNode& tables = db.append_element("tables");
    for (const auto& t : rules.database->tables) {
      XmlNode& n = tables.append_element("table");
      n.set_attribute("name", t.name);
      n.set_attribute("key", t.key);
    }
    XmlNode& refs = db.append_element("references");
    for (const auto& r : rules.database->references) {
      XmlNode& n = refs.append_element("reference");
      n.set_attribute("root", r.root);
      n.set_attribute("root_key", r.root_key);
      n.set_attribute("child", r.child);
      n.set_attribute("child_key", r.child_key);
    }
  }
  return doc;
}

// Rows are flat, so relational rules may only target attributes (columns).
inline void require_attribute_targets(const RuleSet& rules) {
  for (const auto& group : rules.groups) {
    for (const auto& def : group.defs) {
      if (!def.target.is_attribute()) {
        throw RuleSyntaxError("relational-restriction: rule-def '" + def.target.name + "' under rules-for '" +
                              group.root + "' must target a column as '@" + def.target.name + "'");
      }
    }
  }
}

}  // namespace srml
