#pragma once

// Location-path subset used by rules: `//name`, `/name`, relative steps,
// `../` parent prefixes, `[n]`, `[@a]`, `[@a="v"]`, and the `/@attr` and
// `/text()` terminals.

#include <algorithm>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "srml/detail/strings.hpp"
#include "srml/error.hpp"
#include "srml/xml.hpp"

namespace srml {

struct PositionalPredicate {
  std::size_t index = 1;  // 1-based
  friend bool operator==(const PositionalPredicate&, const PositionalPredicate&) = default;
};

struct AttrExistsPredicate {
  std::string name;
  friend bool operator==(const AttrExistsPredicate&, const AttrExistsPredicate&) = default;
};

struct AttrEqualsPredicate {
  std::string name;
  std::string literal;
  friend bool operator==(const AttrEqualsPredicate&, const AttrEqualsPredicate&) = default;
};

using Predicate = std::variant<PositionalPredicate, AttrExistsPredicate, AttrEqualsPredicate>;

enum class Axis { child, parent, descendant_root };

struct Step {
  Axis axis = Axis::child;
  std::string name_test;  // element name or "*"; empty for parent steps
  std::vector<Predicate> predicates;

  friend bool operator==(const Step&, const Step&) = default;
};

enum class Terminal { none, attribute, text };

struct PathExpr {
  bool absolute = false;  // leading `/name`
  std::vector<Step> steps;
  Terminal terminal = Terminal::none;
  std::string terminal_name;  // attribute name for Terminal::attribute

  bool is_relative() const noexcept {
    return !absolute && (steps.empty() || steps.front().axis != Axis::descendant_root);
  }

  friend bool operator==(const PathExpr&, const PathExpr&) = default;
};

namespace detail {

class PathParser {
 public:
  explicit PathParser(std::string_view src) : src_(src) {}

  PathExpr parse() {
    if (src_.empty()) fail("empty path");
    PathExpr path;
    if (starts_with("//")) {
      pos_ += 2;
      Step step = parse_named_step();
      step.axis = Axis::descendant_root;
      path.steps.push_back(std::move(step));
      if (!at_end()) expect_slash();
    } else if (starts_with("/")) {
      ++pos_;
      path.absolute = true;
      path.steps.push_back(parse_named_step());
      if (!at_end()) expect_slash();
    } else {
      while (starts_with("..")) {
        pos_ += 2;
        path.steps.push_back(Step{Axis::parent, {}, {}});
        if (at_end()) return path;
        if (starts_with("//")) fail("descendant search is not allowed after a parent step");
        expect_slash();
      }
    }
    while (!at_end()) {
      if (peek() == '@') {
        ++pos_;
        path.terminal = Terminal::attribute;
        path.terminal_name = parse_name();
        if (!at_end()) fail("attribute reference must be the last component");
        return path;
      }
      if (starts_with("text()")) {
        pos_ += 6;
        path.terminal = Terminal::text;
        if (!at_end()) fail("text() must be the last component");
        return path;
      }
      if (starts_with("..")) fail("parent steps are only allowed as a prefix");
      if (starts_with("/")) fail("descendant search is only allowed at the start");
      path.steps.push_back(parse_named_step());
      if (!at_end()) expect_slash();
    }
    if (at_end() && !src_.empty() && src_.back() == '/') fail("trailing '/'");
    return path;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw PathSyntaxError(what, pos_); }

  bool at_end() const noexcept { return pos_ >= src_.size(); }
  char peek() const noexcept { return src_[pos_]; }
  bool starts_with(std::string_view s) const noexcept { return src_.substr(pos_, s.size()) == s; }

  void expect_slash() {
    if (at_end() || peek() != '/') fail("expected '/'");
    ++pos_;
    if (at_end()) fail("trailing '/'");
  }

  std::string parse_name() {
    std::size_t start = pos_;
    if (at_end() || !is_name_start(static_cast<unsigned char>(peek()))) fail("expected a name");
    while (!at_end() && is_name_char(static_cast<unsigned char>(peek()))) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  Step parse_named_step() {
    Step step;
    if (!at_end() && peek() == '*') {
      ++pos_;
      step.name_test = "*";
    } else {
      step.name_test = parse_name();
    }
    if (!at_end() && peek() == '(') fail("functions are not supported");
    if (starts_with("::")) fail("axis specifiers are not supported");
    while (!at_end() && peek() == '[') {
      ++pos_;
      step.predicates.push_back(parse_predicate());
    }
    return step;
  }

  Predicate parse_predicate() {
    if (at_end()) fail("unterminated predicate");
    if (peek() >= '0' && peek() <= '9') {
      std::size_t start = pos_;
      while (!at_end() && peek() >= '0' && peek() <= '9') ++pos_;
      std::size_t index = 0;
      std::string_view digits = src_.substr(start, pos_ - start);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (ec != std::errc() || index == 0) {
        pos_ = start;
        fail("positional predicate must be a positive integer");
      }
      close_predicate();
      return PositionalPredicate{index};
    }
    if (peek() != '@') fail("unsupported predicate");
    ++pos_;
    std::string name = parse_name();
    if (!at_end() && peek() == ']') {
      ++pos_;
      return AttrExistsPredicate{std::move(name)};
    }
    if (at_end() || peek() != '=') fail("expected '=' or ']' in predicate");
    ++pos_;
    if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted literal");
    char quote = peek();
    std::size_t start = ++pos_;
    auto end = src_.find(quote, pos_);
    if (end == std::string_view::npos) fail("unterminated literal");
    std::string literal(src_.substr(start, end - start));
    pos_ = end + 1;
    close_predicate();
    return AttrEqualsPredicate{std::move(name), std::move(literal)};
  }

  void close_predicate() {
    if (at_end() || peek() != ']') fail("expected ']'");
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline PathExpr parse_path(std::string_view src) { return detail::PathParser(src).parse(); }

inline std::string to_string(const PathExpr& path) {
  std::string out;
  bool first = true;
  for (const auto& step : path.steps) {
    switch (step.axis) {
      case Axis::descendant_root: out += "//"; break;
      case Axis::parent: out += first ? "" : "/"; out += ".."; break;
      case Axis::child: out += first ? (path.absolute ? "/" : "") : "/"; break;
    }
    first = false;
    if (step.axis == Axis::parent) continue;
    out += step.name_test;
    for (const auto& pred : step.predicates) {
      std::visit(
          [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PositionalPredicate>) {
              out += "[" + std::to_string(p.index) + "]";
            } else if constexpr (std::is_same_v<P, AttrExistsPredicate>) {
              out += "[@" + p.name + "]";
            } else {
              char quote = p.literal.find('"') == std::string::npos ? '"' : '\'';
              out += "[@" + p.name + "=" + quote + p.literal + quote + "]";
            }
          },
          pred);
    }
  }
  if (path.terminal != Terminal::none) {
    if (!first) out += "/";
    out += path.terminal == Terminal::attribute ? "@" + path.terminal_name : "text()";
  }
  return out;
}

// Element: trimmed concatenation of descendant text.
inline std::string string_value(const XmlNode& node) { return detail::trim(text_content(node)); }

// Matched elements in document order. For attribute terminals `nodes` holds the
// owning elements that carry the attribute; for text() the elements whose text
// was taken.
struct PathResult {
  Terminal terminal = Terminal::none;
  std::string attribute;
  std::vector<const XmlNode*> nodes;

  bool empty() const noexcept { return nodes.empty(); }
  std::size_t size() const noexcept { return nodes.size(); }

  std::string value(std::size_t i) const {
    if (terminal == Terminal::attribute) return *nodes[i]->attribute(attribute);
    return string_value(*nodes[i]);
  }
  std::vector<std::string> values() const {
    std::vector<std::string> out;
    out.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) out.push_back(value(i));
    return out;
  }
};

namespace detail {

inline const XmlNode& document_root(const XmlNode& node) {
  const XmlNode* n = &node;
  while (n->parent() != nullptr) n = n->parent();
  return *n;
}

inline void rank_elements(const XmlNode& node, std::unordered_map<const XmlNode*, std::size_t>& rank) {
  rank.emplace(&node, rank.size());
  for (const auto& c : node.children()) {
    if (c->is_element()) rank_elements(*c, rank);
  }
}

inline bool passes(const Predicate& pred, const XmlNode& node, std::size_t position) {
  return std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, PositionalPredicate>) {
          return position == p.index;
        } else if constexpr (std::is_same_v<P, AttrExistsPredicate>) {
          return node.has_attribute(p.name);
        } else {
          const std::string* v = node.attribute(p.name);
          return v != nullptr && *v == p.literal;
        }
      },
      pred);
}

// Children of `parent` selected by a named step, predicates applied in order
// with positions counted within the running selection.
inline std::vector<const XmlNode*> select_children(const XmlNode& parent, const Step& step) {
  std::vector<const XmlNode*> selected;
  for (const auto& c : parent.children()) {
    if (c->is_element() && (step.name_test == "*" || c->name() == step.name_test)) {
      selected.push_back(c.get());
    }
  }
  for (const auto& pred : step.predicates) {
    std::vector<const XmlNode*> kept;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      if (passes(pred, *selected[i], i + 1)) kept.push_back(selected[i]);
    }
    selected = std::move(kept);
  }
  return selected;
}

inline void collect_descendants(const XmlNode& node, const Step& step, std::vector<const XmlNode*>& out) {
  auto here = select_children(node, step);
  out.insert(out.end(), here.begin(), here.end());
  for (const auto& c : node.children()) {
    if (c->is_element()) collect_descendants(*c, step, out);
  }
}

inline bool root_matches(const XmlNode& root, const Step& step) {
  if (step.name_test != "*" && root.name() != step.name_test) return false;
  for (const auto& pred : step.predicates) {
    if (!passes(pred, root, 1)) return false;
  }
  return true;
}

}  // namespace detail

// Evaluates `path` against `context`. When `from_attribute` is set the context
// is an attribute of `context`; a leading parent step then lands on `context`
// itself, the attribute's owner.
inline PathResult evaluate(const PathExpr& path, const XmlNode& context, bool from_attribute = false) {
  const XmlNode& root = detail::document_root(context);
  std::vector<const XmlNode*> current;
  std::size_t first = 0;

  if (path.absolute) {
    if (detail::root_matches(root, path.steps.front())) current.push_back(&root);
    first = 1;
  } else if (!path.steps.empty() && path.steps.front().axis == Axis::descendant_root) {
    const Step& step = path.steps.front();
    if (detail::root_matches(root, step)) current.push_back(&root);
    detail::collect_descendants(root, step, current);
    first = 1;
  } else {
    current.push_back(&context);
    if (from_attribute && !path.steps.empty() && path.steps.front().axis == Axis::parent) first = 1;
  }

  for (std::size_t i = first; i < path.steps.size() && !current.empty(); ++i) {
    const Step& step = path.steps[i];
    std::vector<const XmlNode*> next;
    for (const XmlNode* node : current) {
      if (step.axis == Axis::parent) {
        if (node->parent() == nullptr) {
          throw NavigationError("parent step '..' applied at the document root in '" +
                                to_string(path) + "'");
        }
        next.push_back(node->parent());
      } else {
        auto selected = detail::select_children(*node, step);
        next.insert(next.end(), selected.begin(), selected.end());
      }
    }
    current = std::move(next);
  }

  std::unordered_map<const XmlNode*, std::size_t> rank;
  detail::rank_elements(root, rank);
  std::sort(current.begin(), current.end(),
            [&](const XmlNode* a, const XmlNode* b) { return rank.at(a) < rank.at(b); });
  current.erase(std::unique(current.begin(), current.end()), current.end());

  PathResult result;
  result.terminal = path.terminal;
  if (path.terminal == Terminal::attribute) {
    result.attribute = path.terminal_name;
    std::erase_if(current, [&](const XmlNode* n) { return !n->has_attribute(path.terminal_name); });
  }
  result.nodes = std::move(current);
  return result;
}

inline PathResult evaluate(std::string_view path, const XmlNode& context) {
  return evaluate(parse_path(path), context);
}

}  // namespace srml
