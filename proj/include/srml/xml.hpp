#pragma once

// Mutable, ordered XML tree with parent links, plus a non-validating parser
// and serializer.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srml/detail/strings.hpp"
#include "srml/error.hpp"

namespace srml {

struct Attribute {
  std::string name;
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

class XmlNode {
 public:
  enum class Kind { element, text };

  using ChildList = std::vector<std::unique_ptr<XmlNode>>;

  static std::unique_ptr<XmlNode> make_element(std::string name) {
    return std::unique_ptr<XmlNode>(new XmlNode(Kind::element, std::move(name)));
  }
  static std::unique_ptr<XmlNode> make_text(std::string text) {
    return std::unique_ptr<XmlNode>(new XmlNode(Kind::text, std::move(text)));
  }

  XmlNode(const XmlNode&) = delete;
  XmlNode& operator=(const XmlNode&) = delete;

  Kind kind() const noexcept { return kind_; }
  bool is_element() const noexcept { return kind_ == Kind::element; }
  bool is_text() const noexcept { return kind_ == Kind::text; }

  // Element name; empty for text nodes.
  const std::string& name() const noexcept { return is_element() ? data_ : empty_; }
  // Character data; empty for elements.
  const std::string& text() const noexcept { return is_text() ? data_ : empty_; }
  void set_text(std::string text) {
    if (is_text()) data_ = std::move(text);
  }

  XmlNode* parent() noexcept { return parent_; }
  const XmlNode* parent() const noexcept { return parent_; }

  const std::vector<Attribute>& attributes() const noexcept { return attributes_; }

  const std::string* attribute(std::string_view name) const noexcept {
    auto it = find_attribute(name);
    return it == attributes_.end() ? nullptr : &it->value;
  }
  bool has_attribute(std::string_view name) const noexcept {
    return find_attribute(name) != attributes_.end();
  }
  // Overwrites in place, or appends when absent.
  void set_attribute(std::string name, std::string value) {
    auto it = std::find_if(attributes_.begin(), attributes_.end(),
                           [&](const Attribute& a) { return a.name == name; });
    if (it != attributes_.end()) {
      it->value = std::move(value);
    } else {
      attributes_.push_back({std::move(name), std::move(value)});
    }
  }
  bool remove_attribute(std::string_view name) {
    auto it = find_attribute(name);
    if (it == attributes_.end()) return false;
    attributes_.erase(it);
    return true;
  }

  const ChildList& children() const noexcept { return children_; }

  XmlNode& append_child(std::unique_ptr<XmlNode> child) {
    child->parent_ = this;
    children_.push_back(std::move(child));
    return *children_.back();
  }
  XmlNode& append_element(std::string name) { return append_child(make_element(std::move(name))); }
  XmlNode& append_text(std::string text) { return append_child(make_text(std::move(text))); }

  std::unique_ptr<XmlNode> remove_child(const XmlNode& child) {
    auto it = std::find_if(children_.begin(), children_.end(),
                           [&](const auto& c) { return c.get() == &child; });
    if (it == children_.end()) return nullptr;
    auto owned = std::move(*it);
    children_.erase(it);
    owned->parent_ = nullptr;
    return owned;
  }
  void clear_children() { children_.clear(); }

  // Direct element children, optionally filtered by name.
  std::vector<XmlNode*> child_elements(std::string_view name = {}) {
    std::vector<XmlNode*> out;
    for (auto& c : children_) {
      if (c->is_element() && (name.empty() || c->name() == name)) out.push_back(c.get());
    }
    return out;
  }
  std::vector<const XmlNode*> child_elements(std::string_view name = {}) const {
    std::vector<const XmlNode*> out;
    for (const auto& c : children_) {
      if (c->is_element() && (name.empty() || c->name() == name)) out.push_back(c.get());
    }
    return out;
  }

  // Deep copy, detached from any parent.
  std::unique_ptr<XmlNode> clone() const {
    auto copy = std::unique_ptr<XmlNode>(new XmlNode(kind_, data_));
    copy->attributes_ = attributes_;
    for (const auto& c : children_) copy->append_child(c->clone());
    return copy;
  }

 private:
  XmlNode(Kind kind, std::string data) : kind_(kind), data_(std::move(data)) {}

  std::vector<Attribute>::const_iterator find_attribute(std::string_view name) const noexcept {
    return std::find_if(attributes_.begin(), attributes_.end(),
                        [&](const Attribute& a) { return a.name == name; });
  }
  std::vector<Attribute>::iterator find_attribute(std::string_view name) noexcept {
    return std::find_if(attributes_.begin(), attributes_.end(),
                        [&](const Attribute& a) { return a.name == name; });
  }

  inline static const std::string empty_{};

  Kind kind_;
  std::string data_;
  XmlNode* parent_ = nullptr;
  std::vector<Attribute> attributes_;
  ChildList children_;
};

// Structural equality: names, ordered attributes, ordered children, text.
inline bool equal_trees(const XmlNode& a, const XmlNode& b) {
  if (a.kind() != b.kind()) return false;
  if (a.is_text()) return a.text() == b.text();
  if (a.name() != b.name() || a.attributes() != b.attributes()) return false;
  if (a.children().size() != b.children().size()) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!equal_trees(*a.children()[i], *b.children()[i])) return false;
  }
  return true;
}

// Concatenation of all descendant character data, untrimmed.
inline void append_text_content(const XmlNode& node, std::string& out) {
  if (node.is_text()) {
    out += node.text();
    return;
  }
  for (const auto& c : node.children()) append_text_content(*c, out);
}

inline std::string text_content(const XmlNode& node) {
  std::string out;
  append_text_content(node, out);
  return out;
}

class Document {
 public:
  explicit Document(std::unique_ptr<XmlNode> root, std::string source_name = {})
      : root_(std::move(root)), source_name_(std::move(source_name)) {}
  explicit Document(std::string root_name)
      : Document(XmlNode::make_element(std::move(root_name))) {}

  Document(const Document& other)
      : root_(other.root_->clone()), source_name_(other.source_name_) {}
  Document& operator=(const Document& other) {
    if (this != &other) {
      root_ = other.root_->clone();
      source_name_ = other.source_name_;
    }
    return *this;
  }
  Document(Document&&) noexcept = default;
  Document& operator=(Document&&) noexcept = default;

  XmlNode& root() noexcept { return *root_; }
  const XmlNode& root() const noexcept { return *root_; }

  const std::string& source_name() const noexcept { return source_name_; }
  void set_source_name(std::string name) { source_name_ = std::move(name); }

  friend bool operator==(const Document& a, const Document& b) {
    return equal_trees(*a.root_, *b.root_);
  }

 private:
  std::unique_ptr<XmlNode> root_;
  std::string source_name_;
};

namespace detail {

constexpr bool is_name_start(unsigned char c) noexcept {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}
constexpr bool is_name_char(unsigned char c) noexcept {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

inline bool is_xml_name(std::string_view s) noexcept {
  if (s.empty() || !is_name_start(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return is_name_char(static_cast<unsigned char>(c)); });
}

inline bool is_legal_codepoint(std::uint32_t cp) noexcept {
  return cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
         (cp >= 0xE000 && cp <= 0xFFFD) || (cp >= 0x10000 && cp <= 0x10FFFF);
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class XmlParser {
 public:
  explicit XmlParser(std::string_view input) : in_(input) {}

  Document parse() {
    check_encoding();
    if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skip_misc(true);
    if (eof() || peek() != '<') fail("document has no root element");
    auto root = parse_element_tree();
    skip_misc(false);
    if (!eof()) {
      if (peek() == '<') fail("multiple root elements");
      fail("content after the root element");
    }
    return Document(std::move(root));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }

  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < at && i < in_.size(); ++i) {
      if (in_[i] == '\n') {
        ++line;
        column = 1;
      } else if ((static_cast<unsigned char>(in_[i]) & 0xC0) != 0x80) {
        ++column;
      }
    }
    throw WellFormednessError(what, line, column);
  }

  bool eof() const noexcept { return pos_ >= in_.size(); }
  char peek() const noexcept { return in_[pos_]; }
  bool starts_with(std::string_view s) const noexcept { return in_.substr(pos_, s.size()) == s; }

  // Rejects malformed UTF-8 and characters outside the XML 1.0 Char production.
  void check_encoding() const {
    std::size_t i = 0;
    while (i < in_.size()) {
      auto c = static_cast<unsigned char>(in_[i]);
      std::uint32_t cp = 0;
      std::size_t len = 0;
      if (c < 0x80) {
        cp = c;
        len = 1;
      } else if ((c & 0xE0) == 0xC0) {
        cp = c & 0x1F;
        len = 2;
      } else if ((c & 0xF0) == 0xE0) {
        cp = c & 0x0F;
        len = 3;
      } else if ((c & 0xF8) == 0xF0) {
        cp = c & 0x07;
        len = 4;
      } else {
        fail_at("invalid UTF-8 sequence", i);
      }
      if (i + len > in_.size()) fail_at("truncated UTF-8 sequence", i);
      for (std::size_t k = 1; k < len; ++k) {
        auto cc = static_cast<unsigned char>(in_[i + k]);
        if ((cc & 0xC0) != 0x80) fail_at("invalid UTF-8 sequence", i);
        cp = (cp << 6) | (cc & 0x3F);
      }
      static constexpr std::uint32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
      if (cp < min_for_len[len]) fail_at("overlong UTF-8 sequence", i);
      if (!is_legal_codepoint(cp)) fail_at("illegal character", i);
      i += len;
    }
  }

  void skip_space() {
    while (!eof() && is_space(peek())) ++pos_;
  }

  void skip_until(std::string_view terminator, const char* what) {
    auto end = in_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  void skip_doctype() {
    std::size_t start = pos_;
    pos_ += 9;  // "<!DOCTYPE"
    int bracket_depth = 0;
    char quote = 0;
    while (!eof()) {
      char c = peek();
      ++pos_;
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '[') {
        ++bracket_depth;
      } else if (c == ']') {
        --bracket_depth;
      } else if (c == '>' && bracket_depth <= 0) {
        return;
      }
    }
    fail_at("unterminated DOCTYPE", start);
  }

  // Whitespace, comments, PIs and (in the prolog) a DOCTYPE.
  void skip_misc(bool prolog) {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (prolog && starts_with("<!DOCTYPE")) {
        skip_doctype();
      } else {
        return;
      }
    }
  }

  std::string parse_name() {
    std::size_t start = pos_;
    if (eof() || !is_name_start(static_cast<unsigned char>(peek()))) fail("expected a name");
    while (!eof() && is_name_char(static_cast<unsigned char>(peek()))) ++pos_;
    return std::string(in_.substr(start, pos_ - start));
  }

  // Decodes one reference starting at '&'.
  void parse_reference(std::string& out) {
    std::size_t start = pos_;
    auto end = in_.find(';', pos_);
    if (end == std::string_view::npos || end - pos_ > 12) fail("malformed entity reference");
    std::string_view ref = in_.substr(pos_ + 1, end - pos_ - 1);
    pos_ = end + 1;
    if (ref == "lt") {
      out.push_back('<');
    } else if (ref == "gt") {
      out.push_back('>');
    } else if (ref == "amp") {
      out.push_back('&');
    } else if (ref == "quot") {
      out.push_back('"');
    } else if (ref == "apos") {
      out.push_back('\'');
    } else if (ref.size() > 1 && ref[0] == '#') {
      bool hex = ref[1] == 'x';
      std::string_view digits = ref.substr(hex ? 2 : 1);
      std::uint32_t cp = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() ||
          !is_legal_codepoint(cp)) {
        fail_at("invalid character reference", start);
      }
      append_utf8(out, cp);
    } else {
      fail_at("unknown entity '&" + std::string(ref) + ";'", start);
    }
  }

  std::string parse_attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    char quote = peek();
    ++pos_;
    std::string value;
    for (;;) {
      if (eof()) fail("unterminated attribute value");
      char c = peek();
      if (c == quote) {
        ++pos_;
        return value;
      }
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        parse_reference(value);
        continue;
      }
      value.push_back(c == '\t' || c == '\n' || c == '\r' ? ' ' : c);
      ++pos_;
    }
  }

  // Parses `<name attrs...` up to and including `>` or `/>`.
  std::unique_ptr<XmlNode> parse_start_tag(bool& self_closing) {
    ++pos_;  // '<'
    auto node = XmlNode::make_element(parse_name());
    for (;;) {
      std::size_t before = pos_;
      skip_space();
      if (eof()) fail("unterminated start tag <" + node->name() + ">");
      if (starts_with("/>")) {
        pos_ += 2;
        self_closing = true;
        return node;
      }
      if (peek() == '>') {
        ++pos_;
        self_closing = false;
        return node;
      }
      if (before == pos_) fail("expected whitespace before attribute");
      std::size_t attr_pos = pos_;
      std::string name = parse_name();
      skip_space();
      if (eof() || peek() != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_space();
      std::string value = parse_attribute_value();
      if (node->has_attribute(name)) fail_at("duplicate attribute '" + name + "'", attr_pos);
      node->set_attribute(std::move(name), std::move(value));
    }
  }

  struct OpenElement {
    XmlNode* node;
    std::size_t start;
  };

  std::unique_ptr<XmlNode> parse_element_tree() {
    bool self_closing = false;
    auto root = parse_start_tag(self_closing);
    if (self_closing) return root;

    std::vector<OpenElement> open{{root.get(), 0}};
    std::string pending;
    bool significant = false;

    auto flush_text = [&] {
      if (significant) open.back().node->append_text(std::move(pending));
      pending.clear();
      significant = false;
    };

    while (!open.empty()) {
      if (eof()) {
        fail("unclosed element <" + open.back().node->name() + ">");
      }
      if (peek() != '<') {
        char c = peek();
        if (c == '&') {
          parse_reference(pending);
          significant = true;
        } else {
          if (!is_space(c)) significant = true;
          pending.push_back(c);
          ++pos_;
        }
        continue;
      }
      if (starts_with("</")) {
        flush_text();
        std::size_t tag_pos = pos_;
        pos_ += 2;
        std::string name = parse_name();
        skip_space();
        if (eof() || peek() != '>') fail("malformed end tag");
        ++pos_;
        if (name != open.back().node->name()) {
          fail_at("mismatched end tag </" + name + ">, expected </" + open.back().node->name() + ">",
                  tag_pos);
        }
        open.pop_back();
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        auto end = in_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        pending.append(in_.substr(pos_, end - pos_));
        significant = true;
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!")) {
        fail("unexpected markup declaration");
      } else {
        flush_text();
        std::size_t tag_pos = pos_;
        auto child = parse_start_tag(self_closing);
        XmlNode& attached = open.back().node->append_child(std::move(child));
        if (!self_closing) open.push_back({&attached, tag_pos});
      }
    }
    return root;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

inline void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\t': attribute ? out += "&#9;" : out += c; break;
      case '\n': attribute ? out += "&#10;" : out += c; break;
      case '\r': out += "&#13;"; break;
      default: out.push_back(c);
    }
  }
}

inline void serialize_node(const XmlNode& node, std::string& out, int depth) {
  if (node.is_text()) {
    if (is_blank(node.text())) {
      // Character references keep whitespace-only text alive across a reparse.
      for (char c : node.text()) out += "&#" + std::to_string(static_cast<int>(c)) + ";";
    } else {
      escape_into(out, node.text(), false);
    }
    return;
  }
  out += '<';
  out += node.name();
  for (const auto& a : node.attributes()) {
    out += ' ';
    out += a.name;
    out += "=\"";
    escape_into(out, a.value, true);
    out += '"';
  }
  if (node.children().empty()) {
    out += "/>";
    return;
  }
  out += '>';
  bool element_only = std::all_of(node.children().begin(), node.children().end(),
                                  [](const auto& c) { return c->is_element(); });
  for (const auto& c : node.children()) {
    if (element_only) {
      out += '\n';
      out.append(static_cast<std::size_t>(depth + 1) * 2, ' ');
    }
    serialize_node(*c, out, element_only ? depth + 1 : 0);
  }
  if (element_only) {
    out += '\n';
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
  }
  out += "</";
  out += node.name();
  out += '>';
}

}  // namespace detail

inline Document parse_document(std::string_view bytes, std::string source_name = {}) {
  Document doc = detail::XmlParser(bytes).parse();
  doc.set_source_name(std::move(source_name));
  return doc;
}

// Indents element-only content; mixed content is written inline so the
// text survives a reparse unchanged.
inline std::string serialize(const XmlNode& node) {
  std::string out;
  detail::serialize_node(node, out, 0);
  return out;
}

inline std::string serialize(const Document& doc) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  detail::serialize_node(doc.root(), out, 0);
  out += '\n';
  return out;
}

// Replaces all children of `element` with a single text node.
inline void set_value(XmlNode& element, std::string value) {
  element.clear_children();
  if (!value.empty()) element.append_text(std::move(value));
}

inline void set_value(XmlNode& element, std::string_view attribute, std::string value) {
  element.set_attribute(std::string(attribute), std::move(value));
}

// Canonical location such as `/cart/book[2]/tax`; the index is omitted when
// the element has no same-named siblings.
inline std::string node_location(const XmlNode& node) {
  if (node.is_text()) {
    return node.parent() ? node_location(*node.parent()) + "/text()" : "/text()";
  }
  std::vector<std::string> parts;
  for (const XmlNode* n = &node; n != nullptr; n = n->parent()) {
    std::string part = n->name();
    if (const XmlNode* p = n->parent()) {
      auto siblings = p->child_elements(n->name());
      if (siblings.size() > 1) {
        auto pos = std::find(siblings.begin(), siblings.end(), n) - siblings.begin();
        part += "[" + std::to_string(pos + 1) + "]";
      }
    }
    parts.push_back(std::move(part));
  }
  std::string out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += "/" + *it;
  return out;
}

inline std::string attribute_location(const XmlNode& owner, std::string_view attribute) {
  return node_location(owner) + "/@" + std::string(attribute);
}

}  // namespace srml
