#pragma once

// The XSD subset: element declarations with sequence/choice content models,
// occurrence bounds, attribute declarations, simple-type restrictions
// (pattern, enumeration), and appinfo payloads carrying srml-def rules.

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "srml/detail/strings.hpp"
#include "srml/error.hpp"
#include "srml/finding.hpp"
#include "srml/path.hpp"
#include "srml/xml.hpp"

namespace srml {

inline constexpr std::string_view srml_namespace_uri = "http://www.sed.inf.u-szeged.hu/SRMLSchema";

enum class BuiltinType { string, integer, float_, boolean, any };

inline const char* to_string(BuiltinType t) noexcept {
  switch (t) {
    case BuiltinType::string: return "xsd:string";
    case BuiltinType::integer: return "xsd:integer";
    case BuiltinType::float_: return "xsd:float";
    case BuiltinType::boolean: return "xsd:boolean";
    case BuiltinType::any: return "xsd:anySimpleType";
  }
  return "xsd:string";
}

struct SimpleTypeDef {
  std::string name;  // empty for anonymous and built-in types
  BuiltinType base = BuiltinType::string;
  std::vector<std::string> patterns;
  std::vector<std::regex> compiled_patterns;
  std::vector<std::string> enumeration;
};

using SimpleTypeRef = std::shared_ptr<const SimpleTypeDef>;

struct AttributeDecl {
  std::string name;
  SimpleTypeRef type;
  bool required = false;
};

struct ElementDecl;

struct Particle {
  std::string name;
  std::size_t min_occurs = 1;
  std::optional<std::size_t> max_occurs = 1;  // nullopt = unbounded
  // Inline declaration; null means "use the top-level declaration of that name".
  std::shared_ptr<const ElementDecl> decl;
};

struct ComplexContent {
  enum class Model { empty, sequence, choice };
  Model model = Model::empty;
  std::size_t min_occurs = 1;
  std::optional<std::size_t> max_occurs = 1;
  std::vector<Particle> particles;
};

struct AnyContent {};

struct ElementDecl {
  std::string name;
  std::variant<AnyContent, SimpleTypeRef, ComplexContent> content;
  std::vector<AttributeDecl> attributes;
};

struct Schema {
  std::map<std::string, std::shared_ptr<const ElementDecl>> element_decls;
  std::map<std::string, SimpleTypeRef> simple_types;
  std::vector<Document> srml_sources;

  bool empty() const noexcept { return element_decls.empty(); }
};

namespace detail {

inline std::optional<BuiltinType> builtin_type(std::string_view local) {
  static const std::unordered_map<std::string_view, BuiltinType> table = {
      {"string", BuiltinType::string},           {"normalizedString", BuiltinType::string},
      {"token", BuiltinType::string},            {"anyURI", BuiltinType::string},
      {"NCName", BuiltinType::string},           {"Name", BuiltinType::string},
      {"ID", BuiltinType::string},               {"IDREF", BuiltinType::string},
      {"language", BuiltinType::string},         {"NMTOKEN", BuiltinType::string},
      {"date", BuiltinType::string},             {"dateTime", BuiltinType::string},
      {"integer", BuiltinType::integer},         {"int", BuiltinType::integer},
      {"long", BuiltinType::integer},            {"short", BuiltinType::integer},
      {"byte", BuiltinType::integer},            {"nonNegativeInteger", BuiltinType::integer},
      {"positiveInteger", BuiltinType::integer}, {"negativeInteger", BuiltinType::integer},
      {"nonPositiveInteger", BuiltinType::integer}, {"unsignedLong", BuiltinType::integer},
      {"unsignedInt", BuiltinType::integer},     {"unsignedShort", BuiltinType::integer},
      {"unsignedByte", BuiltinType::integer},    {"float", BuiltinType::float_},
      {"double", BuiltinType::float_},           {"decimal", BuiltinType::float_},
      {"boolean", BuiltinType::boolean},         {"anySimpleType", BuiltinType::any},
      {"anyType", BuiltinType::any},
  };
  auto it = table.find(local);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

inline SimpleTypeRef builtin_ref(BuiltinType t) {
  auto def = std::make_shared<SimpleTypeDef>();
  def->base = t;
  return def;
}

// Only `\d`, escaped metacharacters, literals, `{n}`/`{n,m}` and `|`.
inline void check_pattern_dialect(const std::string& pattern) {
  static constexpr std::string_view meta = "\\.^$|?*+()[]{}";
  bool have_atom = false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char c = pattern[i];
    if (c == '\\') {
      if (i + 1 >= pattern.size()) throw SchemaError("pattern ends with a lone backslash: " + pattern);
      char e = pattern[++i];
      if (e != 'd' && e != '-' && meta.find(e) == std::string_view::npos) {
        throw SchemaError("unsupported pattern escape '\\" + std::string(1, e) + "' in: " + pattern);
      }
      have_atom = true;
    } else if (c == '{') {
      auto close = pattern.find('}', i);
      if (!have_atom || close == std::string::npos) {
        throw SchemaError("malformed quantifier in pattern: " + pattern);
      }
      std::string_view body(pattern.data() + i + 1, close - i - 1);
      static const std::regex quantifier(R"(\d+(,\d*)?)");
      if (!std::regex_match(body.begin(), body.end(), quantifier)) {
        throw SchemaError("malformed quantifier in pattern: " + pattern);
      }
      i = close;
      have_atom = false;
    } else if (c == '|') {
      have_atom = false;
    } else if (meta.find(c) != std::string_view::npos) {
      throw SchemaError("unsupported pattern construct '" + std::string(1, c) + "' in: " + pattern);
    } else {
      have_atom = true;
    }
  }
}

inline bool is_xsd_integer(std::string_view v) {
  if (!v.empty() && (v.front() == '+' || v.front() == '-')) v.remove_prefix(1);
  return !v.empty() && std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline bool is_xsd_float(std::string_view v) {
  if (v == "INF" || v == "-INF" || v == "+INF" || v == "NaN") return true;
  auto e = v.find_first_of("eE");
  if (e == std::string_view::npos) return is_decimal_literal(v) && trim_view(v) == v;
  return is_decimal_literal(v.substr(0, e)) && is_xsd_integer(v.substr(e + 1)) &&
         trim_view(v) == v;
}

inline bool is_xsd_boolean(std::string_view v) {
  return v == "true" || v == "false" || v == "1" || v == "0";
}

inline std::optional<std::size_t> parse_occurs(const XmlNode& node, const char* attr,
                                               std::size_t fallback, bool allow_unbounded) {
  const std::string* v = node.attribute(attr);
  if (v == nullptr) return fallback;
  if (allow_unbounded && *v == "unbounded") return std::nullopt;
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), n);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw SchemaError(std::string("invalid ") + attr + " value '" + *v + "' at " + node_location(node));
  }
  return n;
}

class SchemaParser {
 public:
  explicit SchemaParser(const Document& doc) : doc_(doc) {}

  Schema parse() {
    const XmlNode& root = doc_.root();
    if (local_name(root.name()) != "schema") {
      throw SchemaError("root element is <" + root.name() + ">, expected xsd:schema");
    }
    for (const XmlNode* child : root.child_elements()) {
      auto local = local_name(child->name());
      if (local == "simpleType" || local == "complexType") {
        const std::string* name = child->attribute("name");
        if (name == nullptr) throw SchemaError("top-level " + std::string(local) + " without a name");
        named_types_[*name] = child;
      }
    }
    for (const XmlNode* child : root.child_elements()) {
      auto local = local_name(child->name());
      if (local == "element") {
        auto decl = parse_element(*child);
        if (schema_.element_decls.count(decl->name) != 0) {
          throw SchemaError("duplicate element declaration '" + decl->name + "'");
        }
        schema_.element_decls[decl->name] = decl;
      } else if (local == "simpleType") {
        resolve_simple(*child->attribute("name"));
      } else if (local == "complexType" || local == "annotation") {
        // complex types are resolved on use; annotations are scanned below
      } else {
        throw SchemaError("unsupported schema construct <" + child->name() + ">");
      }
    }
    collect_srml(root);
    return std::move(schema_);
  }

 private:
  void collect_srml(const XmlNode& node) {
    for (const XmlNode* child : node.child_elements()) {
      if (local_name(child->name()) == "appinfo" && node.parent() != nullptr &&
          local_name(node.name()) == "annotation") {
        for (const XmlNode* payload : child->child_elements()) {
          if (local_name(payload->name()) == "srml-def") {
            schema_.srml_sources.emplace_back(payload->clone(), doc_.source_name());
          }
        }
      } else {
        collect_srml(*child);
      }
    }
  }

  SimpleTypeRef resolve_simple(const std::string& name) {
    if (auto it = schema_.simple_types.find(name); it != schema_.simple_types.end()) return it->second;
    auto node = named_types_.find(name);
    if (node == named_types_.end() || local_name(node->second->name()) != "simpleType") {
      return nullptr;
    }
    if (!resolving_.insert(name).second) throw SchemaError("circular simple type '" + name + "'");
    auto def = parse_simple_type(*node->second, name);
    resolving_.erase(name);
    schema_.simple_types[name] = def;
    return def;
  }

  // Resolves a `type` attribute to a simple type; nullptr for named complex types.
  SimpleTypeRef resolve_type_name(const std::string& qname, const XmlNode& where) {
    if (auto t = resolve_simple(qname)) return t;
    std::string local(local_name(qname));
    if (local != qname) {
      if (auto t = resolve_simple(local)) return t;
    }
    if (named_types_.count(qname) || named_types_.count(local)) return nullptr;
    if (auto b = builtin_type(local)) return builtin_ref(*b);
    throw SchemaError("unknown type '" + qname + "' at " + node_location(where));
  }

  const XmlNode* named_complex(const std::string& qname) const {
    for (const std::string& key : {qname, std::string(local_name(qname))}) {
      auto it = named_types_.find(key);
      if (it != named_types_.end() && local_name(it->second->name()) == "complexType") return it->second;
    }
    return nullptr;
  }

  std::shared_ptr<SimpleTypeDef> parse_simple_type(const XmlNode& node, std::string name) {
    auto def = std::make_shared<SimpleTypeDef>();
    def->name = std::move(name);
    const XmlNode* restriction = nullptr;
    for (const XmlNode* child : node.child_elements()) {
      auto local = local_name(child->name());
      if (local == "restriction") {
        restriction = child;
      } else if (local != "annotation") {
        throw SchemaError("unsupported simple type construct <" + child->name() + ">");
      }
    }
    if (restriction == nullptr) throw SchemaError("simple type without restriction at " + node_location(node));
    const std::string* base = restriction->attribute("base");
    if (base == nullptr) throw SchemaError("restriction without base at " + node_location(*restriction));
    SimpleTypeRef base_type = resolve_type_name(*base, *restriction);
    if (!base_type) throw SchemaError("simple type restricts complex type '" + *base + "'");
    def->base = base_type->base;
    def->patterns = base_type->patterns;
    def->compiled_patterns = base_type->compiled_patterns;
    def->enumeration = base_type->enumeration;
    std::vector<std::string> own_enumeration;
    for (const XmlNode* facet : restriction->child_elements()) {
      auto local = local_name(facet->name());
      const std::string* value = facet->attribute("value");
      if (local == "annotation") continue;
      if (value == nullptr) throw SchemaError("facet without value at " + node_location(*facet));
      if (local == "pattern") {
        check_pattern_dialect(*value);
        def->patterns.push_back(*value);
        def->compiled_patterns.emplace_back("(?:" + *value + ")", std::regex::ECMAScript);
      } else if (local == "enumeration") {
        own_enumeration.push_back(*value);
      } else {
        throw SchemaError("unsupported facet <" + facet->name() + ">");
      }
    }
    if (!own_enumeration.empty()) def->enumeration = std::move(own_enumeration);
    return def;
  }

  AttributeDecl parse_attribute(const XmlNode& node) {
    AttributeDecl decl;
    const std::string* name = node.attribute("name");
    if (name == nullptr) throw SchemaError("attribute declaration without name at " + node_location(node));
    decl.name = *name;
    if (const std::string* use = node.attribute("use")) {
      if (*use == "required") {
        decl.required = true;
      } else if (*use != "optional" && *use != "prohibited") {
        throw SchemaError("invalid attribute use '" + *use + "'");
      }
    }
    if (const std::string* type = node.attribute("type")) {
      decl.type = resolve_type_name(*type, node);
      if (!decl.type) throw SchemaError("attribute '" + decl.name + "' has a complex type");
    }
    for (const XmlNode* child : node.child_elements()) {
      auto local = local_name(child->name());
      if (local == "simpleType") {
        decl.type = parse_simple_type(*child, {});
      } else if (local != "annotation") {
        throw SchemaError("unsupported attribute construct <" + child->name() + ">");
      }
    }
    if (!decl.type) decl.type = builtin_ref(BuiltinType::any);
    return decl;
  }

  Particle parse_particle(const XmlNode& node) {
    Particle p;
    p.min_occurs = *parse_occurs(node, "minOccurs", 1, false);
    p.max_occurs = parse_occurs(node, "maxOccurs", 1, true);
    if (p.max_occurs && p.min_occurs > *p.max_occurs) {
      throw SchemaError("minOccurs exceeds maxOccurs at " + node_location(node));
    }
    if (const std::string* ref = node.attribute("ref")) {
      p.name = std::string(local_name(*ref));
      return p;
    }
    const std::string* name = node.attribute("name");
    if (name == nullptr) throw SchemaError("element particle without name or ref at " + node_location(node));
    p.name = *name;
    if (node.has_attribute("type") || !node.child_elements().empty()) p.decl = parse_element(node);
    return p;
  }

  ComplexContent parse_model(const XmlNode& node, ComplexContent::Model model) {
    ComplexContent content;
    content.model = model;
    content.min_occurs = *parse_occurs(node, "minOccurs", 1, false);
    content.max_occurs = parse_occurs(node, "maxOccurs", 1, true);
    if (model == ComplexContent::Model::sequence && content.max_occurs != std::optional<std::size_t>(1)) {
      throw SchemaError("repeated sequence groups are not supported");
    }
    std::set<std::string> names;
    for (const XmlNode* child : node.child_elements()) {
      auto local = local_name(child->name());
      if (local == "element") {
        content.particles.push_back(parse_particle(*child));
        if (!names.insert(content.particles.back().name).second) {
          throw SchemaError("element '" + content.particles.back().name +
                            "' appears twice in one content model");
        }
      } else if (local != "annotation") {
        throw SchemaError("unsupported content model construct <" + child->name() + ">");
      }
    }
    return content;
  }

  void parse_complex(const XmlNode& node, ElementDecl& decl) {
    ComplexContent content;
    bool have_model = false;
    for (const XmlNode* child : node.child_elements()) {
      auto local = local_name(child->name());
      if (local == "sequence" || local == "choice") {
        if (have_model) throw SchemaError("complex type with more than one model group");
        have_model = true;
        content = parse_model(*child, local == "sequence" ? ComplexContent::Model::sequence
                                                          : ComplexContent::Model::choice);
      } else if (local == "attribute") {
        decl.attributes.push_back(parse_attribute(*child));
      } else if (local == "complexContent" || local == "simpleContent") {
        throw SchemaError("complex type derivation (<" + child->name() + ">) is not supported");
      } else if (local != "annotation") {
        throw SchemaError("unsupported complex type construct <" + child->name() + ">");
      }
    }
    decl.content = std::move(content);
  }

  std::shared_ptr<const ElementDecl> parse_element(const XmlNode& node) {
    auto decl = std::make_shared<ElementDecl>();
    const std::string* name = node.attribute("name");
    if (name == nullptr) throw SchemaError("element declaration without name at " + node_location(node));
    decl->name = *name;
    if (const std::string* type = node.attribute("type")) {
      if (const XmlNode* complex = named_complex(*type)) {
        parse_complex(*complex, *decl);
      } else {
        decl->content = resolve_type_name(*type, node);
      }
    }
    for (const XmlNode* child : node.child_elements()) {
      auto local = local_name(child->name());
      if (local == "complexType") {
        parse_complex(*child, *decl);
      } else if (local == "simpleType") {
        decl->content = SimpleTypeRef(parse_simple_type(*child, {}));
      } else if (local == "key" || local == "keyref" || local == "unique") {
        throw SchemaError("identity constraints (<" + child->name() + ">) are not supported");
      } else if (local != "annotation") {
        throw SchemaError("unsupported element construct <" + child->name() + ">");
      }
    }
    return decl;
  }

  const Document& doc_;
  Schema schema_;
  std::map<std::string, const XmlNode*> named_types_;
  std::set<std::string> resolving_;
};

struct PendingFinding {
  std::size_t rank;
  Finding finding;
};

class StructureValidator {
 public:
  StructureValidator(const Document& doc, const Schema& schema) : doc_(doc), schema_(schema) {
    rank_elements(doc.root(), rank_);
  }

  std::vector<Finding> run() {
    const XmlNode& root = doc_.root();
    auto it = schema_.element_decls.find(root.name());
    if (it == schema_.element_decls.end()) {
      add(root, "no declaration for root element <" + root.name() + ">", root.name(),
          "a declared element");
    } else {
      check_element(root, *it->second);
    }
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const PendingFinding& a, const PendingFinding& b) { return a.rank < b.rank; });
    std::vector<Finding> out;
    out.reserve(pending_.size());
    for (auto& p : pending_) out.push_back(std::move(p.finding));
    return out;
  }

 private:
  void add(const XmlNode& at, std::string message, std::string found, std::string expected,
           std::string location = {}) {
    Finding f;
    f.severity = Severity::structural;
    f.message = std::move(message);
    f.location = location.empty() ? node_location(at) : std::move(location);
    f.found = std::move(found);
    f.expected = std::move(expected);
    pending_.push_back({rank_.at(&at), std::move(f)});
  }

  void check_value(const XmlNode& at, const std::string& location, std::string_view raw,
                   const SimpleTypeDef& type) {
    std::string value = type.base == BuiltinType::string ? std::string(raw) : trim(raw);
    auto fail = [&](std::string message, std::string expected) {
      add(at, std::move(message), value, std::move(expected), location);
    };
    switch (type.base) {
      case BuiltinType::integer:
        if (!is_xsd_integer(value)) return fail("value is not a valid xsd:integer", "xsd:integer");
        break;
      case BuiltinType::float_:
        if (!is_xsd_float(value)) return fail("value is not a valid xsd:float", "xsd:float");
        break;
      case BuiltinType::boolean:
        if (!is_xsd_boolean(value)) return fail("value is not a valid xsd:boolean", "xsd:boolean");
        break;
      case BuiltinType::string:
      case BuiltinType::any:
        break;
    }
    if (!type.compiled_patterns.empty()) {
      bool matched = std::any_of(type.compiled_patterns.begin(), type.compiled_patterns.end(),
                                 [&](const std::regex& re) { return std::regex_match(value, re); });
      if (!matched) {
        std::string expected;
        for (const auto& p : type.patterns) expected += (expected.empty() ? "" : " | ") + p;
        return fail("pattern mismatch", expected);
      }
    }
    if (!type.enumeration.empty() &&
        std::find(type.enumeration.begin(), type.enumeration.end(), value) == type.enumeration.end()) {
      std::string expected;
      for (const auto& e : type.enumeration) expected += (expected.empty() ? "" : "|") + e;
      fail("value is not in the enumeration", expected);
    }
  }

  static bool ignored_attribute(std::string_view name) {
    return name == "xmlns" || name.starts_with("xmlns:") || name.starts_with("xsi:");
  }

  void check_attributes(const XmlNode& node, const ElementDecl& decl) {
    for (const auto& attr : node.attributes()) {
      if (ignored_attribute(attr.name)) continue;
      auto it = std::find_if(decl.attributes.begin(), decl.attributes.end(),
                             [&](const AttributeDecl& d) { return d.name == attr.name; });
      std::string location = attribute_location(node, attr.name);
      if (it == decl.attributes.end()) {
        add(node, "undeclared attribute '" + attr.name + "'", attr.value, "no attribute", location);
      } else {
        check_value(node, location, attr.value, *it->type);
      }
    }
    for (const auto& d : decl.attributes) {
      if (d.required && !node.has_attribute(d.name)) {
        add(node, "required attribute '" + d.name + "' is missing", "", d.name,
            attribute_location(node, d.name));
      }
    }
  }

  const ElementDecl* decl_for(const Particle& p) const {
    if (p.decl) return p.decl.get();
    auto it = schema_.element_decls.find(p.name);
    return it == schema_.element_decls.end() ? nullptr : it->second.get();
  }

  void descend(const XmlNode& child, const Particle& p) {
    if (const ElementDecl* d = decl_for(p)) check_element(child, *d);
  }

  static std::string occurs_text(const Particle& p) {
    return "minOccurs=" + std::to_string(p.min_occurs) +
           " maxOccurs=" + (p.max_occurs ? std::to_string(*p.max_occurs) : "unbounded");
  }

  static std::string allowed_names(const ComplexContent& c) {
    std::string out;
    for (const auto& p : c.particles) out += (out.empty() ? "" : ", ") + p.name;
    return out.empty() ? "no child elements" : out;
  }

  void check_sequence(const XmlNode& node, const ComplexContent& c,
                      const std::vector<const XmlNode*>& kids) {
    if (kids.empty() && c.min_occurs == 0) return;
    const auto& ps = c.particles;
    std::size_t pi = 0;
    std::size_t count = 0;
    auto close = [&](std::size_t index, std::size_t seen) {
      const Particle& p = ps[index];
      if (seen < p.min_occurs) {
        add(node, "missing required element <" + p.name + ">", std::to_string(seen), occurs_text(p));
      }
    };
    for (const XmlNode* kid : kids) {
      for (;;) {
        if (pi < ps.size() && kid->name() == ps[pi].name &&
            (!ps[pi].max_occurs || count < *ps[pi].max_occurs)) {
          ++count;
          descend(*kid, ps[pi]);
          break;
        }
        std::size_t q = pi + 1;
        while (q < ps.size() && ps[q].name != kid->name()) ++q;
        if (q < ps.size()) {
          close(pi, count);
          for (std::size_t skipped = pi + 1; skipped < q; ++skipped) close(skipped, 0);
          pi = q;
          count = 0;
          continue;
        }
        auto earlier = std::find_if(ps.begin(), ps.end(), [&](const Particle& p) { return p.name == kid->name(); });
        if (earlier == ps.end()) {
          add(*kid, "unexpected element <" + kid->name() + ">", kid->name(), allowed_names(c));
        } else if (static_cast<std::size_t>(earlier - ps.begin()) == pi) {
          add(*kid, "too many occurrences of <" + kid->name() + ">", std::to_string(count + 1),
              occurs_text(*earlier));
          descend(*kid, *earlier);
        } else {
          add(*kid, "element <" + kid->name() + "> is out of sequence order", kid->name(),
              allowed_names(c));
          descend(*kid, *earlier);
        }
        break;
      }
    }
    if (pi < ps.size()) close(pi, count);
    for (std::size_t rest = pi + 1; rest < ps.size(); ++rest) close(rest, 0);
  }

  void check_choice(const XmlNode& node, const ComplexContent& c,
                    const std::vector<const XmlNode*>& kids) {
    std::size_t iterations = 0;
    std::size_t i = 0;
    while (i < kids.size()) {
      const XmlNode* kid = kids[i];
      auto p = std::find_if(c.particles.begin(), c.particles.end(),
                            [&](const Particle& x) { return x.name == kid->name(); });
      if (p == c.particles.end()) {
        add(*kid, "unexpected element <" + kid->name() + ">", kid->name(), allowed_names(c));
        ++i;
        continue;
      }
      if (c.max_occurs && iterations >= *c.max_occurs) {
        add(*kid, "choice group repeated too often at <" + kid->name() + ">", std::to_string(iterations + 1),
            "maxOccurs=" + std::to_string(*c.max_occurs));
        descend(*kid, *p);
        ++i;
        continue;
      }
      std::size_t run = 0;
      while (i < kids.size() && kids[i]->name() == p->name && (!p->max_occurs || run < *p->max_occurs)) {
        descend(*kids[i], *p);
        ++run;
        ++i;
      }
      if (run < p->min_occurs) {
        add(node, "too few occurrences of <" + p->name + ">", std::to_string(run), occurs_text(*p));
      }
      ++iterations;
    }
    bool empty_ok = std::any_of(c.particles.begin(), c.particles.end(),
                                [](const Particle& x) { return x.min_occurs == 0; });
    if (iterations < c.min_occurs && !empty_ok) {
      add(node, "missing element from choice", std::to_string(iterations), "one of: " + allowed_names(c));
    }
  }

  void check_element(const XmlNode& node, const ElementDecl& decl) {
    check_attributes(node, decl);
    auto kids = node.child_elements();
    if (std::holds_alternative<AnyContent>(decl.content)) return;
    if (const auto* simple = std::get_if<SimpleTypeRef>(&decl.content)) {
      if (!kids.empty()) {
        add(*kids.front(), "element content in simple-typed element <" + node.name() + ">",
            kids.front()->name(), "text only");
        return;
      }
      check_value(node, node_location(node), text_content(node), **simple);
      return;
    }
    const auto& complex = std::get<ComplexContent>(decl.content);
    for (const auto& c : node.children()) {
      if (c->is_text() && !is_blank(c->text())) {
        add(node, "text content in element-only element <" + node.name() + ">", trim(c->text()),
            "element content");
        break;
      }
    }
    switch (complex.model) {
      case ComplexContent::Model::empty:
        for (const XmlNode* kid : kids) {
          add(*kid, "unexpected element <" + kid->name() + ">", kid->name(), "no child elements");
        }
        break;
      case ComplexContent::Model::sequence: check_sequence(node, complex, kids); break;
      case ComplexContent::Model::choice: check_choice(node, complex, kids); break;
    }
  }

  const Document& doc_;
  const Schema& schema_;
  std::unordered_map<const XmlNode*, std::size_t> rank_;
  std::vector<PendingFinding> pending_;
};

}  // namespace detail

inline Schema parse_schema(const Document& doc) { return detail::SchemaParser(doc).parse(); }

// Findings in document order of the offending node; empty means valid.
inline std::vector<Finding> validate_structure(const Document& doc, const Schema& schema) {
  return detail::StructureValidator(doc, schema).run();
}

inline const std::vector<Document>& extract_srml(const Schema& schema) noexcept {
  return schema.srml_sources;
}

}  // namespace srml
