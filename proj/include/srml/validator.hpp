#pragma once

// Two-phase pipeline: structural check against the schema, then rule
// application with expected-value semantics over a working copy of the
// document.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "srml/detail/io.hpp"
#include "srml/expr.hpp"
#include "srml/finding.hpp"
#include "srml/rules.hpp"
#include "srml/schema.hpp"
#include "srml/xml.hpp"

namespace srml {

struct ValidationOptions {
  // When false, correct-mode rules only report.
  bool apply_corrections = false;
  bool fail_fast = false;
  // Render integral expectations computed from decimal-point operands as "x.0".
  bool keep_decimal_point = false;
  // Restricts which matched rules-for roots are processed. Empty = all.
  std::function<bool(const XmlNode&)> scope;
  // Decides whether a target held by this element may be rewritten; a refusal
  // turns the correction into an error finding. Empty = all.
  std::function<bool(const XmlNode&)> may_correct;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool valid = true;
  std::size_t corrections_applied = 0;

  std::size_t count(Severity s) const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [&](const Finding& f) { return f.severity == s; }));
  }
};

struct ValidationResult {
  ValidationReport report;
  Document document;
};

namespace detail {

class RuleRunner {
 public:
  RuleRunner(Document& doc, const ValidationOptions& opts, ValidationReport& report)
      : doc_(doc), opts_(opts), report_(report) {}

  bool stopped() const noexcept { return stopped_; }

  void run(const RuleSet& rules) {
    for (const auto& group : rules.groups) {
      std::vector<XmlNode*> roots;
      collect(doc_.root(), group.root, roots);
      for (XmlNode* root : roots) {
        if (opts_.scope && !opts_.scope(*root)) continue;
        for (const auto& def : group.defs) {
          apply_def(*root, def);
          if (stopped_) return;
        }
      }
    }
  }

 private:
  struct Outcome {
    std::optional<Value> expected;
    std::string error;
  };

  static void collect(XmlNode& node, const std::string& name, std::vector<XmlNode*>& out) {
    if (node.name() == name) out.push_back(&node);
    for (XmlNode* c : node.child_elements()) collect(*c, name, out);
  }

  void add(Finding f) {
    if (f.severity == Severity::error) {
      report_.valid = false;
      if (opts_.fail_fast) stopped_ = true;
    }
    if (f.severity == Severity::corrected) ++report_.corrections_applied;
    report_.findings.push_back(std::move(f));
  }

  static Outcome evaluate_instance(const RuleInstance& instance, const EvalContext& ctx) {
    try {
      return {eval(*instance.expr, ctx), {}};
    } catch (const Error& e) {
      return {std::nullopt, e.what()};
    }
  }

  bool correction_allowed(const RuleDef& def, const XmlNode& holder) const {
    return def.mode == RuleMode::correct && opts_.apply_corrections &&
           (!opts_.may_correct || opts_.may_correct(holder));
  }

  void apply_def(XmlNode& root, const RuleDef& def) {
    if (def.target.is_attribute()) {
      if (!root.has_attribute(def.target.name)) return missing_target(root, def);
      apply_target(root, def.target.name, def);
      return;
    }
    auto targets = root.child_elements(def.target.name);
    if (targets.empty()) return missing_target(root, def);
    for (XmlNode* t : targets) {
      apply_target(*t, std::nullopt, def);
      if (stopped_) return;
    }
  }

  void apply_target(XmlNode& node, const std::optional<std::string>& attribute, const RuleDef& def) {
    std::string actual = attribute ? *node.attribute(*attribute) : string_value(node);
    EvalContext ctx{node, attribute, actual};
    Value actual_value = Value::str(actual);

    std::size_t failing = 0;
    Outcome outcome;
    if (def.match == RuleMatch::any) {
      for (std::size_t i = 0; i < def.instances.size(); ++i) {
        Outcome o = evaluate_instance(def.instances[i], ctx);
        if (o.expected && values_equal(*o.expected, actual_value)) return;
        if (i == 0) outcome = std::move(o);
      }
    } else {
      bool failed = false;
      for (std::size_t i = 0; i < def.instances.size() && !failed; ++i) {
        Outcome o = evaluate_instance(def.instances[i], ctx);
        if (!o.expected || !values_equal(*o.expected, actual_value)) {
          failing = i;
          outcome = std::move(o);
          failed = true;
        }
      }
      if (!failed) return;
    }

    Finding f;
    f.location = attribute ? attribute_location(node, *attribute) : node_location(node);
    f.found = actual;
    f.instance_index = static_cast<int>(failing) + 1;
    if (!outcome.expected) {
      f.severity = Severity::error;
      f.message = "evaluation error: " + outcome.error;
      return add(std::move(f));
    }
    f.message = def.instances[failing].message;
    f.expected = outcome.expected->to_string(opts_.keep_decimal_point);
    if (correction_allowed(def, node)) {
      if (attribute) {
        set_value(node, *attribute, f.expected);
      } else {
        set_value(node, f.expected);
      }
      f.severity = Severity::corrected;
    } else {
      f.severity = Severity::error;
    }
    add(std::move(f));
  }

  // The target is created empty so the first instance can be evaluated in its
  // own context; it is kept only when the rule corrects.
  void missing_target(XmlNode& root, const RuleDef& def) {
    const RuleInstance& first = def.instances.front();
    Finding f;
    f.instance_index = 1;
    Outcome outcome;
    XmlNode* created = nullptr;
    if (def.target.is_attribute()) {
      f.location = attribute_location(root, def.target.name);
      root.set_attribute(def.target.name, "");
      outcome = evaluate_instance(first, EvalContext{root, def.target.name, ""});
    } else {
      f.location = node_location(root) + "/" + def.target.name;
      created = &root.append_element(def.target.name);
      outcome = evaluate_instance(first, EvalContext{*created, std::nullopt, ""});
    }
    if (outcome.expected) f.expected = outcome.expected->to_string(opts_.keep_decimal_point);

    if (outcome.expected && correction_allowed(def, root)) {
      if (created != nullptr) {
        set_value(*created, f.expected);
        f.location = node_location(*created);
      } else {
        root.set_attribute(def.target.name, f.expected);
      }
      f.severity = Severity::corrected;
      f.message = first.message.empty() ? "target missing" : "target missing: " + first.message;
      return add(std::move(f));
    }
    if (created != nullptr) {
      root.remove_child(*created);
    } else {
      root.remove_attribute(def.target.name);
    }
    f.severity = Severity::error;
    if (!outcome.expected) {
      f.message = "evaluation error: target missing: " + outcome.error;
    } else {
      f.message = first.message.empty() ? "target missing" : "target missing: " + first.message;
    }
    add(std::move(f));
  }

  Document& doc_;
  const ValidationOptions& opts_;
  ValidationReport& report_;
  bool stopped_ = false;
};

}  // namespace detail

// The input document is never mutated; corrections land in the returned copy.
// An empty schema (no element declarations) skips the structural phase.
inline ValidationResult validate(const Document& doc, const Schema& schema, const RuleSet& rules,
                                 const ValidationOptions& opts = {}) {
  ValidationResult result{{}, doc};
  ValidationReport& report = result.report;
  if (!schema.empty()) {
    for (auto& f : validate_structure(result.document, schema)) {
      report.findings.push_back(std::move(f));
      report.valid = false;
      if (opts.fail_fast) return result;
    }
  }
  detail::RuleRunner(result.document, opts, report).run(rules);
  return result;
}

// Parses every srml-def payload carried by the schema and concatenates them.
inline RuleSet embedded_rules(const Schema& schema) {
  std::vector<RuleSet> sets;
  for (const auto& src : extract_srml(schema)) sets.push_back(parse_ruleset(src.root()));
  return merge_rulesets(sets);
}

inline ValidationResult validate_file(const std::filesystem::path& xml_path,
                                      const std::filesystem::path& xsd_path,
                                      const ValidationOptions& opts = {}) {
  Document doc = parse_document(detail::read_file(xml_path), xml_path.string());
  Schema schema = parse_schema(parse_document(detail::read_file(xsd_path), xsd_path.string()));
  return validate(doc, schema, embedded_rules(schema), opts);
}

enum class ReportFormat { text, json };

inline std::string render_report(const ValidationReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& f : report.findings) {
      nlohmann::ordered_json item;
      item["severity"] = to_string(f.severity);
      item["message"] = f.message;
      item["location"] = f.location;
      item["found"] = f.found;
      item["expected"] = f.expected;
      item["instanceIndex"] = f.instance_index;
      out.push_back(std::move(item));
    }
    return out.dump(2) + "\n";
  }
  if (report.findings.empty()) return "OK\n";
  std::string out;
  for (const auto& f : report.findings) {
    switch (f.severity) {
      case Severity::error: out += "Validation Error"; break;
      case Severity::corrected: out += "Corrected"; break;
      case Severity::structural: out += "Structural Error"; break;
    }
    out += ". Message=[" + f.message + "]. Found=[" + f.found + "]. Expecting=[" + f.expected + "].\n";
    out += "  at " + f.location + "\n";
  }
  return out;
}

}  // namespace srml
