// srml: validate, correct and extract rules from XML/XSD files, and apply
// row operations to a CSV-backed table store.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srml/srml.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_findings = 1;
constexpr int exit_failure = 2;
constexpr int exit_no_rules = 3;
constexpr int exit_usage = 64;

srml::ReportFormat parse_format(const std::string& s) {
  return s == "json" ? srml::ReportFormat::json : srml::ReportFormat::text;
}

struct FileArgs {
  std::string xml;
  std::string schema;
  std::string format = "text";
  bool fail_fast = false;
};

int cmd_validate(const FileArgs& args) {
  srml::ValidationOptions opts;
  opts.fail_fast = args.fail_fast;
  auto result = srml::validate_file(args.xml, args.schema, opts);
  std::cout << srml::render_report(result.report, parse_format(args.format));
  return result.report.valid ? exit_ok : exit_findings;
}

int cmd_correct(const FileArgs& args, const std::string& out) {
  srml::ValidationOptions opts;
  opts.fail_fast = args.fail_fast;
  opts.apply_corrections = true;
  auto result = srml::validate_file(args.xml, args.schema, opts);
  std::string xml = srml::serialize(result.document);
  if (out.empty()) {
    std::cout << xml;
  } else {
    srml::detail::write_file_atomic(out, xml);
  }
  std::cerr << srml::render_report(result.report, parse_format(args.format));
  return result.report.valid ? exit_ok : exit_findings;
}

int cmd_extract_rules(const std::string& xsd) {
  auto schema = srml::parse_schema(srml::parse_document(srml::detail::read_file(xsd), xsd));
  const auto& sources = srml::extract_srml(schema);
  if (sources.empty()) {
    std::cerr << "no srml-def found in " << xsd << "\n";
    return exit_no_rules;
  }
  const std::string& first = sources.front().root().name();
  auto root = srml::XmlNode::make_element(first);
  for (const auto& src : sources) {
    for (const auto& a : src.root().attributes()) {
      if (a.name == "xmlns" || a.name.rfind("xmlns:", 0) == 0) {
        if (!root->has_attribute(a.name)) root->set_attribute(a.name, a.value);
      }
    }
    for (const auto& child : src.root().children()) root->append_child(child->clone());
  }
  auto colon = first.find(':');
  std::string decl = colon == std::string::npos ? "xmlns" : "xmlns:" + first.substr(0, colon);
  if (!root->has_attribute(decl)) root->set_attribute(decl, std::string(srml::srml_namespace_uri));
  std::cout << srml::serialize(srml::Document(std::move(root)));
  return exit_ok;
}

// Splits "k=v,k2=v2" with "\," and "\\" escapes.
srml::Row parse_row_arg(const std::string& text) {
  std::vector<std::string> parts(1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\\' && i + 1 < text.size() && (text[i + 1] == ',' || text[i + 1] == '\\')) {
      parts.back().push_back(text[++i]);
    } else if (c == ',') {
      parts.emplace_back();
    } else {
      parts.back().push_back(c);
    }
  }
  srml::Row row;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--row", "expected column=value, got '" + p + "'");
    std::string column = p.substr(0, eq);
    if (row.get(column)) throw CLI::ValidationError("--row", "column '" + column + "' given twice");
    row.set(std::move(column), p.substr(eq + 1));
  }
  return row;
}

struct DbArgs {
  std::string data;
  std::string rules;
  std::string op;
  std::string table;
  std::string row;
  std::string format = "text";
  bool correct = false;
};

int cmd_db_apply(const DbArgs& args) {
  srml::Row given = parse_row_arg(args.row);
  auto rules = srml::parse_standalone(srml::parse_document(srml::detail::read_file(args.rules), args.rules));
  if (!rules.database) throw srml::ContextError("rules file has no database section");
  const srml::DatabaseSpec& spec = *rules.database;
  srml::require_attribute_targets(rules);
  auto store = srml::load_csv(args.data, spec);
  const srml::Table& table = store.table(args.table);

  const std::string* key = given.get(table.key);
  auto stored = [&]() -> const srml::Row& {
    if (key == nullptr) throw srml::ContextError("--row lacks key column '" + table.key + "'");
    const srml::Row* r = table.find(*key);
    if (r == nullptr) {
      throw srml::ContextError("no row with " + table.key + "=" + *key + " in table '" + table.name + "'");
    }
    return *r;
  };

  srml::RowOp op;
  if (args.op == "insert") {
    op = srml::RowOp::insert(args.table, given);
  } else if (args.op == "update") {
    srml::Row merged = stored();
    for (const auto& c : given.cells()) {
      if (!merged.get(c.column)) throw srml::ContextError("table '" + table.name + "' has no column '" + c.column + "'");
      merged.set(c.column, c.value);
    }
    op = srml::RowOp::update(args.table, stored(), merged);
  } else {
    if (given.cells().size() != 1) throw srml::ContextError("delete takes the key column only");
    op = srml::RowOp::remove(args.table, stored());
  }

  srml::ValidationOptions opts;
  opts.apply_corrections = args.correct;
  auto result = srml::apply_op(store, spec, rules, op, opts);
  std::cout << srml::render_report(result.report, parse_format(args.format));
  if (!result.committed) return exit_findings;
  srml::save_csv(args.data, result.store.table(args.table));
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SRML validation and correction"};
  app.require_subcommand(1);

  FileArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Validate an XML document against a schema and its rules");
  validate->add_option("xml", validate_args.xml, "XML document")->required();
  validate->add_option("--schema", validate_args.schema, "XSD with embedded rules")->required();
  validate->add_option("--format", validate_args.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  validate->add_flag("--fail-fast", validate_args.fail_fast, "Stop at the first error");

  FileArgs correct_args;
  std::string out;
  auto* correct = app.add_subcommand("correct", "Validate and apply correct-mode rules");
  correct->add_option("xml", correct_args.xml, "XML document")->required();
  correct->add_option("--schema", correct_args.schema, "XSD with embedded rules")->required();
  correct->add_option("--out", out, "Output file (stdout when omitted)");
  correct->add_option("--format", correct_args.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  correct->add_flag("--fail-fast", correct_args.fail_fast, "Stop at the first error");

  std::string xsd;
  auto* extract = app.add_subcommand("extract-rules", "Print the rules embedded in a schema");
  extract->add_option("xsd", xsd, "Schema file")->required();

  DbArgs db_args;
  auto* db = app.add_subcommand("db-apply", "Apply a row operation through the rule trigger");
  db->add_option("--data", db_args.data, "Directory of <table>.csv files")->required();
  db->add_option("--rules", db_args.rules, "Standalone rules file with a database section")->required();
  db->add_option("--op", db_args.op, "Operation")->required()->check(CLI::IsMember({"insert", "update", "delete"}));
  db->add_option("--table", db_args.table, "Table name")->required();
  db->add_option("--row", db_args.row, "column=value,... (escape commas as \\,)")->required();
  db->add_option("--format", db_args.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  db->add_flag("--correct", db_args.correct, "Apply correct-mode rules to the written row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*validate) return cmd_validate(validate_args);
    if (*correct) return cmd_correct(correct_args, out);
    if (*extract) return cmd_extract_rules(xsd);
    return cmd_db_apply(db_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const srml::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}
