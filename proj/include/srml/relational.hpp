#pragma once

// In-process stand-in for trigger-based row validation. Tables hold untyped
// string rows; a row under insert/update/delete is validated by assembling the
// rows it is connected to through declared references into a small context
// tree and running the rule set over it.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srml/csv.hpp"
#include "srml/detail/io.hpp"
#include "srml/error.hpp"
#include "srml/rules.hpp"
#include "srml/schema.hpp"
#include "srml/validator.hpp"
#include "srml/xml.hpp"

namespace srml {

struct Cell {
  std::string column;
  std::string value;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Ordered column -> value map.
class Row {
 public:
  Row() = default;
  Row(std::initializer_list<Cell> cells) : cells_(cells) {}

  const std::vector<Cell>& cells() const noexcept { return cells_; }

  const std::string* get(std::string_view column) const noexcept {
    for (const auto& c : cells_) {
      if (c.column == column) return &c.value;
    }
    return nullptr;
  }

  void set(std::string column, std::string value) {
    for (auto& c : cells_) {
      if (c.column == column) {
        c.value = std::move(value);
        return;
      }
    }
    cells_.push_back({std::move(column), std::move(value)});
  }

  friend bool operator==(const Row&, const Row&) = default;

 private:
  std::vector<Cell> cells_;
};

struct Table {
  std::string name;
  std::string key;
  std::vector<std::string> columns;
  std::vector<Row> rows;

  const std::string& key_of(const Row& row) const {
    const std::string* v = row.get(key);
    if (v == nullptr) throw ContextError("row of table '" + name + "' has no key column '" + key + "'");
    return *v;
  }

  const Row* find(std::string_view key_value) const {
    for (const auto& r : rows) {
      if (*r.get(key) == key_value) return &r;
    }
    return nullptr;
  }

  // Reorders `row` to the table's column order; the column sets must agree.
  Row conform(const Row& row) const {
    if (row.cells().size() != columns.size()) {
      throw ContextError("row for table '" + name + "' has " + std::to_string(row.cells().size()) +
                         " columns, table has " + std::to_string(columns.size()));
    }
    Row out;
    for (const auto& col : columns) {
      const std::string* v = row.get(col);
      if (v == nullptr) throw ContextError("row for table '" + name + "' lacks column '" + col + "'");
      out.set(col, *v);
    }
    return out;
  }
};

class TableStore {
 public:
  void add_table(Table table) {
    std::string name = table.name;
    tables_.insert_or_assign(std::move(name), std::move(table));
  }

  const Table* find(std::string_view name) const {
    auto it = tables_.find(std::string(name));
    return it == tables_.end() ? nullptr : &it->second;
  }
  Table* find(std::string_view name) {
    auto it = tables_.find(std::string(name));
    return it == tables_.end() ? nullptr : &it->second;
  }

  const Table& table(std::string_view name) const {
    if (const Table* t = find(name)) return *t;
    throw ContextError("unknown table '" + std::string(name) + "'");
  }
  Table& table(std::string_view name) {
    if (Table* t = find(name)) return *t;
    throw ContextError("unknown table '" + std::string(name) + "'");
  }

  const std::map<std::string, Table>& tables() const noexcept { return tables_; }

  friend bool operator==(const TableStore& a, const TableStore& b) {
    if (a.tables_.size() != b.tables_.size()) return false;
    for (const auto& [name, t] : a.tables_) {
      const Table* o = b.find(name);
      if (o == nullptr || o->key != t.key || o->columns != t.columns || o->rows != t.rows) return false;
    }
    return true;
  }

 private:
  std::map<std::string, Table> tables_;
};

struct RowOp {
  enum class Kind { insert, update, remove };

  Kind kind = Kind::insert;
  std::string table;
  std::optional<Row> old_row;
  std::optional<Row> new_row;

  static RowOp insert(std::string table, Row row) { return {Kind::insert, std::move(table), std::nullopt, std::move(row)}; }
  static RowOp update(std::string table, Row old_row, Row new_row) {
    return {Kind::update, std::move(table), std::move(old_row), std::move(new_row)};
  }
  static RowOp remove(std::string table, Row old_row) {
    return {Kind::remove, std::move(table), std::move(old_row), std::nullopt};
  }
};

// Context tree with a handle on the element built from the subject row.
struct ContextTree {
  Document document;
  std::vector<std::size_t> subject_path;  // child indices from the root

  const XmlNode& subject() const {
    const XmlNode* n = &document.root();
    for (std::size_t i : subject_path) n = n->children()[i].get();
    return *n;
  }
};

inline TableStore load_csv(const std::filesystem::path& dir, const DatabaseSpec& spec) {
  TableStore store;
  for (const auto& ts : spec.tables) {
    std::filesystem::path file = dir / (ts.name + ".csv");
    std::string text;
    try {
      text = detail::read_file(file);
    } catch (const IoError&) {
      throw IngestError("missing table file '" + file.string() + "'");
    }
    auto records = csv::parse(text);
    if (records.empty()) throw IngestError("'" + file.string() + "' has no header row");
    Table table{ts.name, ts.key, records.front(), {}};
    std::set<std::string> seen_columns;
    for (const auto& c : table.columns) {
      if (!seen_columns.insert(c).second) throw IngestError("duplicate column '" + c + "' in " + file.string());
    }
    if (!seen_columns.count(ts.key)) {
      throw IngestError("'" + file.string() + "' lacks key column '" + ts.key + "'");
    }
    std::set<std::string> keys;
    for (std::size_t r = 1; r < records.size(); ++r) {
      if (records[r].size() != table.columns.size()) {
        throw IngestError("record " + std::to_string(r + 1) + " of '" + file.string() + "' has " +
                          std::to_string(records[r].size()) + " fields, expected " +
                          std::to_string(table.columns.size()));
      }
      Row row;
      for (std::size_t c = 0; c < table.columns.size(); ++c) row.set(table.columns[c], records[r][c]);
      if (!keys.insert(*row.get(ts.key)).second) {
        throw IngestError("duplicate key " + ts.key + "=" + *row.get(ts.key) + " in '" + file.string() + "'");
      }
      table.rows.push_back(std::move(row));
    }
    store.add_table(std::move(table));
  }
  return store;
}

inline void save_csv(const std::filesystem::path& dir, const Table& table) {
  std::vector<csv::Record> records{table.columns};
  for (const auto& row : table.rows) {
    csv::Record r;
    for (const auto& col : table.columns) r.push_back(*row.get(col));
    records.push_back(std::move(r));
  }
  detail::write_file_atomic(dir / (table.name + ".csv"), csv::format(records));
}

namespace detail {

inline const ReferenceSpec* parent_reference(const DatabaseSpec& spec, std::string_view table) {
  const ReferenceSpec* found = nullptr;
  for (const auto& r : spec.references) {
    if (r.child != table) continue;
    if (found != nullptr) throw ContextError("table '" + std::string(table) + "' has more than one parent reference");
    found = &r;
  }
  return found;
}

inline void check_forest(const DatabaseSpec& spec) {
  for (const auto& t : spec.tables) {
    std::set<std::string> visited{t.name};
    for (const ReferenceSpec* r = parent_reference(spec, t.name); r != nullptr;
         r = parent_reference(spec, r->root)) {
      if (!visited.insert(r->root).second) {
        throw CycleError("references form a cycle through table '" + r->root + "'");
      }
    }
  }
}

inline const Row& find_parent_row(const TableStore& store, const ReferenceSpec& ref, const Row& child) {
  const std::string* fk = child.get(ref.child_key);
  if (fk == nullptr) throw ContextError("table '" + ref.child + "' has no column '" + ref.child_key + "'");
  const Table& parent = store.table(ref.root);
  for (const auto& row : parent.rows) {
    const std::string* v = row.get(ref.root_key);
    if (v != nullptr && *v == *fk) return row;
  }
  throw ContextError("dangling reference: no " + ref.root + " row with " + ref.root_key + "=" + *fk +
                     " for " + ref.child + "." + ref.child_key);
}

class ContextBuilder {
 public:
  ContextBuilder(const TableStore& store, const DatabaseSpec& spec, std::string subject_table, const Row& subject)
      : store_(store), spec_(spec), subject_table_(std::move(subject_table)), subject_(subject) {
    subject_key_ = store_.table(subject_table_).key_of(subject_);
  }

  ContextTree build(const std::string& root_table, const Row& root_row) {
    auto root = element_for(root_table, root_row);
    std::vector<std::size_t> path;
    bool found = is_subject(root_table, root_row);
    attach_children(*root, root_table, root_row, path, found);
    return ContextTree{Document(std::move(root)), subject_path_};
  }

 private:
  bool is_subject(const std::string& table, const Row& row) const {
    return table == subject_table_ && store_.table(table).key_of(row) == subject_key_;
  }

  static std::unique_ptr<XmlNode> element_for(const std::string& table, const Row& row) {
    auto e = XmlNode::make_element(table);
    for (const auto& c : row.cells()) e->set_attribute(c.column, c.value);
    return e;
  }

  void attach_children(XmlNode& element, const std::string& table, const Row& row,
                       std::vector<std::size_t>& path, bool& found) {
    for (const auto& ref : spec_.references) {
      if (ref.root != table) continue;
      const std::string* value = row.get(ref.root_key);
      if (value == nullptr) throw ContextError("table '" + table + "' has no column '" + ref.root_key + "'");
      const Table& child_table = store_.table(ref.child);
      std::vector<const Row*> rows;
      bool subject_seen = false;
      for (const auto& r : child_table.rows) {
        if (is_subject(ref.child, r)) {
          rows.push_back(&subject_);
          subject_seen = true;
        } else {
          rows.push_back(&r);
        }
      }
      if (!subject_seen && ref.child == subject_table_) rows.push_back(&subject_);
      for (const Row* r : rows) {
        const std::string* fk = r->get(ref.child_key);
        if (fk == nullptr || *fk != *value) continue;
        path.push_back(element.children().size());
        XmlNode& child = element.append_child(element_for(ref.child, *r));
        if (!found && is_subject(ref.child, *r)) {
          subject_path_ = path;
          found = true;
        }
        attach_children(child, ref.child, *r, path, found);
        path.pop_back();
      }
    }
  }

  const TableStore& store_;
  const DatabaseSpec& spec_;
  std::string subject_table_;
  const Row& subject_;
  std::string subject_key_;
  std::vector<std::size_t> subject_path_;
};

}  // namespace detail

// Climbs child -> root along references to the root-most row, then builds
// that row's subtree. `row` stands in for the stored row with the same key
// (or joins its siblings when no such row is stored).
inline ContextTree build_context(const TableStore& store, const DatabaseSpec& spec, const std::string& table,
                                 const Row& row) {
  detail::check_forest(spec);
  if (!spec.table(table)) throw ContextError("table '" + table + "' is not declared");
  std::string current_table = table;
  const Row* current = &row;
  while (const ReferenceSpec* ref = detail::parent_reference(spec, current_table)) {
    current = &detail::find_parent_row(store, *ref, *current);
    current_table = ref->root;
  }
  return detail::ContextBuilder(store, spec, table, row).build(current_table, *current);
}

struct TriggerResult {
  ValidationReport report;
  std::optional<Row> corrected_row;
};

namespace detail {

// The state the store would be in after `op`, with `row` as the written row.
inline void apply_in_place(TableStore& store, const RowOp& op, const Row* row) {
  Table& table = store.table(op.table);
  switch (op.kind) {
    case RowOp::Kind::insert: table.rows.push_back(*row); break;
    case RowOp::Kind::update: {
      const std::string& key = table.key_of(*row);
      for (auto& r : table.rows) {
        if (*r.get(table.key) == key) r = *row;
      }
      break;
    }
    case RowOp::Kind::remove: {
      const std::string key = table.key_of(*op.old_row);
      std::erase_if(table.rows, [&](const Row& r) { return *r.get(table.key) == key; });
      break;
    }
  }
}

// Checks the op's shape and returns the conformed row it writes, if any.
inline std::optional<Row> check_op(const TableStore& store, const RowOp& op) {
  const Table& table = store.table(op.table);
  switch (op.kind) {
    case RowOp::Kind::insert: {
      if (op.old_row || !op.new_row) throw ContextError("insert needs a new row and no old row");
      Row row = table.conform(*op.new_row);
      if (table.find(table.key_of(row))) {
        throw ContextError("duplicate key " + table.key + "=" + table.key_of(row) + " in table '" + table.name + "'");
      }
      return row;
    }
    case RowOp::Kind::update: {
      if (!op.old_row || !op.new_row) throw ContextError("update needs an old and a new row");
      Row row = table.conform(*op.new_row);
      if (table.key_of(*op.old_row) != table.key_of(row)) throw ContextError("update may not change the key");
      if (!table.find(table.key_of(row))) {
        throw ContextError("no row with " + table.key + "=" + table.key_of(row) + " in table '" + table.name + "'");
      }
      return row;
    }
    case RowOp::Kind::remove:
      if (!op.old_row || op.new_row) throw ContextError("delete needs an old row and no new row");
      if (!table.find(table.key_of(*op.old_row))) {
        throw ContextError("no row with " + table.key + "=" + table.key_of(*op.old_row) + " in table '" +
                           table.name + "'");
      }
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

// Validates `op` against the store's post-state. Only the rule groups rooted
// at the affected row run (the written row, or for a delete the deleted row's
// former parent), and only the written row may be corrected.
inline TriggerResult fire_trigger(const TableStore& store, const DatabaseSpec& spec, const RuleSet& rules,
                                  const RowOp& op, const ValidationOptions& opts = {}) {
  require_attribute_targets(rules);
  detail::check_forest(spec);
  std::optional<Row> written = detail::check_op(store, op);

  TableStore post = store;
  detail::apply_in_place(post, op, written ? &*written : nullptr);

  std::string anchor_table = op.table;
  Row anchor_row;
  if (written) {
    anchor_row = *written;
  } else {
    const ReferenceSpec* ref = detail::parent_reference(spec, op.table);
    if (ref == nullptr) return {};  // a root-most row takes its whole subtree with it
    anchor_row = detail::find_parent_row(post, *ref, *op.old_row);
    anchor_table = ref->root;
  }

  ContextTree ctx = build_context(post, spec, anchor_table, anchor_row);
  const std::string anchor_location = node_location(ctx.subject());
  const bool correctable = written.has_value();

  ValidationOptions run = opts;
  run.keep_decimal_point = true;
  run.scope = [&](const XmlNode& n) { return node_location(n) == anchor_location; };
  run.may_correct = [&](const XmlNode& n) { return correctable && node_location(n) == anchor_location; };

  ValidationResult result = validate(ctx.document, Schema{}, rules, run);
  TriggerResult out{std::move(result.report), std::nullopt};
  if (correctable && out.report.corrections_applied > 0) {
    ContextTree corrected{std::move(result.document), ctx.subject_path};
    const XmlNode& subject = corrected.subject();
    Row row;
    for (const auto& col : store.table(op.table).columns) {
      const std::string* v = subject.attribute(col);
      row.set(col, v ? *v : *written->get(col));
    }
    out.corrected_row = std::move(row);
  }
  return out;
}

struct ApplyResult {
  ValidationReport report;
  TableStore store;
  bool committed = false;
};

// Commits `op` (with any corrected values) to a copy of `store` when the
// trigger accepts it; otherwise returns the store unchanged.
inline ApplyResult apply_op(const TableStore& store, const DatabaseSpec& spec, const RuleSet& rules,
                            const RowOp& op, const ValidationOptions& opts = {}) {
  TriggerResult fired = fire_trigger(store, spec, rules, op, opts);
  ApplyResult out{std::move(fired.report), store, false};
  if (!out.report.valid) return out;
  std::optional<Row> written = fired.corrected_row;
  if (!written && op.new_row) written = store.table(op.table).conform(*op.new_row);
  detail::apply_in_place(out.store, op, written ? &*written : nullptr);
  out.committed = true;
  return out;
}

}  // namespace srml
