#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "srml/srml.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& name) { return fs::path(SRML_FIXTURES) / name; }

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline srml::Document load(const std::string& name) {
  return srml::parse_document(slurp(fixture(name)), name);
}

inline srml::Schema load_schema(const std::string& name) { return srml::parse_schema(load(name)); }

inline srml::RuleSet load_rules(const std::string& name) { return srml::parse_standalone(load(name)); }

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("srml-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Copy of the relational fixture directory.
inline void copy_db(const fs::path& to) {
  for (const auto& e : fs::directory_iterator(fixture("db"))) fs::copy_file(e.path(), to / e.path().filename());
}

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q.push_back(c);
    }
  }
  return q + "'";
}

inline RunResult run_cli(const std::vector<std::string>& args) {
  TempDir tmp;
  std::string cmd = shell_quote(SRML_CLI);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  fs::path err = tmp / "stderr";
  cmd += " 2>" + shell_quote(err.string());
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = slurp(err);
  return r;
}

inline std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Total as the formula states it, computed directly.
inline double total_oracle(double qty, double price, double discount, double tax) {
  return qty * price * (1.0 - discount / 100.0) * (1.0 + tax / 100.0);
}

// ---- random trees and paths ---------------------------------------------

inline const std::vector<std::string>& tree_names() {
  static const std::vector<std::string> names{"a", "b", "c"};
  return names;
}
inline const std::vector<std::string>& attr_names() {
  static const std::vector<std::string> names{"x", "y"};
  return names;
}
inline const std::vector<std::string>& attr_values() {
  static const std::vector<std::string> values{"1", "2"};
  return values;
}

// Random tree with at most `max_nodes` elements; leaves may carry text.
inline srml::Document random_tree(std::mt19937& rng, std::size_t max_nodes) {
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  std::size_t target = 1 + rng() % max_nodes;
  auto root = srml::XmlNode::make_element(pick(tree_names()));
  std::vector<srml::XmlNode*> all{root.get()};
  while (all.size() < target) {
    srml::XmlNode* parent = all[rng() % all.size()];
    srml::XmlNode& child = parent->append_element(pick(tree_names()));
    for (const auto& a : attr_names()) {
      if (rng() % 3 == 0) child.set_attribute(a, pick(attr_values()));
    }
    all.push_back(&child);
  }
  for (const auto& a : attr_names()) {
    if (rng() % 3 == 0) root->set_attribute(a, pick(attr_values()));
  }
  for (srml::XmlNode* n : all) {
    if (n->children().empty() && rng() % 2 == 0) n->append_text("t" + std::to_string(rng() % 5));
  }
  return srml::Document(std::move(root));
}

struct OraclePred {
  enum Kind { position, has_attr, attr_eq } kind = position;
  std::size_t index = 1;
  std::string name;
  std::string value;
};

struct OracleStep {
  std::string name;
  std::vector<OraclePred> preds;
};

// Structured form of a generated path; rendered to text for the engine.
struct OraclePath {
  enum Start { relative, absolute, descendant } start = relative;
  std::size_t parents = 0;
  std::vector<OracleStep> steps;
  enum Term { none, attribute, text } term = none;
  std::string term_name;

  std::string render() const {
    std::string s;
    for (std::size_t i = 0; i < parents; ++i) s += i ? "/.." : "..";
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (i == 0 && start == absolute) {
        s += "/";
      } else if (i == 0 && start == descendant) {
        s += "//";
      } else if (i > 0 || parents > 0) {
        s += "/";
      }
      s += steps[i].name;
      for (const auto& p : steps[i].preds) {
        if (p.kind == OraclePred::position) s += "[" + std::to_string(p.index) + "]";
        if (p.kind == OraclePred::has_attr) s += "[@" + p.name + "]";
        if (p.kind == OraclePred::attr_eq) s += "[@" + p.name + "=\"" + p.value + "\"]";
      }
    }
    if (term != none) {
      if (!s.empty()) s += "/";
      s += term == attribute ? "@" + term_name : "text()";
    }
    return s;
  }
};

inline OraclePath random_path(std::mt19937& rng) {
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  OraclePath p;
  int start = static_cast<int>(rng() % 3);
  p.start = static_cast<OraclePath::Start>(start);
  if (p.start == OraclePath::relative) p.parents = rng() % 3;
  std::size_t nsteps = rng() % 4;
  if (p.start != OraclePath::relative && nsteps == 0) nsteps = 1;
  for (std::size_t i = 0; i < nsteps; ++i) {
    OracleStep step{pick(tree_names()), {}};
    std::size_t npreds = rng() % 3;
    for (std::size_t k = 0; k < npreds; ++k) {
      OraclePred pred;
      pred.kind = static_cast<OraclePred::Kind>(rng() % 3);
      pred.index = 1 + rng() % 3;
      pred.name = pick(attr_names());
      pred.value = pick(attr_values());
      step.preds.push_back(pred);
    }
    p.steps.push_back(std::move(step));
  }
  int term = static_cast<int>(rng() % 3);
  p.term = static_cast<OraclePath::Term>(term);
  p.term_name = pick(attr_names());
  if (p.parents == 0 && p.steps.empty() && p.term == OraclePath::none) p.term = OraclePath::text;
  return p;
}

// Full-tree walk in document order.
inline void preorder(const srml::XmlNode& n, std::vector<const srml::XmlNode*>& out) {
  out.push_back(&n);
  for (const auto& c : n.children()) {
    if (c->is_element()) preorder(*c, out);
  }
}

struct OracleOutcome {
  bool navigation_error = false;
  std::vector<const srml::XmlNode*> nodes;  // document order
};

// Set-based evaluation over the whole tree: each step keeps every element
// whose parent is in the current set and which survives the predicates, with
// positions taken among its same-parent candidates.
inline OracleOutcome oracle_evaluate(const OraclePath& path, const srml::XmlNode& context) {
  const srml::XmlNode* root = &context;
  while (root->parent() != nullptr) root = root->parent();
  std::vector<const srml::XmlNode*> all;
  preorder(*root, all);

  auto filter = [&](const std::vector<const srml::XmlNode*>& cands, const OracleStep& step) {
    // group by parent, keep order
    std::map<const srml::XmlNode*, std::vector<const srml::XmlNode*>> groups;
    std::vector<const srml::XmlNode*> parents_order;
    for (const auto* c : cands) {
      if (!groups.count(c->parent())) parents_order.push_back(c->parent());
      groups[c->parent()].push_back(c);
    }
    std::set<const srml::XmlNode*> kept;
    for (const auto* par : parents_order) {
      std::vector<const srml::XmlNode*> g = groups[par];
      for (const auto& p : step.preds) {
        std::vector<const srml::XmlNode*> next;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const std::string* v = g[i]->attribute(p.name);
          bool ok = p.kind == OraclePred::position ? i + 1 == p.index
                    : p.kind == OraclePred::has_attr ? v != nullptr
                                                     : v != nullptr && *v == p.value;
          if (ok) next.push_back(g[i]);
        }
        g = next;
      }
      kept.insert(g.begin(), g.end());
    }
    return kept;
  };

  std::set<const srml::XmlNode*> current;
  std::size_t first = 0;
  if (path.start == OraclePath::relative) {
    current.insert(&context);
    for (std::size_t i = 0; i < path.parents; ++i) {
      std::set<const srml::XmlNode*> up;
      for (const auto* n : current) {
        if (n->parent() == nullptr) return {true, {}};
        up.insert(n->parent());
      }
      current = up;
    }
  } else {
    const OracleStep& s = path.steps.front();
    std::vector<const srml::XmlNode*> cands;
    for (const auto* n : all) {
      if (n->name() != s.name) continue;
      if (path.start == OraclePath::absolute && n != root) continue;
      cands.push_back(n);
    }
    current = filter(cands, s);
    first = 1;
  }
  for (std::size_t i = first; i < path.steps.size(); ++i) {
    std::vector<const srml::XmlNode*> cands;
    for (const auto* n : all) {
      if (n->parent() != nullptr && current.count(n->parent()) && n->name() == path.steps[i].name) {
        cands.push_back(n);
      }
    }
    current = filter(cands, path.steps[i]);
  }
  OracleOutcome out;
  for (const auto* n : all) {
    if (!current.count(n)) continue;
    if (path.term == OraclePath::attribute && !n->has_attribute(path.term_name)) continue;
    out.nodes.push_back(n);
  }
  return out;
}

// ---- random relational stores -------------------------------------------

struct RandomStore {
  srml::DatabaseSpec spec;
  srml::TableStore store;
};

// Three tables t0, t1, t2 with a random forest of references and at most
// `max_rows` rows in total. Foreign keys always resolve.
inline RandomStore random_store(std::mt19937& rng, std::size_t max_rows) {
  RandomStore rs;
  std::vector<std::string> names{"t0", "t1", "t2"};
  std::shuffle(names.begin(), names.end(), rng);
  std::map<std::string, std::string> parent;
  // names[0] is always a root; later tables attach to an earlier one or stand alone.
  for (std::size_t i = 1; i < names.size(); ++i) {
    if (rng() % 4 != 0) parent[names[i]] = names[rng() % i];
  }
  for (const auto& n : names) rs.spec.tables.push_back({n, "K"});
  for (const auto& n : names) {
    if (parent.count(n)) rs.spec.references.push_back({parent[n], "K", n, "FK"});
  }
  std::map<std::string, std::size_t> counts;
  std::size_t total = 1 + rng() % max_rows;
  for (std::size_t i = 0; i < total; ++i) counts[names[rng() % names.size()]]++;
  for (const auto& n : names) {
    if (parent.count(n) && counts[parent[n]] == 0) counts[parent[n]] = 1;
  }
  for (const auto& n : names) {
    srml::Table t{n, "K", {"K", "FK", "V"}, {}};
    for (std::size_t r = 0; r < counts[n]; ++r) {
      std::string fk = parent.count(n) ? std::to_string(1 + rng() % counts[parent[n]]) : "";
      t.rows.push_back(srml::Row{{"K", std::to_string(r + 1)}, {"FK", fk}, {"V", std::to_string(rng() % 100)}});
    }
    rs.store.add_table(std::move(t));
  }
  return rs;
}

// (table, key) pairs in the join closure around (table, key): climb through
// foreign keys to the root-most row, then take every row reachable downward.
inline std::set<std::pair<std::string, std::string>> join_closure(const RandomStore& rs, const std::string& table,
                                                                  const std::string& key) {
  auto ref_of_child = [&](const std::string& t) -> const srml::ReferenceSpec* {
    for (const auto& r : rs.spec.references) {
      if (r.child == t) return &r;
    }
    return nullptr;
  };
  std::string t = table;
  std::string k = key;
  while (const auto* r = ref_of_child(t)) {
    const srml::Row* row = rs.store.table(t).find(k);
    k = *row->get(r->child_key);
    t = r->root;
  }
  std::set<std::pair<std::string, std::string>> out{{t, k}};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& r : rs.spec.references) {
      for (const auto& row : rs.store.table(r.child).rows) {
        std::pair<std::string, std::string> id{r.child, *row.get("K")};
        if (out.count(id)) continue;
        if (out.count({r.root, *row.get(r.child_key)})) {
          out.insert(id);
          grew = true;
        }
      }
    }
  }
  return out;
}

}  // namespace testsupport
