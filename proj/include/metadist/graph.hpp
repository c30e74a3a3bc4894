#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "metadist/error.hpp"
#include "metadist/value.hpp"
#include "metadist/value_set.hpp"

namespace metadist {

enum class ArcKind { inclusion, values, both };

inline const char* to_string(ArcKind kind) {
  switch (kind) {
    case ArcKind::inclusion: return "inclusion";
    case ArcKind::values: return "values";
    case ArcKind::both: return "both";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Unresolved descriptors, mirroring the domain-spec wire format.
// ---------------------------------------------------------------------------

struct SetDescriptor {
  enum class Kind { interval, ints, range, cats, exc, interval_expr };
  Kind kind = Kind::exc;
  double lo = 0.0, hi = 0.0;
  bool open_lo = false, open_hi = false;
  std::vector<std::int64_t> ints;
  std::int64_t range_lo = 0, range_hi = 0;
  std::vector<std::string> cats;
  std::string lo_expr, hi_expr;

  static SetDescriptor exc() { return SetDescriptor{}; }
  static SetDescriptor interval(double lo, double hi, bool olo = false, bool ohi = false) {
    SetDescriptor d;
    d.kind = Kind::interval;
    d.lo = lo;
    d.hi = hi;
    d.open_lo = olo;
    d.open_hi = ohi;
    return d;
  }
  static SetDescriptor int_list(std::vector<std::int64_t> values) {
    SetDescriptor d;
    d.kind = Kind::ints;
    d.ints = std::move(values);
    return d;
  }
  static SetDescriptor int_range(std::int64_t lo, std::int64_t hi) {
    SetDescriptor d;
    d.kind = Kind::range;
    d.range_lo = lo;
    d.range_hi = hi;
    return d;
  }
  static SetDescriptor cat_list(std::vector<std::string> labels) {
    SetDescriptor d;
    d.kind = Kind::cats;
    d.cats = std::move(labels);
    return d;
  }
  static SetDescriptor interval_expr(std::string lo, std::string hi) {
    SetDescriptor d;
    d.kind = Kind::interval_expr;
    d.lo_expr = std::move(lo);
    d.hi_expr = std::move(hi);
    return d;
  }

  /// Resolves against the owning variable's kind and category labels.
  ValueSet resolve(VariableKind var_kind, const std::vector<std::string>& labels,
                   const std::string& context) const {
    switch (kind) {
      case Kind::exc: return ValueSet::exc();
      case Kind::interval:
        if (var_kind != VariableKind::continuous)
          throw ValidationError(context + ": interval set on non-continuous variable");
        return ValueSet::real_interval(lo, hi, open_lo, open_hi);
      case Kind::interval_expr:
        if (var_kind != VariableKind::continuous)
          throw ValidationError(context + ": expression bounds on non-continuous variable");
        return ValueSet::expr_interval(lo_expr, hi_expr);
      case Kind::ints:
        if (var_kind != VariableKind::integer)
          throw ValidationError(context + ": integer set on non-integer variable");
        return ValueSet::int_enum(ints);
      case Kind::range:
        if (var_kind != VariableKind::integer)
          throw ValidationError(context + ": integer range on non-integer variable");
        return ValueSet::int_range(range_lo, range_hi);
      case Kind::cats: {
        if (var_kind != VariableKind::categorical)
          throw ValidationError(context + ": category set on non-categorical variable");
        std::vector<std::int32_t> indices;
        indices.reserve(cats.size());
        for (const auto& label : cats) {
          const auto it = std::find(labels.begin(), labels.end(), label);
          if (it == labels.end())
            throw ValidationError(context + ": unknown category label '" + label + "'");
          indices.push_back(static_cast<std::int32_t>(it - labels.begin()));
        }
        return ValueSet::cat_set(std::move(indices));
      }
    }
    throw ValidationError(context + ": corrupt set descriptor");
  }
};

struct VariableSpec {
  std::string name;
  VariableKind kind = VariableKind::continuous;
  SetDescriptor universal;
  bool excludable = false;
};

struct ArcSpec {
  std::string parent, child;
  ArcKind kind = ArcKind::inclusion;
};

struct CaseSpec {
  std::vector<std::pair<std::string, SetDescriptor>> when;  // parent -> membership test
  SetDescriptor set;
};

struct RuleSpec {
  std::string child;
  std::vector<CaseSpec> cases;
};

struct ConstantSpec {
  std::string name;
  std::string max_of;  // maximized over all reachable configurations at build
};

struct GraphSpec {
  std::vector<VariableSpec> variables;
  std::vector<ArcSpec> arcs;
  std::vector<RuleSpec> rules;
  std::vector<ConstantSpec> constants;
};

// ---------------------------------------------------------------------------
// Resolved graph.
// ---------------------------------------------------------------------------

struct Variable {
  std::string name;
  VariableKind kind;
  ValueSet universal;  // non-EXC portion; EXC membership is the excludable flag
  bool excludable = false;
  std::vector<std::string> labels;  // categorical only
};

struct DecreeArc {
  int parent = -1;
  int child = -1;
  ArcKind kind = ArcKind::inclusion;
};

struct RuleCase {
  std::vector<std::pair<int, ValueSet>> tests;  // conjunction over parents
  ValueSet result;
};

struct DecreeRule {
  int child = -1;
  std::vector<RuleCase> cases;
};

/// What is known about a variable while reasoning over partial assignments.
struct VarKnowledge {
  enum class State {
    known,             // concrete value (may be EXC)
    excluded,          // restricted set is {EXC}
    included_unknown,  // included, value unconstrained beyond the universal set
    ranged,            // included, value within `range`
    undetermined,      // inclusion itself cannot be decided from what is known
  };
  State state = State::included_unknown;
  Value value = Value::exc();
  ValueSet range = ValueSet::exc();  // meaningful for State::ranged
};

enum class Tri { no, yes, maybe };

class RoleGraph {
 public:
  /// Builds and validates eagerly; throws listing every violation.
  static RoleGraph build(const GraphSpec& spec) {
    auto [graph, report] = build_with_report(spec);
    if (!report.empty()) {
      std::string message = "invalid role graph:";
      for (const auto& line : report) message += "\n  " + line;
      throw ValidationError(message);
    }
    return std::move(graph);
  }

  /// Builds without throwing on graph-level violations; the report lists them.
  /// Malformed specs (unknown names, kind mismatches) still throw.
  static std::pair<RoleGraph, std::vector<std::string>> build_with_report(const GraphSpec& spec) {
    RoleGraph g;
    g.resolve(spec);
    std::vector<std::string> report = g.validate_structure();
    if (g.acyclic_) {
      g.compute_derived();
      g.compute_constants(spec, report);
      g.check_rules(report);
      g.audit_universal_sets(report);
    }
    g.valid_ = report.empty();
    return {std::move(g), std::move(report)};
  }

  int size() const { return static_cast<int>(vars_.size()); }
  const Variable& var(int v) const { return vars_[static_cast<std::size_t>(v)]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<DecreeArc>& arcs() const { return arcs_; }
  const std::map<std::string, double>& constants() const { return constants_; }
  bool valid() const { return valid_; }

  int index_of(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw ValidationError("unknown variable '" + name + "'");
    return it->second;
  }
  bool has_variable(const std::string& name) const { return index_.count(name) > 0; }

  const std::vector<int>& parents(int v) const { return parents_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& children(int v) const { return children_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& ancestors(int v) const { return ancestors_[static_cast<std::size_t>(v)]; }

  /// Declaration-stable topological order (parents before children).
  const std::vector<int>& topological_order() const {
    if (!acyclic_) throw ValidationError("role graph has a cycle; no topological order exists");
    return topo_;
  }

  Role role_of(int v) const {
    const bool has_parent = !parents(v).empty();
    const bool has_child = !children(v).empty();
    if (has_child && !has_parent) return Role::meta;
    if (has_child && has_parent) return Role::meta_decreed;
    if (has_parent) return Role::decreed;
    return Role::neutral;
  }

  /// True when a variable has the decree property (controls other variables).
  bool has_decree_property(int v) const { return !children(v).empty(); }

  /// True when the variable's value decides the inclusion of other variables
  /// (it owns an outgoing inclusion-kind arc).
  bool controls_inclusion(int v) const {
    return controls_inclusion_[static_cast<std::size_t>(v)] != 0;
  }

  bool is_hierarchical() const {
    const bool by_arcs = !arcs_.empty();
    bool by_parents = false;
    bool by_meta = false;
    for (int v = 0; v < size(); ++v) {
      by_parents = by_parents || !parents(v).empty();
      by_meta = by_meta || role_of(v) == Role::meta;
    }
    if (by_arcs != by_parents || by_arcs != by_meta)
      throw ValidationError("hierarchical-domain equivalences disagree; graph is corrupt");
    return by_arcs;
  }

  const DecreeRule* rule(int v) const {
    const auto& r = rules_[static_cast<std::size_t>(v)];
    return r ? &*r : nullptr;
  }

  bool in_universal(int v, const Value& value) const {
    if (value.is_exc()) return var(v).excludable;
    return var(v).universal.contains(value);
  }

  /// The restricted set of v given concrete parent values. The lookup must
  /// return a value for every parent of v (EXC allowed).
  ValueSet restricted_set(int v, const std::function<const Value*(int)>& lookup) const {
    const DecreeRule* r = rule(v);
    if (r == nullptr) return var(v).universal;
    const RuleCase* matched = nullptr;
    for (const auto& c : r->cases) {
      bool ok = true;
      for (const auto& [parent, test] : c.tests) {
        const Value* pv = lookup(parent);
        if (pv == nullptr)
          throw ValidationError("restricted set of '" + var(v).name + "' needs a value for '" +
                                var(parent).name + "'");
        if (!(pv->is_exc() ? test.is_exc_singleton() : test.contains(*pv))) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (matched != nullptr)
        throw ValidationError("rule cases of '" + var(v).name + "' overlap for the given parents");
      matched = &c;
    }
    if (matched == nullptr)
      throw ValidationError("no rule case of '" + var(v).name + "' matches the given parents");
    if (!matched->result.has_expr()) return matched->result;
    ExprEnv env;
    env.constants = &constants_;
    for (const int parent : parents(v)) {
      const Value* pv = lookup(parent);
      if (pv != nullptr) env.values.emplace(var(parent).name, *pv);
    }
    return matched->result.evaluate(env);
  }

  /// Map-based convenience overload (keys are variable indices).
  ValueSet restricted_set(int v, const std::map<int, Value>& parent_values) const {
    return restricted_set(v, [&](int p) -> const Value* {
      const auto it = parent_values.find(p);
      return it == parent_values.end() ? nullptr : &it->second;
    });
  }

  /// Three-valued case match against partial knowledge.
  Tri match_case(const RuleCase& c, const std::function<VarKnowledge(int)>& know) const {
    Tri result = Tri::yes;
    for (const auto& [parent, test] : c.tests) {
      const VarKnowledge k = know(parent);
      Tri t = Tri::maybe;
      switch (k.state) {
        case VarKnowledge::State::known:
          t = (k.value.is_exc() ? test.is_exc_singleton() : test.contains(k.value)) ? Tri::yes
                                                                                    : Tri::no;
          break;
        case VarKnowledge::State::excluded:
          t = test.is_exc_singleton() ? Tri::yes : Tri::no;
          break;
        case VarKnowledge::State::included_unknown:
          if (test.is_exc_singleton()) {
            t = Tri::no;
          } else if (var(parent).universal.subset_of(test)) {
            t = Tri::yes;  // test cannot discriminate
          } else {
            t = Tri::maybe;
          }
          break;
        case VarKnowledge::State::ranged:
          if (test.is_exc_singleton()) {
            t = Tri::no;
          } else if (!k.range.has_expr() && k.range.subset_of(test)) {
            t = Tri::yes;
          } else {
            t = Tri::maybe;
          }
          break;
        case VarKnowledge::State::undetermined: t = Tri::maybe; break;
      }
      if (t == Tri::no) return Tri::no;
      if (t == Tri::maybe) result = Tri::maybe;
    }
    return result;
  }

  /// Whether v is included/excluded given partial knowledge of its parents.
  /// Empty when the rule cases cannot decide inclusion yet.
  std::optional<bool> inclusion_decided(int v, const std::function<VarKnowledge(int)>& know) const {
    const DecreeRule* r = rule(v);
    if (r == nullptr) return true;
    bool any = false;
    bool all_exc = true;
    bool all_inc = true;
    for (const auto& c : r->cases) {
      const Tri t = match_case(c, know);
      if (t == Tri::no) continue;
      any = true;
      if (c.result.is_exc_singleton()) {
        all_inc = false;
      } else {
        all_exc = false;
      }
    }
    if (!any) return std::nullopt;
    if (all_inc) return true;
    if (all_exc) return false;
    return std::nullopt;
  }

  /// Variables owning at least one outgoing inclusion-kind arc, topo-ordered.
  std::vector<int> inclusion_controllers() const {
    std::set<int> owners;
    for (const auto& arc : arcs_)
      if (arc.kind == ArcKind::inclusion || arc.kind == ArcKind::both) owners.insert(arc.parent);
    std::vector<int> ordered;
    for (const int v : topological_order())
      if (owners.count(v)) ordered.push_back(v);
    return ordered;
  }

  /// Enumerates reachable joint assignments of `targets` (a topo-ordered
  /// subset), walking variables in topological order up to `stop_after`
  /// (inclusive; -1 walks everything) and tracking per-variable knowledge.
  /// Returns false when a target could not be enumerated or `budget`
  /// configurations were exceeded; non-target variables whose sets cannot be
  /// pinned are marked `undetermined` instead of failing the walk.
  bool walk_configurations(const std::vector<int>& targets,
                           const std::function<void(const std::vector<VarKnowledge>&)>& visit,
                           int stop_after = -1, long budget = 200000) const {
    std::vector<char> is_target(vars_.size(), 0);
    for (const int t : targets) is_target[static_cast<std::size_t>(t)] = 1;
    std::size_t stop_pos = topo_.size();
    if (stop_after >= 0) {
      for (std::size_t i = 0; i < topo_.size(); ++i)
        if (topo_[i] == stop_after) stop_pos = i + 1;
    }
    std::vector<VarKnowledge> know(vars_.size());
    long count = 0;
    return walk_rec(0, stop_pos, is_target, know, visit, count, budget);
  }

 private:
  void resolve(const GraphSpec& spec) {
    for (const auto& cs : spec.constants) constant_names_.insert(cs.name);

    const auto csv_safe = [](const std::string& token) {
      return !token.empty() && token != kExcToken && token != "target" &&
             token.find_first_of(",\r\n") == std::string::npos;
    };
    vars_.reserve(spec.variables.size());
    for (const auto& vs : spec.variables) {
      if (!csv_safe(vs.name))
        throw ValidationError("variable name '" + vs.name +
                              "' is empty, reserved, or not CSV-safe");
      if (index_.count(vs.name)) throw ValidationError("duplicate variable '" + vs.name + "'");
      Variable v;
      v.name = vs.name;
      v.kind = vs.kind;
      v.excludable = vs.excludable;
      if (vs.kind == VariableKind::categorical) {
        if (vs.universal.kind != SetDescriptor::Kind::cats)
          throw ValidationError("variable '" + vs.name +
                                "': categorical universal must list labels");
        v.labels = vs.universal.cats;
        for (const auto& label : v.labels)
          if (!csv_safe(label))
            throw ValidationError("variable '" + vs.name + "': label '" + label +
                                  "' is empty, reserved, or not CSV-safe");
      }
      if (vs.universal.kind == SetDescriptor::Kind::exc ||
          vs.universal.kind == SetDescriptor::Kind::interval_expr)
        throw ValidationError("variable '" + vs.name +
                              "': universal set must be a concrete non-EXC set");
      v.universal = vs.universal.resolve(vs.kind, v.labels, "variable '" + vs.name + "'");
      index_.emplace(v.name, static_cast<int>(vars_.size()));
      vars_.push_back(std::move(v));
    }

    parents_.assign(vars_.size(), {});
    children_.assign(vars_.size(), {});
    for (const auto& as : spec.arcs) {
      DecreeArc arc;
      arc.parent = index_of(as.parent);
      arc.child = index_of(as.child);
      arc.kind = as.kind;
      arcs_.push_back(arc);
    }

    rules_.assign(vars_.size(), std::nullopt);
    for (const auto& rs : spec.rules) {
      const int child = index_of(rs.child);
      if (rules_[static_cast<std::size_t>(child)])
        throw ValidationError("variable '" + rs.child + "' has more than one rule");
      DecreeRule rule;
      rule.child = child;
      for (const auto& cs : rs.cases) {
        RuleCase c;
        for (const auto& [parent_name, test] : cs.when) {
          const int parent = index_of(parent_name);
          c.tests.emplace_back(parent, test.resolve(var(parent).kind, var(parent).labels,
                                                    "rule for '" + rs.child + "', test on '" +
                                                        parent_name + "'"));
        }
        c.result =
            cs.set.resolve(var(child).kind, var(child).labels, "rule for '" + rs.child + "'");
        rule.cases.push_back(std::move(c));
      }
      rules_[static_cast<std::size_t>(child)] = std::move(rule);
    }
  }

  std::vector<std::string> validate_structure() {
    std::vector<std::string> report;

    std::set<std::pair<int, int>> seen_arcs;
    for (const auto& arc : arcs_) {
      if (arc.parent == arc.child) {
        report.push_back("arc: self-dependency on '" + var(arc.parent).name + "'");
        continue;
      }
      if (!seen_arcs.emplace(arc.parent, arc.child).second) {
        report.push_back("arc: duplicate arc " + var(arc.parent).name + " -> " +
                         var(arc.child).name + " (use kind 'both' instead)");
        continue;
      }
      parents_[static_cast<std::size_t>(arc.child)].push_back(arc.parent);
      children_[static_cast<std::size_t>(arc.parent)].push_back(arc.child);
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    for (auto& c : children_) std::sort(c.begin(), c.end());
    controls_inclusion_.assign(vars_.size(), 0);
    for (const auto& arc : arcs_)
      if (arc.kind == ArcKind::inclusion || arc.kind == ArcKind::both)
        controls_inclusion_[static_cast<std::size_t>(arc.parent)] = 1;

    // Kahn's algorithm with declaration-order tie-breaking.
    std::vector<int> indegree(vars_.size(), 0);
    for (int v = 0; v < size(); ++v)
      indegree[static_cast<std::size_t>(v)] = static_cast<int>(parents(v).size());
    std::set<int> ready;
    for (int v = 0; v < size(); ++v)
      if (indegree[static_cast<std::size_t>(v)] == 0) ready.insert(v);
    while (!ready.empty()) {
      const int v = *ready.begin();
      ready.erase(ready.begin());
      topo_.push_back(v);
      for (const int c : children(v))
        if (--indegree[static_cast<std::size_t>(c)] == 0) ready.insert(c);
    }
    acyclic_ = topo_.size() == vars_.size();
    if (!acyclic_) {
      std::string cycle = "cycle: variables {";
      bool first = true;
      for (int v = 0; v < size(); ++v) {
        if (indegree[static_cast<std::size_t>(v)] > 0) {
          if (!first) cycle += ", ";
          cycle += var(v).name;
          first = false;
        }
      }
      report.push_back(cycle + "} form a dependency cycle");
    }

    for (int v = 0; v < size(); ++v) {
      const bool has_rule = rules_[static_cast<std::size_t>(v)].has_value();
      if (!parents(v).empty() && !has_rule)
        report.push_back("rule: variable '" + var(v).name + "' has parents but no decree rule");
      if (parents(v).empty() && has_rule)
        report.push_back("rule: variable '" + var(v).name + "' has a rule but no incoming arc");
      if (var(v).excludable) {
        bool has_inclusion_arc = false;
        for (const auto& arc : arcs_)
          if (arc.child == v && (arc.kind == ArcKind::inclusion || arc.kind == ArcKind::both))
            has_inclusion_arc = true;
        if (!has_inclusion_arc)
          report.push_back("variable '" + var(v).name +
                           "': excludable but has no inclusion-kind incoming arc");
      }
    }

    // Rule shape: tests reference actual parents; result sets stay inside the
    // declared universal; EXC results require the excludable flag.
    for (int v = 0; v < size(); ++v) {
      const DecreeRule* r = rule(v);
      if (r == nullptr) continue;
      const auto& ps = parents(v);
      for (std::size_t ci = 0; ci < r->cases.size(); ++ci) {
        const auto& c = r->cases[ci];
        const std::string where = "rule for '" + var(v).name + "', case " + std::to_string(ci + 1);
        std::set<int> tested;
        for (const auto& [parent, test] : c.tests) {
          if (!std::binary_search(ps.begin(), ps.end(), parent))
            report.push_back(where + ": tests non-parent '" + var(parent).name + "'");
          if (!tested.insert(parent).second)
            report.push_back(where + ": tests parent '" + var(parent).name + "' twice");
          (void)test;
        }
        if (c.result.is_exc_singleton()) {
          if (!var(v).excludable)
            report.push_back(where + ": yields EXC but '" + var(v).name +
                             "' is not excludable (EXC is outside its universal set)");
        } else if (c.result.has_expr()) {
          std::set<std::string> refs;
          collect_references(c.result.lo_expr(), refs);
          collect_references(c.result.hi_expr(), refs);
          for (const auto& name : refs) {
            if (constant_names_.count(name)) continue;
            if (!has_variable(name)) {
              report.push_back(where + ": expression references unknown name '" + name + "'");
              continue;
            }
            const int ref = index_of(name);
            if (!std::binary_search(ps.begin(), ps.end(), ref))
              report.push_back(where + ": expression references non-parent '" + name + "'");
            else if (var(ref).kind == VariableKind::categorical)
              report.push_back(where + ": expression references categorical parent '" + name +
                               "'");
          }
        } else if (!c.result.subset_of(var(v).universal)) {
          report.push_back(where + ": case set escapes the declared universal set");
        }
      }
    }
    return report;
  }

  void compute_derived() {
    ancestors_.assign(vars_.size(), {});
    for (const int v : topo_) {
      std::set<int> acc;
      for (const int p : parents(v)) {
        acc.insert(p);
        const auto& pa = ancestors_[static_cast<std::size_t>(p)];
        acc.insert(pa.begin(), pa.end());
      }
      ancestors_[static_cast<std::size_t>(v)].assign(acc.begin(), acc.end());
    }
  }

  bool walk_rec(std::size_t pos, std::size_t stop_pos, const std::vector<char>& is_target,
                std::vector<VarKnowledge>& know,
                const std::function<void(const std::vector<VarKnowledge>&)>& visit, long& count,
                long budget) const {
    if (pos == stop_pos) {
      if (++count > budget) return false;
      visit(know);
      return true;
    }
    const int v = topo_[pos];
    const auto set_and_recurse = [&](const VarKnowledge& k) {
      know[static_cast<std::size_t>(v)] = k;
      return walk_rec(pos + 1, stop_pos, is_target, know, visit, count, budget);
    };

    if (is_target[static_cast<std::size_t>(v)]) {
      ValueSet rs = var(v).universal;
      if (rule(v) != nullptr) {
        if (!try_restricted(v, know, rs)) return false;  // target must be decidable
        if (rs.is_exc_singleton())
          return set_and_recurse({VarKnowledge::State::known, Value::exc(), rs});
      }
      if (!rs.is_enumerable()) return false;
      for (const auto& value : rs.enumerate()) {
        if (!set_and_recurse({VarKnowledge::State::known, value, rs})) return false;
      }
      return true;
    }

    if (rule(v) == nullptr)
      return set_and_recurse({VarKnowledge::State::ranged, Value::exc(), var(v).universal});

    ValueSet rs = ValueSet::exc();
    if (try_restricted(v, know, rs)) {
      if (rs.is_exc_singleton())
        return set_and_recurse({VarKnowledge::State::excluded, Value::exc(), rs});
      return set_and_recurse({VarKnowledge::State::ranged, Value::exc(), rs});
    }
    // Could not pin the set; keep the bare inclusion answer if there is one.
    auto lookup = [&](int p) { return know[static_cast<std::size_t>(p)]; };
    const auto included = inclusion_decided(v, lookup);
    if (!included)
      return set_and_recurse({VarKnowledge::State::undetermined, Value::exc(), ValueSet::exc()});
    if (*included)
      return set_and_recurse(
          {VarKnowledge::State::included_unknown, Value::exc(), ValueSet::exc()});
    return set_and_recurse({VarKnowledge::State::excluded, Value::exc(), ValueSet::exc()});
  }

  /// Resolves v's restricted set from partial knowledge when exactly one rule
  /// case can match. Expression bounds are widened over ranged parents.
  bool try_restricted(int v, const std::vector<VarKnowledge>& know, ValueSet& out) const {
    const DecreeRule* r = rule(v);
    if (r == nullptr) {
      out = var(v).universal;
      return true;
    }
    auto lookup = [&](int p) { return know[static_cast<std::size_t>(p)]; };
    const RuleCase* the_case = nullptr;
    for (const auto& c : r->cases) {
      const Tri t = match_case(c, lookup);
      if (t == Tri::no) continue;
      if (t == Tri::maybe || the_case != nullptr) return false;
      the_case = &c;
    }
    if (the_case == nullptr) return false;
    if (!the_case->result.has_expr()) {
      out = the_case->result;
      return true;
    }
    IntervalEnv env;
    env.constants = &constants_;
    for (const int p : parents(v)) {
      const auto& k = know[static_cast<std::size_t>(p)];
      switch (k.state) {
        case VarKnowledge::State::known:
          if (!k.value.is_exc()) {
            const double x = k.value.numeric();
            env.ranges.emplace(var(p).name, NumInterval{x, x});
          }
          break;
        case VarKnowledge::State::ranged: {
          const auto& range = k.range;
          NumInterval iv{};
          switch (range.tag()) {
            case ValueSet::Tag::real_interval: iv = {range.real_lo(), range.real_hi()}; break;
            case ValueSet::Tag::int_range:
            case ValueSet::Tag::int_enum:
              iv = {static_cast<double>(range.int_lo()), static_cast<double>(range.int_hi())};
              break;
            default: return false;
          }
          env.ranges.emplace(var(p).name, iv);
          break;
        }
        case VarKnowledge::State::excluded: break;  // drops out of sum()
        case VarKnowledge::State::included_unknown:
        case VarKnowledge::State::undetermined: return false;
      }
    }
    try {
      out = the_case->result.evaluate_interval(env);
    } catch (const ValidationError&) {
      return false;
    }
    return true;
  }

  void compute_constants(const GraphSpec& spec, std::vector<std::string>& report) {
    for (const auto& cs : spec.constants) {
      if (index_.count(cs.name)) {
        report.push_back("constant '" + cs.name + "' shadows a variable name");
        continue;
      }
      ExprPtr expr;
      try {
        expr = parse_expr(cs.max_of);
      } catch (const ParseError& e) {
        report.push_back(std::string("constant '") + cs.name + "': " + e.what());
        continue;
      }
      std::set<std::string> refs;
      collect_references(expr, refs);
      std::vector<int> referenced;
      bool bad = false;
      for (const auto& name : refs) {
        if (constants_.count(name)) continue;  // previously computed constant
        if (!has_variable(name)) {
          report.push_back("constant '" + cs.name + "': unknown name '" + name + "'");
          bad = true;
          continue;
        }
        referenced.push_back(index_of(name));
      }
      if (bad) continue;

      // Enumerate the inclusion controllers; bound everything else by range.
      // Exact whenever each referenced variable occurs once and monotonically,
      // which covers sums and products of parent values.
      double best = -std::numeric_limits<double>::infinity();
      bool any = false;
      const bool complete =
          walk_configurations(inclusion_controllers(), [&](const std::vector<VarKnowledge>& know) {
            IntervalEnv env;
            env.constants = &constants_;
            for (const int p : referenced) {
              const auto& k = know[static_cast<std::size_t>(p)];
              if (k.state == VarKnowledge::State::known && !k.value.is_exc()) {
                const double x = k.value.numeric();
                env.ranges.emplace(var(p).name, NumInterval{x, x});
              } else if (k.state == VarKnowledge::State::ranged) {
                const auto& range = k.range;
                if (range.tag() == ValueSet::Tag::real_interval)
                  env.ranges.emplace(var(p).name, NumInterval{range.real_lo(), range.real_hi()});
                else if (range.is_enumerable() && range.tag() != ValueSet::Tag::cat_set)
                  env.ranges.emplace(var(p).name,
                                     NumInterval{static_cast<double>(range.int_lo()),
                                                 static_cast<double>(range.int_hi())});
              }
            }
            try {
              const NumInterval value = eval_expr_interval(expr, env);
              best = std::max(best, value.hi);
              any = true;
            } catch (const ValidationError&) {
              // configuration where a referenced variable is not bounded: skip
            }
          });
      if (!complete || !any) {
        report.push_back("constant '" + cs.name +
                         "': cannot be bounded by enumerating ancestor configurations");
        continue;
      }
      constants_.emplace(cs.name, best);
    }
  }

  void check_rules(std::vector<std::string>& report) const {
    for (int v = 0; v < size(); ++v) {
      const DecreeRule* r = rule(v);
      if (r == nullptr) continue;

      // Mutual exclusivity and joint exhaustiveness over the referenced
      // parents' universal values (EXC counts for excludable parents). Only
      // checkable when every referenced parent is finitely enumerable.
      std::set<int> referenced;
      for (const auto& c : r->cases)
        for (const auto& [parent, test] : c.tests) {
          referenced.insert(parent);
          (void)test;
        }
      bool enumerable = true;
      long combos = 1;
      std::vector<std::vector<Value>> domains;
      std::vector<int> ref_list(referenced.begin(), referenced.end());
      for (const int p : ref_list) {
        if (!var(p).universal.is_enumerable()) {
          enumerable = false;
          break;
        }
        auto values = var(p).universal.enumerate();
        if (var(p).excludable) values.push_back(Value::exc());
        combos *= static_cast<long>(values.size());
        domains.push_back(std::move(values));
        if (combos > 100000) {
          enumerable = false;
          break;
        }
      }
      if (!enumerable) continue;

      std::vector<std::size_t> pick(domains.size(), 0);
      for (;;) {
        std::map<int, Value> assignment;
        for (std::size_t i = 0; i < ref_list.size(); ++i)
          assignment.emplace(ref_list[i], domains[i][pick[i]]);
        int matches = 0;
        for (const auto& c : r->cases) {
          bool ok = true;
          for (const auto& [parent, test] : c.tests) {
            const Value& pv = assignment.at(parent);
            if (!(pv.is_exc() ? test.is_exc_singleton() : test.contains(pv))) {
              ok = false;
              break;
            }
          }
          if (ok) ++matches;
        }
        if (matches != 1) {
          std::string combo;
          for (std::size_t i = 0; i < ref_list.size(); ++i) {
            if (i) combo += ", ";
            combo +=
                var(ref_list[i]).name + "=" + describe(ref_list[i], assignment.at(ref_list[i]));
          }
          report.push_back("rule for '" + var(v).name + "': cases are " +
                           (matches == 0 ? "not exhaustive" : "overlapping") + " at (" + combo +
                           ")");
          break;  // one witness per rule keeps the report readable
        }
        if (pick.empty()) break;
        std::size_t d = 0;
        for (; d < pick.size(); ++d) {
          if (++pick[d] < domains[d].size()) break;
          pick[d] = 0;
        }
        if (d == pick.size()) break;
      }
    }
  }

  void audit_universal_sets(std::vector<std::string>& report) const {
    for (int v = 0; v < size(); ++v) {
      if (parents(v).empty()) continue;

      // Enumerate controllers plus the parents this rule actually tests;
      // everything else is carried as a range. The walk stops at v.
      std::set<int> target_set;
      for (const int c : inclusion_controllers()) target_set.insert(c);
      if (const DecreeRule* r = rule(v))
        for (const auto& c : r->cases)
          for (const auto& [parent, test] : c.tests) {
            target_set.insert(parent);
            (void)test;
          }
      std::vector<int> targets;
      for (const int t : topological_order())
        if (target_set.count(t) && t != v) targets.push_back(t);

      bool enumerable = true;
      for (const int t : targets)
        if (!var(t).universal.is_enumerable()) enumerable = false;
      if (!enumerable) continue;

      SetUnion acc;
      bool resolvable = true;
      const bool complete =
          walk_configurations(targets,
                              [&](const std::vector<VarKnowledge>& know) {
                                const auto& k = know[static_cast<std::size_t>(v)];
                                switch (k.state) {
                                  case VarKnowledge::State::known:
                                    if (k.value.is_exc()) acc.add(ValueSet::exc());
                                    break;  // targets never include v
                                  case VarKnowledge::State::excluded:
                                    acc.add(ValueSet::exc());
                                    break;
                                  case VarKnowledge::State::ranged: acc.add(k.range); break;
                                  case VarKnowledge::State::included_unknown:
                                  case VarKnowledge::State::undetermined:
                                    resolvable = false;
                                    break;
                                }
                              },
                              /*stop_after=*/v);
      if (!complete || !resolvable) continue;  // not auditable; runtime checks still apply

      if (acc.has_exc() != var(v).excludable) {
        report.push_back("universal set of '" + var(v).name + "': variable is " +
                         (var(v).excludable
                              ? "declared excludable but no configuration excludes it"
                              : "excluded by some configuration but not declared excludable"));
        continue;
      }
      if (!acc.equals(var(v).universal))
        report.push_back("universal set of '" + var(v).name +
                         "': declared set differs from the union of restricted sets over all "
                         "ancestor configurations");
    }
  }

  std::string describe(int v, const Value& value) const {
    if (value.is_exc()) return kExcToken;
    if (value.is_real()) return format_real(value.as_real());
    if (value.is_integer()) return std::to_string(value.as_integer());
    return var(v).labels[static_cast<std::size_t>(value.as_category())];
  }

  std::vector<Variable> vars_;
  std::map<std::string, int> index_;
  std::vector<DecreeArc> arcs_;
  std::vector<std::optional<DecreeRule>> rules_;
  std::vector<std::vector<int>> parents_, children_, ancestors_;
  std::vector<char> controls_inclusion_;
  std::vector<int> topo_;
  std::map<std::string, double> constants_;
  std::set<std::string> constant_names_;
  bool acyclic_ = false;
  bool valid_ = false;
};

// ---------------------------------------------------------------------------
// Inclusion signatures.
// ---------------------------------------------------------------------------

/// One reachable inclusion pattern: the fixing values of the inclusion
/// controllers together with the set of included variables.
struct Signature {
  std::vector<Value> fixing;   // aligned with SignatureSet::controllers
  std::vector<char> included;  // per variable
  std::vector<int> free_vars;  // included variables that are not controllers
};

class SignatureSet {
 public:
  /// Enumerates the reachable inclusion patterns; signatures partition the domain.
  static SignatureSet enumerate(const RoleGraph& g) {
    SignatureSet out;
    out.controllers_ = g.inclusion_controllers();
    for (const int c : out.controllers_) {
      if (!g.var(c).universal.is_enumerable())
        throw ValidationError("inclusion-controlling variable '" + g.var(c).name +
                              "' has a continuous domain; signatures are not enumerable");
    }
    std::vector<char> is_controller(static_cast<std::size_t>(g.size()), 0);
    for (const int c : out.controllers_) is_controller[static_cast<std::size_t>(c)] = 1;

    bool determined = true;
    const bool complete =
        g.walk_configurations(out.controllers_, [&](const std::vector<VarKnowledge>& know) {
          Signature sig;
          sig.fixing.reserve(out.controllers_.size());
          for (const int c : out.controllers_)
            sig.fixing.push_back(know[static_cast<std::size_t>(c)].value);
          sig.included.resize(static_cast<std::size_t>(g.size()), 0);
          for (int v = 0; v < g.size(); ++v) {
            const auto& k = know[static_cast<std::size_t>(v)];
            if (k.state == VarKnowledge::State::undetermined) {
              determined = false;
              continue;
            }
            const bool inc = k.state != VarKnowledge::State::excluded &&
                             !(k.state == VarKnowledge::State::known && k.value.is_exc());
            sig.included[static_cast<std::size_t>(v)] = inc ? 1 : 0;
            if (inc && !is_controller[static_cast<std::size_t>(v)]) sig.free_vars.push_back(v);
          }
          out.items_.push_back(std::move(sig));
        });
    if (!complete || !determined)
      throw ValidationError(
          "cannot enumerate signatures: inclusion depends on a variable outside the inclusion "
          "controllers");
    return out;
  }

  const std::vector<int>& controllers() const { return controllers_; }
  const std::vector<Signature>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  const Signature& operator[](std::size_t i) const { return items_[i]; }

  /// Index of the signature matching the controller values of `values`
  /// (a full assignment over the graph); -1 when none matches.
  int match(std::span<const Value> values) const {
    for (std::size_t s = 0; s < items_.size(); ++s) {
      bool ok = true;
      for (std::size_t i = 0; i < controllers_.size(); ++i) {
        if (values[static_cast<std::size_t>(controllers_[i])] != items_[s].fixing[i]) {
          ok = false;
          break;
        }
      }
      if (ok) return static_cast<int>(s);
    }
    return -1;
  }

 private:
  std::vector<int> controllers_;
  std::vector<Signature> items_;
};

}  // namespace metadist
