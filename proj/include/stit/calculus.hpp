#ifndef STIT_CALCULUS_HPP
#define STIT_CALCULUS_HPP

// Rule schemas for the three labelled calculi, a generic matcher for the
// geometric (relational) rules, the closure-instance enumerator, and rule
// application producing premise sequents in the exact printed shape.

#include <optional>
#include <set>
#include <tuple>

#include <json.hpp>

#include "sequent.hpp"

namespace stit {

enum class RuleKind {
  Initial,      // id, comp_G1: close the branch
  Disjunctive,  // or: one premise, splits the formula
  Conjunctive,  // and: two premises
  BoxLike,      // universal modal: consumes principal, fresh label
  DiamondLike,  // existential modal: retained, needs an existing atom
  Geometric,    // relational rule given by conclusion/premise atom patterns
  Subst,        // equality substitution: copies one item across an equality
  System,       // independence-of-agents system members (xstit)
};

// Atom pattern over label variables 0..nvars-1.
struct AtomPat {
  bool is_eq = false;
  RelationTag tag;
  int a = 0, b = 0;

  static AtomPat rel(RelationTag t, int x, int y) { return {false, t, x, y}; }
  static AtomPat eq(int x, int y) { return {true, RelationTag::box(), x, y}; }

  SequentItem instantiate(const std::vector<Label>& assign) const {
    if (is_eq) return SequentItem::eq(assign[a], assign[b]);
    return SequentItem::rel(tag, assign[a], assign[b]);
  }

  bool operator==(const AtomPat& o) const {
    return is_eq == o.is_eq && a == o.a && b == o.b &&
           (is_eq || tag == o.tag);
  }
};

struct RuleSchema {
  std::string name;
  RuleKind kind = RuleKind::Geometric;

  // Logical rules.
  FKind principal = FKind::And;
  AgentId agent = 0;      // Stit/StitDual
  AgentGroup group = 0;   // XStit/XStitDual

  // Geometric rules.
  std::vector<AtomPat> conclusion;
  std::vector<std::vector<AtomPat>> premises;
  int nvars = 0;
  std::vector<int> eigen;

  bool search_enabled = true;  // ser_G / ser_X exist for checking only

  bool has_eigen(int v) const {
    for (int e : eigen)
      if (e == v) return true;
    return false;
  }
};

namespace detail {

inline RuleSchema logical(std::string name, RuleKind kind, FKind principal,
                          AgentId agent = 0, AgentGroup group = 0) {
  RuleSchema r;
  r.name = std::move(name);
  r.kind = kind;
  r.principal = principal;
  r.agent = agent;
  r.group = group;
  return r;
}

inline RuleSchema geometric(std::string name, int nvars,
                            std::vector<AtomPat> conclusion,
                            std::vector<std::vector<AtomPat>> premises,
                            std::vector<int> eigen = {}) {
  RuleSchema r;
  r.name = std::move(name);
  r.kind = RuleKind::Geometric;
  r.nvars = nvars;
  r.conclusion = std::move(conclusion);
  r.premises = std::move(premises);
  r.eigen = std::move(eigen);
  return r;
}

}  // namespace detail

// Coarse item classes, used by the search to tell whether anything a rule
// could match on has appeared since its last empty scan.  Counts per class
// only ever grow along a branch, so an unchanged total is a sound skip.
inline int eq_class() { return 1 << 20; }

inline int rel_class(RelationTag t) {
  return (2 << 20) | ((int)t.kind << 12) | ((int)t.agent << 6) | (int)t.group;
}

inline int lab_class(FKind k, AgentId agent, AgentGroup group) {
  return (3 << 20) | ((int)k << 12) | ((int)agent << 6) | (int)group;
}

inline int item_class(const SequentItem& it) {
  switch (it.type) {
    case SequentItem::Eq: return eq_class();
    case SequentItem::Rel: return rel_class(it.tag);
    case SequentItem::Lab: return lab_class(it.f->kind, it.f->agent, it.f->group);
  }
  return 0;
}

// The relation a modal rule's principal connective quantifies over.
inline RelationTag principal_relation(const RuleSchema& r) {
  Formula probe;
  probe.kind = r.principal;
  probe.agent = r.agent;
  probe.group = r.group;
  return fml_relation(probe);
}

// Operator spelling for a logical rule's principal connective.
inline std::string operator_name(FKind k, AgentId agent, AgentGroup group) {
  switch (k) {
    case FKind::Box: return "[]";
    case FKind::Diamond: return "<>";
    case FKind::Stit: return "[" + std::to_string(agent) + "]";
    case FKind::StitDual: return "<" + std::to_string(agent) + ">";
    case FKind::AgStit: return "[Ag]";
    case FKind::AgStitDual: return "<Ag>";
    case FKind::G: return "G";
    case FKind::F: return "F";
    case FKind::H: return "H";
    case FKind::P: return "P";
    case FKind::XStit: return "[" + group_text(group) + "]x";
    case FKind::XStitDual: return "<" + group_text(group) + ">x";
    case FKind::Next: return "[X]";
    case FKind::NextDual: return "<X>";
    default: return "?";
  }
}

// Table order doubles as the search priority: initial checks, then the
// non-generative logical rules, then relational closure, then the capped
// generative geometric rules, then the label-creating modal rules, with the
// guessing (branching geometric) rules last.
inline std::vector<RuleSchema> rule_table(Logic logic, int agents) {
  using namespace detail;
  std::vector<RuleSchema> t;
  auto box = RelationTag::box();

  // Initial sequents.
  t.push_back(logical("id", RuleKind::Initial, FKind::PosAtom));
  if (logic == Logic::Tstit)
    t.push_back(logical("comp_G1", RuleKind::Initial, FKind::PosAtom));

  // Disjunction is linear and fires early; conjunction branches, so it sits
  // below the label-generating rules and only splits once the cheap closing
  // chains have had their chance.
  t.push_back(logical("or", RuleKind::Disjunctive, FKind::Or));

  // Existential modal rules: retained principal, no new labels.
  t.push_back(logical("<>", RuleKind::DiamondLike, FKind::Diamond));
  if (logic != Logic::Xstit)
    for (AgentId i = 1; i <= agents; ++i)
      t.push_back(logical(operator_name(FKind::StitDual, i, 0),
                          RuleKind::DiamondLike, FKind::StitDual, i));
  if (logic == Logic::Tstit) {
    t.push_back(logical("<Ag>", RuleKind::DiamondLike, FKind::AgStitDual));
    t.push_back(logical("F", RuleKind::DiamondLike, FKind::F));
    t.push_back(logical("P", RuleKind::DiamondLike, FKind::P));
  }
  if (logic == Logic::Xstit) {
    t.push_back(logical("<X>", RuleKind::DiamondLike, FKind::NextDual));
    for (AgentGroup g = 0; g <= full_group(agents); ++g)
      t.push_back(logical(operator_name(FKind::XStitDual, 0, g),
                          RuleKind::DiamondLike, FKind::XStitDual, 0, g));
  }

  // Equality rules (tstit and xstit only).
  if (logic != Logic::Ldm) {
    t.push_back(geometric("refl_eq", 1, {}, {{AtomPat::eq(0, 0)}}));
    t.push_back(geometric("eucl_eq", 3,
                          {AtomPat::eq(0, 1), AtomPat::eq(0, 2)},
                          {{AtomPat::eq(1, 2)}}));
    RuleSchema sub;
    sub.name = "sub_eq";
    sub.kind = RuleKind::Subst;
    t.push_back(sub);
  }

  // Relational closure: settledness is reflexive and euclidean everywhere.
  t.push_back(geometric("refl_box", 1, {}, {{AtomPat::rel(box, 0, 0)}}));
  t.push_back(geometric("eucl_box", 3,
                        {AtomPat::rel(box, 0, 1), AtomPat::rel(box, 0, 2)},
                        {{AtomPat::rel(box, 1, 2)}}));

  if (logic != Logic::Xstit)
    for (AgentId i = 1; i <= agents; ++i) {
      auto ri = RelationTag::agent_rel(i);
      std::string n = std::to_string(i);
      t.push_back(geometric("refl_" + n, 1, {}, {{AtomPat::rel(ri, 0, 0)}}));
      t.push_back(geometric("eucl_" + n, 3,
                            {AtomPat::rel(ri, 0, 1), AtomPat::rel(ri, 0, 2)},
                            {{AtomPat::rel(ri, 1, 2)}}));
      t.push_back(geometric("br_" + n, 2, {AtomPat::rel(ri, 0, 1)},
                            {{AtomPat::rel(box, 0, 1)}}));
    }

  if (logic == Logic::Tstit) {
    auto rag = RelationTag::ag();
    auto rg = RelationTag::g();
    auto rgc = RelationTag::gc();
    auto rh = RelationTag::h();
    t.push_back(geometric("refl_Ag", 1, {}, {{AtomPat::rel(rag, 0, 0)}}));
    t.push_back(geometric("eucl_Ag", 3,
                          {AtomPat::rel(rag, 0, 1), AtomPat::rel(rag, 0, 2)},
                          {{AtomPat::rel(rag, 1, 2)}}));
    for (AgentId i = 1; i <= agents; ++i)
      t.push_back(geometric("agd_" + std::to_string(i), 2,
                            {AtomPat::rel(rag, 0, 1)},
                            {{AtomPat::rel(RelationTag::agent_rel(i), 0, 1)}}));
    t.push_back(geometric("trans_G", 3,
                          {AtomPat::rel(rg, 0, 1), AtomPat::rel(rg, 1, 2)},
                          {{AtomPat::rel(rg, 0, 2)}}));
    t.push_back(geometric("conv_G", 2, {AtomPat::rel(rg, 0, 1)},
                          {{AtomPat::rel(rh, 1, 0)}}));
    t.push_back(geometric("conv_H", 2, {AtomPat::rel(rh, 0, 1)},
                          {{AtomPat::rel(rg, 1, 0)}}));
    t.push_back(geometric("irr_G", 2, {AtomPat::rel(box, 0, 1)},
                          {{AtomPat::rel(rgc, 0, 1)}}));
  }

  if (logic == Logic::Xstit) {
    auto rx = RelationTag::x();
    AgentGroup ag = full_group(agents);
    t.push_back(geometric("eff_empty", 3,
                          {AtomPat::rel(box, 0, 1), AtomPat::rel(rx, 1, 2)},
                          {{AtomPat::rel(RelationTag::grp(0), 0, 2)}}));
    t.push_back(geometric("eff_ag", 3,
                          {AtomPat::rel(rx, 0, 1), AtomPat::rel(box, 1, 2)},
                          {{AtomPat::rel(RelationTag::grp(ag), 0, 2)}}));
    for (AgentGroup a = 0; a <= ag; ++a)
      for (AgentGroup b = 0; b <= ag; ++b)
        if (a != b && group_subset(b, a))
          t.push_back(geometric(
              "cmon_" + group_text(a) + "_" + group_text(b), 2,
              {AtomPat::rel(RelationTag::grp(a), 0, 1)},
              {{AtomPat::rel(RelationTag::grp(b), 0, 1)}}));
    t.push_back(geometric("det_X", 3,
                          {AtomPat::rel(rx, 0, 1), AtomPat::rel(rx, 0, 2)},
                          {{AtomPat::eq(1, 2)}}));
    // Universal members of the independence system.  They sit with the
    // Horn closure rules so a pending obligation is discharged before the
    // generative rules can spawn fresh worlds; the prover only instantiates
    // them against a recorded ioa_e obligation.
    AgentGroup full = full_group(agents);
    for (AgentGroup g = 0; g <= full; ++g) {
      // vars: 0 = the fresh alternative, 1 = anchor, 2 = tail world.
      RuleSchema u1 = geometric("ioa_u1_" + group_text(g), 3,
                                {AtomPat::rel(RelationTag::grp(g), 0, 2)},
                                {{AtomPat::rel(RelationTag::grp(g), 1, 2)}});
      u1.kind = RuleKind::System;
      u1.group = g;
      t.push_back(u1);
      RuleSchema u2 = u1;
      u2.name = "ioa_u2_" + group_text(g);
      t.push_back(u2);
    }
  }

  // Generative geometric rules: introduce labels, capped where noted.
  if (logic != Logic::Xstit) {
    // Independence of agents: pairwise settled alternatives admit a joint
    // successor; one eigenvariable at the end.
    std::vector<AtomPat> concl, prem;
    for (AgentId i = 1; i <= agents; ++i)
      concl.push_back(AtomPat::rel(box, 0, i));
    for (AgentId i = 1; i <= agents; ++i)
      prem.push_back(AtomPat::rel(RelationTag::agent_rel(i), i, agents + 1));
    t.push_back(geometric("ioa", agents + 2, concl, {prem}, {agents + 1}));
  }
  if (logic == Logic::Tstit) {
    auto rag = RelationTag::ag();
    auto rg = RelationTag::g();
    // No choice between undivided histories; eigenvariable 3.
    t.push_back(geometric("ncuh", 4,
                          {AtomPat::rel(rg, 0, 1), AtomPat::rel(box, 1, 2)},
                          {{AtomPat::rel(rag, 0, 3), AtomPat::rel(rg, 3, 2)}},
                          {3}));
  }
  if (logic == Logic::Xstit) {
    auto rx = RelationTag::x();
    AgentGroup ag = full_group(agents);
    t.push_back(geometric("empty_eff", 3,
                          {AtomPat::rel(RelationTag::grp(0), 0, 1)},
                          {{AtomPat::rel(box, 0, 2), AtomPat::rel(rx, 2, 1)}},
                          {2}));
    t.push_back(geometric("ag_eff", 3,
                          {AtomPat::rel(RelationTag::grp(ag), 0, 1)},
                          {{AtomPat::rel(rx, 0, 2), AtomPat::rel(box, 2, 1)}},
                          {2}));
  }

  // Universal modal rules: consume the principal, introduce a fresh label.
  t.push_back(logical("[]", RuleKind::BoxLike, FKind::Box));
  if (logic != Logic::Xstit)
    for (AgentId i = 1; i <= agents; ++i)
      t.push_back(logical(operator_name(FKind::Stit, i, 0), RuleKind::BoxLike,
                          FKind::Stit, i));
  if (logic == Logic::Tstit) {
    t.push_back(logical("[Ag]", RuleKind::BoxLike, FKind::AgStit));
    t.push_back(logical("G", RuleKind::BoxLike, FKind::G));
    t.push_back(logical("H", RuleKind::BoxLike, FKind::H));
  }
  if (logic == Logic::Xstit) {
    t.push_back(logical("[X]", RuleKind::BoxLike, FKind::Next));
    for (AgentGroup g = 0; g <= full_group(agents); ++g)
      t.push_back(logical(operator_name(FKind::XStit, 0, g), RuleKind::BoxLike,
                          FKind::XStit, 0, g));
  }

  // Existential member of the independence system.  It must outrank the
  // conjunction split: the mimicking alternative then receives the goal
  // before any split can clone the remaining work, and each branch closes
  // by discharging the recorded obligation.  Capped per anchor pair.
  if (logic == Logic::Xstit) {
    RuleSchema e = geometric("ioa_e", 4,
                             {AtomPat::rel(box, 0, 1), AtomPat::rel(box, 0, 2)},
                             {{AtomPat::rel(box, 0, 3)}}, {3});
    e.kind = RuleKind::System;
    t.push_back(e);
  }

  t.push_back(logical("and", RuleKind::Conjunctive, FKind::And));

  // Guessing rules: three-way connectedness splits and the totality split
  // of RG against its complement, over any label pair.
  if (logic == Logic::Tstit) {
    auto rg = RelationTag::g();
    auto rgc = RelationTag::gc();
    auto rh = RelationTag::h();
    t.push_back(geometric("conn_G", 3,
                          {AtomPat::rel(rg, 0, 1), AtomPat::rel(rg, 0, 2)},
                          {{AtomPat::rel(rg, 1, 2)},
                           {AtomPat::eq(1, 2)},
                           {AtomPat::rel(rg, 2, 1)}}));
    t.push_back(geometric("conn_H", 3,
                          {AtomPat::rel(rh, 0, 1), AtomPat::rel(rh, 0, 2)},
                          {{AtomPat::rel(rh, 1, 2)},
                           {AtomPat::eq(1, 2)},
                           {AtomPat::rel(rh, 2, 1)}}));
    t.push_back(geometric("comp_G2", 2, {},
                          {{AtomPat::rel(rg, 0, 1)},
                           {AtomPat::rel(rgc, 0, 1)}}));
    // Seriality of the future: fires only when a branch is otherwise
    // saturated (lowest priority) and is capped per branch; open branches
    // report the remaining successorless worlds as the frontier.
    t.push_back(geometric("ser_G", 2, {}, {{AtomPat::rel(rg, 0, 1)}}, {1}));
  }
  if (logic == Logic::Xstit) {
    auto rx = RelationTag::x();
    RuleSchema ser = geometric("ser_X", 2, {}, {{AtomPat::rel(rx, 0, 1)}},
                               {1});
    ser.search_enabled = false;
    t.push_back(ser);
  }

  return t;
}

inline const RuleSchema* find_rule(const std::vector<RuleSchema>& table,
                                   const std::string& name) {
  for (const auto& r : table)
    if (r.name == name) return &r;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Closure instances: unifying label variables of a geometric schema can make
// conclusion atoms collide; the contracted schema must then be admissible.
// The matcher below reuses atom occurrences, so these come for free at
// search time; the enumeration exists for inspection and tests.
// ---------------------------------------------------------------------------

inline std::vector<RuleSchema> closure_instances(const RuleSchema& r) {
  std::vector<RuleSchema> out;
  if (r.kind != RuleKind::Geometric && r.kind != RuleKind::System) return out;
  std::set<std::string> seen;

  auto signature = [](const RuleSchema& s) {
    std::string sig;
    auto atom_sig = [](const AtomPat& a) {
      return (a.is_eq ? std::string("=") : a.tag.text()) + "(" +
             std::to_string(a.a) + "," + std::to_string(a.b) + ")";
    };
    std::vector<std::string> cs;
    for (const auto& a : s.conclusion) cs.push_back(atom_sig(a));
    std::sort(cs.begin(), cs.end());
    for (const auto& c : cs) sig += c + ";";
    sig += "|";
    for (const auto& p : s.premises) {
      std::vector<std::string> ps;
      for (const auto& a : p) ps.push_back(atom_sig(a));
      std::sort(ps.begin(), ps.end());
      for (const auto& a : ps) sig += a + ";";
      sig += "/";
    }
    return sig;
  };
  seen.insert(signature(r));

  std::function<void(const RuleSchema&)> rec = [&](const RuleSchema& cur) {
    int n = cur.nvars;
    for (int i = 0; i < n; ++i) {
      if (cur.has_eigen(i)) continue;
      for (int j = i + 1; j < n; ++j) {
        if (cur.has_eigen(j)) continue;
        // Unify j := i.
        auto subst = [&](AtomPat a) {
          if (a.a == j) a.a = i;
          if (a.b == j) a.b = i;
          return a;
        };
        std::vector<AtomPat> concl;
        bool collided = false;
        for (const auto& a : cur.conclusion) {
          AtomPat s = subst(a);
          bool dup = false;
          for (const auto& c : concl)
            if (c == s) {
              dup = true;
              break;
            }
          if (dup)
            collided = true;
          else
            concl.push_back(s);
        }
        if (!collided) continue;
        RuleSchema contracted = cur;
        contracted.conclusion = concl;
        for (auto& prem : contracted.premises)
          for (auto& a : prem) a = subst(a);
        contracted.name = cur.name + "#c";
        std::string sig = signature(contracted);
        if (seen.insert(sig).second) {
          out.push_back(contracted);
          rec(contracted);
        }
      }
    }
  };
  rec(r);
  for (size_t i = 0; i < out.size(); ++i)
    out[i].name = r.name + "#c" + std::to_string(i + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Rule instances and application.
// ---------------------------------------------------------------------------

struct RuleInstance {
  const RuleSchema* schema = nullptr;
  std::vector<Label> assign;  // geometric: var assignment, eigen slots = -1
  Label plabel = -1;          // logical: label of the principal formula
  Fml pf;                     // logical: the principal formula
  Label target = -1;          // diamond-like: the existing successor
  Label eq_a = -1, eq_b = -1; // sub_eq: the equality used
  SequentItem payload;        // sub_eq: the item being copied

  std::string key() const {
    std::string k = schema->name + "|";
    for (Label l : assign) k += std::to_string(l) + ",";
    if (plabel >= 0) k += "p" + std::to_string(plabel);
    if (pf) k += ":" + render(pf);
    if (target >= 0) k += ">" + std::to_string(target);
    if (eq_a >= 0) k += "e" + std::to_string(eq_a) + "=" + std::to_string(eq_b)
                        + "#" + payload.text();
    return k;
  }
};

namespace detail {

inline bool item_matches_pat(const SequentItem& it, const AtomPat& p) {
  if (p.is_eq) return it.type == SequentItem::Eq;
  return it.type == SequentItem::Rel && it.tag == p.tag;
}

// Backtracking matcher.  Atom occurrences may be reused across pattern
// positions, which silently covers the closure instances.  The visitor
// returns true to stop the enumeration.
template <class F>
inline bool match_geometric(const Sequent& s, const RuleSchema& r, F&& f) {
  std::vector<Label> labels = s.labels();
  if (labels.empty()) return false;
  std::vector<Label> assign(r.nvars, -1);

  auto rec = [&](auto&& self, size_t k) -> bool {
    if (k == r.conclusion.size()) {
      // Remaining non-eigen variables range over all labels of the sequent.
      std::vector<int> free;
      for (int v = 0; v < r.nvars; ++v)
        if (assign[v] < 0 && !r.has_eigen(v)) free.push_back(v);
      auto fill = [&](auto&& fs, size_t fi) -> bool {
        if (fi == free.size()) {
          RuleInstance inst;
          inst.schema = &r;
          inst.assign = assign;
          return f(inst);
        }
        for (Label l : labels) {
          assign[free[fi]] = l;
          if (fs(fs, fi + 1)) {
            assign[free[fi]] = -1;
            return true;
          }
        }
        assign[free[fi]] = -1;
        return false;
      };
      return fill(fill, 0);
    }
    const AtomPat& p = r.conclusion[k];
    for (const auto& it : s.items) {
      if (!item_matches_pat(it, p)) continue;
      Label sa = assign[p.a], sb = assign[p.b];
      if (sa >= 0 && sa != it.a) continue;
      if (sb >= 0 && (p.a == p.b ? it.a : it.b) != sb) continue;
      if (p.a == p.b && it.a != it.b) continue;
      assign[p.a] = it.a;
      assign[p.b] = (p.a == p.b) ? it.a : it.b;
      bool stop = self(self, k + 1);
      assign[p.a] = sa;
      if (p.b != p.a) assign[p.b] = sb;
      if (stop) return true;
    }
    return false;
  };
  return rec(rec, 0);
}

}  // namespace detail

// Enumerates the instances of one schema applicable to a sequent, calling
// the visitor on each; the visitor returns true to stop.  System members
// are matched like geometric rules; the obligation discipline is enforced
// by the prover and the certificate checker, not here.  Enumeration order
// is deterministic (item order, then label order).
template <class F>
inline void visit_applicable(const Sequent& s, const RuleSchema& r, F&& f) {
  switch (r.kind) {
    case RuleKind::Initial:
      break;
    case RuleKind::Disjunctive:
    case RuleKind::Conjunctive:
    case RuleKind::BoxLike:
      for (const auto& it : s.items) {
        if (it.type != SequentItem::Lab || it.f->kind != r.principal) continue;
        if (r.principal == FKind::Stit && it.f->agent != r.agent) continue;
        if (r.principal == FKind::XStit && it.f->group != r.group) continue;
        RuleInstance inst;
        inst.schema = &r;
        inst.plabel = it.a;
        inst.pf = it.f;
        if (f(inst)) return;
      }
      break;
    case RuleKind::DiamondLike: {
      for (const auto& it : s.items) {
        if (it.type != SequentItem::Lab || it.f->kind != r.principal) continue;
        if (r.principal == FKind::StitDual && it.f->agent != r.agent) continue;
        if (r.principal == FKind::XStitDual && it.f->group != r.group) continue;
        RelationTag want = fml_relation(*it.f);
        for (const auto& rel : s.items) {
          if (rel.type != SequentItem::Rel || !(rel.tag == want)) continue;
          if (rel.a != it.a) continue;
          RuleInstance inst;
          inst.schema = &r;
          inst.plabel = it.a;
          inst.pf = it.f;
          inst.target = rel.b;
          if (f(inst)) return;
        }
      }
      break;
    }
    case RuleKind::Geometric:
    case RuleKind::System:
      detail::match_geometric(s, r, f);
      break;
    case RuleKind::Subst:
      for (const auto& eq : s.items) {
        if (eq.type != SequentItem::Eq || eq.a == eq.b) continue;
        for (const auto& it : s.items) {
          bool mentions = (it.a == eq.a) ||
                          (it.type != SequentItem::Lab && it.b == eq.a);
          if (!mentions) continue;
          RuleInstance inst;
          inst.schema = &r;
          inst.eq_a = eq.a;
          inst.eq_b = eq.b;
          inst.payload = it;
          if (f(inst)) return;
        }
      }
      break;
  }
}

inline std::vector<RuleInstance> applicable(const Sequent& s,
                                            const RuleSchema& r) {
  std::vector<RuleInstance> out;
  visit_applicable(s, r, [&](const RuleInstance& inst) {
    out.push_back(inst);
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Indexed presence queries over a sequent, for the redundancy filter.
// ---------------------------------------------------------------------------

// Structurally equal formulas get one id per thread; shared subterms hit the
// pointer memo, everything else goes through the rendered text once.
inline int formula_fid(const Fml& f) {
  thread_local std::map<const Formula*, int> byptr;
  thread_local std::map<std::string, int> bytext;
  // Keyed nodes are pinned for the thread's lifetime: otherwise a freed
  // node's address can recur and the memo would alias distinct formulas.
  thread_local std::vector<Fml> pinned;
  auto hit = byptr.find(f.get());
  if (hit != byptr.end()) return hit->second;
  auto ins = bytext.emplace(render(f), (int)bytext.size() + 1);
  byptr.emplace(f.get(), ins.first->second);
  pinned.push_back(f);
  return ins.first->second;
}

inline int formula_neg_fid(const Fml& f) {
  thread_local std::map<int, int> memo;
  int fid = formula_fid(f);
  auto hit = memo.find(fid);
  if (hit != memo.end()) return hit->second;
  int n = formula_fid(negate(f));
  memo.emplace(fid, n);
  return n;
}

class ItemIndex {
 public:
  ItemIndex() = default;
  ItemIndex(const Sequent& s, const UnionFind& uf) : uf_(uf) {
    for (const auto& it : s.items) add(it);
  }

  // Incremental insert.  Returns false when an equality merged two classes:
  // the modulo keys of older items are then stale and the index must be
  // rebuilt before the next query.
  bool add(const SequentItem& it) {
    labels_.insert(it.a);
    if (it.type != SequentItem::Lab) labels_.insert(it.b);
    bool fine = true;
    if (it.type == SequentItem::Eq && !uf_.same(it.a, it.b)) {
      uf_.unite(it.a, it.b);
      fine = false;
    }
    literal_.insert(key(it, false));
    mod_.insert(key(it, true));
    return fine;
  }

  const std::set<Label>& labels() const { return labels_; }

  bool present_mod(const SequentItem& it) const {
    return mod_.count(key(it, true)) > 0;
  }
  bool present_literal(const SequentItem& it) const {
    return literal_.count(key(it, false)) > 0;
  }

 private:
  using Key = std::tuple<int, Label, Label, int>;
  UnionFind uf_;
  std::set<Label> labels_;
  std::set<Key> literal_, mod_;

  Key key(const SequentItem& it, bool mod) const {
    Label a = mod ? uf_.find(it.a) : it.a;
    if (it.type == SequentItem::Lab)
      return {item_class(it), a, 0, formula_fid(it.f)};
    Label b = mod ? uf_.find(it.b) : it.b;
    return {item_class(it), a, b, 0};
  }
};

// What one premise of an instance adds; eigenvariables get fresh labels
// starting at `first_fresh`.  For consuming rules the principal is removed.
struct AppliedRule {
  std::vector<Sequent> premises;
  std::vector<Label> eigen_labels;
};

inline AppliedRule apply_instance(const Sequent& s, const RuleInstance& inst,
                                  Label first_fresh,
                                  const std::vector<Label>* eigen_override =
                                      nullptr) {
  const RuleSchema& r = *inst.schema;
  AppliedRule out;
  size_t next_override = 0;
  auto fresh = [&](Label fallback) {
    if (eigen_override && next_override < eigen_override->size())
      return (*eigen_override)[next_override++];
    return fallback;
  };

  auto without_principal = [&]() {
    Sequent copy = s;
    for (size_t i = 0; i < copy.items.size(); ++i) {
      const auto& it = copy.items[i];
      if (it.type == SequentItem::Lab && it.a == inst.plabel &&
          fml_equal(it.f, inst.pf)) {
        copy.items.erase(copy.items.begin() + i);
        return copy;
      }
    }
    throw std::logic_error("principal not present");
  };

  switch (r.kind) {
    case RuleKind::Initial:
      break;
    case RuleKind::Disjunctive: {
      Sequent p = without_principal();
      p.add(SequentItem::lab(inst.plabel, inst.pf->left));
      p.add(SequentItem::lab(inst.plabel, inst.pf->right));
      out.premises.push_back(std::move(p));
      break;
    }
    case RuleKind::Conjunctive: {
      Sequent p1 = without_principal();
      Sequent p2 = p1;
      p1.add(SequentItem::lab(inst.plabel, inst.pf->left));
      p2.add(SequentItem::lab(inst.plabel, inst.pf->right));
      out.premises.push_back(std::move(p1));
      out.premises.push_back(std::move(p2));
      break;
    }
    case RuleKind::BoxLike: {
      Label v = fresh(first_fresh);
      out.eigen_labels.push_back(v);
      Sequent p = without_principal();
      p.add(SequentItem::rel(fml_relation(*inst.pf), inst.plabel, v));
      p.add(SequentItem::lab(v, inst.pf->left));
      out.premises.push_back(std::move(p));
      break;
    }
    case RuleKind::DiamondLike: {
      Sequent p = s;
      p.add(SequentItem::lab(inst.target, inst.pf->left));
      out.premises.push_back(std::move(p));
      break;
    }
    case RuleKind::Geometric:
    case RuleKind::System: {
      std::vector<Label> assign = inst.assign;
      Label next = first_fresh;
      for (int e : r.eigen)
        if (assign[e] < 0) {
          assign[e] = fresh(next);
          if (assign[e] == next) ++next;
          out.eigen_labels.push_back(assign[e]);
        }
      for (const auto& prem : r.premises) {
        Sequent p = s;
        for (const auto& a : prem) p.add(a.instantiate(assign));
        out.premises.push_back(std::move(p));
      }
      break;
    }
    case RuleKind::Subst: {
      Sequent p = s;
      p.add(substitute_item(inst.payload, inst.eq_a, inst.eq_b));
      out.premises.push_back(std::move(p));
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Branch closure.
// ---------------------------------------------------------------------------

struct ClosureInfo {
  std::string rule;   // "id" or "comp_G1"
  Label label = 0;    // id: the label; comp_G1: the source label
  Label other = 0;    // comp_G1: the target label
  std::string atom;   // id: the propositional atom
};

inline std::optional<ClosureInfo> closed(const Sequent& s) {
  for (const auto& x : s.items) {
    if (x.type != SequentItem::Lab || x.f->kind != FKind::PosAtom) continue;
    for (const auto& y : s.items)
      if (y.type == SequentItem::Lab && y.f->kind == FKind::NegAtom &&
          y.a == x.a && y.f->atom == x.f->atom)
        return ClosureInfo{"id", x.a, 0, x.f->atom};
  }
  if (s.logic == Logic::Tstit) {
    for (const auto& x : s.items) {
      if (x.type != SequentItem::Rel || x.tag.kind != RelationTag::RG) continue;
      for (const auto& y : s.items)
        if (y.type == SequentItem::Rel && y.tag.kind == RelationTag::RGc &&
            y.a == x.a && y.b == x.b)
          return ClosureInfo{"comp_G1", x.a, x.b, ""};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Redundancy: an instance is skipped when some premise adds nothing new
// modulo the equality classes (for eigenvariables: under some assignment to
// existing labels).  Box-like rules are skipped when already realized.
// ---------------------------------------------------------------------------

inline bool redundant(const ItemIndex& ix, const RuleInstance& inst) {
  const RuleSchema& r = *inst.schema;
  switch (r.kind) {
    case RuleKind::Initial:
    case RuleKind::Disjunctive:
    case RuleKind::Conjunctive:
      return false;  // consume-once; never refired on the same occurrence
    case RuleKind::BoxLike: {
      RelationTag t = fml_relation(*inst.pf);
      for (Label u : ix.labels())
        if (ix.present_mod(SequentItem::rel(t, inst.plabel, u)) &&
            ix.present_mod(SequentItem::lab(u, inst.pf->left)))
          return true;
      return false;
    }
    case RuleKind::DiamondLike:
      return ix.present_mod(SequentItem::lab(inst.target, inst.pf->left));
    case RuleKind::Geometric:
    case RuleKind::System: {
      for (const auto& prem : r.premises) {
        // Assign any unfilled eigenvariables; at most one per rule.
        std::vector<int> holes;
        for (int e : r.eigen)
          if (inst.assign[e] < 0) holes.push_back(e);
        std::vector<Label> assign = inst.assign;
        auto ok = [&](auto&& self, size_t hi) -> bool {
          if (hi == holes.size()) {
            for (const auto& a : prem)
              if (!ix.present_mod(a.instantiate(assign))) return false;
            return true;
          }
          for (Label l : ix.labels()) {
            assign[holes[hi]] = l;
            if (self(self, hi + 1)) return true;
          }
          return false;
        };
        if (ok(ok, 0)) return true;
      }
      return false;
    }
    case RuleKind::Subst:
      // Literal presence: copies must materialize so that closure and the
      // literal matchers can see them.
      return ix.present_literal(
          substitute_item(inst.payload, inst.eq_a, inst.eq_b));
  }
  return false;
}

// Convenience wrapper for callers without a prebuilt index.
inline bool redundant(const Sequent& s, const UnionFind& uf,
                      const RuleInstance& inst) {
  return redundant(ItemIndex(s, uf), inst);
}

// JSON dump of a rule table, for inspection.
inline nlohmann::json rule_table_to_json(const std::vector<RuleSchema>& table) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : table) {
    nlohmann::json j;
    j["name"] = r.name;
    switch (r.kind) {
      case RuleKind::Initial: j["kind"] = "initial"; break;
      case RuleKind::Disjunctive: j["kind"] = "disjunctive"; break;
      case RuleKind::Conjunctive: j["kind"] = "conjunctive"; break;
      case RuleKind::BoxLike: j["kind"] = "box"; break;
      case RuleKind::DiamondLike: j["kind"] = "diamond"; break;
      case RuleKind::Geometric: j["kind"] = "geometric"; break;
      case RuleKind::Subst: j["kind"] = "substitution"; break;
      case RuleKind::System: j["kind"] = "system"; break;
    }
    if (r.kind == RuleKind::Geometric || r.kind == RuleKind::System) {
      auto atom_json = [](const AtomPat& a) {
        nlohmann::json aj;
        aj["atom"] = a.is_eq ? "=" : a.tag.text();
        aj["vars"] = {a.a, a.b};
        return aj;
      };
      nlohmann::json cs = nlohmann::json::array();
      for (const auto& a : r.conclusion) cs.push_back(atom_json(a));
      j["conclusion"] = cs;
      nlohmann::json ps = nlohmann::json::array();
      for (const auto& prem : r.premises) {
        nlohmann::json pj = nlohmann::json::array();
        for (const auto& a : prem) pj.push_back(atom_json(a));
        ps.push_back(pj);
      }
      j["premises"] = ps;
      j["eigen"] = r.eigen;
    }
    arr.push_back(j);
  }
  return arr;
}

}  // namespace stit

#endif
