#ifndef STIT_PROVER_HPP
#define STIT_PROVER_HPP

// Backward proof search with countermodel extraction, proof certificates,
// and the independent certificate checker.

#include "calculus.hpp"
#include "countermodel.hpp"

namespace stit {

enum class Outcome { Derivable, Refuted, Unknown };

inline std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Derivable: return "derivable";
    case Outcome::Refuted: return "refuted";
    case Outcome::Unknown: return "unknown";
  }
  return "?";
}

struct SearchConfig {
  long fuel = 100000;
  int max_fresh_labels = 64;
  int ioa_policy = 1;  // firings allowed per equivalence-class key
  int ser_policy = 2;  // total seriality firings allowed per branch (tstit)
  unsigned seed = 0;   // reserved for corpus generation; search is deterministic
  int threads = 1;     // batch-level parallelism; a single search is sequential
};

struct ProofNode {
  std::string rule;
  Sequent sequent;
  nlohmann::json instantiation = nlohmann::json::object();
  std::vector<ProofNode> children;
};

inline int proof_height(const ProofNode& n) {
  int h = 0;
  for (const auto& c : n.children) h = std::max(h, proof_height(c));
  return h + 1;
}

inline int proof_size(const ProofNode& n) {
  int s = 1;
  for (const auto& c : n.children) s += proof_size(c);
  return s;
}

inline nlohmann::json proof_to_json(const ProofNode& n) {
  nlohmann::json j;
  j["rule"] = n.rule;
  j["sequent"] = n.sequent.text();
  if (!n.instantiation.empty()) j["instantiation"] = n.instantiation;
  nlohmann::json kids = nlohmann::json::array();
  for (const auto& c : n.children) kids.push_back(proof_to_json(c));
  j["children"] = kids;
  return j;
}

inline ProofNode proof_from_json(const nlohmann::json& j, Logic logic,
                                 int agents) {
  ProofNode n;
  n.rule = j.at("rule").get<std::string>();
  n.sequent = parse_sequent(j.at("sequent").get<std::string>(), logic, agents);
  if (j.contains("instantiation")) n.instantiation = j.at("instantiation");
  if (j.contains("children"))
    for (const auto& c : j.at("children"))
      n.children.push_back(proof_from_json(c, logic, agents));
  return n;
}

struct ProveResult {
  Outcome outcome = Outcome::Unknown;
  ProofNode proof;          // Derivable
  Countermodel counter;     // Refuted
  long fuel_used = 0;
  int height = 0;
  std::string note;
};

// ---------------------------------------------------------------------------
// Certificate checking.
// ---------------------------------------------------------------------------

struct CheckResult {
  bool ok = true;
  std::string error;
};

namespace detail {

struct SystemUse {
  const ProofNode* node;
  bool is_u1 = false;
  AgentGroup group = 0;
  Label w4 = -1, anchor = -1;
};

struct SystemIntro {
  const ProofNode* node;
  Label w2 = -1, w3 = -1, w4 = -1;
};

struct CheckContext {
  const std::vector<RuleSchema>* table;
  CheckResult result;
  std::vector<SystemIntro> intros;
  std::vector<SystemUse> uses;
  // ancestry: node pointers on the current path, for discipline checks
  std::map<const ProofNode*, std::vector<const ProofNode*>> path_of;
};

inline void fail(CheckContext& cx, const std::string& msg) {
  if (cx.result.ok) {
    cx.result.ok = false;
    cx.result.error = msg;
  }
}

inline bool labels_contain(const std::vector<Label>& v, Label l) {
  return std::find(v.begin(), v.end(), l) != v.end();
}

// Does some eigen assignment make the applied premises equal the children?
inline bool instance_matches_children(const Sequent& s,
                                      const RuleInstance& inst,
                                      const ProofNode& node) {
  const RuleSchema& r = *inst.schema;
  int eigen_needed = 0;
  if (r.kind == RuleKind::BoxLike) eigen_needed = 1;
  if (r.kind == RuleKind::Geometric || r.kind == RuleKind::System)
    for (int e : r.eigen)
      if (inst.assign[e] < 0) ++eigen_needed;

  std::vector<Label> base_labels = s.labels();
  std::vector<std::vector<Label>> candidates;
  if (eigen_needed == 0) {
    candidates.push_back({});
  } else {
    // Fresh labels must come from the first child and be new.
    std::set<Label> fresh;
    if (!node.children.empty())
      for (Label l : node.children[0].sequent.labels())
        if (!labels_contain(base_labels, l)) fresh.insert(l);
    if ((int)fresh.size() < eigen_needed) return false;
    // All rules here introduce at most one fresh label per slot; try each
    // ordered pick (eigen_needed is 1 throughout the three calculi).
    std::function<void(std::vector<Label>&, std::set<Label>&)> rec =
        [&](std::vector<Label>& acc, std::set<Label>& pool) {
          if ((int)acc.size() == eigen_needed) {
            candidates.push_back(acc);
            return;
          }
          for (Label l : std::set<Label>(pool)) {
            acc.push_back(l);
            pool.erase(l);
            rec(acc, pool);
            pool.insert(l);
            acc.pop_back();
          }
        };
    std::vector<Label> acc;
    rec(acc, fresh);
  }

  Label big = s.max_label() + 1;
  if (!node.children.empty())
    for (const auto& c : node.children)
      big = std::max(big, c.sequent.max_label() + 1);

  for (const auto& eig : candidates) {
    AppliedRule ap = apply_instance(s, inst, big, eig.empty() ? nullptr : &eig);
    if (ap.premises.size() != node.children.size()) return false;
    bool all = true;
    for (size_t i = 0; i < ap.premises.size(); ++i)
      if (!ap.premises[i].same_multiset(node.children[i].sequent)) {
        all = false;
        break;
      }
    if (all) return true;
  }
  return false;
}

// Fast path for the checker: rebuild the instance straight from the recorded
// instantiation and verify the items it relies on are present.  Returns
// nothing when the record is incomplete or does not fit the sequent; the
// caller then falls back to full enumeration (same acceptance, slower).
inline std::optional<RuleInstance> instance_from_record(
    const Sequent& s, const RuleSchema& r, const nlohmann::json& j) {
  RuleInstance inst;
  inst.schema = &r;
  switch (r.kind) {
    case RuleKind::Disjunctive:
    case RuleKind::Conjunctive:
    case RuleKind::BoxLike:
    case RuleKind::DiamondLike: {
      if (!j.contains("label") || !j.contains("formula")) return std::nullopt;
      inst.plabel = parse_label_name(j["label"].get<std::string>());
      std::string want = j["formula"].get<std::string>();
      for (const auto& it : s.items) {
        if (it.type != SequentItem::Lab || it.a != inst.plabel ||
            it.f->kind != r.principal)
          continue;
        if (it.f->agent != r.agent || it.f->group != r.group) continue;
        if (render(it.f) != want) continue;
        inst.pf = it.f;
        break;
      }
      if (!inst.pf) return std::nullopt;
      if (r.kind == RuleKind::DiamondLike) {
        if (!j.contains("to")) return std::nullopt;
        inst.target = parse_label_name(j["to"].get<std::string>());
        if (!s.contains(SequentItem::rel(fml_relation(*inst.pf), inst.plabel,
                                         inst.target)))
          return std::nullopt;
      }
      return inst;
    }
    case RuleKind::Geometric:
    case RuleKind::System: {
      if (!j.contains("assign")) return std::nullopt;
      auto names = j["assign"].get<std::vector<std::string>>();
      if ((int)names.size() != r.nvars) return std::nullopt;
      inst.assign.assign(r.nvars, -1);
      for (int v = 0; v < r.nvars; ++v)
        if (!r.has_eigen(v)) inst.assign[v] = parse_label_name(names[v]);
      for (const auto& pat : r.conclusion)
        if (!s.contains(pat.instantiate(inst.assign))) return std::nullopt;
      return inst;
    }
    case RuleKind::Subst: {
      if (!j.contains("eq") || !j.contains("item")) return std::nullopt;
      auto eq = j["eq"].get<std::vector<std::string>>();
      if (eq.size() != 2) return std::nullopt;
      inst.eq_a = parse_label_name(eq[0]);
      inst.eq_b = parse_label_name(eq[1]);
      Sequent one =
          parse_sequent(j["item"].get<std::string>(), s.logic, s.agents);
      if (one.items.size() != 1) return std::nullopt;
      inst.payload = one.items[0];
      if (!s.contains(SequentItem::eq(inst.eq_a, inst.eq_b))) return std::nullopt;
      if (!s.contains(inst.payload)) return std::nullopt;
      return inst;
    }
    default:
      return std::nullopt;
  }
}

inline void check_node(CheckContext& cx, const ProofNode& node,
                       std::vector<const ProofNode*>& path) {
  if (!cx.result.ok) return;
  const Sequent& s = node.sequent;
  const RuleSchema* schema = find_rule(*cx.table, node.rule);
  if (!schema) {
    fail(cx, "unknown rule '" + node.rule + "'");
    return;
  }

  path.push_back(&node);
  cx.path_of[&node] = path;

  if (schema->kind == RuleKind::Initial) {
    auto ci = closed(s);
    bool ok = false;
    if (node.rule == "id") {
      for (const auto& x : s.items)
        if (x.type == SequentItem::Lab && x.f->kind == FKind::PosAtom)
          for (const auto& y : s.items)
            if (y.type == SequentItem::Lab && y.f->kind == FKind::NegAtom &&
                y.a == x.a && y.f->atom == x.f->atom)
              ok = true;
    } else if (node.rule == "comp_G1") {
      for (const auto& x : s.items)
        if (x.type == SequentItem::Rel && x.tag.kind == RelationTag::RG)
          for (const auto& y : s.items)
            if (y.type == SequentItem::Rel &&
                y.tag.kind == RelationTag::RGc && y.a == x.a && y.b == x.b)
              ok = true;
    }
    (void)ci;
    if (!ok)
      fail(cx, "rule " + node.rule + " not applicable: no closing pair in '" +
                   s.text() + "'");
    else if (!node.children.empty())
      fail(cx, "initial sequent must be a leaf");
    path.pop_back();
    return;
  }

  size_t expected = 1;
  switch (schema->kind) {
    case RuleKind::Conjunctive: expected = 2; break;
    case RuleKind::Geometric:
    case RuleKind::System: expected = schema->premises.size(); break;
    default: expected = 1; break;
  }
  if (node.children.size() != expected) {
    fail(cx, "wrong number of premises for rule " + node.rule + ": expected " +
                 std::to_string(expected) + ", found " +
                 std::to_string(node.children.size()));
    path.pop_back();
    return;
  }

  // Eigen label declared explicitly but not fresh: report it precisely.
  if (node.instantiation.contains("fresh")) {
    Label f = parse_label_name(node.instantiation["fresh"].get<std::string>());
    if (labels_contain(s.labels(), f)) {
      fail(cx, "eigenlabel " + label_name(f) + " not fresh for rule " +
                   node.rule);
      path.pop_back();
      return;
    }
  }

  std::vector<RuleInstance> candidates;
  if (auto direct = instance_from_record(s, *schema, node.instantiation))
    candidates.push_back(std::move(*direct));
  else
    candidates = applicable(s, *schema);
  // Narrow by the recorded instantiation when present.
  auto keep = [&](const RuleInstance& inst) {
    const auto& j = node.instantiation;
    if (j.contains("label") &&
        inst.plabel != parse_label_name(j["label"].get<std::string>()))
      return false;
    if (j.contains("formula") && inst.pf &&
        render(inst.pf) != j["formula"].get<std::string>())
      return false;
    if (j.contains("to") &&
        inst.target != parse_label_name(j["to"].get<std::string>()))
      return false;
    if (j.contains("assign")) {
      auto names = j["assign"].get<std::vector<std::string>>();
      if (names.size() != inst.assign.size()) return false;
      for (size_t i = 0; i < names.size(); ++i) {
        if (inst.assign[i] < 0) continue;  // eigen slot, resolved later
        if (parse_label_name(names[i]) != inst.assign[i]) return false;
      }
    }
    return true;
  };
  candidates.erase(
      std::remove_if(candidates.begin(), candidates.end(),
                     [&](const RuleInstance& i) { return !keep(i); }),
      candidates.end());

  if (candidates.empty()) {
    fail(cx, "rule " + node.rule + " not applicable to '" + s.text() + "'");
    path.pop_back();
    return;
  }

  const RuleInstance* matched = nullptr;
  for (const auto& inst : candidates)
    if (instance_matches_children(s, inst, node)) {
      matched = &inst;
      break;
    }
  if (!matched) {
    fail(cx, "premise mismatch for rule " + node.rule + " at '" + s.text() +
                 "'");
    path.pop_back();
    return;
  }

  // Record system bookkeeping for the discipline check.
  if (schema->kind == RuleKind::System) {
    if (node.rule == "ioa_e") {
      SystemIntro in;
      in.node = &node;
      in.w2 = matched->assign[1];
      in.w3 = matched->assign[2];
      // The fresh label is whatever the child introduced.
      std::vector<Label> base = s.labels();
      for (Label l : node.children[0].sequent.labels())
        if (!labels_contain(base, l)) in.w4 = l;
      cx.intros.push_back(in);
    } else {
      SystemUse use;
      use.node = &node;
      use.is_u1 = node.rule.rfind("ioa_u1", 0) == 0;
      use.group = schema->group;
      use.w4 = matched->assign[0];
      use.anchor = matched->assign[1];
      cx.uses.push_back(use);
    }
  }

  for (const auto& c : node.children) check_node(cx, c, path);
  path.pop_back();
}

inline bool on_same_path(const CheckContext& cx, const ProofNode* a,
                         const ProofNode* b) {
  const auto& pa = cx.path_of.at(a);
  const auto& pb = cx.path_of.at(b);
  return std::find(pa.begin(), pa.end(), b) != pa.end() ||
         std::find(pb.begin(), pb.end(), a) != pb.end();
}

inline void check_system_discipline(CheckContext& cx) {
  if (!cx.result.ok) return;
  for (const auto& use : cx.uses) {
    // The use must sit below a matching introduction.
    const SystemIntro* owner = nullptr;
    const auto& path = cx.path_of.at(use.node);
    for (const auto& in : cx.intros) {
      if (in.w4 != use.w4) continue;
      if (use.is_u1 && in.w2 != use.anchor) continue;
      if (!use.is_u1 && in.w3 != use.anchor) continue;
      if (std::find(path.begin(), path.end(), in.node) == path.end()) continue;
      owner = &in;
      break;
    }
    if (!owner) {
      fail(cx, "system discipline violated: " + use.node->rule +
                   " has no matching ioa_e above it");
      return;
    }
  }
  for (const auto& in : cx.intros) {
    std::vector<const SystemUse*> u1s, u2s;
    for (const auto& use : cx.uses) {
      if (use.w4 != in.w4) continue;
      const auto& path = cx.path_of.at(use.node);
      if (std::find(path.begin(), path.end(), in.node) == path.end()) continue;
      if (use.is_u1 && in.w2 == use.anchor) u1s.push_back(&use);
      if (!use.is_u1 && in.w3 == use.anchor) u2s.push_back(&use);
    }
    if (u1s.empty() && u2s.empty()) continue;
    if (u1s.empty() || u2s.empty()) {
      fail(cx,
           "system discipline violated: ioa_e used on one side only");
      return;
    }
    for (const auto* a : u1s)
      for (const auto* b : u2s) {
        if (on_same_path(cx, a->node, b->node)) {
          fail(cx,
               "system discipline violated: ioa_u1 and ioa_u2 share a branch");
          return;
        }
        if (a->group & b->group) {
          fail(cx, "system discipline violated: groups " +
                       group_text(a->group) + " and " + group_text(b->group) +
                       " overlap");
          return;
        }
      }
  }
}

}  // namespace detail

inline CheckResult check_proof(const ProofNode& root, Logic logic, int agents) {
  std::vector<RuleSchema> table = rule_table(logic, agents);
  detail::CheckContext cx;
  cx.table = &table;
  std::vector<const ProofNode*> path;
  detail::check_node(cx, root, path);
  detail::check_system_discipline(cx);
  return cx.result;
}

// ---------------------------------------------------------------------------
// Search.
// ---------------------------------------------------------------------------

namespace detail {

struct Obligation {
  Label w2 = -1, w3 = -1, w4 = -1;
  bool used = false;
};

struct Branch {
  Sequent seq;   // current sequent, printed shape
  Sequent all;   // cumulative: every item ever on this branch
  Label next_fresh = 0;
  std::vector<Obligation> obligations;
  std::map<std::string, int> system_counts;

  // Change tracking: item counts per coarse class, and per-schema signatures
  // recorded when a scan found nothing, so saturated schemas are skipped.
  std::map<int, long> counts;
  std::vector<long> watermark;

  // Presence index over `all`, maintained incrementally; an equality merge
  // forces a rebuild on the next refresh.
  ItemIndex index;
  bool index_fresh = false;

  void add_all(const SequentItem& it) {
    counts[item_class(it)]++;
    all.add(it);
    if (index_fresh && !index.add(it)) index_fresh = false;
  }

  void refresh_index() {
    if (index_fresh) return;
    index = ItemIndex(all, equality_classes(all));
    index_fresh = true;
  }

  void init_counts() {
    counts.clear();
    for (const auto& it : all.items) counts[item_class(it)]++;
  }
};

struct SolveOut {
  enum Status { ClosedS, OpenS, ExhaustedS } status = ExhaustedS;
  ProofNode proof;
  Branch open_branch;
  // Sibling premises left unexplored when open_branch surfaced.  An open
  // branch refutes on its own, but if it later closes (the countermodel
  // repair loop can close it), these still decide the sequent.
  std::vector<Branch> deferred;
  std::string reason;
};

class Searcher {
 public:
  Searcher(Logic logic, int agents, const SearchConfig& cfg)
      : cfg_(cfg), table_(rule_table(logic, agents)), fuel_(cfg.fuel) {
    build_watch();
  }

  bool enable_system = false;
  long fuel_used() const { return cfg_.fuel - fuel_; }

  SolveOut solve(Branch b) {
    std::vector<ProofNode> chain;
    for (;;) {
      if (auto ci = closed(b.seq)) {
        ProofNode leaf;
        leaf.rule = ci->rule;
        leaf.sequent = b.seq;
        if (ci->rule == "id") {
          leaf.instantiation["label"] = label_name(ci->label);
          leaf.instantiation["atom"] = ci->atom;
        } else {
          leaf.instantiation["from"] = label_name(ci->label);
          leaf.instantiation["to"] = label_name(ci->other);
        }
        SolveOut out;
        out.status = SolveOut::ClosedS;
        out.proof = fold(std::move(chain), std::move(leaf));
        return out;
      }

      bool capped = false;
      std::vector<RuleInstance> batch = pick(b, capped);
      if (batch.empty()) {
        SolveOut out;
        if (capped) {
          out.status = SolveOut::ExhaustedS;
          out.reason = "independence firing cap reached";
        } else {
          out.status = SolveOut::OpenS;
          out.open_branch = std::move(b);
        }
        return out;
      }

      static const bool trace = std::getenv("STIT_TRACE") != nullptr;

      // Within a batch, instances fired earlier can make later ones
      // pointless; track the additions to skip those for free.
      std::set<std::string> applied;
      bool branched = false;
      std::optional<SolveOut> branched_out;
      for (size_t bi = 0; bi < batch.size() && !branched; ++bi) {
        const RuleInstance& inst = batch[bi];
        if (batch.size() > 1) {
          // Horn batch: all additions concrete; skip if nothing is new.
          std::vector<std::string> keys;
          std::vector<SequentItem> adds;
          if (inst.schema->kind == RuleKind::Subst) {
            adds.push_back(
                substitute_item(inst.payload, inst.eq_a, inst.eq_b));
          } else {
            for (const auto& a : inst.schema->premises[0])
              adds.push_back(a.instantiate(inst.assign));
          }
          bool all_there = true;
          for (const auto& it : adds) {
            keys.push_back(it.text());
            if (!applied.count(keys.back()) && !b.seq.contains(it))
              all_there = false;
          }
          if (all_there) continue;
          for (const auto& k : keys) applied.insert(k);
        }

        if (--fuel_ < 0) {
          SolveOut out;
          out.reason = "fuel exhausted";
          return out;
        }
        if (trace)
          fprintf(stderr, "[%ld] %s items=%zu fresh=%d key=%s\n", fuel_used(),
                  inst.schema->name.c_str(), b.seq.items.size(), b.next_fresh,
                  inst.key().c_str());

        AppliedRule ap = apply_instance(b.seq, inst, b.next_fresh);
        if (!ap.eigen_labels.empty() &&
            b.next_fresh + (Label)ap.eigen_labels.size() >
                cfg_.max_fresh_labels) {
          SolveOut out;
          out.reason = "fresh label limit reached";
          return out;
        }

        ProofNode node;
        node.rule = inst.schema->name;
        node.sequent = b.seq;
        node.instantiation = describe(inst, ap);

        size_t consumed = 0;
        switch (inst.schema->kind) {
          case RuleKind::Disjunctive:
          case RuleKind::Conjunctive:
          case RuleKind::BoxLike: consumed = 1; break;
          default: break;
        }
        size_t base = b.seq.items.size() - consumed;

        bump_system_count(b, inst);

        if (ap.premises.size() == 1) {
          for (size_t i = base; i < ap.premises[0].items.size(); ++i)
            b.add_all(ap.premises[0].items[i]);
          b.seq = std::move(ap.premises[0]);
          b.next_fresh += (Label)ap.eigen_labels.size();
          note_obligations(b, inst, ap);
          chain.push_back(std::move(node));
          continue;
        }

        // Branching rule: solve the children; an open child refutes, a
        // closed set of children proves.
        std::vector<ProofNode> kids;
        std::optional<SolveOut> exhausted;
        auto make_child = [&](size_t i) {
          Branch child = b;
          for (size_t k = base; k < ap.premises[i].items.size(); ++k)
            child.add_all(ap.premises[i].items[k]);
          child.seq = ap.premises[i];
          child.next_fresh += (Label)ap.eigen_labels.size();
          return child;
        };
        for (size_t i = 0; i < ap.premises.size(); ++i) {
          SolveOut sub = solve(make_child(i));
          if (sub.status == SolveOut::OpenS) {
            for (size_t k = i + 1; k < ap.premises.size(); ++k)
              sub.deferred.push_back(make_child(k));
            return sub;
          }
          if (sub.status == SolveOut::ExhaustedS) {
            exhausted = std::move(sub);
            continue;
          }
          kids.push_back(std::move(sub.proof));
        }
        if (exhausted) return std::move(*exhausted);
        node.children = std::move(kids);
        SolveOut out;
        out.status = SolveOut::ClosedS;
        out.proof = fold(std::move(chain), std::move(node));
        branched_out = std::move(out);
        branched = true;
      }
      if (branched) return std::move(*branched_out);
    }
  }

 private:
  SearchConfig cfg_;
  std::vector<RuleSchema> table_;
  long fuel_;

  // What each schema matches on; see Branch change tracking.
  struct Watch {
    std::vector<int> classes;
    bool labels = false;  // instances also range over labels
    bool total = false;   // any new item matters (sub_eq)
  };
  std::vector<Watch> watch_;

  void build_watch() {
    for (const auto& r : table_) {
      Watch w;
      switch (r.kind) {
        case RuleKind::Initial:
          break;
        case RuleKind::Disjunctive:
        case RuleKind::Conjunctive:
        case RuleKind::BoxLike:
          w.classes.push_back(lab_class(r.principal, r.agent, r.group));
          break;
        case RuleKind::DiamondLike:
          w.classes.push_back(lab_class(r.principal, r.agent, r.group));
          w.classes.push_back(rel_class(principal_relation(r)));
          break;
        case RuleKind::Subst:
          w.total = true;
          break;
        case RuleKind::Geometric:
        case RuleKind::System: {
          std::set<int> covered;
          for (const auto& p : r.conclusion) {
            w.classes.push_back(p.is_eq ? eq_class() : rel_class(p.tag));
            covered.insert(p.a);
            covered.insert(p.b);
          }
          for (int v = 0; v < r.nvars; ++v)
            if (!r.has_eigen(v) && !covered.count(v)) w.labels = true;
          if (r.conclusion.empty()) w.labels = true;
          break;
        }
      }
      watch_.push_back(std::move(w));
    }
  }

  long watch_sig(const Branch& b, size_t si) const {
    const Watch& w = watch_[si];
    if (w.total) return (long)b.all.items.size();
    long s = 0;
    for (int c : w.classes) {
      auto it = b.counts.find(c);
      if (it != b.counts.end()) s += it->second;
    }
    if (w.labels) s += b.next_fresh;
    return s;
  }

  static ProofNode fold(std::vector<ProofNode> chain, ProofNode last) {
    while (!chain.empty()) {
      chain.back().children.clear();
      chain.back().children.push_back(std::move(last));
      last = std::move(chain.back());
      chain.pop_back();
    }
    return last;
  }

  nlohmann::json describe(const RuleInstance& inst, const AppliedRule& ap) {
    nlohmann::json j = nlohmann::json::object();
    const RuleSchema& r = *inst.schema;
    if (inst.pf) {
      j["label"] = label_name(inst.plabel);
      j["formula"] = render(inst.pf);
    }
    if (r.kind == RuleKind::DiamondLike) j["to"] = label_name(inst.target);
    if (r.kind == RuleKind::BoxLike && !ap.eigen_labels.empty())
      j["fresh"] = label_name(ap.eigen_labels[0]);
    if (r.kind == RuleKind::Geometric || r.kind == RuleKind::System) {
      std::vector<Label> assign = inst.assign;
      size_t e = 0;
      for (int ev : r.eigen)
        if (assign[ev] < 0 && e < ap.eigen_labels.size())
          assign[ev] = ap.eigen_labels[e++];
      std::vector<std::string> names;
      for (Label l : assign) names.push_back(label_name(l));
      j["assign"] = names;
      if (!ap.eigen_labels.empty())
        j["fresh"] = label_name(ap.eigen_labels[0]);
    }
    if (r.kind == RuleKind::Subst) {
      j["eq"] = {label_name(inst.eq_a), label_name(inst.eq_b)};
      j["item"] = inst.payload.text();
    }
    return j;
  }

  std::string system_key(const Branch& b, const RuleInstance& inst) const {
    UnionFind uf = equality_classes(b.seq);
    std::vector<Label> cls;
    if (inst.schema->name == "ioa_e") {
      // Key on the anchor pair only.  The settledness root is immaterial
      // (the cell is an equivalence class) and keying on it would let every
      // fresh alternative license another firing for the same anchors.
      cls.push_back(uf.find(inst.assign[1]));
      cls.push_back(uf.find(inst.assign[2]));
    } else
      for (Label l : inst.assign)
        if (l >= 0) cls.push_back(uf.find(l));
    std::sort(cls.begin(), cls.end());
    std::string key = inst.schema->name + "|";
    for (Label l : cls) key += std::to_string(l) + ",";
    return key;
  }

  void bump_system_count(Branch& b, const RuleInstance& inst) {
    if (inst.schema->name == "ioa" || inst.schema->name == "ioa_e")
      b.system_counts[system_key(b, inst)]++;
    else if (inst.schema->name == "ser_G")
      b.system_counts["ser_G"]++;
  }

  void note_obligations(Branch& b, const RuleInstance& inst,
                        const AppliedRule& ap) {
    const std::string& n = inst.schema->name;
    if (n == "ioa_e") {
      Obligation ob;
      ob.w2 = inst.assign[1];
      ob.w3 = inst.assign[2];
      ob.w4 = ap.eigen_labels[0];
      b.obligations.push_back(ob);
    } else if (n.rfind("ioa_u", 0) == 0) {
      for (auto& ob : b.obligations)
        if (!ob.used && ob.w4 == inst.assign[0] &&
            (ob.w2 == inst.assign[1] || ob.w3 == inst.assign[1])) {
          ob.used = true;
          break;
        }
    }
  }

  // The ldm/tstit independence rule: matching its two-box conclusion
  // against the euclidean-saturated branch is quartic in the labels, and
  // only instances whose non-root slots carry a per-agent choice
  // commitment can ever progress a proof.  Enumerate those directly.
  std::vector<RuleInstance> gen_ioa(const Branch& b,
                                    const RuleSchema& schema) const {
    std::vector<RuleInstance> out;
    int agents = schema.nvars - 2;
    std::vector<std::vector<Label>> anchors(agents + 1);
    for (const auto& it : b.seq.items)
      if (it.type == SequentItem::Lab && it.f->kind == FKind::StitDual &&
          it.f->agent >= 1 && it.f->agent <= agents)
        anchors[it.f->agent].push_back(it.a);
    for (auto& v : anchors) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      }
    auto rbox = RelationTag::box();
    std::vector<Label> labels = b.seq.labels();
    std::vector<Label> sel(agents + 1, -1);
    auto rec = [&](auto&& self, int i) -> void {
      if (i > agents) {
        for (Label w : labels) {
          bool ok = true;
          for (int j = 1; j <= agents && ok; ++j)
            if (!b.index.present_mod(SequentItem::rel(rbox, w, sel[j])))
              ok = false;
          if (!ok) continue;
          RuleInstance inst;
          inst.schema = &schema;
          inst.assign.assign(schema.nvars, -1);
          inst.assign[0] = w;
          for (int j = 1; j <= agents; ++j) inst.assign[j] = sel[j];
          out.push_back(std::move(inst));
        }
        return;
      }
      for (Label a : anchors[i]) {
        sel[i] = a;
        self(self, i + 1);
      }
    };
    rec(rec, 1);
    std::sort(out.begin(), out.end(),
              [](const RuleInstance& x, const RuleInstance& y) {
                return x.key() < y.key();
              });
    return out;
  }

  // ioa_e needs guided instantiation: its premise is one reflexively
  // satisfiable box atom, so the generic redundancy test never lets it
  // fire.  Useful anchors are the worlds committed to a group choice,
  // i.e. those carrying a retained <A>x item; two anchors with disjoint
  // groups under a common settledness predecessor give an instance.
  std::vector<RuleInstance> gen_system_e(const Branch& b,
                                         const RuleSchema& schema) const {
    std::vector<RuleInstance> out;
    std::vector<std::pair<Label, AgentGroup>> anchors;
    for (const auto& it : b.seq.items)
      if (it.type == SequentItem::Lab && it.f->kind == FKind::XStitDual)
        anchors.push_back({it.a, it.f->group});
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
    auto rbox = RelationTag::box();
    std::vector<Label> labels = b.seq.labels();
    for (const auto& [wa, ga] : anchors)
      for (const auto& [wb, gb] : anchors) {
        if (ga & gb) continue;
        for (Label w1 : labels) {
          if (!b.index.present_mod(SequentItem::rel(rbox, w1, wa)) ||
              !b.index.present_mod(SequentItem::rel(rbox, w1, wb)))
            continue;
          RuleInstance inst;
          inst.schema = &schema;
          inst.assign = {w1, wa, wb, -1};
          out.push_back(inst);
        }
      }
    std::sort(out.begin(), out.end(),
              [](const RuleInstance& x, const RuleInstance& y) {
                return x.key() < y.key();
              });
    return out;
  }

  std::vector<RuleInstance> gen_system_u(const Branch& b,
                                         const RuleSchema& schema) const {
    std::vector<RuleInstance> out;
    bool is_u1 = schema.name.rfind("ioa_u1", 0) == 0;
    for (const auto& ob : b.obligations) {
      if (ob.used) continue;
      Label anchor = is_u1 ? ob.w2 : ob.w3;
      // Only mimic an anchor that is committed to this very group choice;
      // otherwise the added atom is dead weight and, worse, consumes the
      // obligation on a branch where the partner rule was needed.
      bool committed = false;
      for (const auto& it : b.seq.items)
        if (it.type == SequentItem::Lab && it.a == anchor &&
            it.f->kind == FKind::XStitDual && it.f->group == schema.group)
          committed = true;
      if (!committed) continue;
      for (const auto& it : b.seq.items) {
        if (it.type != SequentItem::Rel ||
            it.tag.kind != RelationTag::RGroup || it.a != ob.w4)
          continue;
        if (it.tag.group != schema.group) continue;
        RuleInstance inst;
        inst.schema = &schema;
        inst.assign = {ob.w4, anchor, it.b};
        out.push_back(inst);
      }
    }
    std::sort(out.begin(), out.end(),
              [](const RuleInstance& x, const RuleInstance& y) {
                return x.key() < y.key();
              });
    return out;
  }

  // Returns the instances to fire next: a single instance in general, or
  // every pending instance of one Horn schema (single premise, nothing
  // fresh) so that relational closure saturates in one episode instead of
  // re-matching per atom.
  std::vector<RuleInstance> pick(Branch& b, bool& capped) {
    // Redundancy is judged against the cumulative branch: items consumed by
    // the logical rules still count as handled.
    b.refresh_index();
    const ItemIndex& ix = b.index;
    std::vector<RuleInstance> out;
    if (b.watermark.size() != table_.size())
      b.watermark.assign(table_.size(), -1);
    for (size_t si = 0; si < table_.size(); ++si) {
      const RuleSchema& schema = table_[si];
      if (!schema.search_enabled) continue;
      if (schema.kind == RuleKind::System && !enable_system) continue;
      long sig = watch_sig(b, si);
      if (b.watermark[si] == sig) continue;
      bool horn = (schema.kind == RuleKind::Geometric ||
                   schema.kind == RuleKind::Subst) &&
                  schema.eigen.empty() &&
                  (schema.kind == RuleKind::Subst ||
                   schema.premises.size() == 1);
      bool capped_here = false;
      auto consider = [&](const RuleInstance& inst) {
        // ioa_e is exempt: guided generation plus the firing cap stand in
        // for the (vacuous) premise-satisfiability test.
        if (inst.schema->name != "ioa_e" && redundant(ix, inst)) return false;
        if (inst.schema->name == "ser_G") {
          // Over the cap the branch simply goes open; extraction reports the
          // successorless worlds as the frontier.
          auto it = b.system_counts.find("ser_G");
          if (it != b.system_counts.end() && it->second >= cfg_.ser_policy)
            return false;
        }
        if (inst.schema->name == "ioa" || inst.schema->name == "ioa_e") {
          auto it = b.system_counts.find(system_key(b, inst));
          if (it != b.system_counts.end() && it->second >= cfg_.ioa_policy) {
            capped = true;
            capped_here = true;
            return false;
          }
        }
        out.push_back(inst);
        return !horn;  // Horn schemas collect everything in one pass
      };
      if (schema.kind == RuleKind::System &&
          schema.name.rfind("ioa_u", 0) == 0) {
        for (const auto& inst : gen_system_u(b, schema))
          if (consider(inst)) break;
      } else if (schema.kind == RuleKind::System && schema.name == "ioa_e") {
        for (const auto& inst : gen_system_e(b, schema))
          if (consider(inst)) break;
      } else if (schema.name == "ioa") {
        for (const auto& inst : gen_ioa(b, schema))
          if (consider(inst)) break;
      } else {
        visit_applicable(b.seq, schema, consider);
      }
      if (!out.empty()) return out;
      if (!capped_here) b.watermark[si] = sig;
    }
    return out;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// prove(): search, extraction, self-checked certificates.
// ---------------------------------------------------------------------------

inline ProveResult prove(const Sequent& root, const SearchConfig& cfg = {}) {
  ProveResult res;
  detail::Searcher searcher(root.logic, root.agents, cfg);

  auto make_branch = [&]() {
    detail::Branch b;
    b.seq = root;
    b.all = root;
    b.next_fresh = root.max_label() + 1;
    b.init_counts();
    return b;
  };

  auto certify = [&](detail::SolveOut& so) {
    if (!so.proof.sequent.same_multiset(root)) {
      res.outcome = Outcome::Unknown;
      res.note = "certificate root does not match the goal";
      return;
    }
    CheckResult c = check_proof(so.proof, root.logic, root.agents);
    if (!c.ok) {
      res.outcome = Outcome::Unknown;
      res.note = "certificate self-check failed: " + c.error;
      return;
    }
    res.outcome = Outcome::Derivable;
    res.proof = std::move(so.proof);
    res.height = proof_height(res.proof);
  };

  // Work one open branch: 0 refuted (res set), 1 branch derivable, 2 gave
  // up and res set to Unknown, 3 extraction failed (why set).  Repairs may
  // close the branch; that never proves the root, since closed siblings of
  // this branch were dropped, so a closure here just moves on.
  auto try_branch = [&](detail::Branch open,
                        std::vector<detail::Branch>& pending,
                        std::string* why) -> int {
    detail::SolveOut so = searcher.solve(std::move(open));
    if (so.status == detail::SolveOut::ClosedS) return 1;
    if (so.status == detail::SolveOut::ExhaustedS) {
      res.outcome = Outcome::Unknown;
      res.note = so.reason;
      return 2;
    }
    for (auto& d : so.deferred) pending.push_back(std::move(d));
    open = std::move(so.open_branch);
    Countermodel cm = extract_countermodel(open.all);
    int guard = 32, ser_guard = 8;
    while (!cm.ok && guard-- > 0) {
      std::vector<SequentItem> add;
      if (cm.ser_x_label >= 0) {
        // A completed next-state self loop broke falsification: give the
        // world a genuine successor and keep searching.
        if (ser_guard-- <= 0) break;
        add.push_back(
            SequentItem::rel(RelationTag::x(), cm.ser_x_label, -1));
      } else if (!cm.repair.empty()) {
        add = cm.repair;
      } else {
        break;
      }
      Label fresh = open.next_fresh++;
      for (auto it : add) {
        if (it.b == -1) it.b = fresh;
        open.seq.add(it);
        open.add_all(it);
      }
      open.watermark.clear();
      detail::SolveOut so2 = searcher.solve(std::move(open));
      if (so2.status == detail::SolveOut::ClosedS) return 1;
      if (so2.status == detail::SolveOut::ExhaustedS) {
        res.outcome = Outcome::Unknown;
        res.note = so2.reason;
        return 2;
      }
      for (auto& d : so2.deferred) pending.push_back(std::move(d));
      open = std::move(so2.open_branch);
      cm = extract_countermodel(open.all);
    }
    if (!cm.ok) {
      if (why) *why = cm.failure;
      return 3;
    }
    res.outcome = Outcome::Refuted;
    res.counter = std::move(cm);
    return 0;
  };

  auto refute = [&](detail::SolveOut& first, std::string* fail_why) -> bool {
    std::vector<detail::Branch> pending;
    pending.push_back(std::move(first.open_branch));
    for (auto& d : first.deferred) pending.push_back(std::move(d));
    bool extract_failed = false;
    std::string why;
    while (!pending.empty()) {
      detail::Branch b = std::move(pending.front());
      pending.erase(pending.begin());
      int r = try_branch(std::move(b), pending, &why);
      if (r == 0 || r == 2) return true;
      if (r == 3) extract_failed = true;
    }
    if (fail_why)
      *fail_why = extract_failed
                      ? "extraction failed: " + why
                      : "every open branch closes once repaired, but the "
                        "siblings' subproofs were not kept";
    return false;
  };

  if (root.logic == Logic::Xstit) {
    // Phase 1: independence system off; it only matters for derivability.
    searcher.enable_system = false;
    detail::SolveOut so = searcher.solve(make_branch());
    if (so.status == detail::SolveOut::ClosedS) {
      certify(so);
      res.fuel_used = searcher.fuel_used();
      return res;
    }
    std::string phase1_note =
        so.status == detail::SolveOut::ExhaustedS ? so.reason : "";
    if (so.status == detail::SolveOut::OpenS) {
      if (refute(so, &phase1_note)) {
        res.fuel_used = searcher.fuel_used();
        return res;
      }
    }
    // Phase 2: enable the system and try to close.
    searcher.enable_system = true;
    detail::SolveOut so2 = searcher.solve(make_branch());
    if (so2.status == detail::SolveOut::ClosedS) {
      certify(so2);
    } else {
      res.outcome = Outcome::Unknown;
      res.note = "phase 1: " + phase1_note + "; phase 2: " +
                 (so2.status == detail::SolveOut::ExhaustedS
                      ? so2.reason
                      : "open branch without verified countermodel");
    }
    res.fuel_used = searcher.fuel_used();
    return res;
  }

  detail::SolveOut so = searcher.solve(make_branch());
  if (so.status == detail::SolveOut::ClosedS) {
    certify(so);
  } else if (so.status == detail::SolveOut::OpenS) {
    std::string why;
    if (!refute(so, &why)) {
      res.outcome = Outcome::Unknown;
      res.note = "open branch but " + why;
    }
  } else {
    res.outcome = Outcome::Unknown;
    res.note = so.reason;
  }
  res.fuel_used = searcher.fuel_used();
  return res;
}

}  // namespace stit

#endif
