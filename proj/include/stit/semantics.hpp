#ifndef STIT_SEMANTICS_HPP
#define STIT_SEMANTICS_HPP

// Relational models, the Kripke model checker, frame-condition validation
// and the brute-force bounded-model enumeration oracle.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sequent.hpp"

namespace stit {

using WorldPair = std::pair<int, int>;
using Relation = std::set<WorldPair>;

struct RelationalModel {
  Logic tier = Logic::Ldm;
  int agents = 1;
  std::vector<std::string> world_names;  // index is the world id
  std::map<RelationTag, Relation> relations;
  std::map<std::string, std::set<int>> valuation;
  std::set<int> frontier;  // tstit only: worlds exempt from R_G seriality

  int world_count() const { return (int)world_names.size(); }

  const Relation& rel(RelationTag t) const {
    static const Relation empty;
    auto it = relations.find(t);
    return it == relations.end() ? empty : it->second;
  }

  bool has(RelationTag t, int w, int u) const {
    return rel(t).count({w, u}) > 0;
  }

  std::vector<int> successors(RelationTag t, int w) const {
    std::vector<int> out;
    for (const auto& [a, b] : rel(t))
      if (a == w) out.push_back(b);
    return out;
  }

  bool holds_atom(RelationTag t, int w, int u) const {
    // The complement relation falls back to the complement of R_G when it
    // is not stored explicitly.
    if (t.kind == RelationTag::RGc && relations.find(t) == relations.end())
      return !has(RelationTag::g(), w, u);
    return has(t, w, u);
  }

  bool val(const std::string& atom, int w) const {
    auto it = valuation.find(atom);
    return it != valuation.end() && it->second.count(w) > 0;
  }
};

inline bool model_check(const RelationalModel& m, int w, const Fml& f) {
  switch (f->kind) {
    case FKind::PosAtom: return m.val(f->atom, w);
    case FKind::NegAtom: return !m.val(f->atom, w);
    case FKind::And: return model_check(m, w, f->left) && model_check(m, w, f->right);
    case FKind::Or: return model_check(m, w, f->left) || model_check(m, w, f->right);
    default: break;
  }
  RelationTag t = fml_relation(*f);
  bool universal = fml_is_universal(f->kind);
  for (int u : m.successors(t, w)) {
    bool sub = model_check(m, u, f->left);
    if (universal && !sub) return false;
    if (!universal && sub) return true;
  }
  return universal;
}

inline bool globally_true(const RelationalModel& m, const Fml& f) {
  for (int w = 0; w < m.world_count(); ++w)
    if (!model_check(m, w, f)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Sequent satisfaction: if every relational atom and equality holds under
// the interpretation, some labelled formula must be true.
// ---------------------------------------------------------------------------

using Interpretation = std::map<Label, int>;

inline bool satisfies(const RelationalModel& m, const Interpretation& i,
                      const Sequent& s) {
  auto world = [&](Label l) {
    auto it = i.find(l);
    if (it == i.end()) throw std::runtime_error("unmapped label " + label_name(l));
    return it->second;
  };
  for (const auto& it : s.items) {
    if (it.type == SequentItem::Rel) {
      if (!it.tag.allowed_in(s.logic))
        throw std::runtime_error("tier mismatch for " + it.tag.text());
      if (!m.holds_atom(it.tag, world(it.a), world(it.b))) return true;
    } else if (it.type == SequentItem::Eq) {
      if (world(it.a) != world(it.b)) return true;
    }
  }
  for (const auto& it : s.items)
    if (it.type == SequentItem::Lab && model_check(m, world(it.a), it.f))
      return true;
  return false;
}

// ---------------------------------------------------------------------------
// Frame validation.
// ---------------------------------------------------------------------------

struct ConditionVerdict {
  std::string condition;
  bool pass = true;
  std::string witness;  // concrete violating tuple, empty when passing
};

struct FrameReport {
  std::vector<ConditionVerdict> verdicts;

  bool ok() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }

  const ConditionVerdict* failed(const std::string& name) const {
    for (const auto& v : verdicts)
      if (v.condition == name && !v.pass) return &v;
    return nullptr;
  }
};

namespace detail {

inline std::string pair_text(const RelationalModel& m, int a, int b) {
  return "(" + m.world_names[a] + "," + m.world_names[b] + ")";
}

inline void check_equivalence(const RelationalModel& m, RelationTag t,
                              FrameReport& rep) {
  std::string name = t.text() + " equivalence";
  const Relation& r = m.rel(t);
  int n = m.world_count();
  for (int w = 0; w < n; ++w)
    if (!r.count({w, w})) {
      rep.verdicts.push_back({name, false, "not reflexive at " + pair_text(m, w, w)});
      return;
    }
  for (const auto& [a, b] : r)
    if (!r.count({b, a})) {
      rep.verdicts.push_back({name, false, "not symmetric at " + pair_text(m, a, b)});
      return;
    }
  for (const auto& [a, b] : r)
    for (const auto& [c, d] : r)
      if (b == c && !r.count({a, d})) {
        rep.verdicts.push_back({name, false,
                                "not transitive via " + pair_text(m, a, b) + "," +
                                    pair_text(m, c, d)});
        return;
      }
  rep.verdicts.push_back({name, true, ""});
}

inline Relation compose(const Relation& r1, const Relation& r2) {
  // Left-to-right: (w,u) when r1 w v and r2 v u for some v.  This is the
  // order the calculus rules pin down.
  Relation out;
  for (const auto& [w, v] : r1)
    for (const auto& [v2, u] : r2)
      if (v == v2) out.insert({w, u});
  return out;
}

inline void check_subset(const RelationalModel& m, const std::string& name,
                         const Relation& a, const Relation& b, FrameReport& rep) {
  for (const auto& p : a)
    if (!b.count(p)) {
      rep.verdicts.push_back({name, false, pair_text(m, p.first, p.second)});
      return;
    }
  rep.verdicts.push_back({name, true, ""});
}

inline void check_equal(const RelationalModel& m, const std::string& name,
                        const Relation& a, const Relation& b, FrameReport& rep) {
  for (const auto& p : a)
    if (!b.count(p)) {
      rep.verdicts.push_back(
          {name, false, pair_text(m, p.first, p.second) + " only on left"});
      return;
    }
  for (const auto& p : b)
    if (!a.count(p)) {
      rep.verdicts.push_back(
          {name, false, pair_text(m, p.first, p.second) + " only on right"});
      return;
    }
  rep.verdicts.push_back({name, true, ""});
}

}  // namespace detail

inline FrameReport validate_frame(const RelationalModel& m) {
  using namespace detail;
  FrameReport rep;
  int n = m.world_count();
  const Relation& rbox = m.rel(RelationTag::box());

  check_equivalence(m, RelationTag::box(), rep);

  if (m.tier != Logic::Xstit) {
    for (int i = 1; i <= m.agents; ++i)
      check_equivalence(m, RelationTag::agent_rel(i), rep);

    // C1: each agent relation sits inside the settledness relation.
    for (int i = 1; i <= m.agents; ++i)
      check_subset(m, "C1 R" + std::to_string(i) + " within R[]",
                   m.rel(RelationTag::agent_rel(i)), rbox, rep);

    // C2: pairwise settledness-related tuples admit a joint choice successor.
    {
      ConditionVerdict v{"C2 joint choice", true, ""};
      std::vector<int> tuple(m.agents);
      std::function<bool(int)> rec = [&](int idx) -> bool {
        if (idx == m.agents) {
          for (int i = 0; i < m.agents; ++i)
            for (int j = 0; j < m.agents; ++j)
              if (!rbox.count({tuple[i], tuple[j]})) return true;
          for (int c = 0; c < n; ++c) {
            bool all = true;
            for (int i = 0; i < m.agents; ++i)
              if (!m.has(RelationTag::agent_rel(i + 1), tuple[i], c)) {
                all = false;
                break;
              }
            if (all) return true;
          }
          std::string wit = "(";
          for (int i = 0; i < m.agents; ++i)
            wit += (i ? "," : "") + m.world_names[tuple[i]];
          v = {"C2 joint choice", false, wit + ")"};
          return false;
        }
        for (tuple[idx] = 0; tuple[idx] < n; ++tuple[idx])
          if (!rec(idx + 1)) return false;
        return true;
      };
      rec(0);
      rep.verdicts.push_back(v);
    }
  }

  if (m.tier == Logic::Tstit) {
    const Relation& rag = m.rel(RelationTag::ag());
    const Relation& rg = m.rel(RelationTag::g());
    const Relation& rh = m.rel(RelationTag::h());

    check_equivalence(m, RelationTag::ag(), rep);

    // C3: the grand-coalition relation is the intersection of the agents'.
    {
      Relation inter;
      for (int w = 0; w < n; ++w)
        for (int u = 0; u < n; ++u) {
          bool all = true;
          for (int i = 1; i <= m.agents; ++i)
            if (!m.has(RelationTag::agent_rel(i), w, u)) {
              all = false;
              break;
            }
          if (all) inter.insert({w, u});
        }
      check_equal(m, "C3 RAg is intersection", rag, inter, rep);
    }

    // R_G transitive, serial off the frontier.
    {
      bool done = false;
      for (const auto& [a, b] : rg) {
        for (const auto& [c, d] : rg)
          if (b == c && !rg.count({a, d})) {
            rep.verdicts.push_back({"RG transitive", false,
                                    pair_text(m, a, b) + "," + pair_text(m, c, d)});
            done = true;
            break;
          }
        if (done) break;
      }
      if (!done) rep.verdicts.push_back({"RG transitive", true, ""});
    }
    {
      ConditionVerdict v{"RG serial", true, ""};
      for (int w = 0; w < n && v.pass; ++w) {
        if (m.frontier.count(w)) continue;
        bool any = false;
        for (int u = 0; u < n; ++u)
          if (rg.count({w, u})) {
            any = true;
            break;
          }
        if (!any) v = {"RG serial", false, m.world_names[w]};
      }
      rep.verdicts.push_back(v);
    }

    // R_H is the converse of R_G.
    {
      Relation conv;
      for (const auto& [a, b] : rg) conv.insert({b, a});
      check_equal(m, "RH converse of RG", rh, conv, rep);
    }

    // C4 / C5: future and past connectedness.
    auto connected = [&](const Relation& r, const std::string& name) {
      for (const auto& [w, u] : r)
        for (const auto& [w2, v] : r)
          if (w == w2 && u != v && !r.count({u, v}) && !r.count({v, u})) {
            rep.verdicts.push_back(
                {name, false, pair_text(m, w, u) + "," + pair_text(m, w2, v)});
            return;
          }
      rep.verdicts.push_back({name, true, ""});
    };
    connected(rg, "C4 RG connected");
    connected(rh, "C5 RH connected");

    // C6: no choice between undivided histories.
    check_subset(m, "C6 RG;R[] within RAg;RG", compose(rg, rbox),
                 compose(rag, rg), rep);

    // C7: strict future.
    {
      ConditionVerdict v{"C7 irreflexive future", true, ""};
      for (const auto& [w, u] : rbox)
        if (rg.count({w, u})) {
          v = {"C7 irreflexive future", false, pair_text(m, w, u)};
          break;
        }
      rep.verdicts.push_back(v);
    }

    // Complement relation, when stored explicitly.
    if (m.relations.count(RelationTag::gc())) {
      Relation comp;
      for (int w = 0; w < n; ++w)
        for (int u = 0; u < n; ++u)
          if (!rg.count({w, u})) comp.insert({w, u});
      check_equal(m, "RGc complement of RG", m.rel(RelationTag::gc()), comp, rep);
    }
  }

  if (m.tier == Logic::Xstit) {
    const Relation& rx = m.rel(RelationTag::x());
    AgentGroup ag = full_group(m.agents);

    // D2: serial and deterministic next-state relation.
    {
      ConditionVerdict v{"D2 RX serial", true, ""};
      for (int w = 0; w < n && v.pass; ++w) {
        bool any = false;
        for (int u = 0; u < n; ++u)
          if (rx.count({w, u})) {
            any = true;
            break;
          }
        if (!any) v = {"D2 RX serial", false, m.world_names[w]};
      }
      rep.verdicts.push_back(v);
    }
    {
      ConditionVerdict v{"D2 RX deterministic", true, ""};
      for (const auto& [w, u] : rx) {
        for (const auto& [w2, u2] : rx)
          if (w == w2 && u != u2) {
            v = {"D2 RX deterministic", false,
                 pair_text(m, w, u) + "," + pair_text(m, w2, u2)};
            break;
          }
        if (!v.pass) break;
      }
      rep.verdicts.push_back(v);
    }

    // D3(i)/(ii): the empty-group and grand-coalition relations are the two
    // compositions, in the order the calculus rules fix.
    check_equal(m, "D3i R{} is R[];RX", m.rel(RelationTag::grp(0)),
                detail::compose(m.rel(RelationTag::box()), rx), rep);
    check_equal(m, "D3ii RAg is RX;R[]", m.rel(RelationTag::grp(ag)),
                detail::compose(rx, m.rel(RelationTag::box())), rep);

    // D3(iii): larger groups act more specifically.
    for (AgentGroup a = 0; a <= ag; ++a)
      for (AgentGroup b = 0; b <= ag; ++b)
        if (a != b && group_subset(b, a))
          check_subset(m,
                       "D3iii R" + group_text(a) + " within R" + group_text(b),
                       m.rel(RelationTag::grp(a)), m.rel(RelationTag::grp(b)),
                       rep);

    // D3(iv): independence of disjoint groups.
    {
      ConditionVerdict v{"D3iv independence", true, ""};
      for (AgentGroup a = 0; a <= ag && v.pass; ++a)
        for (AgentGroup b = 0; b <= ag && v.pass; ++b) {
          if (a & b) continue;
          const Relation& ra = m.rel(RelationTag::grp(a));
          const Relation& rb = m.rel(RelationTag::grp(b));
          for (int w1 = 0; w1 < n && v.pass; ++w1)
            for (int w2 = 0; w2 < n && v.pass; ++w2)
              for (int w3 = 0; w3 < n && v.pass; ++w3) {
                if (!rbox.count({w1, w2}) || !rbox.count({w1, w3})) continue;
                // One alternative must mimic both choices for every tail:
                // the witness may not depend on w5/w6.
                bool found = false;
                for (int w4 = 0; w4 < n && !found; ++w4) {
                  if (!rbox.count({w1, w4})) continue;
                  bool mimics = true;
                  for (int w5 = 0; w5 < n && mimics; ++w5)
                    if (ra.count({w4, w5}) && !ra.count({w2, w5}))
                      mimics = false;
                  for (int w6 = 0; w6 < n && mimics; ++w6)
                    if (rb.count({w4, w6}) && !rb.count({w3, w6}))
                      mimics = false;
                  found = mimics;
                }
                if (!found)
                  v = {"D3iv independence", false,
                       "A=" + group_text(a) + " B=" + group_text(b) + " (" +
                           m.world_names[w1] + "," + m.world_names[w2] + "," +
                           m.world_names[w3] + ")"};
              }
        }
      rep.verdicts.push_back(v);
    }
  }

  return rep;
}

// ---------------------------------------------------------------------------
// JSON form.
// ---------------------------------------------------------------------------

inline nlohmann::json model_to_json(const RelationalModel& m) {
  nlohmann::json j;
  j["tier"] = logic_name(m.tier);
  j["agents"] = m.agents;
  j["worlds"] = m.world_names;
  nlohmann::json rels = nlohmann::json::object();
  for (const auto& [tag, r] : m.relations) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [a, b] : r)
      pairs.push_back({m.world_names[a], m.world_names[b]});
    rels[tag.text()] = pairs;
  }
  j["relations"] = rels;
  nlohmann::json val = nlohmann::json::object();
  for (const auto& [atom, ws] : m.valuation) {
    nlohmann::json arr = nlohmann::json::array();
    for (int w : ws) arr.push_back(m.world_names[w]);
    val[atom] = arr;
  }
  j["valuation"] = val;
  nlohmann::json fr = nlohmann::json::array();
  for (int w : m.frontier) fr.push_back(m.world_names[w]);
  j["frontier"] = fr;
  return j;
}

inline RelationalModel model_from_json(const nlohmann::json& j) {
  RelationalModel m;
  m.tier = logic_from_name(j.at("tier").get<std::string>());
  m.agents = j.at("agents").get<int>();
  m.world_names = j.at("worlds").get<std::vector<std::string>>();
  std::map<std::string, int> index;
  for (int i = 0; i < (int)m.world_names.size(); ++i)
    index[m.world_names[i]] = i;
  auto widx = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw std::runtime_error("unknown world '" + name + "'");
    return it->second;
  };
  for (auto it = j.at("relations").begin(); it != j.at("relations").end(); ++it) {
    RelationTag tag = parse_relation_tag(it.key(), m.tier, m.agents);
    Relation r;
    for (const auto& p : it.value())
      r.insert({widx(p.at(0).get<std::string>()), widx(p.at(1).get<std::string>())});
    m.relations[tag] = r;
  }
  if (j.contains("valuation"))
    for (auto it = j.at("valuation").begin(); it != j.at("valuation").end(); ++it) {
      std::set<int> ws;
      for (const auto& w : it.value()) ws.insert(widx(w.get<std::string>()));
      m.valuation[it.key()] = ws;
    }
  if (j.contains("frontier"))
    for (const auto& w : j.at("frontier"))
      m.frontier.insert(widx(w.get<std::string>()));
  return m;
}

// ---------------------------------------------------------------------------
// Bounded enumeration of frame-valid models.  The oracle behind the
// soundness cross-checks; ldm and xstit tiers only (no finite model has a
// transitive, serial and strictly-future temporal relation).
// ---------------------------------------------------------------------------

namespace detail {

// All set partitions of {0..n-1}, as block-id vectors.
inline std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> block(n, 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == n) {
      out.push_back(block);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      block[i] = b;
      rec(i + 1, b == blocks ? blocks + 1 : blocks);
    }
  };
  rec(0, 0);
  return out;
}

inline Relation partition_relation(const std::vector<int>& block) {
  Relation r;
  for (int a = 0; a < (int)block.size(); ++a)
    for (int b = 0; b < (int)block.size(); ++b)
      if (block[a] == block[b]) r.insert({a, b});
  return r;
}

// Canonical string of a model under world renaming; used to drop isomorphs.
inline std::string canonical_key(const RelationalModel& m) {
  int n = m.world_count();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  do {
    std::string enc;
    for (const auto& [tag, r] : m.relations) {
      enc += tag.text() + "|";
      std::set<WorldPair> mapped;
      for (const auto& [a, b] : r) mapped.insert({perm[a], perm[b]});
      for (const auto& [a, b] : mapped)
        enc += std::to_string(a) + "," + std::to_string(b) + ";";
    }
    for (const auto& [atom, ws] : m.valuation) {
      enc += atom + "|";
      std::set<int> mapped;
      for (int w : ws) mapped.insert(perm[w]);
      for (int w : mapped) enc += std::to_string(w) + ";";
    }
    if (best.empty() || enc < best) best = enc;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace detail

inline std::vector<RelationalModel> enumerate_models(
    Logic tier, int agents, int max_worlds,
    const std::vector<std::string>& atoms) {
  if (tier == Logic::Tstit)
    throw std::runtime_error(
        "no finite genuine tstit frames exist; enumeration is ldm/xstit only");
  if (max_worlds > 4) throw std::runtime_error("enumeration capped at 4 worlds");

  std::vector<RelationalModel> out;
  std::set<std::string> seen;

  auto emit_with_valuations = [&](RelationalModel frame) {
    int n = frame.world_count();
    size_t combos = 1;
    for (size_t i = 0; i < atoms.size(); ++i) combos <<= n;
    for (size_t v = 0; v < combos; ++v) {
      RelationalModel m = frame;
      size_t bits = v;
      for (const auto& atom : atoms) {
        std::set<int> ws;
        for (int w = 0; w < n; ++w)
          if (bits & (size_t{1} << w)) ws.insert(w);
        bits >>= n;
        m.valuation[atom] = ws;
      }
      std::string key = detail::canonical_key(m);
      if (seen.insert(key).second) out.push_back(std::move(m));
    }
  };

  for (int n = 1; n <= max_worlds; ++n) {
    std::vector<std::string> names;
    for (int w = 0; w < n; ++w) names.push_back("w" + std::to_string(w));

    for (const auto& boxp : detail::partitions(n)) {
      RelationalModel base;
      base.tier = tier;
      base.agents = agents;
      base.world_names = names;
      base.relations[RelationTag::box()] = detail::partition_relation(boxp);

      if (tier == Logic::Ldm) {
        // Per-agent refinements of the settledness partition.
        std::vector<std::vector<std::vector<int>>> agent_parts(agents);
        std::function<void(int, RelationalModel&)> rec =
            [&](int agent, RelationalModel& m) {
              if (agent > agents) {
                // C2 within each block: every tuple of block members has a
                // joint successor.
                RelationalModel probe = m;
                FrameReport rep = validate_frame(probe);
                if (rep.ok()) emit_with_valuations(probe);
                return;
              }
              // Refine: sub-partition each box block.
              std::vector<int> sub(n);
              std::function<void(int)> assign = [&](int i) {
                if (i == n) {
                  Relation r;
                  for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                      if (boxp[a] == boxp[b] && sub[a] == sub[b])
                        r.insert({a, b});
                  m.relations[RelationTag::agent_rel(agent)] = r;
                  rec(agent + 1, m);
                  return;
                }
                // Sub-block ids are bounded by the world index, which is
                // enough to cover all refinements.
                for (int b = 0; b <= i; ++b) {
                  sub[i] = b;
                  assign(i + 1);
                }
              };
              assign(0);
            };
        rec(1, base);
      } else {
        // Xstit: next-state functions, then the intermediate group
        // relations between the two composition-defined bounds.
        AgentGroup ag = full_group(agents);
        std::vector<int> next(n);
        std::function<void(int)> pick_next = [&](int i) {
          if (i == n) {
            RelationalModel m = base;
            Relation rx;
            for (int w = 0; w < n; ++w) rx.insert({w, next[w]});
            m.relations[RelationTag::x()] = rx;
            Relation rempty = detail::compose(m.rel(RelationTag::box()), rx);
            Relation rag = detail::compose(rx, m.rel(RelationTag::box()));
            m.relations[RelationTag::grp(0)] = rempty;
            m.relations[RelationTag::grp(ag)] = rag;

            // Candidate pairs for the strict subgroups.
            std::vector<WorldPair> extra;
            for (const auto& p : rempty)
              if (!rag.count(p)) extra.push_back(p);

            std::vector<AgentGroup> mids;
            for (AgentGroup g = 1; g < ag; ++g) mids.push_back(g);

            std::function<void(size_t, RelationalModel&)> pick_mid =
                [&](size_t gi, RelationalModel& mm) {
                  if (gi == mids.size()) {
                    FrameReport rep = validate_frame(mm);
                    if (rep.ok()) emit_with_valuations(mm);
                    return;
                  }
                  size_t combos = size_t{1} << extra.size();
                  for (size_t mask = 0; mask < combos; ++mask) {
                    Relation r = rag;
                    for (size_t e = 0; e < extra.size(); ++e)
                      if (mask & (size_t{1} << e)) r.insert(extra[e]);
                    mm.relations[RelationTag::grp(mids[gi])] = r;
                    pick_mid(gi + 1, mm);
                  }
                };
            pick_mid(0, m);
            return;
          }
          for (next[i] = 0; next[i] < n; ++next[i]) pick_next(i + 1);
        };
        pick_next(0);
      }
    }
  }
  return out;
}

}  // namespace stit

#endif
