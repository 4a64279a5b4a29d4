#ifndef STIT_COUNTERMODEL_HPP
#define STIT_COUNTERMODEL_HPP

// Countermodel extraction from an open saturated branch, with the tier
// specific completions, plus independent verification of the result.

#include "semantics.hpp"

namespace stit {

struct Countermodel {
  bool ok = false;
  std::string failure;
  RelationalModel model;
  Interpretation interp;
  std::vector<std::string> caveats;
  Label ser_x_label = -1;  // xstit: a label that needs a genuine RX successor
  // Relational atoms whose addition lets the search saturate a frame
  // condition the branch is missing; label -1 stands for a fresh label.
  std::vector<SequentItem> repair;
};

// A countermodel must falsify every labelled formula ever on the branch and
// make every relational atom and equality hold.
inline bool verify_countermodel(const RelationalModel& m,
                                const Interpretation& interp,
                                const Sequent& all, std::string* why = nullptr) {
  auto world = [&](Label l) { return interp.at(l); };
  for (const auto& it : all.items) {
    if (it.type == SequentItem::Rel) {
      if (!m.holds_atom(it.tag, world(it.a), world(it.b))) {
        if (why) *why = "relational atom not satisfied: " + it.text();
        return false;
      }
    } else if (it.type == SequentItem::Eq) {
      if (world(it.a) != world(it.b)) {
        if (why) *why = "equality not satisfied: " + it.text();
        return false;
      }
    } else if (model_check(m, world(it.a), it.f)) {
      if (why) *why = "formula not falsified: " + it.text();
      return false;
    }
  }
  return true;
}

namespace detail {

struct Skeleton {
  RelationalModel model;
  Interpretation interp;
  std::vector<Label> reps;  // class representative per world index
};

inline Skeleton quotient_branch(const Sequent& all) {
  Skeleton sk;
  sk.model.tier = all.logic;
  sk.model.agents = all.agents;

  UnionFind uf = equality_classes(all);
  std::vector<Label> labels = all.labels();
  if (labels.empty()) labels.push_back(0);
  std::map<Label, int> index;
  for (Label l : labels) {
    Label r = uf.find(l);
    if (!index.count(r)) {
      index[r] = (int)sk.reps.size();
      sk.reps.push_back(r);
      sk.model.world_names.push_back(label_name(r));
    }
  }
  for (Label l : labels) sk.interp[l] = index[uf.find(l)];

  for (const auto& it : all.items) {
    if (it.type == SequentItem::Rel)
      sk.model.relations[it.tag].insert(
          {sk.interp[it.a], sk.interp[it.b]});
    else if (it.type == SequentItem::Lab && it.f->kind == FKind::NegAtom)
      sk.model.valuation[it.f->atom].insert(sk.interp[it.a]);
  }
  return sk;
}

inline Relation intersect_agents(const RelationalModel& m) {
  Relation out;
  int n = m.world_count();
  for (int w = 0; w < n; ++w)
    for (int u = 0; u < n; ++u) {
      bool all = true;
      for (int i = 1; i <= m.agents && all; ++i)
        if (!m.has(RelationTag::agent_rel(i), w, u)) all = false;
      if (all) out.insert({w, u});
    }
  return out;
}

// The independence rule is only instantiated against choice commitments
// during search, so an open branch need not satisfy C2 outright.  Find a
// joint choice without a witness and hand back the atoms that put one on
// the branch: a fresh member of the settledness cell lying in every chosen
// choice cell.
inline std::vector<SequentItem> c2_repair(const RelationalModel& m,
                                          const Skeleton& sk) {
  const Relation& rbox = m.rel(RelationTag::box());
  int n = m.world_count();
  std::vector<int> tuple(m.agents);
  std::vector<SequentItem> out;
  for (int w1 = 0; w1 < n && out.empty(); ++w1) {
    std::function<bool(int)> rec = [&](int idx) -> bool {
      if (idx == m.agents) {
        for (int v = 0; v < n; ++v) {
          if (!rbox.count({w1, v})) continue;
          bool all_rel = true;
          for (int i = 0; i < m.agents && all_rel; ++i)
            if (!m.has(RelationTag::agent_rel(i + 1), tuple[i], v))
              all_rel = false;
          if (all_rel) return true;
        }
        out.push_back(SequentItem::rel(RelationTag::box(), sk.reps[w1], -1));
        for (int i = 0; i < m.agents; ++i)
          out.push_back(SequentItem::rel(RelationTag::agent_rel(i + 1),
                                         sk.reps[tuple[i]], -1));
        return false;
      }
      for (int u = 0; u < n; ++u) {
        if (!rbox.count({w1, u})) continue;
        tuple[idx] = u;
        if (!rec(idx + 1)) return false;
      }
      return true;
    };
    rec(0);
  }
  return out;
}

}  // namespace detail

inline Countermodel extract_countermodel(const Sequent& all) {
  Countermodel out;
  detail::Skeleton sk = detail::quotient_branch(all);
  RelationalModel& m = sk.model;
  int n = m.world_count();

  if (all.logic == Logic::Ldm) {
    out.model = m;
    out.interp = sk.interp;
    std::string why;
    FrameReport rep = validate_frame(out.model);
    if (!rep.ok()) {
      out.failure = "frame condition failed: " + rep.verdicts.front().condition;
      for (const auto& v : rep.verdicts)
        if (!v.pass) out.failure = "frame condition failed: " + v.condition +
                                   " at " + v.witness;
      if (rep.failed("C2 joint choice")) out.repair = detail::c2_repair(m, sk);
      return out;
    }
    if (!verify_countermodel(out.model, out.interp, all, &why)) {
      out.failure = why;
      return out;
    }
    out.ok = true;
    return out;
  }

  if (all.logic == Logic::Tstit) {
    // Frontier: worlds whose future is still unexplored.
    const Relation& rg = m.rel(RelationTag::g());
    for (int w = 0; w < n; ++w) {
      bool succ = false;
      for (int u = 0; u < n; ++u)
        if (rg.count({w, u})) succ = true;
      if (!succ) m.frontier.insert(w);
    }
    // Store the full complement; branch atoms are a subset of it (the
    // branch would otherwise be closed by comp_G1).
    Relation comp;
    for (int w = 0; w < n; ++w)
      for (int u = 0; u < n; ++u)
        if (!rg.count({w, u})) comp.insert({w, u});
    m.relations[RelationTag::gc()] = comp;

    Relation branch_ag = m.rel(RelationTag::ag());
    m.relations[RelationTag::ag()] = detail::intersect_agents(m);

    std::string why;
    if (verify_countermodel(m, sk.interp, all, &why)) {
      FrameReport rep = validate_frame(m);
      if (rep.failed("C2 joint choice")) {
        // Repairable: do not paper over a missing joint choice with a caveat.
        out.failure = "frame condition failed: C2 joint choice at " +
                      rep.failed("C2 joint choice")->witness;
        out.repair = detail::c2_repair(m, sk);
        return out;
      }
      bool frame_ok = true;
      for (const auto& v : rep.verdicts)
        if (!v.pass) {
          frame_ok = false;
          out.caveats.push_back("frame caveat: " + v.condition + " at " +
                                v.witness);
        }
      (void)frame_ok;
      out.model = m;
      out.interp = sk.interp;
      if (!m.frontier.empty()) {
        std::string fr = "frontier:";
        for (int w : m.frontier) fr += " " + m.world_names[w];
        out.caveats.push_back(fr);
      }
      out.ok = true;
      return out;
    }
    // The closed-up grand coalition broke falsification; fall back to the
    // branch atoms and flag the unverified closure condition.
    m.relations[RelationTag::ag()] = branch_ag;
    if (!verify_countermodel(m, sk.interp, all, &why)) {
      out.failure = why;
      return out;
    }
    out.caveats.push_back("C3 closure unverified");
    FrameReport rep = validate_frame(m);
    if (rep.failed("C2 joint choice")) {
      out.failure = "frame condition failed: C2 joint choice at " +
                    rep.failed("C2 joint choice")->witness;
      out.repair = detail::c2_repair(m, sk);
      out.caveats.clear();
      return out;
    }
    for (const auto& v : rep.verdicts)
      if (!v.pass)
        out.caveats.push_back("frame caveat: " + v.condition + " at " +
                              v.witness);
    out.model = m;
    out.interp = sk.interp;
    out.ok = true;
    return out;
  }

  // Xstit.  Complete worlds without a next state with a self loop, then
  // recompute the composition-defined relations and try the group relation
  // assignments between the forced bounds.
  Relation rx = m.rel(RelationTag::x());
  std::vector<int> completed;
  for (int w = 0; w < n; ++w) {
    bool succ = false;
    for (int u = 0; u < n; ++u)
      if (rx.count({w, u})) succ = true;
    if (!succ) {
      rx.insert({w, w});
      completed.push_back(w);
    }
  }
  const Relation& rbox = m.rel(RelationTag::box());
  Relation rempty = detail::compose(rbox, rx);
  Relation rag = detail::compose(rx, rbox);
  AgentGroup ag = full_group(m.agents);

  std::vector<AgentGroup> mids;
  for (AgentGroup g = 1; g < ag; ++g) mids.push_back(g);

  std::string last_why = "no group assignment verified";
  size_t combos = size_t{1} << mids.size();
  for (size_t mask = 0; mask < combos; ++mask) {
    RelationalModel cand = m;
    cand.relations[RelationTag::x()] = rx;
    cand.relations[RelationTag::grp(0)] = rempty;
    cand.relations[RelationTag::grp(ag)] = rag;
    for (size_t gi = 0; gi < mids.size(); ++gi) {
      Relation r = m.rel(RelationTag::grp(mids[gi]));
      if (mask & (size_t{1} << gi)) {
        r = rempty;  // maximal: every group is as unconstrained as R{}
      } else {
        for (const auto& p : rag) r.insert(p);  // minimal completion
      }
      cand.relations[RelationTag::grp(mids[gi])] = r;
    }
    std::string why;
    if (!verify_countermodel(cand, sk.interp, all, &why)) {
      last_why = why;
      continue;
    }
    FrameReport rep = validate_frame(cand);
    if (!rep.ok()) {
      for (const auto& v : rep.verdicts)
        if (!v.pass) last_why = "frame condition failed: " + v.condition +
                                " at " + v.witness;
      continue;
    }
    out.model = cand;
    out.interp = sk.interp;
    out.ok = true;
    return out;
  }

  out.failure = last_why;
  if (!completed.empty()) out.ser_x_label = sk.reps[completed.front()];
  return out;
}

}  // namespace stit

#endif
