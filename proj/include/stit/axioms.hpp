#ifndef STIT_AXIOMS_HPP
#define STIT_AXIOMS_HPP

// Hilbert axiom schemas of the three logics and the instance generator that
// produces the prover's regression corpus.  Inference rules of the Hilbert
// systems (modus ponens, the necessitations, the irreflexivity rule) are
// listed as metadata and generate no instances; their sequent-side effect
// is already embodied in the calculus rules.

#include <functional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sequent.hpp"

namespace stit {

struct AxiomSchema {
  std::string name;
  Logic tier;              // tier that introduces the schema
  std::string statement;   // schematic display text
  bool inference_rule = false;
  // Instances for one metavariable assignment: (parameter text, formula).
  // Agent and group parameters are enumerated here, side conditions and all.
  std::function<std::vector<std::pair<std::string, Fml>>(
      const Fml&, const Fml&, const Fml&, int)>
      build;
};

struct AxiomInstance {
  std::string schema;
  std::string parameters;
  Fml formula;

  Sequent sequent(Logic logic, int agents) const {
    Sequent s;
    s.logic = logic;
    s.agents = agents;
    s.add(SequentItem::lab(0, formula));
    return s;
  }
};

namespace detail {

inline Fml ubox(Fml f) { return mk_un(FKind::Box, std::move(f)); }
inline Fml udia(Fml f) { return mk_un(FKind::Diamond, std::move(f)); }
inline Fml u(FKind k, Fml f) { return mk_un(k, std::move(f)); }

using Insts = std::vector<std::pair<std::string, Fml>>;

inline Insts one(Fml f) { return {{"", std::move(f)}}; }

}  // namespace detail

inline std::vector<AxiomSchema> axiom_schemas(Logic logic) {
  using detail::Insts;
  using detail::one;
  using detail::u;
  using detail::ubox;
  using detail::udia;
  std::vector<AxiomSchema> out;

  auto add = [&](std::string name, Logic tier, std::string stmt,
                 std::function<Insts(const Fml&, const Fml&, const Fml&, int)>
                     build) {
    out.push_back({std::move(name), tier, std::move(stmt), false,
                   std::move(build)});
  };
  auto rule = [&](std::string name, Logic tier, std::string stmt) {
    out.push_back({std::move(name), tier, std::move(stmt), true, nullptr});
  };

  // Propositional base, shared by every tier.
  add("prop_k", Logic::Ldm, "phi -> (psi -> phi)",
      [](const Fml& f, const Fml& g, const Fml&, int) {
        return one(implies(f, implies(g, f)));
      });
  add("prop_contra", Logic::Ldm, "(~psi -> ~phi) -> (phi -> psi)",
      [](const Fml& f, const Fml& g, const Fml&, int) {
        return one(implies(implies(negate(g), negate(f)), implies(f, g)));
      });
  add("prop_s", Logic::Ldm,
      "(phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi))",
      [](const Fml& f, const Fml& g, const Fml& h, int) {
        return one(implies(implies(f, implies(g, h)),
                           implies(implies(f, g), implies(f, h))));
      });

  // Settledness S5 axioms, shared by every tier.
  add("t_box", Logic::Ldm, "[]phi -> phi",
      [](const Fml& f, const Fml&, const Fml&, int) {
        return one(implies(ubox(f), f));
      });
  add("e5_box", Logic::Ldm, "<>phi -> []<>phi",
      [](const Fml& f, const Fml&, const Fml&, int) {
        return one(implies(udia(f), ubox(udia(f))));
      });
  add("k_box", Logic::Ldm, "[](phi -> psi) -> ([]phi -> []psi)",
      [](const Fml& f, const Fml& g, const Fml&, int) {
        return one(implies(ubox(implies(f, g)),
                           implies(ubox(f), ubox(g))));
      });
  add("dual_box", Logic::Ldm, "[]phi | <>~phi",
      [](const Fml& f, const Fml&, const Fml&, int) {
        return one(mk_or(ubox(f), udia(negate(f))));
      });

  if (logic != Logic::Xstit) {
    // Per-agent choice axioms.  The corpus instantiates the agent slot at
    // i=1; the multi-agent schemas below exercise the other agents.
    add("t_stit", Logic::Ldm, "[i]phi -> phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return Insts{{"i=1", implies(mk_stit(1, f), f)}};
        });
    add("e5_stit", Logic::Ldm, "<i>phi -> [i]<i>phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return Insts{{"i=1", implies(mk_stit(1, f, true),
                                       mk_stit(1, mk_stit(1, f, true)))}};
        });
    add("k_stit", Logic::Ldm, "[i](phi -> psi) -> ([i]phi -> [i]psi)",
        [](const Fml& f, const Fml& g, const Fml&, int) {
          return Insts{{"i=1", implies(mk_stit(1, implies(f, g)),
                                       implies(mk_stit(1, f),
                                               mk_stit(1, g)))}};
        });
    add("dual_stit", Logic::Ldm, "[i]phi | <i>~phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return Insts{{"i=1", mk_or(mk_stit(1, f),
                                     mk_stit(1, negate(f), true))}};
        });
    add("bridge", Logic::Ldm, "[]phi -> [i]phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return Insts{{"i=1", implies(ubox(f), mk_stit(1, f))}};
        });
    add("ioa", Logic::Ldm,
        "/\\_i <>[i]phi_i -> <>(/\\_i [i]phi_i)",
        [](const Fml& f, const Fml& g, const Fml&, int agents) {
          // phi_1 is the metavariable, the remaining agents get psi.
          Fml ante, post;
          for (AgentId i = 1; i <= agents; ++i) {
            Fml body = mk_stit(i, i == 1 ? f : g);
            ante = ante ? mk_and(ante, udia(body)) : udia(body);
            post = post ? mk_and(post, body) : body;
          }
          return one(implies(ante, udia(post)));
        });
    rule("mp", Logic::Ldm, "from phi and phi -> psi infer psi");
    rule("nec_box", Logic::Ldm, "from phi infer []phi");
  }

  if (logic == Logic::Tstit) {
    add("t_ag", Logic::Tstit, "[Ag]phi -> phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(u(FKind::AgStit, f), f));
        });
    add("e5_ag", Logic::Tstit, "<Ag>phi -> [Ag]<Ag>phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(u(FKind::AgStitDual, f),
                             u(FKind::AgStit, u(FKind::AgStitDual, f))));
        });
    add("meet_ag", Logic::Tstit, "/\\_i [i]phi_i -> [Ag](/\\_i phi_i)",
        [](const Fml& f, const Fml& g, const Fml&, int agents) {
          Fml ante, body;
          for (AgentId i = 1; i <= agents; ++i) {
            Fml fi = i == 1 ? f : g;
            ante = ante ? mk_and(ante, mk_stit(i, fi)) : mk_stit(i, fi);
            body = body ? mk_and(body, fi) : fi;
          }
          return one(implies(ante, u(FKind::AgStit, body)));
        });
    add("gp", Logic::Tstit, "phi -> G P phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(f, u(FKind::G, u(FKind::P, f))));
        });
    add("hf", Logic::Tstit, "phi -> H F phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(f, u(FKind::H, u(FKind::F, f))));
        });
    add("ser_g", Logic::Tstit, "G phi -> F phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(u(FKind::G, f), u(FKind::F, f)));
        });
    add("trans_f", Logic::Tstit, "F F phi -> F phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(u(FKind::F, u(FKind::F, f)), u(FKind::F, f)));
        });
    add("conn_fp", Logic::Tstit, "F P phi -> P phi | phi | F phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(u(FKind::F, u(FKind::P, f)),
                             mk_or(u(FKind::P, f), mk_or(f, u(FKind::F, f)))));
        });
    add("conn_pf", Logic::Tstit, "P F phi -> P phi | phi | F phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(u(FKind::P, u(FKind::F, f)),
                             mk_or(u(FKind::P, f), mk_or(f, u(FKind::F, f)))));
        });
    add("dual_g", Logic::Tstit, "G phi | F ~phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(mk_or(u(FKind::G, f), u(FKind::F, negate(f))));
        });
    add("dual_h", Logic::Tstit, "H phi | P ~phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(mk_or(u(FKind::H, f), u(FKind::P, negate(f))));
        });
    add("dual_ag", Logic::Tstit, "[Ag]phi | <Ag>~phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(mk_or(u(FKind::AgStit, f),
                           u(FKind::AgStitDual, negate(f))));
        });
    add("k_g", Logic::Tstit, "G(phi -> psi) -> (G phi -> G psi)",
        [](const Fml& f, const Fml& g, const Fml&, int) {
          return one(implies(u(FKind::G, implies(f, g)),
                             implies(u(FKind::G, f), u(FKind::G, g))));
        });
    add("k_h", Logic::Tstit, "H(phi -> psi) -> (H phi -> H psi)",
        [](const Fml& f, const Fml& g, const Fml&, int) {
          return one(implies(u(FKind::H, implies(f, g)),
                             implies(u(FKind::H, f), u(FKind::H, g))));
        });
    add("k_ag", Logic::Tstit, "[Ag](phi -> psi) -> ([Ag]phi -> [Ag]psi)",
        [](const Fml& f, const Fml& g, const Fml&, int) {
          return one(implies(u(FKind::AgStit, implies(f, g)),
                             implies(u(FKind::AgStit, f),
                                     u(FKind::AgStit, g))));
        });
    add("ncuh", Logic::Tstit, "F <>phi -> <Ag> F phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(u(FKind::F, udia(f)),
                             u(FKind::AgStitDual, u(FKind::F, f))));
        });
    rule("nec_g", Logic::Tstit, "from phi infer G phi");
    rule("nec_h", Logic::Tstit, "from phi infer H phi");
    rule("irr_g", Logic::Tstit,
         "from ([]~p & [](G p & H p)) -> phi with p not in phi infer phi");
  }

  if (logic == Logic::Xstit) {
    auto groups = [](int agents) {
      std::vector<AgentGroup> gs;
      for (AgentGroup g = 0; g <= full_group(agents); ++g) gs.push_back(g);
      return gs;
    };
    add("k_next", Logic::Xstit, "[X](phi -> psi) -> ([X]phi -> [X]psi)",
        [](const Fml& f, const Fml& g, const Fml&, int) {
          return one(implies(u(FKind::Next, implies(f, g)),
                             implies(u(FKind::Next, f), u(FKind::Next, g))));
        });
    add("k_xstit", Logic::Xstit, "[A]x(phi -> psi) -> ([A]x phi -> [A]x psi)",
        [groups](const Fml& f, const Fml& g, const Fml&, int agents) {
          Insts r;
          for (AgentGroup a : groups(agents))
            r.push_back({"A=" + group_text(a),
                         implies(mk_xstit(a, implies(f, g)),
                                 implies(mk_xstit(a, f), mk_xstit(a, g)))});
          return r;
        });
    add("d_xstit", Logic::Xstit, "[A]x phi -> <A>x phi",
        [groups](const Fml& f, const Fml&, const Fml&, int agents) {
          Insts r;
          for (AgentGroup a : groups(agents))
            r.push_back({"A=" + group_text(a),
                         implies(mk_xstit(a, f), mk_xstit(a, f, true))});
          return r;
        });
    add("det_next", Logic::Xstit, "<X>phi -> [X]phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(implies(u(FKind::NextDual, f), u(FKind::Next, f)));
        });
    add("empty_next", Logic::Xstit, "[][X]phi <-> [{}]x phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(iff(ubox(u(FKind::Next, f)), mk_xstit(0, f)));
        });
    add("ag_next", Logic::Xstit, "[Ag]x phi <-> [X][]phi",
        [](const Fml& f, const Fml&, const Fml&, int agents) {
          return one(iff(mk_xstit(full_group(agents), f),
                         u(FKind::Next, ubox(f))));
        });
    add("mono_xstit", Logic::Xstit, "[A]x phi -> [B]x phi for A within B",
        [groups](const Fml& f, const Fml&, const Fml&, int agents) {
          Insts r;
          for (AgentGroup a : groups(agents))
            for (AgentGroup b : groups(agents)) {
              if (!group_subset(a, b)) continue;
              r.push_back({"A=" + group_text(a) + " B=" + group_text(b),
                           implies(mk_xstit(a, f), mk_xstit(b, f))});
            }
          return r;
        });
    add("dual_xstit", Logic::Xstit, "[A]x phi | <A>x ~phi",
        [groups](const Fml& f, const Fml&, const Fml&, int agents) {
          Insts r;
          for (AgentGroup a : groups(agents))
            r.push_back({"A=" + group_text(a),
                         mk_or(mk_xstit(a, f),
                               mk_xstit(a, negate(f), true))});
          return r;
        });
    add("dual_next", Logic::Xstit, "[X]phi | <X>~phi",
        [](const Fml& f, const Fml&, const Fml&, int) {
          return one(mk_or(u(FKind::Next, f),
                           u(FKind::NextDual, negate(f))));
        });
    add("ioa_x", Logic::Xstit,
        "<>[A]x phi & <>[B]x psi -> <>([A]x phi & [B]x psi) for disjoint A, B",
        [groups](const Fml& f, const Fml& g, const Fml&, int agents) {
          Insts r;
          for (AgentGroup a : groups(agents))
            for (AgentGroup b : groups(agents)) {
              if (a & b) continue;
              Fml fa = mk_xstit(a, f), gb = mk_xstit(b, g);
              r.push_back({"A=" + group_text(a) + " B=" + group_text(b),
                           implies(mk_and(udia(fa), udia(gb)),
                                   udia(mk_and(fa, gb)))});
            }
          return r;
        });
    rule("mp", Logic::Xstit, "from phi and phi -> psi infer psi");
    rule("nec_box", Logic::Xstit, "from phi infer []phi");
    rule("nec_xstit", Logic::Xstit, "from phi infer [A]x phi");
    rule("nec_next", Logic::Xstit, "from phi infer [X]phi");
  }

  return out;
}

inline int fml_depth(const Fml& f) {
  int d = 0;
  if (f->left) d = std::max(d, 1 + fml_depth(f->left));
  if (f->right) d = std::max(d, 1 + fml_depth(f->right));
  return d;
}

// phi ranges over the pool entries within the depth bound; psi and chi are
// fixed to the second and first pool entries so the binary schemas stay
// desk-sized.  Side conditions are enforced inside each schema's builder.
inline std::vector<AxiomInstance> instantiate(const AxiomSchema& schema,
                                              int agents,
                                              const std::vector<Fml>& pool,
                                              int depth = 1) {
  std::vector<AxiomInstance> out;
  if (schema.inference_rule || pool.empty()) return out;
  Fml psi = pool.size() > 1 ? pool[1] : pool[0];
  Fml chi = pool[0];
  for (const Fml& phi : pool) {
    if (fml_depth(phi) > depth) continue;
    for (auto& [params, f] : schema.build(phi, psi, chi, agents)) {
      AxiomInstance in;
      in.schema = schema.name;
      in.parameters = "phi=" + render(phi);
      if (!params.empty()) in.parameters += " " + params;
      in.formula = f;
      out.push_back(std::move(in));
    }
  }
  return out;
}

// The frozen regression corpus: ldm stresses conjunction under phi as well,
// the larger tiers keep the pool to the two atoms.
inline std::vector<AxiomInstance> axiom_corpus(Logic logic, int agents) {
  std::vector<Fml> pool = {mk_atom("p"), mk_atom("q")};
  if (logic == Logic::Ldm) pool.push_back(mk_and(mk_atom("p"), mk_atom("q")));
  std::vector<AxiomInstance> out;
  for (const auto& schema : axiom_schemas(logic))
    for (auto& in : instantiate(schema, agents, pool))
      out.push_back(std::move(in));
  return out;
}

inline nlohmann::json axiom_instance_to_json(const AxiomInstance& in,
                                             Logic logic, int agents) {
  nlohmann::json j;
  j["schema"] = in.schema;
  j["parameters"] = in.parameters;
  j["sequent"] = in.sequent(logic, agents).text();
  return j;
}

}  // namespace stit

#endif
