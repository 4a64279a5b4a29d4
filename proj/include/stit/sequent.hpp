#ifndef STIT_SEQUENT_HPP
#define STIT_SEQUENT_HPP

// Labelled one-sided sequents: multisets of relational atoms, equalities and
// labelled formulas, plus label substitution, the text form, and a small
// union-find used for equality-class queries during matching.

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "formula.hpp"

namespace stit {

// Labels render as w0, w1, ...
using Label = int;

inline std::string label_name(Label l) { return "w" + std::to_string(l); }

struct RelationTag {
  enum Kind { RBox, RAgent, RAg, RG, RGc, RH, RX, RGroup };
  Kind kind = RBox;
  AgentId agent = 0;     // RAgent
  AgentGroup group = 0;  // RGroup

  static RelationTag box() { return {RBox, 0, 0}; }
  static RelationTag agent_rel(AgentId i) { return {RAgent, i, 0}; }
  static RelationTag ag() { return {RAg, 0, 0}; }
  static RelationTag g() { return {RG, 0, 0}; }
  static RelationTag gc() { return {RGc, 0, 0}; }
  static RelationTag h() { return {RH, 0, 0}; }
  static RelationTag x() { return {RX, 0, 0}; }
  static RelationTag grp(AgentGroup g) { return {RGroup, 0, g}; }

  bool operator==(const RelationTag& o) const {
    return kind == o.kind && agent == o.agent && group == o.group;
  }
  bool operator<(const RelationTag& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (agent != o.agent) return agent < o.agent;
    return group < o.group;
  }

  std::string text() const {
    switch (kind) {
      case RBox: return "R[]";
      case RAgent: return "R" + std::to_string(agent);
      case RAg: return "RAg";
      case RG: return "RG";
      case RGc: return "RGc";
      case RH: return "RH";
      case RX: return "RX";
      case RGroup: return "R" + group_text(group);
    }
    return "?";
  }

  bool allowed_in(Logic logic) const {
    switch (kind) {
      case RBox: return true;
      case RAgent: return logic != Logic::Xstit;
      case RAg: case RG: case RGc: case RH: return logic == Logic::Tstit;
      case RX: case RGroup: return logic == Logic::Xstit;
    }
    return false;
  }
};

// Maps the modal operators onto the relation they quantify over.
inline RelationTag fml_relation(const Formula& f) {
  switch (f.kind) {
    case FKind::Box: case FKind::Diamond: return RelationTag::box();
    case FKind::Stit: case FKind::StitDual: return RelationTag::agent_rel(f.agent);
    case FKind::AgStit: case FKind::AgStitDual: return RelationTag::ag();
    case FKind::G: case FKind::F: return RelationTag::g();
    case FKind::H: case FKind::P: return RelationTag::h();
    case FKind::XStit: case FKind::XStitDual: return RelationTag::grp(f.group);
    case FKind::Next: case FKind::NextDual: return RelationTag::x();
    default: throw std::logic_error("fml_relation: not a modal operator");
  }
}

inline bool fml_is_universal(FKind k) {
  switch (k) {
    case FKind::Box: case FKind::Stit: case FKind::AgStit:
    case FKind::G: case FKind::H: case FKind::XStit: case FKind::Next:
      return true;
    default:
      return false;
  }
}

struct SequentItem {
  enum Type { Rel, Eq, Lab };
  Type type = Lab;
  RelationTag tag;  // Rel
  Label a = 0, b = 0;  // Rel: a->b; Eq: a=b; Lab: a is the label
  Fml f;  // Lab

  static SequentItem rel(RelationTag t, Label from, Label to) {
    SequentItem it;
    it.type = Rel;
    it.tag = t;
    it.a = from;
    it.b = to;
    return it;
  }
  static SequentItem eq(Label l, Label r) {
    SequentItem it;
    it.type = Eq;
    it.a = l;
    it.b = r;
    return it;
  }
  static SequentItem lab(Label l, Fml fml) {
    SequentItem it;
    it.type = Lab;
    it.a = l;
    it.f = std::move(fml);
    return it;
  }

  std::string text() const {
    switch (type) {
      case Rel:
        return tag.text() + ":" + label_name(a) + "," + label_name(b);
      case Eq:
        return label_name(a) + " = " + label_name(b);
      case Lab:
        return label_name(a) + ": " + render(f);
    }
    return "?";
  }
};

inline int item_compare(const SequentItem& x, const SequentItem& y) {
  if (x.type != y.type) return x.type < y.type ? -1 : 1;
  if (x.type == SequentItem::Rel) {
    if (!(x.tag == y.tag)) return x.tag < y.tag ? -1 : 1;
  }
  if (x.a != y.a) return x.a < y.a ? -1 : 1;
  if (x.b != y.b) return x.b < y.b ? -1 : 1;
  if (x.type == SequentItem::Lab) {
    if (x.f.get() == y.f.get()) return 0;
    if (!x.f) return -1;
    if (!y.f) return 1;
    return fml_compare(*x.f, *y.f);
  }
  return 0;
}

inline bool item_equal(const SequentItem& x, const SequentItem& y) {
  return item_compare(x, y) == 0;
}

struct Sequent {
  std::vector<SequentItem> items;  // multiset: duplicates are significant
  Logic logic = Logic::Ldm;
  int agents = 1;

  void add(SequentItem it) { items.push_back(std::move(it)); }

  bool contains(const SequentItem& it) const {
    for (const auto& x : items)
      if (item_equal(x, it)) return true;
    return false;
  }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    for (const auto& it : items) {
      out.push_back(it.a);
      if (it.type != SequentItem::Lab) out.push_back(it.b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Label max_label() const {
    Label m = -1;
    for (const auto& it : items) {
      m = std::max(m, it.a);
      if (it.type != SequentItem::Lab) m = std::max(m, it.b);
    }
    return m;
  }

  std::string text() const {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) out += " ; ";
      out += items[i].text();
    }
    return out;
  }

  // Multiset equality, order-insensitive.
  bool same_multiset(const Sequent& other) const {
    if (items.size() != other.items.size()) return false;
    // Sequents built by the same rule application usually agree item for
    // item; only fall back to sorting when the orders differ.
    bool aligned = true;
    for (size_t i = 0; i < items.size(); ++i)
      if (!item_equal(items[i], other.items[i])) {
        aligned = false;
        break;
      }
    if (aligned) return true;
    auto key = [](const Sequent& s) {
      std::vector<SequentItem> v = s.items;
      std::sort(v.begin(), v.end(),
                [](const SequentItem& x, const SequentItem& y) {
                  return item_compare(x, y) < 0;
                });
      return v;
    };
    auto va = key(*this), vb = key(other);
    for (size_t i = 0; i < va.size(); ++i)
      if (!item_equal(va[i], vb[i])) return false;
    return true;
  }
};

inline SequentItem substitute_item(const SequentItem& it, Label from, Label to) {
  SequentItem out = it;
  if (out.a == from) out.a = to;
  if (out.type != SequentItem::Lab && out.b == from) out.b = to;
  return out;
}

// Replaces every occurrence of `from` by `to`; multiset structure preserved.
inline Sequent substitute(const Sequent& s, Label from, Label to) {
  Sequent out = s;
  for (auto& it : out.items) it = substitute_item(it, from, to);
  return out;
}

// ---------------------------------------------------------------------------
// Union-find over labels, mirroring the equality atoms of a sequent.
// ---------------------------------------------------------------------------

class UnionFind {
 public:
  Label find(Label x) const {
    while (x < (Label)parent_.size() && parent_[x] != x) x = parent_[x];
    return x;
  }

  void unite(Label x, Label y) {
    ensure(std::max(x, y));
    Label rx = find(x), ry = find(y);
    if (rx == ry) return;
    if (rx < ry) std::swap(rx, ry);
    parent_[rx] = ry;  // smallest label is the class representative
  }

  bool same(Label x, Label y) const { return find(x) == find(y); }

 private:
  std::vector<Label> parent_;

  void ensure(Label x) {
    size_t old = parent_.size();
    if ((size_t)x >= old) {
      parent_.resize(x + 1);
      std::iota(parent_.begin() + old, parent_.end(), (Label)old);
    }
  }
};

inline UnionFind equality_classes(const Sequent& s) {
  UnionFind uf;
  for (const auto& it : s.items)
    if (it.type == SequentItem::Eq) uf.unite(it.a, it.b);
  return uf;
}

// ---------------------------------------------------------------------------
// Text form: `R[]:w0,w1 ; R1:w0,w2 ; w0 = w1 ; w2: p & q`
// ---------------------------------------------------------------------------

inline RelationTag parse_relation_tag(const std::string& t, Logic logic, int agents) {
  if (t == "R[]") return RelationTag::box();
  if (t == "RAg") return RelationTag::ag();
  if (t == "RG") return RelationTag::g();
  if (t == "RGc") return RelationTag::gc();
  if (t == "RH") return RelationTag::h();
  if (t == "RX") return RelationTag::x();
  if (t.size() > 1 && t[0] == 'R' && t[1] == '{') {
    AgentGroup g = 0;
    size_t p = 2;
    while (p < t.size() && t[p] != '}') {
      size_t q = t.find_first_of(",}", p);
      int i = std::stoi(t.substr(p, q - p));
      if (i < 1 || i > agents) throw std::runtime_error("agent out of range in " + t);
      g |= AgentGroup{1} << (i - 1);
      p = (t[q] == ',') ? q + 1 : q;
    }
    return RelationTag::grp(g);
  }
  if (t.size() > 1 && t[0] == 'R' && isdigit((unsigned char)t[1])) {
    int i = std::stoi(t.substr(1));
    if (i < 1 || i > agents) throw std::runtime_error("agent out of range in " + t);
    return RelationTag::agent_rel(i);
  }
  throw std::runtime_error("unknown relation '" + t + "'");
  (void)logic;
}

inline Label parse_label_name(const std::string& t) {
  if (t.size() < 2 || t[0] != 'w')
    throw std::runtime_error("bad label '" + t + "'");
  return std::stoi(t.substr(1));
}

inline std::string trim_copy(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline Sequent parse_sequent(const std::string& text, Logic logic, int agents) {
  Sequent out;
  out.logic = logic;
  out.agents = agents;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    part = trim_copy(part);
    if (part.empty()) continue;
    size_t colon = part.find(':');
    size_t eqpos = part.find('=');
    if (part[0] == 'R' && colon != std::string::npos &&
        (eqpos == std::string::npos || colon < eqpos)) {
      std::string tag = trim_copy(part.substr(0, colon));
      std::string rest = part.substr(colon + 1);
      size_t comma = rest.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error("bad relational atom '" + part + "'");
      RelationTag rt = parse_relation_tag(tag, logic, agents);
      if (!rt.allowed_in(logic))
        throw std::runtime_error("relation " + rt.text() + " not in tier " +
                                 logic_name(logic));
      out.add(SequentItem::rel(rt, parse_label_name(trim_copy(rest.substr(0, comma))),
                               parse_label_name(trim_copy(rest.substr(comma + 1)))));
    } else if (eqpos != std::string::npos &&
               (colon == std::string::npos || eqpos < colon)) {
      out.add(SequentItem::eq(parse_label_name(trim_copy(part.substr(0, eqpos))),
                              parse_label_name(trim_copy(part.substr(eqpos + 1)))));
    } else if (colon != std::string::npos) {
      Label l = parse_label_name(trim_copy(part.substr(0, colon)));
      Fml f = parse(part.substr(colon + 1), logic, agents);
      out.add(SequentItem::lab(l, f));
    } else {
      throw std::runtime_error("cannot parse sequent item '" + part + "'");
    }
  }
  return out;
}

}  // namespace stit

#endif
