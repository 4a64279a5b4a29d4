#ifndef STIT_FORMULA_HPP
#define STIT_FORMULA_HPP

// Negation-normal-form formulas for the three object languages, with the
// ASCII concrete grammar, dual-based negation and a minimal-parenthesis
// printer.  Formulas are immutable and shared; all constructors go through
// the mk* helpers.

#include <cctype>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace stit {

enum class Logic { Ldm, Tstit, Xstit };

inline std::string logic_name(Logic l) {
  switch (l) {
    case Logic::Ldm: return "ldm";
    case Logic::Tstit: return "tstit";
    case Logic::Xstit: return "xstit";
  }
  return "?";
}

inline Logic logic_from_name(const std::string& s) {
  if (s == "ldm") return Logic::Ldm;
  if (s == "tstit") return Logic::Tstit;
  if (s == "xstit") return Logic::Xstit;
  throw std::runtime_error("unknown logic: " + s);
}

// Agents are numbered 1..n.  Groups are bitmasks: bit (i-1) set means agent
// i belongs to the group.  The mask representation is canonical by itself.
using AgentId = int;
using AgentGroup = std::uint32_t;

inline AgentGroup full_group(int agents) {
  return agents >= 32 ? ~AgentGroup{0} : ((AgentGroup{1} << agents) - 1);
}

inline bool group_subset(AgentGroup a, AgentGroup b) { return (a & ~b) == 0; }

inline std::string group_text(AgentGroup g) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < 32; ++i) {
    if (g & (AgentGroup{1} << i)) {
      if (!first) out += ",";
      out += std::to_string(i + 1);
      first = false;
    }
  }
  out += "}";
  return out;
}

enum class FKind {
  PosAtom, NegAtom, And, Or,
  Box, Diamond,               // settledness
  Stit, StitDual,             // per-agent choice
  AgStit, AgStitDual,         // grand coalition (tstit)
  G, F, H, P,                 // tense (tstit)
  XStit, XStitDual,           // group next-stit (xstit)
  Next, NextDual              // next state (xstit)
};

struct Formula;
using Fml = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind;
  std::string atom;   // PosAtom / NegAtom
  AgentId agent = 0;  // Stit / StitDual
  AgentGroup group = 0;  // XStit / XStitDual
  Fml left, right;    // right only for And / Or
};

inline Fml mk_atom(const std::string& name, bool positive = true) {
  auto f = std::make_shared<Formula>();
  f->kind = positive ? FKind::PosAtom : FKind::NegAtom;
  f->atom = name;
  return f;
}

inline Fml mk_bin(FKind k, Fml a, Fml b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->left = std::move(a);
  f->right = std::move(b);
  return f;
}

inline Fml mk_and(Fml a, Fml b) { return mk_bin(FKind::And, std::move(a), std::move(b)); }
inline Fml mk_or(Fml a, Fml b) { return mk_bin(FKind::Or, std::move(a), std::move(b)); }

inline Fml mk_un(FKind k, Fml a) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->left = std::move(a);
  return f;
}

inline Fml mk_stit(AgentId i, Fml a, bool dual = false) {
  auto f = std::make_shared<Formula>();
  f->kind = dual ? FKind::StitDual : FKind::Stit;
  f->agent = i;
  f->left = std::move(a);
  return f;
}

inline Fml mk_xstit(AgentGroup g, Fml a, bool dual = false) {
  auto f = std::make_shared<Formula>();
  f->kind = dual ? FKind::XStitDual : FKind::XStit;
  f->group = g;
  f->left = std::move(a);
  return f;
}

inline int fml_compare(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.atom != b.atom) return a.atom < b.atom ? -1 : 1;
  if (a.agent != b.agent) return a.agent < b.agent ? -1 : 1;
  if (a.group != b.group) return a.group < b.group ? -1 : 1;
  auto sub = [](const Fml& x, const Fml& y) -> int {
    if (!x && !y) return 0;
    if (!x) return -1;
    if (!y) return 1;
    return fml_compare(*x, *y);
  };
  if (int c = sub(a.left, b.left)) return c;
  return sub(a.right, b.right);
}

inline bool fml_equal(const Fml& a, const Fml& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return fml_compare(*a, *b) == 0;
}

// Dual-swapping negation: atoms flip polarity, each operator is replaced by
// its dual, recursively.  An involution.
inline Fml negate(const Fml& f) {
  switch (f->kind) {
    case FKind::PosAtom: return mk_atom(f->atom, false);
    case FKind::NegAtom: return mk_atom(f->atom, true);
    case FKind::And: return mk_or(negate(f->left), negate(f->right));
    case FKind::Or: return mk_and(negate(f->left), negate(f->right));
    case FKind::Box: return mk_un(FKind::Diamond, negate(f->left));
    case FKind::Diamond: return mk_un(FKind::Box, negate(f->left));
    case FKind::Stit: return mk_stit(f->agent, negate(f->left), true);
    case FKind::StitDual: return mk_stit(f->agent, negate(f->left), false);
    case FKind::AgStit: return mk_un(FKind::AgStitDual, negate(f->left));
    case FKind::AgStitDual: return mk_un(FKind::AgStit, negate(f->left));
    case FKind::G: return mk_un(FKind::F, negate(f->left));
    case FKind::F: return mk_un(FKind::G, negate(f->left));
    case FKind::H: return mk_un(FKind::P, negate(f->left));
    case FKind::P: return mk_un(FKind::H, negate(f->left));
    case FKind::XStit: return mk_xstit(f->group, negate(f->left), true);
    case FKind::XStitDual: return mk_xstit(f->group, negate(f->left), false);
    case FKind::Next: return mk_un(FKind::NextDual, negate(f->left));
    case FKind::NextDual: return mk_un(FKind::Next, negate(f->left));
  }
  throw std::logic_error("negate: bad kind");
}

inline Fml implies(const Fml& a, const Fml& b) { return mk_or(negate(a), b); }

inline Fml iff(const Fml& a, const Fml& b) {
  return mk_and(implies(a, b), implies(b, a));
}

// Top and bottom over the reserved atom p0.
inline Fml top() { return mk_or(mk_atom("p0"), mk_atom("p0", false)); }
inline Fml bottom() { return mk_and(mk_atom("p0"), mk_atom("p0", false)); }

// Smallest language tier a formula belongs to, or throws if it mixes the
// tstit-only and xstit-only tiers.
inline bool fml_tier_scan(const Fml& f, bool& tstit_only, bool& xstit_only) {
  switch (f->kind) {
    case FKind::AgStit: case FKind::AgStitDual:
    case FKind::G: case FKind::F: case FKind::H: case FKind::P:
      tstit_only = true;
      break;
    case FKind::XStit: case FKind::XStitDual:
    case FKind::Next: case FKind::NextDual:
      xstit_only = true;
      break;
    default:
      break;
  }
  if (f->left) fml_tier_scan(f->left, tstit_only, xstit_only);
  if (f->right) fml_tier_scan(f->right, tstit_only, xstit_only);
  return !(tstit_only && xstit_only);
}

inline bool fits_logic(const Fml& f, Logic logic) {
  bool t = false, x = false;
  if (!fml_tier_scan(f, t, x)) return false;
  switch (logic) {
    case Logic::Ldm: return !t && !x;
    case Logic::Tstit: return !x;
    case Logic::Xstit: return !t;
  }
  return false;
}

// Agent stit in ldm/tstit uses per-agent relations; xstit uses groups.
// Checks indices/groups fit the configured agent count and the connective
// inventory fits the logic.
inline bool well_formed(const Fml& f, Logic logic, int agents) {
  if (f->agent != 0 && (f->agent < 1 || f->agent > agents)) return false;
  if ((f->kind == FKind::XStit || f->kind == FKind::XStitDual) &&
      !group_subset(f->group, full_group(agents)))
    return false;
  switch (f->kind) {
    case FKind::Stit: case FKind::StitDual:
      if (logic == Logic::Xstit) return false;
      break;
    case FKind::AgStit: case FKind::AgStitDual:
    case FKind::G: case FKind::F: case FKind::H: case FKind::P:
      if (logic != Logic::Tstit) return false;
      break;
    case FKind::XStit: case FKind::XStitDual:
    case FKind::Next: case FKind::NextDual:
      if (logic != Logic::Xstit) return false;
      break;
    default:
      break;
  }
  if (f->left && !well_formed(f->left, logic, agents)) return false;
  if (f->right && !well_formed(f->right, logic, agents)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Printing.  Precedence: unary (tightest) > & > |.  The sugar connectives
// are expanded at parse time, so the printer only handles NNF.
// ---------------------------------------------------------------------------

inline int fml_prec(FKind k) {
  switch (k) {
    case FKind::Or: return 0;
    case FKind::And: return 1;
    default: return 2;
  }
}

inline std::string render(const Fml& f);

inline std::string render_child(const Fml& c, int parent_prec) {
  std::string s = render(c);
  if (fml_prec(c->kind) < parent_prec) return "(" + s + ")";
  return s;
}

inline std::string render_unary_operand(const Fml& c) {
  // Unary operands bind tighter than & and |.
  std::string s = render(c);
  if (fml_prec(c->kind) < 2) return "(" + s + ")";
  return s;
}

inline std::string render(const Fml& f) {
  switch (f->kind) {
    case FKind::PosAtom: return f->atom;
    case FKind::NegAtom: return "~" + f->atom;
    case FKind::And:
      return render_child(f->left, 1) + " & " + render_child(f->right, 1);
    case FKind::Or:
      return render_child(f->left, 0) + " | " + render_child(f->right, 0);
    case FKind::Box: return "[]" + render_unary_operand(f->left);
    case FKind::Diamond: return "<>" + render_unary_operand(f->left);
    case FKind::Stit:
      return "[" + std::to_string(f->agent) + "]" + render_unary_operand(f->left);
    case FKind::StitDual:
      return "<" + std::to_string(f->agent) + ">" + render_unary_operand(f->left);
    case FKind::AgStit: return "[Ag]" + render_unary_operand(f->left);
    case FKind::AgStitDual: return "<Ag>" + render_unary_operand(f->left);
    case FKind::G: return "G " + render_unary_operand(f->left);
    case FKind::F: return "F " + render_unary_operand(f->left);
    case FKind::H: return "H " + render_unary_operand(f->left);
    case FKind::P: return "P " + render_unary_operand(f->left);
    case FKind::XStit:
      return "[" + group_text(f->group) + "]x " + render_unary_operand(f->left);
    case FKind::XStitDual:
      return "<" + group_text(f->group) + ">x " + render_unary_operand(f->left);
    case FKind::Next: return "[X]" + render_unary_operand(f->left);
    case FKind::NextDual: return "<X>" + render_unary_operand(f->left);
  }
  throw std::logic_error("render: bad kind");
}

// ---------------------------------------------------------------------------
// Parsing.
// ---------------------------------------------------------------------------

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(const std::string& msg, size_t at)
      : std::runtime_error(msg + " (at position " + std::to_string(at) + ")"),
        pos(at) {}
};

namespace detail {

class FormulaParser {
 public:
  FormulaParser(const std::string& text, Logic logic, int agents)
      : s_(text), logic_(logic), agents_(agents) {}

  Fml parse() {
    Fml f = parse_iff();
    skip_ws();
    if (pos_ != s_.size()) err("trailing input");
    return f;
  }

 private:
  const std::string& s_;
  Logic logic_;
  int agents_;
  size_t pos_ = 0;

  [[noreturn]] void err(const std::string& msg) { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' ||
                                s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }

  bool eat(const std::string& tok) {
    skip_ws();
    if (s_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  bool peek(const std::string& tok) {
    skip_ws();
    return s_.compare(pos_, tok.size(), tok) == 0;
  }

  void expect(const std::string& tok) {
    if (!eat(tok)) err("expected '" + tok + "'");
  }

  void require_tier(Logic needed_at_least, const std::string& what) {
    bool ok = (needed_at_least == Logic::Tstit && logic_ == Logic::Tstit) ||
              (needed_at_least == Logic::Xstit && logic_ == Logic::Xstit);
    if (!ok) err("'" + what + "' is not in the " + logic_name(logic_) + " language");
  }

  Fml parse_iff() {
    Fml a = parse_impl();
    if (eat("<->")) {
      Fml b = parse_iff();
      return iff(a, b);
    }
    return a;
  }

  Fml parse_impl() {
    Fml a = parse_or();
    skip_ws();
    if (s_.compare(pos_, 2, "->") == 0) {
      pos_ += 2;
      Fml b = parse_impl();
      return implies(a, b);
    }
    return a;
  }

  Fml parse_or() {
    Fml a = parse_and();
    while (true) {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '|' &&
          s_.compare(pos_, 3, "|_|") != 0) {
        ++pos_;
        a = mk_or(a, parse_and());
      } else {
        break;
      }
    }
    return a;
  }

  Fml parse_and() {
    Fml a = parse_unary();
    while (eat("&")) a = mk_and(a, parse_unary());
    return a;
  }

  std::string read_word() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && (isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) err("expected a formula");
    return s_.substr(start, pos_ - start);
  }

  int read_agent_index() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && isdigit((unsigned char)s_[pos_])) ++pos_;
    if (start == pos_) err("expected an agent index");
    int i = std::stoi(s_.substr(start, pos_ - start));
    if (i < 1 || i > agents_) err("agent index out of range");
    return i;
  }

  AgentGroup read_group() {
    expect("{");
    AgentGroup g = 0;
    skip_ws();
    if (!peek("}")) {
      while (true) {
        int i = read_agent_index();
        g |= AgentGroup{1} << (i - 1);
        if (!eat(",")) break;
      }
    }
    expect("}");
    return g;
  }

  Fml parse_unary() {
    skip_ws();
    if (pos_ >= s_.size()) err("unexpected end of input");
    char c = s_[pos_];

    if (c == '(') {
      ++pos_;
      Fml f = parse_iff();
      expect(")");
      return f;
    }
    if (eat("_|_")) return bottom();
    if (c == '~') {
      ++pos_;
      std::string name = read_word();
      if (!islower((unsigned char)name[0])) err("'~' applies to atoms only");
      return mk_atom(name, false);
    }
    if (c == '[') {
      ++pos_;
      skip_ws();
      if (eat("]")) return mk_un(FKind::Box, parse_unary());
      if (eat("Ag]")) {
        require_tier(Logic::Tstit, "[Ag]");
        return mk_un(FKind::AgStit, parse_unary());
      }
      if (eat("X]")) {
        require_tier(Logic::Xstit, "[X]");
        return mk_un(FKind::Next, parse_unary());
      }
      if (peek("{")) {
        AgentGroup g = read_group();
        expect("]");
        expect("x");
        require_tier(Logic::Xstit, "[{..}]x");
        return mk_xstit(g, parse_unary());
      }
      int i = read_agent_index();
      expect("]");
      if (logic_ == Logic::Xstit) err("per-agent stit is not in the xstit language");
      if (pos_ < s_.size() && s_[pos_] == 'd' &&
          (pos_ + 1 == s_.size() || !isalnum((unsigned char)s_[pos_ + 1]))) {
        // Deliberative stit sugar: [i]d f == [i]f & <>neg(f).
        ++pos_;
        Fml body = parse_unary();
        return mk_and(mk_stit(i, body), mk_un(FKind::Diamond, negate(body)));
      }
      return mk_stit(i, parse_unary());
    }
    if (c == '<') {
      ++pos_;
      skip_ws();
      if (eat(">")) return mk_un(FKind::Diamond, parse_unary());
      if (eat("Ag>")) {
        require_tier(Logic::Tstit, "<Ag>");
        return mk_un(FKind::AgStitDual, parse_unary());
      }
      if (eat("X>")) {
        require_tier(Logic::Xstit, "<X>");
        return mk_un(FKind::NextDual, parse_unary());
      }
      if (peek("{")) {
        AgentGroup g = read_group();
        expect(">");
        expect("x");
        require_tier(Logic::Xstit, "<{..}>x");
        return mk_xstit(g, parse_unary(), true);
      }
      int i = read_agent_index();
      expect(">");
      if (logic_ == Logic::Xstit) err("per-agent stit is not in the xstit language");
      return mk_stit(i, parse_unary(), true);
    }

    std::string word = read_word();
    if (word == "G" || word == "F" || word == "H" || word == "P") {
      require_tier(Logic::Tstit, word);
      FKind k = word == "G" ? FKind::G
              : word == "F" ? FKind::F
              : word == "H" ? FKind::H : FKind::P;
      return mk_un(k, parse_unary());
    }
    if (word == "T") return top();
    if (word == "neg") {
      expect("(");
      Fml f = parse_iff();
      expect(")");
      return negate(f);
    }
    if (!islower((unsigned char)word[0]))
      err("unknown token '" + word + "'");
    return mk_atom(word);
  }
};

}  // namespace detail

inline Fml parse(const std::string& text, Logic logic, int agents) {
  return detail::FormulaParser(text, logic, agents).parse();
}

}  // namespace stit

#endif
