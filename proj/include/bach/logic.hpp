#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bach/errors.hpp"
#include "bach/store.hpp"
#include "bach/term.hpp"

namespace bach {

/// A state formula evaluated against a single store: presence of a term,
/// negation, conjunction, disjunction.
class BasicFormula {
public:
  enum class Kind { bf, negation, conjunction, disjunction };

  Kind kind() const;

  /// Observed term (kind bf only).
  const SiTerm& term() const;

  /// Operand of a negation.
  const BasicFormula& operand() const;

  // conjunction / disjunction
  const BasicFormula& left() const;
  const BasicFormula& right() const;

  friend bool operator==(const BasicFormula& a, const BasicFormula& b);
  friend bool operator!=(const BasicFormula& a, const BasicFormula& b) {
    return !(a == b);
  }

  friend BasicFormula bf(SiTerm t);
  friend BasicFormula operator!(BasicFormula f);
  friend BasicFormula operator&(BasicFormula a, BasicFormula b);
  friend BasicFormula operator|(BasicFormula a, BasicFormula b);

private:
  struct Node;
  explicit BasicFormula(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct BasicFormula::Node {
  struct Bf {
    SiTerm term;
  };
  struct Not {
    BasicFormula operand;
  };
  struct Bin {
    BasicFormula left;
    BasicFormula right;
  };

  using Variant = std::variant<Bf, Not, Bin>;

  Node(Kind k, Variant val) : kind(k), v(std::move(val)) {}

  Kind kind;
  Variant v;
};

inline BasicFormula::Kind BasicFormula::kind() const { return node_->kind; }
inline const SiTerm& BasicFormula::term() const {
  return std::get<Node::Bf>(node_->v).term;
}
inline const BasicFormula& BasicFormula::operand() const {
  return std::get<Node::Not>(node_->v).operand;
}
inline const BasicFormula& BasicFormula::left() const {
  return std::get<Node::Bin>(node_->v).left;
}
inline const BasicFormula& BasicFormula::right() const {
  return std::get<Node::Bin>(node_->v).right;
}

/// Atom asserting the presence of a ground term on the store.
inline BasicFormula bf(SiTerm t) {
  if (!t.is_ground()) {
    throw ValidationError("bf: observed term must be ground, got " + render(t));
  }
  return BasicFormula(std::make_shared<BasicFormula::Node>(
      BasicFormula::Kind::bf, BasicFormula::Node::Bf{std::move(t)}));
}

inline BasicFormula operator!(BasicFormula f) {
  return BasicFormula(std::make_shared<BasicFormula::Node>(
      BasicFormula::Kind::negation, BasicFormula::Node::Not{std::move(f)}));
}

inline BasicFormula operator&(BasicFormula a, BasicFormula b) {
  return BasicFormula(std::make_shared<BasicFormula::Node>(
      BasicFormula::Kind::conjunction,
      BasicFormula::Node::Bin{std::move(a), std::move(b)}));
}

inline BasicFormula operator|(BasicFormula a, BasicFormula b) {
  return BasicFormula(std::make_shared<BasicFormula::Node>(
      BasicFormula::Kind::disjunction,
      BasicFormula::Node::Bin{std::move(a), std::move(b)}));
}

inline bool operator==(const BasicFormula& a, const BasicFormula& b) {
  if (a.node_ == b.node_) {
    return true;
  }
  if (a.kind() != b.kind()) {
    return false;
  }
  switch (a.kind()) {
    case BasicFormula::Kind::bf:
      return a.term() == b.term();
    case BasicFormula::Kind::negation:
      return a.operand() == b.operand();
    case BasicFormula::Kind::conjunction:
    case BasicFormula::Kind::disjunction:
      return a.left() == b.left() && a.right() == b.right();
  }
  return false;
}

/// Truth of a basic formula on a store.
inline bool sat_basic(const Store& s, const BasicFormula& f) {
  switch (f.kind()) {
    case BasicFormula::Kind::bf:
      return s.ask(f.term());
    case BasicFormula::Kind::negation:
      return !sat_basic(s, f.operand());
    case BasicFormula::Kind::conjunction:
      return sat_basic(s, f.left()) && sat_basic(s, f.right());
    case BasicFormula::Kind::disjunction:
      return sat_basic(s, f.left()) || sat_basic(s, f.right());
  }
  throw Error("sat_basic: corrupt formula");
}

namespace detail {

// Precedence for printing: '|' binds loosest, then '&', then '!'.
inline int basic_level(const BasicFormula& f) {
  switch (f.kind()) {
    case BasicFormula::Kind::disjunction: return 0;
    case BasicFormula::Kind::conjunction: return 1;
    case BasicFormula::Kind::negation: return 2;
    case BasicFormula::Kind::bf: return 3;
  }
  return 3;
}

inline void pretty_basic_rec(std::string& out, const BasicFormula& f,
                             int min_level) {
  const int level = basic_level(f);
  const bool parens = level < min_level;
  if (parens) {
    out += '(';
  }
  switch (f.kind()) {
    case BasicFormula::Kind::bf:
      out += "bf(";
      render_term(out, f.term());
      out += ')';
      break;
    case BasicFormula::Kind::negation:
      out += '!';
      pretty_basic_rec(out, f.operand(), 2);
      break;
    case BasicFormula::Kind::conjunction:
      pretty_basic_rec(out, f.left(), 1);
      out += " & ";
      pretty_basic_rec(out, f.right(), 2);
      break;
    case BasicFormula::Kind::disjunction:
      pretty_basic_rec(out, f.left(), 0);
      out += " | ";
      pretty_basic_rec(out, f.right(), 1);
      break;
  }
  if (parens) {
    out += ')';
  }
}

}  // namespace detail

inline std::string pretty_basic(const BasicFormula& f) {
  std::string out;
  detail::pretty_basic_rec(out, f, 0);
  return out;
}

/// A constraint formula over whole executions: basic formulas checked one
/// step at a time, named recursion, choice, sequence, and the satisfied
/// residual epsilon. Epsilon never occurs in user formulae; it only arises
/// during derivation.
class BslFormula {
public:
  enum class Kind { basic, fvar, fchoice, fseq, epsilon };

  Kind kind() const;
  bool is_epsilon() const { return kind() == Kind::epsilon; }

  const BasicFormula& basic_part() const;
  const std::string& fvar_name() const;
  const BslFormula& left() const;
  const BslFormula& right() const;

  friend bool operator==(const BslFormula& a, const BslFormula& b);
  friend bool operator!=(const BslFormula& a, const BslFormula& b) {
    return !(a == b);
  }

  friend BslFormula basic(BasicFormula f);
  friend BslFormula fvar(std::string name);
  friend BslFormula fchoice(BslFormula a, BslFormula b);
  friend BslFormula fseq(BslFormula a, BslFormula b);
  friend BslFormula epsilon();

private:
  struct Node;
  explicit BslFormula(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct BslFormula::Node {
  struct Basic {
    BasicFormula f;
  };
  struct FVar {
    std::string name;
  };
  struct Bin {
    BslFormula left;
    BslFormula right;
  };
  struct Epsilon {};

  using Variant = std::variant<Basic, FVar, Bin, Epsilon>;

  Node(Kind k, Variant val) : kind(k), v(std::move(val)) {}

  Kind kind;
  Variant v;
};

inline BslFormula::Kind BslFormula::kind() const { return node_->kind; }
inline const BasicFormula& BslFormula::basic_part() const {
  return std::get<Node::Basic>(node_->v).f;
}
inline const std::string& BslFormula::fvar_name() const {
  return std::get<Node::FVar>(node_->v).name;
}
inline const BslFormula& BslFormula::left() const {
  return std::get<Node::Bin>(node_->v).left;
}
inline const BslFormula& BslFormula::right() const {
  return std::get<Node::Bin>(node_->v).right;
}

inline BslFormula basic(BasicFormula f) {
  return BslFormula(std::make_shared<BslFormula::Node>(
      BslFormula::Kind::basic, BslFormula::Node::Basic{std::move(f)}));
}

inline BslFormula fvar(std::string name) {
  if (!is_identifier(name)) {
    throw ValidationError("formula name must be an identifier: '" + name + "'");
  }
  return BslFormula(std::make_shared<BslFormula::Node>(
      BslFormula::Kind::fvar, BslFormula::Node::FVar{std::move(name)}));
}

inline BslFormula fchoice(BslFormula a, BslFormula b) {
  return BslFormula(std::make_shared<BslFormula::Node>(
      BslFormula::Kind::fchoice,
      BslFormula::Node::Bin{std::move(a), std::move(b)}));
}

inline BslFormula epsilon() {
  return BslFormula(std::make_shared<BslFormula::Node>(
      BslFormula::Kind::epsilon, BslFormula::Node::Epsilon{}));
}

/// Sequence of constraints. A satisfied left part is dropped eagerly, so
/// fseq(epsilon, g) is g.
inline BslFormula fseq(BslFormula a, BslFormula b) {
  if (a.is_epsilon()) {
    return b;
  }
  return BslFormula(std::make_shared<BslFormula::Node>(
      BslFormula::Kind::fseq,
      BslFormula::Node::Bin{std::move(a), std::move(b)}));
}

inline bool operator==(const BslFormula& a, const BslFormula& b) {
  if (a.node_ == b.node_) {
    return true;
  }
  if (a.kind() != b.kind()) {
    return false;
  }
  switch (a.kind()) {
    case BslFormula::Kind::basic:
      return a.basic_part() == b.basic_part();
    case BslFormula::Kind::fvar:
      return a.fvar_name() == b.fvar_name();
    case BslFormula::Kind::fchoice:
    case BslFormula::Kind::fseq:
      return a.left() == b.left() && a.right() == b.right();
    case BslFormula::Kind::epsilon:
      return true;
  }
  return false;
}

/// A formula is fully satisfied exactly when its residual is epsilon.
inline bool is_satisfied(const BslFormula& f) { return f.is_epsilon(); }

namespace detail {

inline bool contains_epsilon(const BslFormula& f) {
  switch (f.kind()) {
    case BslFormula::Kind::epsilon:
      return true;
    case BslFormula::Kind::basic:
    case BslFormula::Kind::fvar:
      return false;
    case BslFormula::Kind::fchoice:
    case BslFormula::Kind::fseq:
      return contains_epsilon(f.left()) || contains_epsilon(f.right());
  }
  return false;
}

}  // namespace detail

/// Named formula definitions, kept in declaration order. Mutual recursion is
/// permitted; run validate() once all names are in.
class FormulaEnv {
public:
  void define(std::string name, BslFormula f) {
    if (!is_identifier(name)) {
      throw ValidationError("formula name must be an identifier: '" + name +
                            "'");
    }
    if (index_.count(name)) {
      throw DuplicateDefinitionError(name);
    }
    if (detail::contains_epsilon(f)) {
      throw ValidationError("formula " + name +
                            " contains the satisfied residual eps");
    }
    index_[name] = defs_.size();
    defs_.emplace_back(std::move(name), std::move(f));
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const BslFormula* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &defs_[it->second].second;
  }

  const BslFormula& at(const std::string& name) const {
    const BslFormula* f = find(name);
    if (!f) {
      throw UnknownFormulaVariableError(name);
    }
    return *f;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(defs_.size());
    for (const auto& [name, f] : defs_) {
      out.push_back(name);
    }
    return out;
  }

  std::size_t size() const { return defs_.size(); }

private:
  std::vector<std::pair<std::string, BslFormula>> defs_;
  std::map<std::string, std::size_t> index_;
};

namespace detail {

inline void check_formula_resolves(const BslFormula& f, const FormulaEnv& env) {
  switch (f.kind()) {
    case BslFormula::Kind::basic:
    case BslFormula::Kind::epsilon:
      return;
    case BslFormula::Kind::fvar:
      if (!env.contains(f.fvar_name())) {
        throw UnknownFormulaVariableError(f.fvar_name());
      }
      return;
    case BslFormula::Kind::fchoice:
    case BslFormula::Kind::fseq:
      check_formula_resolves(f.left(), env);
      check_formula_resolves(f.right(), env);
      return;
  }
}

inline void check_guarded_formula(const BslFormula& f, const FormulaEnv& env,
                                  std::set<std::string>& done,
                                  std::set<std::string>& visiting);

inline void check_guarded_fvar(const std::string& name, const FormulaEnv& env,
                               std::set<std::string>& done,
                               std::set<std::string>& visiting) {
  if (done.count(name)) {
    return;
  }
  if (!visiting.insert(name).second) {
    throw UnguardedFormulaError(name);
  }
  check_guarded_formula(env.at(name), env, done, visiting);
  visiting.erase(name);
  done.insert(name);
}

inline void check_guarded_formula(const BslFormula& f, const FormulaEnv& env,
                                  std::set<std::string>& done,
                                  std::set<std::string>& visiting) {
  switch (f.kind()) {
    case BslFormula::Kind::basic:
    case BslFormula::Kind::epsilon:
      return;
    case BslFormula::Kind::fvar:
      check_guarded_fvar(f.fvar_name(), env, done, visiting);
      return;
    case BslFormula::Kind::fchoice:
      check_guarded_formula(f.left(), env, done, visiting);
      check_guarded_formula(f.right(), env, done, visiting);
      return;
    case BslFormula::Kind::fseq:
      // Only the left part is derived first, so it alone must be guarded.
      check_guarded_formula(f.left(), env, done, visiting);
      return;
  }
}

}  // namespace detail

/// Whole-environment checks: every formula variable resolves and recursion
/// passes through a basic formula before re-entering a name.
inline void validate(const FormulaEnv& env) {
  for (const std::string& name : env.names()) {
    detail::check_formula_resolves(env.at(name), env);
  }
  std::set<std::string> done;
  for (const std::string& name : env.names()) {
    std::set<std::string> visiting;
    detail::check_guarded_fvar(name, env, done, visiting);
  }
}

namespace detail {

inline void derive_rec(const Store& s, const BslFormula& f,
                       const FormulaEnv& env, std::set<std::string>& visiting,
                       std::vector<BslFormula>& out) {
  auto push_unique = [&out](BslFormula r) {
    for (const BslFormula& seen : out) {
      if (seen == r) {
        return;
      }
    }
    out.push_back(std::move(r));
  };
  switch (f.kind()) {
    case BslFormula::Kind::epsilon:
      throw Error("derive: formula is already satisfied");
    case BslFormula::Kind::basic:
      if (sat_basic(s, f.basic_part())) {
        push_unique(epsilon());
      }
      return;
    case BslFormula::Kind::fvar: {
      // Re-entering a name before any basic formula was consumed means the
      // recursion is unguarded; validated environments never trigger this.
      if (!visiting.insert(f.fvar_name()).second) {
        throw UnguardedFormulaError(f.fvar_name());
      }
      derive_rec(s, env.at(f.fvar_name()), env, visiting, out);
      visiting.erase(f.fvar_name());
      return;
    }
    case BslFormula::Kind::fchoice:
      derive_rec(s, f.left(), env, visiting, out);
      derive_rec(s, f.right(), env, visiting, out);
      return;
    case BslFormula::Kind::fseq: {
      std::vector<BslFormula> inner;
      derive_rec(s, f.left(), env, visiting, inner);
      for (BslFormula& r : inner) {
        push_unique(fseq(std::move(r), f.right()));
      }
      return;
    }
  }
}

}  // namespace detail

/// All residual formulas derivable from f against store s, deduplicated, in
/// a deterministic left-to-right order. An empty result means no step of the
/// monitored agent may be taken from s under f.
inline std::vector<BslFormula> derive(const Store& s, const BslFormula& f,
                                      const FormulaEnv& env) {
  std::vector<BslFormula> out;
  std::set<std::string> visiting;
  detail::derive_rec(s, f, env, visiting, out);
  return out;
}

namespace detail {

// fchoice binds loosest, then fseq; basic formulas, names and eps are atoms.
inline int formula_level(const BslFormula& f) {
  switch (f.kind()) {
    case BslFormula::Kind::fchoice: return 0;
    case BslFormula::Kind::fseq: return 1;
    default: return 2;
  }
}

inline void pretty_formula_rec(std::string& out, const BslFormula& f,
                               int min_level) {
  const int level = formula_level(f);
  const bool parens = level < min_level;
  if (parens) {
    out += '(';
  }
  switch (f.kind()) {
    case BslFormula::Kind::basic:
      pretty_basic_rec(out, f.basic_part(), 0);
      break;
    case BslFormula::Kind::fvar:
      out += f.fvar_name();
      break;
    case BslFormula::Kind::epsilon:
      out += "eps";
      break;
    case BslFormula::Kind::fchoice:
      pretty_formula_rec(out, f.left(), 0);
      out += " + ";
      pretty_formula_rec(out, f.right(), 1);
      break;
    case BslFormula::Kind::fseq:
      pretty_formula_rec(out, f.left(), 1);
      out += " ; ";
      pretty_formula_rec(out, f.right(), 2);
      break;
  }
  if (parens) {
    out += ')';
  }
}

}  // namespace detail

inline std::string pretty_formula(const BslFormula& f) {
  std::string out;
  detail::pretty_formula_rec(out, f, 0);
  return out;
}

}  // namespace bach
