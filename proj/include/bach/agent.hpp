#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bach/errors.hpp"
#include "bach/term.hpp"

namespace bach {

enum class PrimKind { tell, ask, get, nask };

inline std::string_view prim_name(PrimKind k) {
  switch (k) {
    case PrimKind::tell: return "tell";
    case PrimKind::ask: return "ask";
    case PrimKind::get: return "get";
    case PrimKind::nask: return "nask";
  }
  return "?";
}

/// An agent expression. Immutable, structure-shared. The `empty` kind is the
/// terminated marker: it never appears in source programs, only as a residue
/// of execution.
class Agent {
public:
  enum class Kind { prim, seq, par, choice, gsum, call, empty };

  Kind kind() const;
  bool is_empty() const { return kind() == Kind::empty; }

  // prim
  PrimKind prim_kind() const;
  const SiTerm& term() const;

  // seq / par / choice
  const Agent& left() const;
  const Agent& right() const;

  // gsum
  const std::string& binder() const;
  const std::vector<SiTerm>& domain() const;
  const Agent& body() const;

  // call
  const std::string& callee() const;
  const std::vector<SiTerm>& call_args() const;

  friend bool operator==(const Agent& a, const Agent& b);
  friend bool operator!=(const Agent& a, const Agent& b) { return !(a == b); }

  friend Agent tell(SiTerm t);
  friend Agent ask(SiTerm t);
  friend Agent get(SiTerm t);
  friend Agent nask(SiTerm t);
  friend Agent seq(Agent a, Agent b);
  friend Agent par(Agent a, Agent b);
  friend Agent choice(Agent a, Agent b);
  friend Agent gsum(std::string binder, std::vector<SiTerm> domain, Agent body);
  friend Agent call(std::string name, std::vector<SiTerm> args);
  friend Agent empty_agent();

private:
  struct Node;
  explicit Agent(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Agent::Node {
  struct Prim {
    PrimKind op;
    SiTerm term;
  };
  struct Bin {
    Agent left;
    Agent right;
  };
  struct Sum {
    std::string binder;
    std::vector<SiTerm> domain;
    Agent body;
  };
  struct Call {
    std::string name;
    std::vector<SiTerm> args;
  };
  struct Empty {};

  using Variant = std::variant<Prim, Bin, Sum, Call, Empty>;

  Node(Kind k, Variant val) : kind(k), v(std::move(val)) {}

  Kind kind;
  Variant v;
};

inline Agent::Kind Agent::kind() const { return node_->kind; }
inline PrimKind Agent::prim_kind() const {
  return std::get<Node::Prim>(node_->v).op;
}
inline const SiTerm& Agent::term() const {
  return std::get<Node::Prim>(node_->v).term;
}
inline const Agent& Agent::left() const {
  return std::get<Node::Bin>(node_->v).left;
}
inline const Agent& Agent::right() const {
  return std::get<Node::Bin>(node_->v).right;
}
inline const std::string& Agent::binder() const {
  return std::get<Node::Sum>(node_->v).binder;
}
inline const std::vector<SiTerm>& Agent::domain() const {
  return std::get<Node::Sum>(node_->v).domain;
}
inline const Agent& Agent::body() const {
  return std::get<Node::Sum>(node_->v).body;
}
inline const std::string& Agent::callee() const {
  return std::get<Node::Call>(node_->v).name;
}
inline const std::vector<SiTerm>& Agent::call_args() const {
  return std::get<Node::Call>(node_->v).args;
}

inline Agent tell(SiTerm t) {
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::prim, Agent::Node::Prim{PrimKind::tell, std::move(t)}));
}
inline Agent ask(SiTerm t) {
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::prim, Agent::Node::Prim{PrimKind::ask, std::move(t)}));
}
inline Agent get(SiTerm t) {
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::prim, Agent::Node::Prim{PrimKind::get, std::move(t)}));
}
inline Agent nask(SiTerm t) {
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::prim, Agent::Node::Prim{PrimKind::nask, std::move(t)}));
}

inline Agent seq(Agent a, Agent b) {
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::seq, Agent::Node::Bin{std::move(a), std::move(b)}));
}
inline Agent par(Agent a, Agent b) {
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::par, Agent::Node::Bin{std::move(a), std::move(b)}));
}
inline Agent choice(Agent a, Agent b) {
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::choice, Agent::Node::Bin{std::move(a), std::move(b)}));
}

namespace detail {

inline Agent make_prim(PrimKind k, SiTerm t) {
  switch (k) {
    case PrimKind::tell: return tell(std::move(t));
    case PrimKind::ask: return ask(std::move(t));
    case PrimKind::get: return get(std::move(t));
    case PrimKind::nask: return nask(std::move(t));
  }
  throw Error("make_prim: corrupt primitive kind");
}

inline Agent make_bin(Agent::Kind k, Agent a, Agent b) {
  switch (k) {
    case Agent::Kind::seq: return seq(std::move(a), std::move(b));
    case Agent::Kind::par: return par(std::move(a), std::move(b));
    case Agent::Kind::choice: return choice(std::move(a), std::move(b));
    default: throw Error("make_bin: not a composition kind");
  }
}

}  // namespace detail

/// Generalized sum: one branch per domain element, obtained by substituting
/// the element for the binder in the body. The domain must be nonempty and
/// ground.
inline Agent gsum(std::string binder, std::vector<SiTerm> domain, Agent body) {
  if (!is_upper_identifier(binder)) {
    throw ValidationError("sum binder must start with an uppercase letter: '" +
                          binder + "'");
  }
  if (domain.empty()) {
    throw ValidationError("sum over " + binder + " has an empty domain");
  }
  for (const SiTerm& d : domain) {
    if (!d.is_ground()) {
      throw ValidationError("sum domain element must be ground: " + render(d));
    }
  }
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::gsum,
      Agent::Node::Sum{std::move(binder), std::move(domain), std::move(body)}));
}

inline Agent call(std::string name, std::vector<SiTerm> args = {}) {
  if (!is_identifier(name)) {
    throw ValidationError("procedure name must be an identifier: '" + name + "'");
  }
  if (name == "E") {
    throw ValidationError("'E' is reserved for the terminated agent");
  }
  return Agent(std::make_shared<Agent::Node>(
      Agent::Kind::call, Agent::Node::Call{std::move(name), std::move(args)}));
}

/// The terminated agent E.
inline Agent empty_agent() {
  return Agent(std::make_shared<Agent::Node>(Agent::Kind::empty,
                                             Agent::Node::Empty{}));
}

inline bool operator==(const Agent& a, const Agent& b) {
  if (a.node_ == b.node_) {
    return true;
  }
  if (a.kind() != b.kind()) {
    return false;
  }
  switch (a.kind()) {
    case Agent::Kind::prim:
      return a.prim_kind() == b.prim_kind() && a.term() == b.term();
    case Agent::Kind::seq:
    case Agent::Kind::par:
    case Agent::Kind::choice:
      return a.left() == b.left() && a.right() == b.right();
    case Agent::Kind::gsum:
      return a.binder() == b.binder() && a.domain() == b.domain() &&
             a.body() == b.body();
    case Agent::Kind::call:
      return a.callee() == b.callee() && a.call_args() == b.call_args();
    case Agent::Kind::empty:
      return true;
  }
  return false;
}

/// Removes the terminated marker where the calculus makes it a unit:
/// E;A -> A, E||A -> A, A||E -> A. Note there is no rule for Seq(A, E).
/// Idempotent.
inline Agent normalize(const Agent& a) {
  switch (a.kind()) {
    case Agent::Kind::prim:
    case Agent::Kind::call:
    case Agent::Kind::empty:
      return a;
    case Agent::Kind::seq: {
      Agent l = normalize(a.left());
      Agent r = normalize(a.right());
      if (l.is_empty()) {
        return r;
      }
      if (l == a.left() && r == a.right()) {
        return a;
      }
      return seq(std::move(l), std::move(r));
    }
    case Agent::Kind::par: {
      Agent l = normalize(a.left());
      Agent r = normalize(a.right());
      if (l.is_empty()) {
        return r;
      }
      if (r.is_empty()) {
        return l;
      }
      if (l == a.left() && r == a.right()) {
        return a;
      }
      return par(std::move(l), std::move(r));
    }
    case Agent::Kind::choice: {
      Agent l = normalize(a.left());
      Agent r = normalize(a.right());
      if (l == a.left() && r == a.right()) {
        return a;
      }
      return choice(std::move(l), std::move(r));
    }
    case Agent::Kind::gsum: {
      Agent b = normalize(a.body());
      if (b == a.body()) {
        return a;
      }
      return gsum(a.binder(), a.domain(), std::move(b));
    }
  }
  throw Error("normalize: corrupt agent");
}

/// Replaces the named variable by a ground value in every term position.
/// An inner sum over the same name shadows the substitution.
inline Agent substitute(const Agent& a, std::string_view var_name,
                        const SiTerm& value) {
  switch (a.kind()) {
    case Agent::Kind::empty:
      return a;
    case Agent::Kind::prim: {
      SiTerm t = substitute(a.term(), var_name, value);
      if (t == a.term()) {
        return a;
      }
      return detail::make_prim(a.prim_kind(), std::move(t));
    }
    case Agent::Kind::seq:
    case Agent::Kind::par:
    case Agent::Kind::choice: {
      Agent l = substitute(a.left(), var_name, value);
      Agent r = substitute(a.right(), var_name, value);
      if (l == a.left() && r == a.right()) {
        return a;
      }
      return detail::make_bin(a.kind(), std::move(l), std::move(r));
    }
    case Agent::Kind::gsum: {
      if (a.binder() == var_name) {
        return a;  // shadowed; the domain is ground by construction
      }
      Agent b = substitute(a.body(), var_name, value);
      if (b == a.body()) {
        return a;
      }
      return gsum(a.binder(), a.domain(), std::move(b));
    }
    case Agent::Kind::call: {
      std::vector<SiTerm> args;
      args.reserve(a.call_args().size());
      bool changed = false;
      for (const SiTerm& t : a.call_args()) {
        SiTerm s = substitute(t, var_name, value);
        changed = changed || !(s == t);
        args.push_back(std::move(s));
      }
      if (!changed) {
        return a;
      }
      return call(a.callee(), std::move(args));
    }
  }
  throw Error("substitute: corrupt agent");
}

/// Expands a generalized sum into a right-nested chain of binary choices,
/// one branch per domain element. A singleton domain yields the substituted
/// body directly.
inline Agent expand_gsum(const Agent& g) {
  if (g.kind() != Agent::Kind::gsum) {
    throw Error("expand_gsum: agent is not a sum");
  }
  const auto& dom = g.domain();
  Agent acc = substitute(g.body(), g.binder(), dom.back());
  for (std::size_t i = dom.size() - 1; i-- > 0;) {
    acc = choice(substitute(g.body(), g.binder(), dom[i]), std::move(acc));
  }
  return acc;
}

/// A procedure definition: formal parameter names (uppercase identifiers)
/// plus a body in which they occur as variables.
struct ProcDef {
  std::vector<std::string> formals;
  Agent body;
};

/// Named procedure definitions, kept in declaration order.
class ProcEnv {
public:
  /// Defines a procedure. Bodies are stored normalized. Throws
  /// DuplicateDefinitionError on redefinition and ValidationError on bad
  /// formals. Static checks across definitions happen in validate().
  void define(std::string name, std::vector<std::string> formals, Agent body) {
    if (!is_identifier(name)) {
      throw ValidationError("procedure name must be an identifier: '" + name +
                            "'");
    }
    if (name == "E") {
      throw ValidationError("'E' is reserved for the terminated agent");
    }
    if (index_.count(name)) {
      throw DuplicateDefinitionError(name);
    }
    std::set<std::string> seen;
    for (const std::string& f : formals) {
      if (!is_upper_identifier(f)) {
        throw ValidationError("formal parameter must start with an uppercase "
                              "letter: '" + f + "'");
      }
      if (!seen.insert(f).second) {
        throw ValidationError("duplicate formal parameter " + f + " in " + name);
      }
    }
    index_[name] = defs_.size();
    defs_.emplace_back(std::move(name),
                       ProcDef{std::move(formals), normalize(body)});
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const ProcDef* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &defs_[it->second].second;
  }

  const ProcDef& at(const std::string& name) const {
    const ProcDef* def = find(name);
    if (!def) {
      throw UnknownProcedureError(name);
    }
    return *def;
  }

  /// Names in declaration order.
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(defs_.size());
    for (const auto& [name, def] : defs_) {
      out.push_back(name);
    }
    return out;
  }

  std::size_t size() const { return defs_.size(); }

private:
  std::vector<std::pair<std::string, ProcDef>> defs_;
  std::map<std::string, std::size_t> index_;
};

/// Replaces a call by its definition body with actuals substituted for
/// formals. Actuals must be ground. The result is normalized because stored
/// bodies are.
inline Agent resolve_call(const ProcEnv& env, const Agent& a) {
  if (a.kind() != Agent::Kind::call) {
    throw Error("resolve_call: agent is not a call");
  }
  const ProcDef& def = env.at(a.callee());
  const auto& args = a.call_args();
  if (def.formals.size() != args.size()) {
    throw ArityError(a.callee(), def.formals.size(), args.size());
  }
  Agent body = def.body;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].is_ground()) {
      throw Error("call to " + a.callee() + " with non-ground argument " +
                  render(args[i]));
    }
    // Formals are pairwise distinct and actuals are ground, so substituting
    // one at a time equals simultaneous substitution.
    body = substitute(body, def.formals[i], args[i]);
  }
  return body;
}

namespace detail {

inline void check_guarded_agent(const Agent& a, const ProcEnv& env,
                                std::set<std::string>& done,
                                std::set<std::string>& visiting);

/// A cycle of calls reached without crossing a primitive is unguarded.
inline void check_guarded_call(const std::string& name, const ProcEnv& env,
                               std::set<std::string>& done,
                               std::set<std::string>& visiting) {
  if (done.count(name)) {
    return;
  }
  if (!visiting.insert(name).second) {
    throw UnguardedRecursionError(name);
  }
  check_guarded_agent(env.at(name).body, env, done, visiting);
  visiting.erase(name);
  done.insert(name);
}

inline void check_guarded_agent(const Agent& a, const ProcEnv& env,
                                std::set<std::string>& done,
                                std::set<std::string>& visiting) {
  switch (a.kind()) {
    case Agent::Kind::prim:
    case Agent::Kind::empty:
      return;
    case Agent::Kind::seq:
      // The right part only runs after the left finished, so the left part
      // alone must provide the guard.
      if (a.left().is_empty()) {
        check_guarded_agent(a.right(), env, done, visiting);
      } else {
        check_guarded_agent(a.left(), env, done, visiting);
      }
      return;
    case Agent::Kind::par:
    case Agent::Kind::choice:
      check_guarded_agent(a.left(), env, done, visiting);
      check_guarded_agent(a.right(), env, done, visiting);
      return;
    case Agent::Kind::gsum:
      check_guarded_agent(a.body(), env, done, visiting);
      return;
    case Agent::Kind::call:
      check_guarded_call(a.callee(), env, done, visiting);
      return;
  }
}

struct AgentScope {
  const ProcEnv& env;
  std::string proc;             // definition being checked, for messages
  std::set<std::string> bound;  // formals plus enclosing binders
};

inline void check_term_vars(const SiTerm& t, const AgentScope& sc) {
  if (t.is_var()) {
    if (!sc.bound.count(t.name())) {
      throw UnboundVariableError(t.name());
    }
    return;
  }
  for (const SiTerm& a : t.args()) {
    check_term_vars(a, sc);
  }
}

inline void check_body(const Agent& a, AgentScope& sc) {
  switch (a.kind()) {
    case Agent::Kind::empty:
      return;
    case Agent::Kind::prim:
      check_term_vars(a.term(), sc);
      return;
    case Agent::Kind::seq:
    case Agent::Kind::par:
    case Agent::Kind::choice:
      check_body(a.left(), sc);
      check_body(a.right(), sc);
      return;
    case Agent::Kind::gsum: {
      // Shadowing a formal or an enclosing binder would let substitution
      // capture the wrong occurrences; sums in disjoint branches may reuse
      // a name freely.
      if (sc.bound.count(a.binder())) {
        throw ValidationError("binder " + a.binder() + " shadows an enclosing "
                              "binder or formal in " + sc.proc);
      }
      sc.bound.insert(a.binder());
      check_body(a.body(), sc);
      sc.bound.erase(a.binder());
      return;
    }
    case Agent::Kind::call: {
      const ProcDef& def = sc.env.at(a.callee());
      if (def.formals.size() != a.call_args().size()) {
        throw ArityError(a.callee(), def.formals.size(), a.call_args().size());
      }
      for (const SiTerm& t : a.call_args()) {
        check_term_vars(t, sc);
      }
      return;
    }
  }
}

}  // namespace detail

/// Static well-formedness of a whole procedure environment: every call
/// resolves with the right arity, every variable is bound by a formal or an
/// enclosing sum, no binder shadows a surrounding binding, and recursion is
/// guarded (some primitive runs before any recursive call).
inline void validate(const ProcEnv& env) {
  for (const std::string& name : env.names()) {
    const ProcDef& def = env.at(name);
    detail::AgentScope sc{env, name,
                          {def.formals.begin(), def.formals.end()}};
    detail::check_body(def.body, sc);
  }
  std::set<std::string> done;
  for (const std::string& name : env.names()) {
    std::set<std::string> visiting;
    detail::check_guarded_call(name, env, done, visiting);
  }
}

namespace detail {

// Pretty-printing levels: choice binds loosest, then parallel, then
// sequence; sums, primitives and calls are atoms.
inline int agent_level(const Agent& a) {
  switch (a.kind()) {
    case Agent::Kind::choice: return 0;
    case Agent::Kind::par: return 1;
    case Agent::Kind::seq: return 2;
    default: return 3;
  }
}

inline void pretty_agent_rec(std::string& out, const Agent& a, int min_level) {
  const int level = agent_level(a);
  const bool parens = level < min_level;
  if (parens) {
    out += '(';
  }
  switch (a.kind()) {
    case Agent::Kind::prim:
      out += prim_name(a.prim_kind());
      out += '(';
      render_term(out, a.term());
      out += ')';
      break;
    case Agent::Kind::seq:
    case Agent::Kind::par:
    case Agent::Kind::choice: {
      pretty_agent_rec(out, a.left(), level);
      out += a.kind() == Agent::Kind::seq
                 ? " ; "
                 : (a.kind() == Agent::Kind::par ? " || " : " + ");
      pretty_agent_rec(out, a.right(), level + 1);
      break;
    }
    case Agent::Kind::gsum: {
      out += "sum ";
      out += a.binder();
      out += " in [";
      bool first = true;
      for (const SiTerm& d : a.domain()) {
        if (!first) {
          out += ',';
        }
        first = false;
        render_term(out, d);
      }
      out += "] { ";
      pretty_agent_rec(out, a.body(), 0);
      out += " }";
      break;
    }
    case Agent::Kind::call:
      out += a.callee();
      if (!a.call_args().empty()) {
        out += '(';
        bool first = true;
        for (const SiTerm& t : a.call_args()) {
          if (!first) {
            out += ',';
          }
          first = false;
          render_term(out, t);
        }
        out += ')';
      }
      break;
    case Agent::Kind::empty:
      out += 'E';
      break;
  }
  if (parens) {
    out += ')';
  }
}

}  // namespace detail

/// Single-line source form. Parses back to an equal agent for any agent free
/// of the terminated marker. Injective enough to serve as a state key.
inline std::string pretty_agent(const Agent& a) {
  std::string out;
  detail::pretty_agent_rec(out, a, 0);
  return out;
}

}  // namespace bach
