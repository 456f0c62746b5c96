#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bach/errors.hpp"

namespace bach {

/// True for a nonempty [A-Za-z][A-Za-z0-9_]* identifier.
inline bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

inline bool is_lower_identifier(std::string_view s) {
  return is_identifier(s) && std::islower(static_cast<unsigned char>(s.front()));
}

inline bool is_upper_identifier(std::string_view s) {
  return is_identifier(s) && std::isupper(static_cast<unsigned char>(s.front()));
}

/// An information term: a token, a compound over other terms, or a binder
/// variable awaiting substitution. Values are immutable and cheap to copy;
/// structure is shared.
class SiTerm {
public:
  enum class Kind { token, compound, var };

  Kind kind() const;
  bool is_token() const { return kind() == Kind::token; }
  bool is_compound() const { return kind() == Kind::compound; }
  bool is_var() const { return kind() == Kind::var; }

  /// Token name, compound functor, or variable name.
  const std::string& name() const;

  /// Arguments of a compound; empty for tokens and variables.
  const std::vector<SiTerm>& args() const;

  /// True when no variable occurs anywhere in the term. Cached at
  /// construction, so this is O(1).
  bool is_ground() const;

  /// Total order consistent with the rendered text; returns <0, 0 or >0.
  static int compare(const SiTerm& a, const SiTerm& b);

  friend bool operator==(const SiTerm& a, const SiTerm& b) {
    return compare(a, b) == 0;
  }
  friend bool operator!=(const SiTerm& a, const SiTerm& b) { return !(a == b); }
  friend bool operator<(const SiTerm& a, const SiTerm& b) {
    return compare(a, b) < 0;
  }

  friend SiTerm token(std::string name);
  friend SiTerm compound(std::string functor, std::vector<SiTerm> args);
  friend SiTerm var(std::string name);

private:
  struct Node;
  explicit SiTerm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct SiTerm::Node {
  Kind kind;
  std::string name;
  std::vector<SiTerm> args;
  bool ground;
};

inline SiTerm::Kind SiTerm::kind() const { return node_->kind; }
inline const std::string& SiTerm::name() const { return node_->name; }
inline const std::vector<SiTerm>& SiTerm::args() const { return node_->args; }
inline bool SiTerm::is_ground() const { return node_->ground; }

/// Builds an arity-0 token. The name must be a lowercase identifier.
inline SiTerm token(std::string name) {
  if (!is_lower_identifier(name)) {
    throw Error("token name must be a lowercase identifier: '" + name + "'");
  }
  auto node = std::make_shared<SiTerm::Node>();
  node->kind = SiTerm::Kind::token;
  node->name = std::move(name);
  node->ground = true;
  return SiTerm(std::move(node));
}

/// Builds a compound term. The functor must be a lowercase identifier and at
/// least one argument is required; use token() for arity 0.
inline SiTerm compound(std::string functor, std::vector<SiTerm> args) {
  if (!is_lower_identifier(functor)) {
    throw Error("functor must be a lowercase identifier: '" + functor + "'");
  }
  if (args.empty()) {
    throw Error("compound '" + functor + "' needs at least one argument");
  }
  auto node = std::make_shared<SiTerm::Node>();
  node->kind = SiTerm::Kind::compound;
  node->name = std::move(functor);
  node->ground = std::all_of(args.begin(), args.end(),
                             [](const SiTerm& t) { return t.is_ground(); });
  node->args = std::move(args);
  return SiTerm(std::move(node));
}

/// Builds a binder variable. The name must start with an uppercase letter.
inline SiTerm var(std::string name) {
  if (!is_upper_identifier(name)) {
    throw Error("variable name must start with an uppercase letter: '" + name +
                "'");
  }
  auto node = std::make_shared<SiTerm::Node>();
  node->kind = SiTerm::Kind::var;
  node->name = std::move(name);
  node->ground = false;
  return SiTerm(std::move(node));
}

inline int SiTerm::compare(const SiTerm& a, const SiTerm& b) {
  if (a.node_ == b.node_) {
    return 0;
  }
  if (int c = a.name().compare(b.name())) {
    return c < 0 ? -1 : 1;
  }
  if (a.kind() != b.kind()) {
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  }
  const auto& xs = a.args();
  const auto& ys = b.args();
  const std::size_t n = std::min(xs.size(), ys.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(xs[i], ys[i])) {
      return c;
    }
  }
  if (xs.size() != ys.size()) {
    return xs.size() < ys.size() ? -1 : 1;
  }
  return 0;
}

namespace detail {
inline void render_term(std::string& out, const SiTerm& t) {
  out += t.name();
  if (t.is_compound()) {
    out += '(';
    bool first = true;
    for (const SiTerm& a : t.args()) {
      if (!first) {
        out += ',';
      }
      first = false;
      render_term(out, a);
    }
    out += ')';
  }
}
}  // namespace detail

/// Canonical text form: name(arg,...) with no spaces. Injective on terms:
/// equal strings imply structurally equal terms.
inline std::string render(const SiTerm& t) {
  std::string out;
  detail::render_term(out, t);
  return out;
}

/// Replaces every occurrence of the named variable by a ground value.
inline SiTerm substitute(const SiTerm& t, std::string_view var_name,
                         const SiTerm& value) {
  if (!value.is_ground()) {
    throw Error("substitute: replacement for " + std::string(var_name) +
                " must be ground");
  }
  switch (t.kind()) {
    case SiTerm::Kind::token:
      return t;
    case SiTerm::Kind::var:
      return t.name() == var_name ? value : t;
    case SiTerm::Kind::compound: {
      if (t.is_ground()) {
        return t;  // no variable can occur below
      }
      std::vector<SiTerm> args;
      args.reserve(t.args().size());
      bool changed = false;
      for (const SiTerm& a : t.args()) {
        SiTerm s = substitute(a, var_name, value);
        changed = changed || !(s == a);
        args.push_back(std::move(s));
      }
      if (!changed) {
        return t;
      }
      return compound(t.name(), std::move(args));
    }
  }
  throw Error("substitute: corrupt term");
}

}  // namespace bach
