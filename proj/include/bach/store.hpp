#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bach/term.hpp"

namespace bach {

/// A multiset of ground terms. tell/ask/get/nask mirror the four store
/// primitives: tell always succeeds, the others report whether the primitive
/// can fire on the current contents (a false result is a blocked step, not a
/// fault).
class Store {
public:
  Store() = default;

  /// Adds one occurrence of t.
  void tell(const SiTerm& t) {
    require_ground(t, "tell");
    ++occurrences_[t];
  }

  /// True when at least one occurrence of t is present.
  bool ask(const SiTerm& t) const {
    require_ground(t, "ask");
    return occurrences_.find(t) != occurrences_.end();
  }

  /// Removes one occurrence of t; false (and no change) when absent.
  bool get(const SiTerm& t) {
    require_ground(t, "get");
    auto it = occurrences_.find(t);
    if (it == occurrences_.end()) {
      return false;
    }
    if (--it->second == 0) {
      occurrences_.erase(it);
    }
    return true;
  }

  /// True when no occurrence of t is present.
  bool nask(const SiTerm& t) const {
    require_ground(t, "nask");
    return occurrences_.find(t) == occurrences_.end();
  }

  long count(const SiTerm& t) const {
    require_ground(t, "count");
    auto it = occurrences_.find(t);
    return it == occurrences_.end() ? 0 : it->second;
  }

  bool empty() const { return occurrences_.empty(); }

  /// Number of distinct terms present.
  std::size_t size() const { return occurrences_.size(); }

  const std::map<SiTerm, long>& entries() const { return occurrences_; }

  /// One "term : count" line per distinct term, sorted by rendered text,
  /// each line newline-terminated. Equal stores dump identically.
  std::string dump() const {
    std::vector<std::string> lines;
    lines.reserve(occurrences_.size());
    for (const auto& [term, n] : occurrences_) {
      lines.push_back(render(term) + " : " + std::to_string(n));
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const std::string& line : lines) {
      out += line;
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const Store& a, const Store& b) {
    return a.occurrences_ == b.occurrences_;
  }
  friend bool operator!=(const Store& a, const Store& b) { return !(a == b); }
  friend bool operator<(const Store& a, const Store& b) {
    return a.occurrences_ < b.occurrences_;
  }

private:
  static void require_ground(const SiTerm& t, const char* op) {
    if (!t.is_ground()) {
      throw Error(std::string(op) + ": store terms must be ground, got " +
                  render(t));
    }
  }

  std::map<SiTerm, long> occurrences_;
};

}  // namespace bach
