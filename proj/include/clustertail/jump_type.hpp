#pragma once

#include <string>
#include <vector>

#include "clustertail/index_set.hpp"

namespace clustertail {

// Rows of a 0/1 jump matrix: rows[k] is the set of dimensions with a big jump
// at decomposition depth k + 1. No structural constraints beyond nonempty rows.
struct GeneralizedType {
  std::vector<IndexSet> rows;

  int depth() const { return static_cast<int>(rows.size()); }
  IndexSet active() const {
    IndexSet s;
    for (IndexSet r : rows) s = s | r;
    return s;
  }
  // Singleton first row and pairwise disjoint rows.
  bool is_jump_type() const {
    if (rows.empty()) return true;
    if (rows.front().size() != 1) return false;
    IndexSet seen;
    for (IndexSet r : rows) {
      if (r.empty() || !r.disjoint(seen)) return false;
      seen = seen | r;
    }
    return true;
  }
  // "({1},{2})"; the depth-0 type prints as "()".
  std::string to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k) s += ',';
      s += rows[k].to_string();
    }
    return s + ")";
  }

  friend bool operator==(const GeneralizedType&, const GeneralizedType&) = default;
  friend bool operator<(const GeneralizedType& a, const GeneralizedType& b) {
    if (a.rows.size() != b.rows.size()) return a.rows.size() < b.rows.size();
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
      const auto ea = a.rows[k].elements(), eb = b.rows[k].elements();
      if (ea != eb) return ea < eb;
    }
    return false;
  }
};

// A generalized type known to satisfy the jump-type constraints.
using JumpType = GeneralizedType;

}  // namespace clustertail
