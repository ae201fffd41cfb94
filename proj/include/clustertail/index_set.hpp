#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace clustertail {

// Maximum model dimension. Subsets are stored as bitmasks.
inline constexpr int kMaxDim = 16;

// A subset of the dimensions {0, ..., d-1}, stored as a bitmask. Indices are
// 0-based everywhere in code; the 1-based form appears only in to_string().
class IndexSet {
 public:
  constexpr IndexSet() = default;
  constexpr explicit IndexSet(std::uint32_t mask) : mask_(mask) {}
  IndexSet(std::initializer_list<int> dims) {
    for (int d : dims) insert(d);
  }

  static IndexSet singleton(int dim) { return IndexSet(1u << dim); }
  static IndexSet full(int d) { return IndexSet((d >= 32) ? ~0u : ((1u << d) - 1u)); }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  int size() const { return std::popcount(mask_); }
  bool contains(int dim) const { return (mask_ >> dim) & 1u; }
  void insert(int dim) { mask_ |= (1u << dim); }
  void erase(int dim) { mask_ &= ~(1u << dim); }

  bool subset_of(IndexSet other) const { return (mask_ & ~other.mask_) == 0; }
  bool disjoint(IndexSet other) const { return (mask_ & other.mask_) == 0; }

  // Members in ascending order.
  std::vector<int> elements() const {
    std::vector<int> out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }

  // Smallest member; undefined on the empty set.
  int front() const { return std::countr_zero(mask_); }

  // "{1,2}" with 1-based indices.
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int e : elements()) {
      if (!first) s += ',';
      s += std::to_string(e + 1);
      first = false;
    }
    return s + "}";
  }

  friend constexpr IndexSet operator|(IndexSet a, IndexSet b) { return IndexSet(a.mask_ | b.mask_); }
  friend constexpr IndexSet operator&(IndexSet a, IndexSet b) { return IndexSet(a.mask_ & b.mask_); }
  friend constexpr bool operator==(IndexSet a, IndexSet b) = default;
  friend constexpr bool operator<(IndexSet a, IndexSet b) { return a.mask_ < b.mask_; }

 private:
  std::uint32_t mask_ = 0;
};

// All nonempty subsets of {0..d-1}, in increasing mask order.
inline std::vector<IndexSet> nonempty_subsets(int d) {
  std::vector<IndexSet> out;
  const std::uint32_t n = 1u << d;
  out.reserve(n - 1);
  for (std::uint32_t m = 1; m < n; ++m) out.emplace_back(m);
  return out;
}

}  // namespace clustertail
