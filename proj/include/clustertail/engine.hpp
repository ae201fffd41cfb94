#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "clustertail/model.hpp"
#include "clustertail/random.hpp"

namespace clustertail {

// Every node of a simulated tree has a 64-bit identity derived from its
// parent's identity, its own dimension and its index among the siblings of
// that dimension. Offspring draws are a pure function of (seed, lane, node id),
// so any two procedures that visit the same node see the same draws.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t child_node_id(std::uint64_t parent, int dim, std::uint64_t index) {
  return mix64(parent ^ mix64(index * kMaxDim + static_cast<std::uint64_t>(dim) + 1));
}

// Pseudo-parent of the root of sample `sample_index`.
inline std::uint64_t root_key(std::uint64_t sample_index) {
  return mix64(sample_index * 0xD1B54A32D192ED03ull + 0x2545F4914F6CDD1Dull);
}

// `count` siblings of dimension `dim` under the node `parent`.
struct Group {
  std::uint64_t parent = 0;
  int dim = 0;
  std::uint64_t count = 0;
};

// Draws from the model laws on the node-addressed Philox stream.
class StreamSource {
 public:
  StreamSource(const ModelConfig& config, std::uint64_t seed, std::uint32_t lane)
      : config_(&config), seed_(seed), lane_(lane) {}

  int dim() const { return config_->dim(); }

  void draws(std::uint64_t node, int type, std::uint64_t* out) const {
    Stream s(StreamKey{seed_, node, lane_});
    const auto& row = config_->laws()[type];
    for (int i = 0; i < config_->dim(); ++i) out[i] = row[i].sample(s);
  }

 private:
  const ModelConfig* config_;
  std::uint64_t seed_;
  std::uint32_t lane_;
};

// Records draws keyed by node id on first use and replays them afterwards.
// With `replay_only` set, an unrecorded node is a hard error.
template <class Source>
class DrawTape {
 public:
  explicit DrawTape(const Source& source) : source_(&source) {}

  int dim() const { return source_->dim(); }
  void set_replay_only(bool on) { replay_only_ = on; }
  std::size_t size() const { return tape_.size(); }

  void draws(std::uint64_t node, int type, std::uint64_t* out) const {
    auto it = tape_.find(node);
    if (it == tape_.end()) {
      if (replay_only_) throw std::logic_error("draw tape: node not recorded");
      std::vector<std::uint64_t> v(dim());
      source_->draws(node, type, v.data());
      it = tape_.emplace(node, std::move(v)).first;
    }
    std::copy(it->second.begin(), it->second.end(), out);
  }

 private:
  const Source* source_;
  bool replay_only_ = false;
  mutable std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> tape_;
};

// Totals and big-jump counters of one pruned growth.
struct GrowthTally {
  std::vector<std::uint64_t> totals;
  std::vector<std::uint64_t> W;
  std::vector<std::uint64_t> N;
  std::vector<std::vector<std::uint64_t>> pairN;  // [child dim][parent dim]

  explicit GrowthTally(int d = 0)
      : totals(d, 0), W(d, 0), N(d, 0), pairN(d, std::vector<std::uint64_t>(d, 0)) {}

  void reset() {
    std::fill(totals.begin(), totals.end(), 0);
    std::fill(W.begin(), W.end(), 0);
    std::fill(N.begin(), N.end(), 0);
    for (auto& row : pairN) std::fill(row.begin(), row.end(), 0);
  }
};

// Breadth-first growth of the trees rooted at the nodes of `roots`. A sibling
// group larger than `threshold` is not grown: it is tallied in W/N/pairN and,
// when `pruned` is non-null, appended there as a group. `nodes` counts every
// node grown so far across calls; returns false as soon as it exceeds `cap`.
template <class Source>
bool grow(const Source& source, std::span<const Group> roots, double threshold, std::uint64_t cap,
          std::uint64_t& nodes, GrowthTally& tally, std::vector<Group>* pruned) {
  const int d = source.dim();
  // Generation buffers are reused across calls on the same thread.
  thread_local std::vector<Group> current, next;
  current.assign(roots.begin(), roots.end());
  std::uint64_t b[kMaxDim];
  while (!current.empty()) {
    next.clear();
    for (const Group& g : current) {
      tally.totals[g.dim] += g.count;
      nodes += g.count;
      if (nodes > cap) return false;
      for (std::uint64_t m = 0; m < g.count; ++m) {
        const std::uint64_t id = child_node_id(g.parent, g.dim, m);
        source.draws(id, g.dim, b);
        for (int i = 0; i < d; ++i) {
          if (b[i] == 0) continue;
          if (static_cast<double>(b[i]) > threshold) {
            tally.W[i] += b[i];
            tally.N[i] += 1;
            tally.pairN[i][g.dim] += 1;
            if (pruned) pruned->push_back(Group{id, i, b[i]});
          } else {
            next.push_back(Group{id, i, b[i]});
          }
        }
      }
    }
    current.swap(next);
  }
  return true;
}

inline constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

}  // namespace clustertail
