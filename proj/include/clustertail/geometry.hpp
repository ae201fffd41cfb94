#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clustertail/index_set.hpp"
#include "clustertail/model.hpp"

namespace clustertail {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

// Finite union of closed bounded boxes in the positive orthant, bounded away
// from the origin.
class RareEventSet {
 public:
  // Throws EmptySet (no boxes), NegativeCoordinate, or InvalidArgument
  // (lo > hi, non-finite bound, mixed dimensions, or a box touching the origin).
  static RareEventSet create(std::vector<Box> boxes);

  int dim() const { return static_cast<int>(boxes_.front().lo.size()); }
  const std::vector<Box>& boxes() const { return boxes_; }
  bool contains(const std::vector<double>& x) const;
  std::string describe() const;

 private:
  std::vector<Box> boxes_;
};

// {"boxes": [{"lo": [...], "hi": [...]}, ...]}; format errors raise ConfigFormat.
RareEventSet parse_set_json(const std::string& text);
RareEventSet load_set_file(const std::string& path);
std::string set_to_json(const RareEventSet& set);

struct PolarPoint {
  double r = 0.0;
  std::vector<double> theta;
};

// L1 polar coordinates; the origin maps to (0, e_1). Throws NegativeCoordinate.
PolarPoint polar(const std::vector<double>& x);

struct ConeDistance {
  double distance = 0.0;
  std::vector<double> weights;  // one per member of J, ascending
  double duality_gap = 0.0;
};

// min over w >= 0 of || x - sum_{i in J} w_i sbar_i ||_1. For J empty this is ||x||_1.
ConeDistance cone_distance_L1(const std::vector<double>& x, IndexSet set, const ModelConfig& config);

struct ConeWitness {
  IndexSet subset;
  int box = 0;
  std::vector<double> weights;
  std::vector<double> point;
};

// Returns a witness iff some box meets the cone spanned by {sbar_i : i in J}.
// The witness is the cone point inside that box nearest (L1) to the box centre.
std::optional<ConeWitness> set_intersects_cone(const RareEventSet& set, IndexSet subset,
                                               const ModelConfig& config);

// min w_member over w >= 0 with sum_{i in J} w_i sbar_i inside the box; nullopt
// when the box misses the cone. `member` is a position within J (ascending).
std::optional<double> cone_min_weight(const Box& box, IndexSet subset, int member, const ModelConfig& config);

// L1 distance between the set and the cone of J (0 when they intersect).
double set_cone_distance_L1(const RareEventSet& set, IndexSet subset, const ModelConfig& config);

struct BoundedAwayReport {
  bool bounded_away = false;
  // Minimum L1 distance from the set to the cones J' != J with alpha(J') <= alpha(J).
  // Includes the origin, so it is positive whenever bounded_away holds.
  double distance = 0.0;
  std::vector<IndexSet> blocking;  // cones that meet the set
};

BoundedAwayReport is_bounded_away(const RareEventSet& set, IndexSet subset, const ModelConfig& config);

struct JaResult {
  IndexSet subset;
  double alpha = 0.0;
  ConeWitness witness;
  std::vector<IndexSet> intersecting;
  BoundedAwayReport bounded_away;
};

// argmin of alpha(J) over nonempty J whose cone meets the set. Throws
// NoConeIntersects or NonUniqueArgmin (alpha tie within 1e-12).
JaResult solve_jA(const RareEventSet& set, const ModelConfig& config);

}  // namespace clustertail
