#include "clustertail/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "clustertail/config_io.hpp"
#include "clustertail/error.hpp"
#include "clustertail/lp.hpp"

namespace clustertail {

namespace {

constexpr double kLpTol = 1e-9;
constexpr double kAlphaTie = 1e-12;

double l1(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return s;
}

void require_dim(int got, const ModelConfig& config) {
  if (got != config.dim()) {
    throw Error(ErrorKind::InvalidArgument, "dimension " + std::to_string(got) +
                                                " does not match model dimension " +
                                                std::to_string(config.dim()));
  }
}

LpResult certified(const LinearProgram& lp, double scale) {
  LpResult r = solve_lp(lp);
  if (r.status == LpStatus::kIterationLimit || r.status == LpStatus::kUnbounded) {
    throw Error(ErrorKind::LPNonConvergence, "cone LP did not converge");
  }
  if (r.status == LpStatus::kOptimal) {
    const double tol = kLpTol * std::max(1.0, scale);
    if (r.duality_gap > tol || r.dual_infeasibility > tol) {
      throw Error(ErrorKind::LPNonConvergence, "cone LP optimality certificate failed");
    }
  }
  return r;
}

// Column layout shared by the cone programs: w (|J|) first.
struct Layout {
  int d;
  int k;
  std::vector<int> members;
};

// Distance from a box to a cone: variables w, u (offset inside box), t (slack
// for u <= hi - lo), r+, r-.  sum w sbar - u + r+ - r- = lo,  u + t = hi - lo.
LpResult box_cone_lp(const Box& box, const Layout& lay, const ModelConfig& config) {
  const int d = lay.d, k = lay.k;
  const int n = k + 4 * d;
  LinearProgram lp{DenseMatrix(2 * d, n), std::vector<double>(2 * d), std::vector<double>(n, 0.0)};
  for (int row = 0; row < d; ++row) {
    for (int a = 0; a < k; ++a) lp.a(row, a) = config.sbar(lay.members[a], row);
    lp.a(row, k + row) = -1.0;
    lp.a(row, k + 2 * d + row) = 1.0;
    lp.a(row, k + 3 * d + row) = -1.0;
    lp.b[row] = box.lo[row];
    lp.a(d + row, k + row) = 1.0;
    lp.a(d + row, k + d + row) = 1.0;
    lp.b[d + row] = box.hi[row] - box.lo[row];
    lp.c[k + 2 * d + row] = 1.0;
    lp.c[k + 3 * d + row] = 1.0;
  }
  return certified(lp, l1(box.hi));
}

}  // namespace

RareEventSet RareEventSet::create(std::vector<Box> boxes) {
  if (boxes.empty()) throw Error(ErrorKind::EmptySet, "rare-event set has no boxes");
  const std::size_t d = boxes.front().lo.size();
  if (d == 0 || d > static_cast<std::size_t>(kMaxDim)) {
    throw Error(ErrorKind::InvalidArgument, "rare-event set has invalid dimension");
  }
  for (const Box& b : boxes) {
    if (b.lo.size() != d || b.hi.size() != d) {
      throw Error(ErrorKind::InvalidArgument, "rare-event set boxes have mixed dimensions");
    }
    double lo_sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(b.lo[i]) || !std::isfinite(b.hi[i])) {
        throw Error(ErrorKind::InvalidArgument, "box bounds must be finite");
      }
      if (b.lo[i] < 0.0) throw Error(ErrorKind::NegativeCoordinate, "box lower bound is negative");
      if (b.lo[i] > b.hi[i]) throw Error(ErrorKind::InvalidArgument, "box has lo > hi");
      lo_sum += b.lo[i];
    }
    if (!(lo_sum > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "box is not bounded away from the origin");
    }
  }
  RareEventSet s;
  s.boxes_ = std::move(boxes);
  return s;
}

bool RareEventSet::contains(const std::vector<double>& x) const {
  for (const Box& b : boxes_) {
    bool in = true;
    for (std::size_t i = 0; i < b.lo.size() && in; ++i) in = x[i] >= b.lo[i] && x[i] <= b.hi[i];
    if (in) return true;
  }
  return false;
}

std::string RareEventSet::describe() const {
  std::ostringstream os;
  for (std::size_t b = 0; b < boxes_.size(); ++b) {
    if (b) os << " u ";
    for (std::size_t i = 0; i < boxes_[b].lo.size(); ++i) {
      if (i) os << 'x';
      os << '[' << boxes_[b].lo[i] << ',' << boxes_[b].hi[i] << ']';
    }
  }
  return os.str();
}

RareEventSet parse_set_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigFormat, std::string("set file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("boxes") || !j["boxes"].is_array()) {
    throw Error(ErrorKind::ConfigFormat, "set file needs a \"boxes\" array");
  }
  std::vector<Box> boxes;
  for (const auto& jb : j["boxes"]) {
    if (!jb.is_object() || !jb.contains("lo") || !jb.contains("hi")) {
      throw Error(ErrorKind::ConfigFormat, "each box needs \"lo\" and \"hi\"");
    }
    Box b;
    try {
      b.lo = jb["lo"].get<std::vector<double>>();
      b.hi = jb["hi"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::ConfigFormat, "box bounds must be numeric arrays");
    }
    boxes.push_back(std::move(b));
  }
  return RareEventSet::create(std::move(boxes));
}

RareEventSet load_set_file(const std::string& path) { return parse_set_json(read_file(path)); }

std::string set_to_json(const RareEventSet& set) {
  nlohmann::json j;
  j["boxes"] = nlohmann::json::array();
  for (const Box& b : set.boxes()) j["boxes"].push_back({{"lo", b.lo}, {"hi", b.hi}});
  return j.dump();
}

PolarPoint polar(const std::vector<double>& x) {
  PolarPoint p;
  for (double v : x) {
    if (v < 0.0) throw Error(ErrorKind::NegativeCoordinate, "polar: negative coordinate");
    p.r += v;
  }
  p.theta.assign(x.size(), 0.0);
  if (p.r == 0.0) {
    if (!p.theta.empty()) p.theta[0] = 1.0;
    return p;
  }
  for (std::size_t i = 0; i < x.size(); ++i) p.theta[i] = x[i] / p.r;
  return p;
}

ConeDistance cone_distance_L1(const std::vector<double>& x, IndexSet set, const ModelConfig& config) {
  require_dim(static_cast<int>(x.size()), config);
  const int d = config.dim();
  const std::vector<int> members = set.elements();
  const int k = static_cast<int>(members.size());
  ConeDistance out;
  if (k == 0) {
    out.distance = l1(x);
    return out;
  }
  // sum w sbar + r+ - r- = x, minimise sum r+ + r-.
  LinearProgram lp{DenseMatrix(d, k + 2 * d), x, std::vector<double>(k + 2 * d, 0.0)};
  for (int row = 0; row < d; ++row) {
    for (int a = 0; a < k; ++a) lp.a(row, a) = config.sbar(members[a], row);
    lp.a(row, k + row) = 1.0;
    lp.a(row, k + d + row) = -1.0;
    lp.c[k + row] = 1.0;
    lp.c[k + d + row] = 1.0;
  }
  const LpResult r = certified(lp, l1(x));
  out.distance = std::max(0.0, r.objective);
  out.weights.assign(r.x.begin(), r.x.begin() + k);
  out.duality_gap = r.duality_gap;
  return out;
}

std::optional<ConeWitness> set_intersects_cone(const RareEventSet& set, IndexSet subset,
                                               const ModelConfig& config) {
  require_dim(set.dim(), config);
  const int d = config.dim();
  const std::vector<int> members = subset.elements();
  const int k = static_cast<int>(members.size());
  // The empty cone is the origin, which every valid set avoids.
  if (k == 0) return std::nullopt;
  for (std::size_t bi = 0; bi < set.boxes().size(); ++bi) {
    const Box& box = set.boxes()[bi];
    // Variables w, r+, r-, s_lo, s_hi.
    //   sum w sbar - r+ + r- = centre
    //   sum w sbar - s_lo    = lo
    //   sum w sbar + s_hi    = hi
    const int n = k + 4 * d;
    LinearProgram lp{DenseMatrix(3 * d, n), std::vector<double>(3 * d), std::vector<double>(n, 0.0)};
    for (int row = 0; row < d; ++row) {
      for (int a = 0; a < k; ++a) {
        const double s = config.sbar(members[a], row);
        lp.a(row, a) = s;
        lp.a(d + row, a) = s;
        lp.a(2 * d + row, a) = s;
      }
      lp.a(row, k + row) = -1.0;
      lp.a(row, k + d + row) = 1.0;
      lp.b[row] = 0.5 * (box.lo[row] + box.hi[row]);
      lp.c[k + row] = 1.0;
      lp.c[k + d + row] = 1.0;
      lp.a(d + row, k + 2 * d + row) = -1.0;
      lp.b[d + row] = box.lo[row];
      lp.a(2 * d + row, k + 3 * d + row) = 1.0;
      lp.b[2 * d + row] = box.hi[row];
    }
    const LpResult r = certified(lp, l1(box.hi));
    if (r.status == LpStatus::kInfeasible) continue;
    ConeWitness w;
    w.subset = subset;
    w.box = static_cast<int>(bi);
    w.weights.assign(r.x.begin(), r.x.begin() + k);
    w.point.assign(d, 0.0);
    for (int row = 0; row < d; ++row)
      for (int a = 0; a < k; ++a) w.point[row] += w.weights[a] * config.sbar(members[a], row);
    return w;
  }
  return std::nullopt;
}

std::optional<double> cone_min_weight(const Box& box, IndexSet subset, int member, const ModelConfig& config) {
  require_dim(static_cast<int>(box.lo.size()), config);
  const int d = config.dim();
  const std::vector<int> members = subset.elements();
  const int k = static_cast<int>(members.size());
  if (member < 0 || member >= k) throw Error(ErrorKind::InvalidArgument, "cone_min_weight: bad member");
  // Variables w, s_lo, s_hi:  sum w sbar - s_lo = lo,  sum w sbar + s_hi = hi.
  const int n = k + 2 * d;
  LinearProgram lp{DenseMatrix(2 * d, n), std::vector<double>(2 * d), std::vector<double>(n, 0.0)};
  for (int row = 0; row < d; ++row) {
    for (int a = 0; a < k; ++a) {
      lp.a(row, a) = config.sbar(members[a], row);
      lp.a(d + row, a) = config.sbar(members[a], row);
    }
    lp.a(row, k + row) = -1.0;
    lp.b[row] = box.lo[row];
    lp.a(d + row, k + d + row) = 1.0;
    lp.b[d + row] = box.hi[row];
  }
  lp.c[member] = 1.0;
  const LpResult r = certified(lp, l1(box.hi));
  if (r.status == LpStatus::kInfeasible) return std::nullopt;
  return std::max(0.0, r.objective);
}

double set_cone_distance_L1(const RareEventSet& set, IndexSet subset, const ModelConfig& config) {
  require_dim(set.dim(), config);
  const std::vector<int> members = subset.elements();
  double best = std::numeric_limits<double>::infinity();
  for (const Box& box : set.boxes()) {
    if (members.empty()) {
      best = std::min(best, l1(box.lo));
      continue;
    }
    const Layout lay{config.dim(), static_cast<int>(members.size()), members};
    const LpResult r = box_cone_lp(box, lay, config);
    best = std::min(best, std::max(0.0, r.objective));
  }
  return best;
}

BoundedAwayReport is_bounded_away(const RareEventSet& set, IndexSet subset, const ModelConfig& config) {
  require_dim(set.dim(), config);
  const double alpha = config.alpha_of_or_zero(subset);
  BoundedAwayReport rep;
  rep.distance = set_cone_distance_L1(set, IndexSet(), config);
  for (IndexSet other : nonempty_subsets(config.dim())) {
    if (other == subset) continue;
    if (config.alpha_of(other) > alpha) continue;
    if (set_intersects_cone(set, other, config)) {
      rep.blocking.push_back(other);
      rep.distance = 0.0;
    } else if (rep.distance > 0.0) {
      rep.distance = std::min(rep.distance, set_cone_distance_L1(set, other, config));
    }
  }
  rep.bounded_away = rep.blocking.empty();
  return rep;
}

JaResult solve_jA(const RareEventSet& set, const ModelConfig& config) {
  require_dim(set.dim(), config);
  JaResult res;
  std::optional<ConeWitness> best;
  double best_alpha = std::numeric_limits<double>::infinity();
  bool tie = false;
  IndexSet tie_with;
  for (IndexSet s : nonempty_subsets(config.dim())) {
    auto w = set_intersects_cone(set, s, config);
    if (!w) continue;
    res.intersecting.push_back(s);
    const double a = config.alpha_of(s);
    if (best && std::fabs(a - best_alpha) <= kAlphaTie) {
      tie = true;
      tie_with = s;
    } else if (a < best_alpha) {
      best_alpha = a;
      best = std::move(w);
      tie = false;
    }
  }
  if (!best) {
    throw Error(ErrorKind::NoConeIntersects, "rare-event set misses every cone");
  }
  if (tie) {
    throw Error(ErrorKind::NonUniqueArgmin, "alpha minimiser is not unique: " + best->subset.to_string() +
                                                " and " + tie_with.to_string());
  }
  res.subset = best->subset;
  res.alpha = best_alpha;
  res.witness = std::move(*best);
  res.bounded_away = is_bounded_away(set, res.subset, config);
  return res;
}

}  // namespace clustertail
