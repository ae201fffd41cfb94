#include "clustertail/measures.hpp"

#include <algorithm>
#include <cmath>

#include "clustertail/error.hpp"
#include "clustertail/parallel.hpp"
#include "clustertail/random.hpp"
#include "clustertail/stats.hpp"

namespace clustertail {

namespace {

// Ordered set partitions of `rest` appended to `prefix`.
void ordered_partitions(IndexSet rest, std::vector<IndexSet>& prefix, std::vector<JumpType>& out) {
  if (rest.empty()) {
    out.push_back(JumpType{prefix});
    return;
  }
  // Every nonempty submask of rest can be the next block.
  const std::uint32_t r = rest.mask();
  for (std::uint32_t sub = r; sub != 0; sub = (sub - 1) & r) {
    prefix.push_back(IndexSet(sub));
    ordered_partitions(IndexSet(r & ~sub), prefix, out);
    prefix.pop_back();
  }
}

// g over precomputed member lists, enumerating the |I|^|J| maps J -> I as
// base-|I| counters.
double g_members(const std::vector<int>& sources, const std::vector<int>& targets, const double* w,
                 const ModelConfig& config) {
  const std::size_t ni = sources.size(), nj = targets.size();
  if (nj == 0) return 1.0;
  std::vector<std::size_t> digit(nj, 0);
  double total = 0.0;
  for (;;) {
    double term = 1.0;
    for (std::size_t q = 0; q < nj; ++q) {
      const std::size_t p = digit[q];
      term *= w[p] * config.sbar(sources[p], config.l_star(targets[q]));
    }
    total += term;
    std::size_t q = 0;
    while (q < nj && ++digit[q] == ni) digit[q++] = 0;
    if (q == nj) break;
  }
  return total;
}

}  // namespace

std::vector<JumpType> enumerate_types(IndexSet set, int d) {
  if (set.empty()) throw Error(ErrorKind::EmptySet, "enumerate_types: empty active set");
  if (!set.subset_of(IndexSet::full(d))) throw Error(ErrorKind::InvalidArgument, "active set outside [d]");
  std::vector<JumpType> out;
  for (int first : set.elements()) {
    std::vector<IndexSet> prefix{IndexSet::singleton(first)};
    IndexSet rest = set;
    rest.erase(first);
    ordered_partitions(rest, prefix, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<IndexSet>> enumerate_assignments(IndexSet sources, IndexSet targets) {
  if (sources.empty()) throw Error(ErrorKind::EmptySet, "enumerate_assignments: empty source set");
  const std::vector<int> src = sources.elements(), tgt = targets.elements();
  const std::size_t ni = src.size(), nj = tgt.size();
  std::vector<std::vector<IndexSet>> out;
  std::vector<std::size_t> digit(nj, 0);
  for (;;) {
    std::vector<IndexSet> parts(ni);
    for (std::size_t q = 0; q < nj; ++q) parts[digit[q]].insert(tgt[q]);
    out.push_back(std::move(parts));
    std::size_t q = 0;
    while (q < nj && ++digit[q] == ni) digit[q++] = 0;
    if (q == nj) break;
  }
  return out;
}

double g_value(IndexSet sources, IndexSet targets, const std::vector<double>& w, const ModelConfig& config) {
  if (sources.empty()) throw Error(ErrorKind::EmptySet, "g_value: empty source set");
  if (static_cast<int>(w.size()) != sources.size()) {
    throw Error(ErrorKind::InvalidArgument, "g_value: one weight per source dimension required");
  }
  for (double x : w) {
    if (!(x >= 0.0)) throw Error(ErrorKind::InvalidArgument, "g_value: weights must be >= 0");
  }
  return g_members(sources.elements(), targets.elements(), w.data(), config);
}

double tilde_alpha(const GeneralizedType& type, const ModelConfig& config) {
  if (type.rows.empty()) return 0.0;
  double a = 1.0;
  for (IndexSet row : type.rows)
    for (int j : row.elements()) a += config.alpha_star(j) - 1.0;
  return a;
}

std::optional<double> delta_bar(const RareEventSet& set, IndexSet subset, const ModelConfig& config) {
  if (subset.empty()) throw Error(ErrorKind::EmptySet, "delta_bar: empty subset");
  std::optional<double> best;
  for (const Box& box : set.boxes()) {
    for (int a = 0; a < subset.size(); ++a) {
      const auto v = cone_min_weight(box, subset, a, config);
      if (!v) break;  // box misses the cone for every member
      best = best ? std::min(*best, *v) : *v;
    }
  }
  return best;
}

MeasureEstimate estimate_CI(const JumpType& type, const RareEventSet& set, const ModelConfig& config,
                            double delta, std::uint64_t samples, const MeasureStream& stream) {
  if (!(delta > 0.0)) throw Error(ErrorKind::ZeroDelta, "estimate_CI: delta must be > 0");
  if (type.rows.empty()) throw Error(ErrorKind::DepthZeroType, "estimate_CI: depth-0 type has no measure");
  if (!type.is_jump_type()) throw Error(ErrorKind::InvalidArgument, "estimate_CI: not a jump type");
  if (set.dim() != config.dim()) throw Error(ErrorKind::InvalidArgument, "estimate_CI: dimension mismatch");
  const int d = config.dim();
  const int depth = type.depth();
  std::vector<std::vector<int>> rows(depth);
  double scale = 1.0;
  for (int k = 0; k < depth; ++k) {
    rows[k] = type.rows[k].elements();
    for (int j : rows[k]) scale *= std::pow(delta, -config.alpha_star(j));
  }
  MeasureEstimate est;
  est.delta = delta;
  est.samples = samples;
  if (const auto bar = delta_bar(set, type.active(), config)) est.delta_above_bar = delta > *bar;

  struct Acc {
    Moments m;
    std::uint64_t hits = 0;
  };
  const Acc acc = parallel_reduce(
      samples, stream.threads, Acc{},
      [&](std::uint64_t begin, std::uint64_t end, Acc& a) {
        std::vector<std::vector<double>> w(depth);
        for (int k = 0; k < depth; ++k) w[k].resize(rows[k].size());
        std::vector<double> x(d);
        for (std::uint64_t s = begin; s < end; ++s) {
          Stream rng(StreamKey{stream.seed, s, stream.lane});
          std::fill(x.begin(), x.end(), 0.0);
          for (int k = 0; k < depth; ++k) {
            for (std::size_t q = 0; q < rows[k].size(); ++q) {
              const int j = rows[k][q];
              const double wk = delta * std::pow(rng.uniform_pos(), -1.0 / config.alpha_star(j));
              w[k][q] = wk;
              for (int c = 0; c < d; ++c) x[c] += wk * config.sbar(j, c);
            }
          }
          double value = 0.0;
          if (set.contains(x)) {
            ++a.hits;
            value = scale;
            for (int k = 0; k + 1 < depth; ++k) value *= g_members(rows[k], rows[k + 1], w[k].data(), config);
          }
          a.m.add(value);
        }
      },
      [](Acc& into, const Acc& from) {
        into.m.merge(from.m);
        into.hits += from.hits;
      });
  est.value = acc.m.mean();
  est.std_error = acc.m.std_error();
  est.hits = acc.hits;
  return est;
}

TotalEstimate estimate_C_total(IndexSet subset, const RareEventSet& set, const ModelConfig& config,
                               double delta, std::uint64_t samples, const MeasureStream& stream) {
  const int d = config.dim();
  TotalEstimate out;
  out.subset = subset;
  out.total.assign(d, 0.0);
  out.total_se.assign(d, 0.0);
  const auto bar = delta_bar(set, subset, config);
  if (!bar) return out;
  out.delta = delta > 0.0 ? delta : 0.5 * *bar;
  out.delta_above_bar = out.delta > *bar;
  const auto types = enumerate_types(subset, d);
  std::vector<double> var(d, 0.0);
  for (std::size_t t = 0; t < types.size(); ++t) {
    MeasureStream ms = stream;
    ms.lane = stream.lane + static_cast<std::uint32_t>(t);
    TypeEstimate te{types[t], estimate_CI(types[t], set, config, out.delta, samples, ms)};
    const int j1 = types[t].rows.front().front();
    for (int i = 0; i < d; ++i) {
      const double c = config.sbar(i, config.l_star(j1));
      out.total[i] += c * te.estimate.value;
      var[i] += c * c * te.estimate.std_error * te.estimate.std_error;
    }
    out.per_type.push_back(std::move(te));
  }
  for (int i = 0; i < d; ++i) out.total_se[i] = std::sqrt(var[i]);
  return out;
}

}  // namespace clustertail
