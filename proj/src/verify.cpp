#include "clustertail/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "clustertail/error.hpp"
#include "clustertail/parallel.hpp"

namespace clustertail {

namespace {

constexpr std::uint32_t kLaneDirect = 0;
constexpr std::uint32_t kLanePruned = 1;
constexpr std::uint32_t kLaneRegenPruned = 2;
constexpr std::uint32_t kLaneRegenFresh = 3;
constexpr std::uint32_t kLaneConcentration = 4;

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

IdentityCheck make_check(std::string name, double lhs, double lhs_se, double rhs, double rhs_se) {
  IdentityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.se = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
  c.z = z_score(lhs, lhs_se, rhs, rhs_se);
  c.pass = std::fabs(c.z) <= kIdentityZ;
  return c;
}

// Normal-equivalent z of an observed event count against Poisson(expected),
// from the exact two-sided tail.
double poisson_z(double observed, double expected) {
  if (expected <= 0.0) return observed > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  const boost::math::poisson_distribution<double> pois(expected);
  const double lower = boost::math::cdf(pois, observed);
  const double upper = observed > 0.0 ? boost::math::cdf(boost::math::complement(pois, observed - 1.0)) : 1.0;
  const double p = std::min(1.0, 2.0 * std::min(lower, upper));
  if (p >= 1.0) return 0.0;
  const double z = boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), p / 2));
  return observed < expected ? -z : z;
}

// Below this many expected jumps the count is tested exactly.
constexpr double kPoissonRegime = 30.0;

void validate_n_list(const std::vector<double>& n_list) {
  if (n_list.size() < 3) throw Error(ErrorKind::InvalidArgument, "sweep needs at least 3 values of n");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (!(n_list[k] > 0.0)) throw Error(ErrorKind::InvalidArgument, "sweep n values must be positive");
    if (k && !(n_list[k] > n_list[k - 1])) throw Error(ErrorKind::InvalidArgument, "sweep n values must increase");
  }
}

}  // namespace

SweepResult sweep_membership(const ModelConfig& config, int root,
                             const std::function<bool(const std::vector<double>&)>& member,
                             const std::vector<double>& n_list, std::uint64_t samples, const RunOptions& opts) {
  validate_n_list(n_list);
  const int d = config.dim();
  const std::size_t nn = n_list.size();
  struct Acc {
    std::vector<std::uint64_t> hits;
    std::uint64_t censored = 0;
  };
  const Acc init{std::vector<std::uint64_t>(nn, 0), 0};
  const Acc acc = parallel_reduce(
      samples, opts.threads, init,
      [&](std::uint64_t begin, std::uint64_t end, Acc& a) {
        std::vector<double> x(d);
        for (std::uint64_t s = begin; s < end; ++s) {
          const ClusterSample c = sample_cluster(config, root, SampleKey{opts.seed, s, kLaneDirect}, opts.node_cap);
          // A censored cluster has more nodes than any bounded set can hold at these n.
          if (c.censored != Censoring::kNone) {
            ++a.censored;
            continue;
          }
          for (std::size_t k = 0; k < nn; ++k) {
            for (int i = 0; i < d; ++i) x[i] = static_cast<double>(c.totals[i]) / n_list[k];
            if (member(x)) ++a.hits[k];
          }
        }
      },
      [](Acc& into, const Acc& from) {
        for (std::size_t k = 0; k < into.hits.size(); ++k) into.hits[k] += from.hits[k];
        into.censored += from.censored;
      });

  SweepResult res;
  res.root = root;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < nn; ++k) {
    SweepRow row;
    row.n = n_list[k];
    row.samples = samples;
    row.hits = acc.hits[k];
    row.censored = acc.censored;
    const Proportion p = proportion(row.hits, samples);
    row.p_hat = p.p;
    row.se = p.se;
    if (row.hits < kMinHits) res.insufficient_hits = true;
    if (row.hits > 0) {
      lx.push_back(std::log(row.n));
      ly.push_back(std::log(row.p_hat));
    }
    res.rows.push_back(row);
  }
  res.fit = fit_line(lx, ly);
  return res;
}

SweepResult sweep_probability(const ModelConfig& config, int root, const RareEventSet& set,
                              const std::vector<double>& n_list, std::uint64_t samples, const RunOptions& opts) {
  validate_n_list(n_list);
  const JaResult ja = solve_jA(set, config);
  if (!ja.bounded_away.bounded_away) {
    throw Error(ErrorKind::PreconditionViolation,
                "set is not bounded away from the cones below " + ja.subset.to_string());
  }
  SweepResult res = sweep_membership(
      config, root, [&](const std::vector<double>& x) { return set.contains(x); }, n_list, samples, opts);
  res.experiment = "prob";
  res.subset = ja.subset;
  res.target_alpha = ja.alpha;
  res.bounded_away = true;
  for (SweepRow& row : res.rows) {
    row.lambda = config.rate_lambda(ja.subset, row.n);
    row.ratio = row.lambda > 0.0 ? row.p_hat / row.lambda : 0.0;
  }
  return res;
}

IdentityReport check_mean_identity(const ModelConfig& config, std::uint64_t samples, const RunOptions& opts) {
  const int d = config.dim();
  IdentityReport rep;
  for (int root = 0; root < d; ++root) {
    struct Acc {
      std::vector<Moments> m;
      std::uint64_t censored = 0;
    };
    const Acc acc = parallel_reduce(
        samples, opts.threads, Acc{std::vector<Moments>(d), 0},
        [&](std::uint64_t begin, std::uint64_t end, Acc& a) {
          for (std::uint64_t s = begin; s < end; ++s) {
            const ClusterSample c = sample_cluster(config, root, SampleKey{opts.seed, s, kLaneDirect}, opts.node_cap);
            if (c.censored != Censoring::kNone) ++a.censored;
            for (int i = 0; i < d; ++i) a.m[i].add(static_cast<double>(c.totals[i]));
          }
        },
        [](Acc& into, const Acc& from) {
          for (std::size_t i = 0; i < into.m.size(); ++i) into.m[i].merge(from.m[i]);
          into.censored += from.censored;
        });
    for (int i = 0; i < d; ++i) {
      rep.checks.push_back(make_check("mean S_" + std::to_string(root + 1) + "[" + std::to_string(i + 1) + "]",
                                      acc.m[i].mean(), acc.m[i].std_error(), config.sbar(root, i), 0.0));
    }
  }
  return rep;
}

IdentityReport check_pruned_identity(const ModelConfig& config, const std::vector<double>& thresholds,
                                     std::uint64_t samples, const RunOptions& opts) {
  const int d = config.dim();
  IdentityReport rep;
  for (double m : thresholds) {
    for (int root = 0; root < d; ++root) {
      // tail[j][l] = P(B_{j<-l} > M)
      std::vector<std::vector<double>> tail(d, std::vector<double>(d));
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) tail[j][l] = config.law(l, j).survival(m);
      struct Acc {
        std::vector<Moments> n_count;   // [j*d + l]
        std::vector<Moments> diff;      // N - S^<=_l P(B > M)
        std::vector<Moments> totals;    // [l]
      };
      const Acc init{std::vector<Moments>(d * d), std::vector<Moments>(d * d), std::vector<Moments>(d)};
      const Acc acc = parallel_reduce(
          samples, opts.threads, init,
          [&](std::uint64_t begin, std::uint64_t end, Acc& a) {
            for (std::uint64_t s = begin; s < end; ++s) {
              const PrunedSample p =
                  sample_pruned(config, root, m, SampleKey{opts.seed, s, kLanePruned}, opts.node_cap);
              for (int l = 0; l < d; ++l) a.totals[l].add(static_cast<double>(p.totals[l]));
              for (int j = 0; j < d; ++j) {
                for (int l = 0; l < d; ++l) {
                  const double nv = static_cast<double>(p.pairN[j][l]);
                  a.n_count[j * d + l].add(nv);
                  a.diff[j * d + l].add(nv - static_cast<double>(p.totals[l]) * tail[j][l]);
                }
              }
            }
          },
          [](Acc& into, const Acc& from) {
            for (std::size_t k = 0; k < into.n_count.size(); ++k) {
              into.n_count[k].merge(from.n_count[k]);
              into.diff[k].merge(from.diff[k]);
            }
            for (std::size_t k = 0; k < into.totals.size(); ++k) into.totals[k].merge(from.totals[k]);
          });
      for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l) {
          IdentityCheck c;
          c.name = "pruned N(i=" + std::to_string(root + 1) + ",j=" + std::to_string(j + 1) +
                   ",l=" + std::to_string(l + 1) + ",M=" + fmt(m) + ")";
          c.lhs = acc.n_count[j * d + l].mean();
          c.rhs = acc.totals[l].mean() * tail[j][l];
          // Each type-l node adds an independent 1{B > M} - P(B > M) increment, so
          // under the identity the paired difference has variance E S^<=_l p (1 - p).
          // This score-test variance stays valid when no jumps are observed.
          const Moments& df = acc.diff[j * d + l];
          const double p = tail[j][l];
          c.se = std::sqrt(acc.totals[l].mean() * p * (1.0 - p) / static_cast<double>(samples));
          const double count = acc.n_count[j * d + l].sum;
          const double expected = c.rhs * static_cast<double>(samples);
          c.z = expected < kPoissonRegime ? poisson_z(count, expected) : z_score(df.mean(), c.se, 0.0, 0.0);
          c.pass = std::fabs(c.z) <= kIdentityZ;
          rep.checks.push_back(c);
        }
      }
    }
  }
  return rep;
}

IdentityReport check_regeneration(const ModelConfig& config, double threshold, std::uint64_t samples,
                                  const RunOptions& opts) {
  const int d = config.dim();
  IdentityReport rep;
  const std::vector<double> tail_levels{10.0, 100.0};
  // Statistics per pipeline: d first moments, d(d+1)/2 second moments, tail indicators.
  const int nsecond = d * (d + 1) / 2;
  const int nstats = d + nsecond + static_cast<int>(tail_levels.size());
  auto stats_of = [&](const std::vector<double>& s, std::vector<Moments>& m) {
    int k = 0;
    for (int i = 0; i < d; ++i) m[k++].add(s[i]);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) m[k++].add(s[i] * s[j]);
    double norm = 0.0;
    for (double v : s) norm += v;
    for (double t : tail_levels) m[k++].add(norm > t ? 1.0 : 0.0);
  };
  auto merge = [](std::vector<Moments>& into, const std::vector<Moments>& from) {
    for (std::size_t k = 0; k < into.size(); ++k) into[k].merge(from[k]);
  };
  for (int root = 0; root < d; ++root) {
    const std::vector<Moments> init(nstats);
    const auto two_stage = parallel_reduce(
        samples, opts.threads, init,
        [&](std::uint64_t begin, std::uint64_t end, std::vector<Moments>& a) {
          std::vector<double> s(d);
          for (std::uint64_t idx = begin; idx < end; ++idx) {
            const PrunedSample p =
                sample_pruned(config, root, threshold, SampleKey{opts.seed, idx, kLaneRegenPruned}, opts.node_cap);
            for (int i = 0; i < d; ++i) s[i] = static_cast<double>(p.totals[i]);
            // Fresh clusters hang off a per-sample key on their own lane.
            const StreamSource fresh(config, opts.seed, kLaneRegenFresh);
            GrowthTally tally(d);
            std::uint64_t nodes = 0;
            std::vector<Group> roots;
            for (int i = 0; i < d; ++i)
              if (p.W[i] > 0) roots.push_back(Group{root_key(idx), i, p.W[i]});
            grow(fresh, roots, kNoThreshold, opts.node_cap, nodes, tally, nullptr);
            for (int i = 0; i < d; ++i) s[i] += static_cast<double>(tally.totals[i]);
            stats_of(s, a);
          }
        },
        merge);
    const auto direct = parallel_reduce(
        samples, opts.threads, init,
        [&](std::uint64_t begin, std::uint64_t end, std::vector<Moments>& a) {
          std::vector<double> s(d);
          for (std::uint64_t idx = begin; idx < end; ++idx) {
            const ClusterSample c = sample_cluster(config, root, SampleKey{opts.seed, idx, kLaneDirect}, opts.node_cap);
            for (int i = 0; i < d; ++i) s[i] = static_cast<double>(c.totals[i]);
            stats_of(s, a);
          }
        },
        merge);
    const std::string tag = "regeneration S_" + std::to_string(root + 1) + " M=" + fmt(threshold) + " ";
    int k = 0;
    for (int i = 0; i < d; ++i, ++k) {
      rep.checks.push_back(make_check(tag + "E[S" + std::to_string(i + 1) + "]", two_stage[k].mean(),
                                      two_stage[k].std_error(), direct[k].mean(), direct[k].std_error()));
    }
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j, ++k) {
        rep.checks.push_back(make_check(tag + "E[S" + std::to_string(i + 1) + "*S" + std::to_string(j + 1) + "]",
                                        two_stage[k].mean(), two_stage[k].std_error(), direct[k].mean(),
                                        direct[k].std_error()));
      }
    }
    for (double t : tail_levels) {
      rep.checks.push_back(make_check(tag + "P(|S|>" + fmt(t) + ")", two_stage[k].mean(), two_stage[k].std_error(),
                                      direct[k].mean(), direct[k].std_error()));
      ++k;
    }
  }
  return rep;
}

IdentityReport check_identities(const ModelConfig& config, const std::vector<double>& thresholds,
                                std::uint64_t samples, const RunOptions& opts) {
  IdentityReport rep = check_mean_identity(config, samples, opts);
  for (auto& c : check_pruned_identity(config, thresholds, samples, opts).checks) rep.checks.push_back(c);
  for (double m : thresholds) {
    for (auto& c : check_regeneration(config, m, samples, opts).checks) rep.checks.push_back(c);
  }
  return rep;
}

ConcentrationReport check_concentration(const ModelConfig& config, int root, const std::vector<double>& deltas,
                                        const std::vector<double>& n_list, std::uint64_t repetitions,
                                        double epsilon, const RunOptions& opts) {
  const int d = config.dim();
  ConcentrationReport rep;
  rep.root = root;
  rep.epsilon = epsilon;
  const std::vector<double> target = config.expected_cluster(root);
  for (double delta : deltas) {
    std::vector<double> probs;
    for (double nv : n_list) {
      const auto copies = static_cast<std::uint64_t>(std::llround(nv));
      if (copies < 1) throw Error(ErrorKind::InvalidArgument, "concentration: n must be >= 1");
      const double m = nv * delta;
      const std::uint64_t exceed = parallel_reduce(
          repetitions, opts.threads, std::uint64_t{0},
          [&](std::uint64_t begin, std::uint64_t end, std::uint64_t& a) {
            std::vector<double> sum(d);
            for (std::uint64_t r = begin; r < end; ++r) {
              std::fill(sum.begin(), sum.end(), 0.0);
              for (std::uint64_t c = 0; c < copies; ++c) {
                const PrunedSample p = sample_pruned(config, root, m,
                                                     SampleKey{opts.seed, r * copies + c, kLaneConcentration},
                                                     opts.node_cap);
                for (int i = 0; i < d; ++i) sum[i] += static_cast<double>(p.totals[i]);
              }
              double dev = 0.0;
              for (int i = 0; i < d; ++i) dev += std::fabs(sum[i] / static_cast<double>(copies) - target[i]);
              if (dev > epsilon) ++a;
            }
          },
          [](std::uint64_t& into, const std::uint64_t& from) { into += from; }, 64);
      ConcentrationRow row;
      row.n = nv;
      row.delta = delta;
      row.repetitions = repetitions;
      row.exceed = exceed;
      const Proportion p = proportion(exceed, repetitions);
      row.probability = p.p;
      row.se = p.se;
      probs.push_back(p.p);
      rep.rows.push_back(row);
    }
    if (!probs.empty() && probs.back() > probs.front()) rep.decreasing = false;
  }
  return rep;
}

TypeFrequencyReport check_type_frequencies(const ModelConfig& config, int root, const RareEventSet& set,
                                           double n, double delta, std::uint64_t samples,
                                           const RunOptions& opts) {
  const JaResult ja = solve_jA(set, config);
  const int d = config.dim();
  TypeFrequencyReport rep;
  rep.root = root;
  rep.n = n;
  rep.delta = delta;
  rep.subset = ja.subset;
  rep.samples = samples;
  struct Acc {
    std::map<GeneralizedType, std::uint64_t> counts;
    std::uint64_t hits = 0;
    std::uint64_t censored = 0;
  };
  DecompositionParams params;
  params.n = n;
  params.delta = delta;
  params.node_cap = opts.node_cap;
  const Acc acc = parallel_reduce(
      samples, opts.threads, Acc{},
      [&](std::uint64_t begin, std::uint64_t end, Acc& a) {
        std::vector<double> x(d);
        for (std::uint64_t s = begin; s < end; ++s) {
          const Decomposition dec = sample_decomposition(config, root, SampleKey{opts.seed, s, kLaneDirect}, params);
          if (dec.censored != Censoring::kNone) {
            ++a.censored;
            continue;
          }
          for (int i = 0; i < d; ++i) x[i] = static_cast<double>(dec.reconstructed[i]) / n;
          if (!set.contains(x)) continue;
          ++a.hits;
          ++a.counts[dec.gtype];
        }
      },
      [](Acc& into, const Acc& from) {
        into.hits += from.hits;
        into.censored += from.censored;
        for (const auto& [t, c] : from.counts) into.counts[t] += c;
      });
  rep.hits = acc.hits;
  rep.censored = acc.censored;
  rep.counts = acc.counts;
  std::uint64_t on = 0;
  for (const auto& [t, c] : rep.counts)
    if (t.is_jump_type() && t.active() == ja.subset) on += c;
  rep.mass_on_subset = rep.hits ? static_cast<double>(on) / static_cast<double>(rep.hits) : 0.0;
  rep.insufficient_hits = rep.hits < kMinHits;
  return rep;
}

HillReport hill_on_clusters(const ModelConfig& config, int root, std::uint64_t samples, std::uint64_t k,
                            const RunOptions& opts) {
  struct Acc {
    std::vector<double> norms;
    std::uint64_t censored = 0;
  };
  Acc acc = parallel_reduce(
      samples, opts.threads, Acc{},
      [&](std::uint64_t begin, std::uint64_t end, Acc& a) {
        a.norms.reserve(end - begin);
        for (std::uint64_t s = begin; s < end; ++s) {
          const ClusterSample c = sample_cluster(config, root, SampleKey{opts.seed, s, kLaneDirect}, opts.node_cap);
          if (c.censored != Censoring::kNone) ++a.censored;
          double norm = 0.0;
          for (std::uint64_t v : c.totals) norm += static_cast<double>(v);
          a.norms.push_back(norm);
        }
      },
      [](Acc& into, const Acc& from) {
        into.norms.insert(into.norms.end(), from.norms.begin(), from.norms.end());
        into.censored += from.censored;
      });
  HillReport rep;
  rep.samples = samples;
  rep.k = k;
  rep.censored = acc.censored;
  rep.estimate = hill_estimate(std::move(acc.norms), k);
  return rep;
}

CounterexampleResult counterexample_experiment(const ModelConfig& config, double radius,
                                               const std::vector<double>& n_list, std::uint64_t samples,
                                               const RunOptions& opts) {
  if (config.dim() != 2) throw Error(ErrorKind::PreconditionViolation, "counterexample needs d = 2");
  // Tail index of B_{i<-j} is law(j, i).alpha().
  const double a11 = config.law(0, 0).alpha(), a12 = config.law(1, 0).alpha();
  const double a21 = config.law(0, 1).alpha(), a22 = config.law(1, 1).alpha();
  if (!(a12 > a11 && a11 > 2.0)) {
    throw Error(ErrorKind::PreconditionViolation, "counterexample needs alpha_{1<-2} > alpha_{1<-1} > 2");
  }
  if (!(std::min(a21, a22) > 2.0 * a11)) {
    throw Error(ErrorKind::PreconditionViolation, "counterexample needs alpha_{2<-1}, alpha_{2<-2} > 2 alpha_{1<-1}");
  }
  if (!(config.law(0, 1).zero_probability() > 0.0)) {
    throw Error(ErrorKind::PreconditionViolation, "counterexample needs P(B_{2<-1} = 0) > 0");
  }
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "counterexample radius must be > 0");
  const double slope = config.sbar(0, 1) / config.sbar(0, 0);
  CounterexampleResult out;
  out.radius = radius;
  out.naive_alpha = config.alpha_star(1);
  out.lower_bound_alpha = 2.0 * config.alpha_star(0);
  out.sweep = sweep_membership(
      config, 0, [&](const std::vector<double>& x) { return std::fabs(x[1] - x[0] * slope) > radius; }, n_list,
      samples, opts);
  out.sweep.experiment = "counterexample";
  out.sweep.subset = IndexSet::singleton(1);
  out.sweep.target_alpha = out.naive_alpha;
  for (SweepRow& row : out.sweep.rows) {
    row.lambda = config.rate_lambda(IndexSet::singleton(1), row.n);
    row.ratio = row.lambda > 0.0 ? row.p_hat / row.lambda : 0.0;
  }
  if (out.sweep.fit.points >= 2) {
    out.slower_than_naive = out.sweep.fit.slope > -out.naive_alpha;
    out.within_lower_bound = out.sweep.fit.slope >= -out.lower_bound_alpha - 0.4;
  }
  return out;
}

}  // namespace clustertail
