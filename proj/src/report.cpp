#include "clustertail/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

namespace clustertail {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json subset_json(IndexSet s) {
  json a = json::array();
  for (int e : s.elements()) a.push_back(e + 1);
  return a;
}

json type_json(const GeneralizedType& t) {
  json rows = json::array();
  for (IndexSet r : t.rows) rows.push_back(subset_json(r));
  return rows;
}

json sweep_obj(const SweepResult& s) {
  json j;
  j["experiment"] = s.experiment;
  j["root"] = s.root + 1;
  j["jset"] = subset_json(s.subset);
  j["target_alpha"] = s.target_alpha;
  j["bounded_away"] = s.bounded_away;
  j["insufficient_hits"] = s.insufficient_hits;
  j["slope"] = s.fit.slope;
  j["slope_se"] = s.fit.slope_se;
  j["fit_points"] = s.fit.points;
  json rows = json::array();
  for (const SweepRow& r : s.rows) {
    rows.push_back({{"n", r.n}, {"samples", r.samples}, {"hits", r.hits}, {"censored", r.censored},
                    {"p_hat", r.p_hat}, {"se", r.se}, {"lambda", r.lambda}, {"ratio", r.ratio}});
  }
  j["rows"] = rows;
  return j;
}

}  // namespace

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "experiment,root,n,samples,hits,censored,p_hat,se,lambda,ratio\n";
  for (const SweepRow& r : s.rows) {
    os << s.experiment << ',' << s.root + 1 << ',' << num(r.n) << ',' << r.samples << ',' << r.hits << ','
       << r.censored << ',' << num(r.p_hat) << ',' << num(r.se) << ',' << num(r.lambda) << ',' << num(r.ratio)
       << '\n';
  }
  return os.str();
}

std::string sweep_json(const SweepResult& s) { return sweep_obj(s).dump(2) + "\n"; }

std::string sweep_svg(const SweepResult& s) {
  constexpr double kW = 800, kH = 600, kL = 80, kR = 30, kT = 40, kB = 70;
  std::vector<double> lx, ly;
  for (const SweepRow& r : s.rows) {
    if (r.hits == 0) continue;
    lx.push_back(std::log10(r.n));
    ly.push_back(std::log10(r.p_hat));
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  os << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"25\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << s.experiment << ": P(S/n in A), root " << s.root + 1 << ", slope " << num(s.fit.slope) << " (ref "
     << num(-s.target_alpha) << ")</text>\n";
  if (lx.empty()) {
    os << "<text x=\"400\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\">no hits</text>\n</svg>\n";
    return os.str();
  }
  double x0 = *std::min_element(lx.begin(), lx.end()), x1 = *std::max_element(lx.begin(), lx.end());
  double y0 = *std::min_element(ly.begin(), ly.end()), y1 = *std::max_element(ly.begin(), ly.end());
  const double px = std::max(0.05, 0.08 * (x1 - x0)), py = std::max(0.1, 0.1 * (y1 - y0));
  x0 -= px;
  x1 += px;
  y0 -= py;
  y1 += py;
  auto sx = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
  auto sy = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); };
  os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
    os << "<text x=\"" << kL - 8 << "\" y=\"" << num(sy(d) + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\""
       << " font-size=\"12\">1e" << d << "</text>\n";
  }
  for (const SweepRow& r : s.rows) {
    os << "<text x=\"" << num(sx(std::log10(r.n))) << "\" y=\"" << kH - kB + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << num(r.n) << "</text>\n";
  }
  os << "<text x=\"400\" y=\"" << kH - 20 << "\" text-anchor=\"middle\" font-family=\"sans-serif\">n</text>\n";
  auto line = [&](double slope, double intercept, const char* colour, const char* dash) {
    os << "<line x1=\"" << num(sx(x0)) << "\" y1=\"" << num(sy(intercept + slope * x0)) << "\" x2=\"" << num(sx(x1))
       << "\" y2=\"" << num(sy(intercept + slope * x1)) << "\" stroke=\"" << colour << "\" stroke-dasharray=\""
       << dash << "\"/>\n";
  };
  // Both fits are in natural logs; slopes carry over to log10 axes unchanged.
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= lx.size();
  my /= ly.size();
  os << "<clipPath id=\"plot\"><rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR
     << "\" height=\"" << kH - kT - kB << "\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n";
  if (s.fit.points >= 2) line(s.fit.slope, s.fit.intercept / std::log(10.0), "steelblue", "none");
  line(-s.target_alpha, my + s.target_alpha * mx, "firebrick", "6,4");
  for (std::size_t k = 0; k < lx.size(); ++k) {
    os << "<circle cx=\"" << num(sx(lx[k])) << "\" cy=\"" << num(sy(ly[k])) << "\" r=\"5\" fill=\"black\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string validation_json(const ValidationReport& r, const LawMatrix& laws) {
  json j;
  j["d"] = r.dim;
  j["ok"] = r.ok();
  j["spectral_radius"] = r.spectral_radius;
  j["subcritical"] = r.subcritical;
  j["distinct_tail_indices"] = r.distinct_tail_indices;
  j["connected"] = r.connected;
  j["sorted_tail_indices"] = r.sorted_tail_indices;
  if (!r.subcritical) {
    j["reason"] = "subcriticality";
  } else if (!r.distinct_tail_indices) {
    j["reason"] = "duplicate_tail_index";
  } else if (!r.connected) {
    j["reason"] = "connectivity";
  }
  json mean = json::array();
  for (int i = 0; i < r.mean_matrix.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < r.mean_matrix.cols(); ++c) row.push_back(r.mean_matrix(i, c));
    mean.push_back(row);
  }
  j["mean_matrix"] = mean;
  json sbar = json::array();
  for (int c = 0; c < r.expected_clusters.cols(); ++c) sbar.push_back(r.expected_clusters.column(c));
  j["expected_clusters"] = sbar;
  json desc = json::array();
  for (const auto& row : laws) {
    json jr = json::array();
    for (const auto& law : row) jr.push_back(law.describe());
    desc.push_back(jr);
  }
  j["offspring"] = desc;
  return j.dump(2) + "\n";
}

std::string ja_json(const JaResult& ja, const ModelConfig& config) {
  (void)config;
  json j;
  j["jset"] = subset_json(ja.subset);
  j["alpha"] = ja.alpha;
  j["bounded_away"] = ja.bounded_away.bounded_away;
  j["distance"] = ja.bounded_away.distance;
  json blocking = json::array();
  for (IndexSet b : ja.bounded_away.blocking) blocking.push_back(subset_json(b));
  j["blocking"] = blocking;
  json inter = json::array();
  for (IndexSet b : ja.intersecting) inter.push_back(subset_json(b));
  j["intersecting"] = inter;
  j["witness"] = {{"box", ja.witness.box}, {"weights", ja.witness.weights}, {"point", ja.witness.point}};
  return j.dump(2) + "\n";
}

std::string identity_json(const IdentityReport& r) {
  json j;
  j["all_pass"] = r.all_pass();
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back(
        {{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"se", c.se}, {"z", c.z}, {"pass", c.pass}});
  }
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

std::string concentration_json(const ConcentrationReport& r) {
  json j;
  j["root"] = r.root + 1;
  j["epsilon"] = r.epsilon;
  j["decreasing"] = r.decreasing;
  json rows = json::array();
  for (const auto& c : r.rows) {
    rows.push_back({{"n", c.n}, {"delta", c.delta}, {"repetitions", c.repetitions}, {"exceed", c.exceed},
                    {"probability", c.probability}, {"se", c.se}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string type_frequency_json(const TypeFrequencyReport& r) {
  json j;
  j["root"] = r.root + 1;
  j["n"] = r.n;
  j["delta"] = r.delta;
  j["jset"] = subset_json(r.subset);
  j["samples"] = r.samples;
  j["hits"] = r.hits;
  j["censored"] = r.censored;
  j["mass_on_jset"] = r.mass_on_subset;
  j["insufficient_hits"] = r.insufficient_hits;
  std::vector<std::pair<GeneralizedType, std::uint64_t>> sorted(r.counts.begin(), r.counts.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  json types = json::array();
  for (const auto& [t, c] : sorted) {
    types.push_back({{"rows", type_json(t)},
                     {"count", c},
                     {"frequency", r.hits ? static_cast<double>(c) / static_cast<double>(r.hits) : 0.0},
                     {"is_type", t.is_jump_type()}});
  }
  j["types"] = types;
  return j.dump(2) + "\n";
}

std::string measure_json(const TotalEstimate& t) {
  json j;
  j["jset"] = subset_json(t.subset);
  j["delta_used"] = t.delta;
  j["delta_above_bar"] = t.delta_above_bar;
  json per = json::array();
  std::uint64_t samples = 0;
  for (const auto& te : t.per_type) {
    per.push_back({{"rows", type_json(te.type)},
                   {"estimate", te.estimate.value},
                   {"se", te.estimate.std_error},
                   {"hits", te.estimate.hits}});
    samples = te.estimate.samples;
  }
  j["per_type"] = per;
  json total = json::array();
  for (std::size_t i = 0; i < t.total.size(); ++i) {
    total.push_back({{"root", i + 1}, {"estimate", t.total[i]}, {"se", t.total_se[i]}});
  }
  j["total_i"] = total;
  j["samples"] = samples;
  return j.dump(2) + "\n";
}

std::string hill_json(const HillReport& r) {
  json j{{"samples", r.samples}, {"k", r.k}, {"censored", r.censored}, {"estimate", r.estimate}};
  return j.dump(2) + "\n";
}

std::string counterexample_json(const CounterexampleResult& r) {
  json j = sweep_obj(r.sweep);
  j["radius"] = r.radius;
  j["naive_alpha"] = r.naive_alpha;
  j["lower_bound_alpha"] = r.lower_bound_alpha;
  j["slower_than_naive"] = r.slower_than_naive;
  j["within_lower_bound"] = r.within_lower_bound;
  return j.dump(2) + "\n";
}

std::string cluster_csv_header(int d) {
  std::string h = "root,sample_index,censored";
  for (int i = 1; i <= d; ++i) h += ",S_" + std::to_string(i);
  return h + "\n";
}

std::string cluster_csv_row(const ClusterSample& s, std::uint64_t index) {
  std::string row = std::to_string(s.root + 1) + "," + std::to_string(index) + "," +
                    (s.censored == Censoring::kNone ? "0" : "1");
  for (std::uint64_t v : s.totals) row += "," + std::to_string(v);
  return row + "\n";
}

std::string decomposition_json(const Decomposition& dec, std::uint64_t index) {
  const char* cens = dec.censored == Censoring::kNone      ? "none"
                     : dec.censored == Censoring::kNodeCap ? "node_cap"
                                                           : "depth_cap";
  json j{{"sample_index", index}, {"root", dec.root + 1}, {"n", dec.n},          {"delta", dec.delta},
         {"depth", dec.depth},    {"censored", cens},     {"tau", dec.tau},      {"thresholds", dec.thresholds},
         {"pieces", dec.pieces},  {"reconstructed", dec.reconstructed}, {"gtype", type_json(dec.gtype)}};
  return j.dump();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

}  // namespace clustertail
