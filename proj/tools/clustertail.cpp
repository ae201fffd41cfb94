#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clustertail/config_io.hpp"
#include "clustertail/error.hpp"
#include "clustertail/geometry.hpp"
#include "clustertail/measures.hpp"
#include "clustertail/model.hpp"
#include "clustertail/parallel.hpp"
#include "clustertail/report.hpp"
#include "clustertail/simulate.hpp"
#include "clustertail/verify.hpp"

namespace ct = clustertail;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kModel = 2, kIo = 3, kGeometry = 4, kStatistical = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ct::ErrorKind kind) {
  using K = ct::ErrorKind;
  switch (kind) {
    case K::InvalidArgument:
    case K::ZeroDelta:
    case K::DepthZeroType:
      return kUsage;
    case K::SubcriticalityViolation:
    case K::DuplicateTailIndex:
    case K::ConnectivityViolation:
    case K::PreconditionViolation:
      return kModel;
    case K::ConfigFormat:
      return kIo;
    case K::EmptySet:
    case K::NegativeCoordinate:
    case K::LPNonConvergence:
    case K::NoConeIntersects:
    case K::NonUniqueArgmin:
      return kGeometry;
    case K::CapExceeded:
    case K::DepthCapExceeded:
    case K::InsufficientHits:
    case K::TooFewSamples:
      return kStatistical;
  }
  return kUsage;
}

// Sample counts accept scientific notation ("1e8").
std::uint64_t parse_count(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v >= 1.0) || v > 1e15 || std::floor(v) != v)
    throw UsageError(std::string(what) + " must be a positive integer, got '" + text + "'");
  return static_cast<std::uint64_t>(v);
}

// "1,2", "{1,2}" or "1 2"; 1-based on the command line.
ct::IndexSet parse_subset(const std::string& text, int d) {
  ct::IndexSet s;
  std::string cleaned;
  for (char c : text) cleaned += (c == ',' || c == '{' || c == '}') ? ' ' : c;
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(tok, &used);
      if (used != tok.size()) k = 0;
    } catch (const std::exception&) {
      k = 0;
    }
    if (k < 1 || k > d) throw UsageError("dimension '" + tok + "' is not in 1.." + std::to_string(d));
    s.insert(k - 1);
  }
  if (s.empty()) throw UsageError("empty dimension set '" + text + "'");
  return s;
}

int parse_root(int root, int d) {
  if (root < 1 || root > d) throw UsageError("--root must lie in 1.." + std::to_string(d));
  return root - 1;
}

std::string read_bytes(const std::string& path) { return ct::read_file(path); }

// Provenance written next to every artifact file.
class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed, int threads)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["seed"] = seed;
    doc_["threads"] = threads;
    doc_["version"] = CLUSTERTAIL_VERSION;
    doc_["sets"] = json::array();
    doc_["artifacts"] = json::array();
  }
  void config(const std::string& path, const std::string& bytes) {
    doc_["config"] = {{"path", path}, {"sha256", ct::sha256_hex(bytes)}};
  }
  void set(const std::string& path, const std::string& bytes) {
    doc_["sets"].push_back({{"path", path}, {"sha256", ct::sha256_hex(bytes)}});
  }
  void artifact(const std::string& path, const std::string& bytes) {
    doc_["artifacts"].push_back({{"path", path}, {"sha256", ct::sha256_hex(bytes)}});
  }
  bool empty() const { return doc_["artifacts"].empty(); }
  std::string first_artifact() const { return doc_["artifacts"].front()["path"].get<std::string>(); }
  std::string finish() {
    const auto dt = std::chrono::steady_clock::now() - start_;
    doc_["duration_seconds"] = std::chrono::duration<double>(dt).count();
    return doc_.dump(2) + "\n";
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << bytes;
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Artifact to `path`, or stdout when the path is empty.
void emit(const std::string& path, const std::string& bytes, Manifest& manifest) {
  if (path.empty()) {
    std::cout << bytes;
    return;
  }
  write_file(path, bytes);
  manifest.artifact(path, bytes);
}

ct::ModelConfig load_config(const std::string& path, Manifest& manifest) {
  const std::string bytes = read_bytes(path);
  manifest.config(path, bytes);
  return ct::ModelConfig::create(ct::parse_laws_json(bytes));
}

ct::RareEventSet load_set(const std::string& path, int d, Manifest& manifest) {
  const std::string bytes = read_bytes(path);
  manifest.set(path, bytes);
  auto set = ct::parse_set_json(bytes);
  if (set.dim() != d) throw UsageError("set '" + path + "' has dimension " + std::to_string(set.dim()) +
                                       ", model has " + std::to_string(d));
  return set;
}

std::string join(int argc, char** argv) {
  std::string s;
  for (int k = 0; k < argc; ++k) s += (k ? " " : "") + std::string(argv[k]);
  return s;
}

struct Global {
  std::uint64_t seed = 0;
  int threads = ct::default_threads();
  std::string samples;
  std::string out;
  std::string plot;
  std::string delta = "auto";
};

std::uint64_t samples_or(const Global& g, std::uint64_t fallback) {
  return g.samples.empty() ? fallback : parse_count(g.samples, "--samples");
}

ct::RunOptions run_options(const Global& g) { return ct::RunOptions{g.seed, g.threads, ct::kDefaultNodeCap}; }

// Explicit --delta, or nullopt for "auto".
std::optional<double> parse_delta(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0) || !(v < 1.0))
    throw UsageError("--delta must be 'auto' or lie in (0, 1), got '" + text + "'");
  return v;
}

void require_sweep_list(const std::vector<double>& n_list) {
  if (n_list.size() < 3) throw UsageError("--n needs at least 3 values");
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (!(n_list[k] > 0.0)) throw UsageError("--n values must be positive");
    if (k && !(n_list[k] > n_list[k - 1])) throw UsageError("--n values must be increasing");
  }
}

// ---- subcommands ----

int cmd_validate(const std::string& config_path, const Global& g, Manifest& manifest) {
  const std::string bytes = read_bytes(config_path);
  manifest.config(config_path, bytes);
  const auto laws = ct::parse_laws_json(bytes);
  const auto report = ct::assess(laws);
  emit(g.out, ct::validation_json(report, laws), manifest);
  return report.ok() ? kOk : kModel;
}

int cmd_mean(const std::string& config_path, int root_1, const Global& g, Manifest& manifest) {
  const auto config = load_config(config_path, manifest);
  json j;
  j["spectral_radius"] = config.spectral_radius();
  json cols = json::array();
  for (int r = 0; r < config.dim(); ++r) cols.push_back(config.expected_cluster(r));
  j["expected_clusters"] = cols;
  int code = kOk;
  if (!g.samples.empty()) {
    const auto rep = ct::check_mean_identity(config, parse_count(g.samples, "--samples"), run_options(g));
    j["empirical"] = json::parse(ct::identity_json(rep));
    if (!rep.all_pass()) code = kStatistical;
  }
  if (root_1 > 0) j["root"] = parse_root(root_1, config.dim()) + 1;
  emit(g.out, j.dump(2) + "\n", manifest);
  return code;
}

int cmd_rate(const std::string& config_path, const std::string& subset, const std::vector<double>& n_list,
             const Global& g, Manifest& manifest) {
  const auto config = load_config(config_path, manifest);
  const auto j = parse_subset(subset, config.dim());
  if (n_list.empty()) throw UsageError("--n needs at least one value");
  std::string csv = "n,lambda,alpha\n";
  char buf[128];
  for (double n : n_list) {
    if (!(n > 0.0)) throw UsageError("--n values must be positive");
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", n, config.rate_lambda(j, n), config.alpha_of(j));
    csv += buf;
  }
  emit(g.out, csv, manifest);
  return kOk;
}

int cmd_ja(const std::string& config_path, const std::string& set_path, const Global& g, Manifest& manifest) {
  const auto config = load_config(config_path, manifest);
  const auto set = load_set(set_path, config.dim(), manifest);
  emit(g.out, ct::ja_json(ct::solve_jA(set, config), config), manifest);
  return kOk;
}

int cmd_simulate(const std::string& config_path, int root_1, double n, const std::string& dump, const Global& g,
                 Manifest& manifest) {
  const auto config = load_config(config_path, manifest);
  const int root = parse_root(root_1, config.dim());
  const std::uint64_t count = samples_or(g, 1000);
  const std::string csv = ct::parallel_reduce(
      count, g.threads, std::string(),
      [&](std::uint64_t b, std::uint64_t e, std::string& acc) {
        for (std::uint64_t k = b; k < e; ++k)
          acc += ct::cluster_csv_row(ct::sample_cluster(config, root, ct::SampleKey{g.seed, k, 0}), k);
      },
      [](std::string& into, const std::string& from) { into += from; });
  emit(g.out, ct::cluster_csv_header(config.dim()) + csv, manifest);
  if (!dump.empty()) {
    const auto delta = parse_delta(g.delta).value_or(0.1);
    const ct::DecompositionParams params{n, delta, ct::kDefaultNodeCap, ct::kDefaultDepthCap};
    const std::string lines = ct::parallel_reduce(
        count, g.threads, std::string(),
        [&](std::uint64_t b, std::uint64_t e, std::string& acc) {
          for (std::uint64_t k = b; k < e; ++k)
            acc += ct::decomposition_json(ct::sample_decomposition(config, root, ct::SampleKey{g.seed, k, 0}, params),
                                          k) + "\n";
        },
        [](std::string& into, const std::string& from) { into += from; });
    write_file(dump, lines);
    manifest.artifact(dump, lines);
  }
  return kOk;
}

int cmd_prob(const std::string& config_path, const std::string& set_path, int root_1,
             const std::vector<double>& n_list, const Global& g, Manifest& manifest) {
  require_sweep_list(n_list);
  const auto config = load_config(config_path, manifest);
  const int root = parse_root(root_1, config.dim());
  const auto set = load_set(set_path, config.dim(), manifest);
  const auto sweep = ct::sweep_probability(config, root, set, n_list, samples_or(g, 1'000'000), run_options(g));
  emit(g.out, ct::sweep_csv(sweep), manifest);
  if (!g.plot.empty()) emit(g.plot, ct::sweep_svg(sweep), manifest);
  std::fprintf(stderr, "slope %.4f +- %.4f (target %.4f)\n", sweep.fit.slope, sweep.fit.slope_se,
               -sweep.target_alpha);
  if (sweep.insufficient_hits) {
    std::fprintf(stderr, "insufficient hits: fewer than %llu at some n\n",
                 static_cast<unsigned long long>(ct::kMinHits));
    return kStatistical;
  }
  return kOk;
}

int cmd_measure(const std::string& config_path, const std::string& set_path, const std::string& subset,
                const Global& g, Manifest& manifest) {
  const auto config = load_config(config_path, manifest);
  const auto set = load_set(set_path, config.dim(), manifest);
  const auto j = parse_subset(subset, config.dim());
  const double delta = parse_delta(g.delta).value_or(0.0);
  const auto total = ct::estimate_C_total(j, set, config, delta, samples_or(g, 1'000'000),
                                          ct::MeasureStream{g.seed, 0, g.threads});
  if (total.delta_above_bar)
    std::fprintf(stderr, "warning: delta %.6g exceeds the admissible bound; estimate may be biased low\n",
                 total.delta);
  emit(g.out, ct::measure_json(total), manifest);
  return kOk;
}

struct VerifyArgs {
  std::string suite = "all";
  std::vector<std::string> sets;
  std::vector<double> n_list;
  int root = 1;
  double radius = 1.0;
};

int cmd_verify(const std::string& config_path, const VerifyArgs& v, const Global& g, Manifest& manifest) {
  static const std::vector<std::string> kSuites{"identities", "concentration", "types", "slopes",
                                                "counterexample", "all"};
  if (std::find(kSuites.begin(), kSuites.end(), v.suite) == kSuites.end())
    throw UsageError("unknown suite '" + v.suite + "'");
  if (g.out.empty()) throw UsageError("verify needs --out DIR");
  const auto config = load_config(config_path, manifest);
  const int root = parse_root(v.root, config.dim());
  std::vector<ct::RareEventSet> sets;
  for (const auto& p : v.sets) sets.push_back(load_set(p, config.dim(), manifest));
  const bool all = v.suite == "all";
  if ((v.suite == "types" || v.suite == "slopes") && sets.empty())
    throw UsageError("suite '" + v.suite + "' needs at least one --set");
  if (!v.n_list.empty() && v.suite != "concentration" && v.suite != "types") require_sweep_list(v.n_list);
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (!fs::is_directory(g.out)) throw IoError("cannot create directory '" + g.out + "'");
  const auto opts = run_options(g);
  const auto path = [&](const std::string& name) { return (fs::path(g.out) / name).string(); };
  bool failed = false;
  const auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    std::printf("%-16s %s  %s\n", name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
    failed = failed || !pass;
  };

  if (all || v.suite == "identities") {
    const auto rep = ct::check_identities(config, {5, 20, 100}, samples_or(g, 1'000'000), opts);
    emit(path("identities.json"), ct::identity_json(rep), manifest);
    std::size_t bad = 0;
    for (const auto& c : rep.checks) bad += !c.pass;
    line("identities", rep.all_pass(), std::to_string(rep.checks.size() - bad) + "/" +
                                           std::to_string(rep.checks.size()) + " checks within 4 SE");
  }
  if (all || v.suite == "concentration") {
    const std::vector<double> ns = v.n_list.empty() ? std::vector<double>{1e3, 1e4} : v.n_list;
    const auto rep = ct::check_concentration(config, root, {0.05}, ns, samples_or(g, 10'000), 0.25, opts);
    emit(path("concentration.json"), ct::concentration_json(rep), manifest);
    line("concentration", rep.decreasing, "deviation probability decreasing in n");
  }
  if (all || v.suite == "types") {
    const double delta = parse_delta(g.delta).value_or(0.1);
    for (std::size_t s = 0; s < sets.size(); ++s) {
      for (double n : v.n_list.empty() || v.suite != "types" ? std::vector<double>{8, 16} : v.n_list) {
        const auto rep = ct::check_type_frequencies(config, root, sets[s], n, delta, samples_or(g, 1'000'000), opts);
        const std::string name = "types_set" + std::to_string(s + 1) + "_n" + std::to_string(static_cast<int>(n));
        emit(path(name + ".json"), ct::type_frequency_json(rep), manifest);
        char buf[96];
        std::snprintf(buf, sizeof buf, "mass on j(A) %.4f over %llu hits", rep.mass_on_subset,
                      static_cast<unsigned long long>(rep.hits));
        line(name, !rep.insufficient_hits, buf);
      }
    }
  }
  if (all || v.suite == "slopes") {
    const std::vector<double> ns = v.n_list.empty() ? std::vector<double>{8, 16, 32, 64} : v.n_list;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const auto sweep = ct::sweep_probability(config, root, sets[s], ns, samples_or(g, 1'000'000), opts);
      const std::string name = "slopes_set" + std::to_string(s + 1);
      emit(path(name + ".csv"), ct::sweep_csv(sweep), manifest);
      emit(path(name + ".json"), ct::sweep_json(sweep), manifest);
      emit(path(name + ".svg"), ct::sweep_svg(sweep), manifest);
      char buf[96];
      std::snprintf(buf, sizeof buf, "slope %.3f +- %.3f, target %.3f", sweep.fit.slope, sweep.fit.slope_se,
                    -sweep.target_alpha);
      line(name, !sweep.insufficient_hits && std::fabs(sweep.fit.slope + sweep.target_alpha) <= 0.3, buf);
    }
    const std::uint64_t hs = samples_or(g, 1'000'000);
    const auto hill = ct::hill_on_clusters(config, root, hs, std::max<std::uint64_t>(hs / 100, 10), opts);
    emit(path("hill.json"), ct::hill_json(hill), manifest);
    char buf[64];
    std::snprintf(buf, sizeof buf, "tail index %.3f, min alpha %.3f", hill.estimate, config.alpha_star(root));
    line("hill", std::fabs(hill.estimate - config.alpha_star(root)) <= 0.15, buf);
  }
  if (v.suite == "counterexample" || all) {
    const std::vector<double> ns = v.n_list.empty() ? std::vector<double>{4, 8, 16, 32} : v.n_list;
    try {
      const auto ce = ct::counterexample_experiment(config, v.radius, ns, samples_or(g, 1'000'000), opts);
      emit(path("counterexample.json"), ct::counterexample_json(ce), manifest);
      emit(path("counterexample.csv"), ct::sweep_csv(ce.sweep), manifest);
      emit(path("counterexample.svg"), ct::sweep_svg(ce.sweep), manifest);
      char buf[128];
      std::snprintf(buf, sizeof buf, "slope %.3f, naive -%.2f, lower bound -%.2f", ce.sweep.fit.slope,
                    ce.naive_alpha, ce.lower_bound_alpha);
      line("counterexample", !ce.sweep.insufficient_hits && ce.within_lower_bound, buf);
    } catch (const ct::Error& e) {
      if (!all || e.kind() != ct::ErrorKind::PreconditionViolation) throw;
      std::printf("%-16s SKIP  %s\n", "counterexample", e.what());
    }
  }
  return failed ? kStatistical : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed multi-type branching cluster simulator and experiment harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CLUSTERTAIL_VERSION);

  Global g;
  auto add_global = [&](CLI::App* sub) {
    sub->add_option("--seed", g.seed, "Master seed (64-bit)");
    sub->add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--samples", g.samples, "Sample count (scientific notation allowed)");
    sub->add_option("--out", g.out, "Output file (directory for verify); stdout when omitted");
    sub->add_option("--plot", g.plot, "SVG plot path");
    sub->add_option("--delta", g.delta, "Decomposition / measure delta, or 'auto'");
  };

  std::string config, set, subset, dump;
  std::vector<double> n_list;
  int root = 1;
  double n_dec = 16;
  VerifyArgs va;

  auto* validate = app.add_subcommand("validate", "Check the model assumptions; JSON report");
  validate->add_option("config", config, "Model JSON")->required();
  add_global(validate);

  auto* mean = app.add_subcommand("mean", "Expected cluster sizes (exact; empirical with --samples)");
  mean->add_option("config", config)->required();
  mean->add_option("--root", root);
  add_global(mean);

  auto* rate = app.add_subcommand("rate", "Rate function lambda_J(n) as CSV");
  rate->add_option("config", config)->required();
  rate->add_option("--set", subset, "Dimension set, e.g. 1,2")->required();
  rate->add_option("--n", n_list, "n values")->delimiter(',')->required();
  add_global(rate);

  auto* ja = app.add_subcommand("ja", "Solve j(A) for a rare-event set");
  ja->add_option("config", config)->required();
  ja->add_option("set", set, "Set JSON")->required();
  add_global(ja);

  auto* simulate = app.add_subcommand("simulate", "Raw cluster samples as CSV");
  simulate->add_option("config", config)->required();
  simulate->add_option("--root", root);
  simulate->add_option("--dump-decomposition", dump, "Also write one decomposition per sample (JSON lines)");
  simulate->add_option("--n", n_dec, "Decomposition scale n");
  add_global(simulate);

  auto* prob = app.add_subcommand("prob", "Probability sweep of P(S/n in A) over n");
  prob->add_option("config", config)->required();
  prob->add_option("set", set)->required();
  prob->add_option("--root", root);
  prob->add_option("--n", n_list, "Increasing n values (at least 3)")->delimiter(',')->required();
  add_global(prob);

  auto* measure = app.add_subcommand("measure", "Monte Carlo estimate of the limiting measures");
  measure->add_option("config", config)->required();
  measure->add_option("set", set)->required();
  measure->add_option("--jset", subset, "Dimension set J, e.g. 1")->required();
  add_global(measure);

  auto* verify = app.add_subcommand("verify", "Run verification suites, writing artifacts into --out");
  verify->add_option("config", config)->required();
  verify->add_option("--suite", va.suite, "identities|concentration|types|slopes|counterexample|all");
  verify->add_option("--set", va.sets, "Set JSON (repeatable) for types and slopes");
  verify->add_option("--n", va.n_list, "n values override")->delimiter(',');
  verify->add_option("--root", va.root);
  verify->add_option("--radius", va.radius, "Tube radius for the counterexample");
  add_global(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  Manifest manifest(join(argc, argv), g.seed, g.threads);
  int code = kOk;
  try {
    if (*validate) code = cmd_validate(config, g, manifest);
    else if (*mean) code = cmd_mean(config, root, g, manifest);
    else if (*rate) code = cmd_rate(config, subset, n_list, g, manifest);
    else if (*ja) code = cmd_ja(config, set, g, manifest);
    else if (*simulate) code = cmd_simulate(config, root, n_dec, dump, g, manifest);
    else if (*prob) code = cmd_prob(config, set, root, n_list, g, manifest);
    else if (*measure) code = cmd_measure(config, set, subset, g, manifest);
    else if (*verify) code = cmd_verify(config, va, g, manifest);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const ct::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", ct::to_string(e.kind()), e.what());
    return exit_code(e.kind());
  }

  if (!manifest.empty()) {
    try {
      const std::string target = *verify ? (fs::path(g.out) / "manifest.json").string()
                                       : manifest.first_artifact() + ".manifest.json";
      write_file(target, manifest.finish());
    } catch (const IoError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kIo;
    }
  }
  return code;
}
