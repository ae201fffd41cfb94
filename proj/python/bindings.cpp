// Python bindings. Dimensions are 0-based here.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clustertail/config_io.hpp"
#include "clustertail/error.hpp"
#include "clustertail/geometry.hpp"
#include "clustertail/measures.hpp"
#include "clustertail/model.hpp"
#include "clustertail/parallel.hpp"
#include "clustertail/report.hpp"
#include "clustertail/simulate.hpp"
#include "clustertail/stats.hpp"
#include "clustertail/verify.hpp"

namespace py = pybind11;
namespace ct = clustertail;

namespace {

ct::IndexSet to_set(const std::vector<int>& dims) {
  ct::IndexSet s;
  for (int d : dims) {
    if (d < 0 || d >= 32) throw ct::Error(ct::ErrorKind::InvalidArgument, "dimension out of range");
    s.insert(d);
  }
  return s;
}

std::vector<std::vector<int>> rows_of(const ct::GeneralizedType& t) {
  std::vector<std::vector<int>> out;
  for (ct::IndexSet r : t.rows) out.push_back(r.elements());
  return out;
}

ct::RareEventSet make_set(const std::vector<std::pair<std::vector<double>, std::vector<double>>>& boxes) {
  std::vector<ct::Box> b;
  for (const auto& [lo, hi] : boxes) b.push_back(ct::Box{lo, hi});
  return ct::RareEventSet::create(std::move(b));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Heavy-tailed multi-type branching clusters";

  static py::exception<ct::Error> error(m, "ClusterTailError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ct::Error& e) {
      py::set_error(error, (std::string(ct::to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<ct::ModelConfig>(m, "Model")
      .def_static("from_json", [](const std::string& text) { return ct::ModelConfig::create(ct::parse_laws_json(text)); })
      .def_static("from_file", [](const std::string& path) { return ct::load_model_file(path); })
      .def_static("reference_r2", [] { return ct::ModelConfig::create(ct::reference_r2_laws()); })
      .def_static("counterexample", [] { return ct::ModelConfig::create(ct::counterexample_laws()); })
      .def_property_readonly("dim", &ct::ModelConfig::dim)
      .def_property_readonly("spectral_radius", &ct::ModelConfig::spectral_radius)
      .def("expected_cluster", &ct::ModelConfig::expected_cluster, py::arg("root"))
      .def("alpha_star", &ct::ModelConfig::alpha_star, py::arg("j"))
      .def("alpha_of", [](const ct::ModelConfig& c, const std::vector<int>& j) { return c.alpha_of(to_set(j)); })
      .def("rate_lambda",
           [](const ct::ModelConfig& c, const std::vector<int>& j, double n) { return c.rate_lambda(to_set(j), n); })
      .def("to_json", [](const ct::ModelConfig& c) { return ct::laws_to_json(c.laws()); });

  m.def("validate_json", [](const std::string& text) {
    const auto laws = ct::parse_laws_json(text);
    return ct::validation_json(ct::assess(laws), laws);
  });

  m.def(
      "sample_cluster",
      [](const ct::ModelConfig& c, int root, std::uint64_t seed, std::uint64_t index) {
        const auto s = ct::sample_cluster(c, root, ct::SampleKey{seed, index, 0});
        return py::make_tuple(s.totals, s.censored != ct::Censoring::kNone);
      },
      py::arg("model"), py::arg("root"), py::arg("seed"), py::arg("index"));

  m.def(
      "sample_clusters",
      [](const ct::ModelConfig& c, int root, std::uint64_t seed, std::uint64_t count, int threads) {
        using Rows = std::vector<std::vector<std::uint64_t>>;
        py::gil_scoped_release release;
        return ct::parallel_reduce(
            count, threads, Rows{},
            [&](std::uint64_t b, std::uint64_t e, Rows& acc) {
              for (std::uint64_t k = b; k < e; ++k) acc.push_back(ct::sample_cluster(c, root, ct::SampleKey{seed, k, 0}).totals);
            },
            [](Rows& into, const Rows& from) { into.insert(into.end(), from.begin(), from.end()); });
      },
      py::arg("model"), py::arg("root"), py::arg("seed"), py::arg("count"), py::arg("threads") = 1);

  m.def(
      "sample_decomposition",
      [](const ct::ModelConfig& c, int root, double n, double delta, std::uint64_t seed, std::uint64_t index) {
        const auto d = ct::sample_decomposition(c, root, ct::SampleKey{seed, index, 0},
                                                ct::DecompositionParams{n, delta, ct::kDefaultNodeCap, ct::kDefaultDepthCap});
        py::dict out;
        out["tau"] = d.tau;
        out["reconstructed"] = d.reconstructed;
        out["depth"] = d.depth;
        out["gtype"] = rows_of(d.gtype);
        out["censored"] = d.censored != ct::Censoring::kNone;
        out["hat_S"] = ct::hat_S(d, c);
        return out;
      },
      py::arg("model"), py::arg("root"), py::arg("n"), py::arg("delta"), py::arg("seed"), py::arg("index"));

  m.def(
      "solve_jA",
      [](const ct::ModelConfig& c, const std::vector<std::pair<std::vector<double>, std::vector<double>>>& boxes) {
        const auto r = ct::solve_jA(make_set(boxes), c);
        py::dict out;
        out["jset"] = r.subset.elements();
        out["alpha"] = r.alpha;
        out["bounded_away"] = r.bounded_away.bounded_away;
        out["witness"] = r.witness.point;
        return out;
      },
      py::arg("model"), py::arg("boxes"));

  m.def("enumerate_types", [](const std::vector<int>& j, int d) {
    std::vector<std::vector<std::vector<int>>> out;
    for (const auto& t : ct::enumerate_types(to_set(j), d)) out.push_back(rows_of(t));
    return out;
  });

  m.def(
      "estimate_C_total",
      [](const ct::ModelConfig& c, const std::vector<int>& j,
         const std::vector<std::pair<std::vector<double>, std::vector<double>>>& boxes, double delta,
         std::uint64_t samples, std::uint64_t seed, int threads) {
        const auto set = make_set(boxes);
        ct::TotalEstimate t;
        {
          py::gil_scoped_release release;
          t = ct::estimate_C_total(to_set(j), set, c, delta, samples, ct::MeasureStream{seed, 0, threads});
        }
        py::dict out;
        out["total"] = t.total;
        out["se"] = t.total_se;
        out["delta"] = t.delta;
        return out;
      },
      py::arg("model"), py::arg("jset"), py::arg("boxes"), py::arg("delta") = 0.0, py::arg("samples") = 100000,
      py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "sweep_probability",
      [](const ct::ModelConfig& c, int root, const std::vector<std::pair<std::vector<double>, std::vector<double>>>& boxes,
         const std::vector<double>& n_list, std::uint64_t samples, std::uint64_t seed, int threads) {
        const auto set = make_set(boxes);
        ct::SweepResult s;
        {
          py::gil_scoped_release release;
          s = ct::sweep_probability(c, root, set, n_list, samples, ct::RunOptions{seed, threads, ct::kDefaultNodeCap});
        }
        return ct::sweep_csv(s);
      },
      py::arg("model"), py::arg("root"), py::arg("boxes"), py::arg("n_list"), py::arg("samples"), py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def("hill_estimate", &ct::hill_estimate, py::arg("values"), py::arg("k"));
}
