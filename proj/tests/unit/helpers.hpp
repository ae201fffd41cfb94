#pragma once

#include <functional>
#include <optional>

#include "clustertail/config_io.hpp"
#include "clustertail/error.hpp"
#include "clustertail/model.hpp"

namespace testing_support {

inline const clustertail::ModelConfig& r2() {
  static const clustertail::ModelConfig config = clustertail::ModelConfig::create(clustertail::reference_r2_laws());
  return config;
}

// d x d model with every law inactive.
inline clustertail::ModelConfig null_model(int d) {
  clustertail::LawMatrix laws(d);
  double a = 1.5;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) laws[j].push_back(clustertail::OffspringLaw::zeta_tail(a += 0.1, 0.0));
  return clustertail::ModelConfig::create(laws, clustertail::Strictness::kRelaxed);
}

// Kind of the Error thrown by f, if any.
inline std::optional<clustertail::ErrorKind> kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const clustertail::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace testing_support
