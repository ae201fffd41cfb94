#pragma once

#include <string>

#include "clustertail/model.hpp"

namespace clustertail {

// JSON model file:
//   {"d": 2, "offspring": [[law, law], [law, law]]}
// offspring[j][i] is the law of B_{i<-j} (outer index = parent type, 0-based).
// A law is one of
//   {"family": "zeta_tail", "alpha": a, "p": p}
//   {"family": "zeta_tail", "alpha": a, "mean": m}
//   {"family": "mixed_poisson", "alpha": a, "p": p, "x_m": x, "phi": f}
// Malformed input raises Error(ConfigFormat); model-level failures are left to
// ModelConfig::create.
LawMatrix parse_laws_json(const std::string& text);
std::string laws_to_json(const LawMatrix& laws);

ModelConfig load_model_file(const std::string& path, Strictness strictness = Strictness::kStrict);

// Whole file as bytes; throws Error(ConfigFormat) when unreadable.
std::string read_file(const std::string& path);

// The two built-in reference models, zeta-tailed with the means fixed below.
//   R2:         tail indices (1<-1, 2<-1, 1<-2, 2<-2) = (1.6, 3.4, 2.9, 2.2),
//               means 0.4, 0.1, 0.15, 0.35.
//   tube experiment: alpha*(1) = 2.2 and alpha*(2) = 5.0, with P(B_{2<-1} = 0) > 0.
LawMatrix reference_r2_laws();
LawMatrix counterexample_laws();

}  // namespace clustertail
