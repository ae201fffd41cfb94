#pragma once

#include <string>

#include "clustertail/geometry.hpp"
#include "clustertail/measures.hpp"
#include "clustertail/model.hpp"
#include "clustertail/simulate.hpp"
#include "clustertail/verify.hpp"

namespace clustertail {

// Serialisers for the experiment artifacts. All output is a deterministic
// function of the input structures.

// experiment,root,n,samples,hits,censored,p_hat,se,lambda,ratio (root 1-based).
std::string sweep_csv(const SweepResult& sweep);
std::string sweep_json(const SweepResult& sweep);
// 800x600 log-log scatter of (n, p_hat) with the fitted line and a reference
// line of slope -target_alpha through the fitted centroid.
std::string sweep_svg(const SweepResult& sweep);

std::string validation_json(const ValidationReport& report, const LawMatrix& laws);
std::string ja_json(const JaResult& ja, const ModelConfig& config);
std::string identity_json(const IdentityReport& report);
std::string concentration_json(const ConcentrationReport& report);
std::string type_frequency_json(const TypeFrequencyReport& report);
std::string measure_json(const TotalEstimate& total);
std::string hill_json(const HillReport& report);
std::string counterexample_json(const CounterexampleResult& result);

// Raw samples: root,sample_index,censored,S_1..S_d (root 1-based).
std::string cluster_csv_header(int d);
std::string cluster_csv_row(const ClusterSample& sample, std::uint64_t index);
// One decomposition as a single-line JSON object.
std::string decomposition_json(const Decomposition& dec, std::uint64_t index);

// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace clustertail
