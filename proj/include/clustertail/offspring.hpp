#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "clustertail/random.hpp"

namespace clustertail {

enum class Family { ZetaTail, MixedPoisson };

const char* to_string(Family family);

// Largest count a single draw may return; keeps every sum of draws exact in
// both uint64 and double.
inline constexpr std::uint64_t kMaxDraw = std::uint64_t{1} << 52;

// A regularly varying law on {0, 1, 2, ...}.
//
// zeta_tail:     P(B = 0) = 1 - p,  P(B = k) = p k^{-(alpha+1)} / zeta(alpha+1), k >= 1.
// mixed_poisson: with probability p draw W ~ Pareto(alpha, x_m) and B | W ~ Poisson(W phi);
//                otherwise B = 0. This is the offspring law of a Hawkes cluster whose
//                excitation marks are Pareto and whose kernel has mass phi.
//
// Values are immutable; copies share the precomputed sampling table.
class OffspringLaw {
 public:
  static OffspringLaw zeta_tail(double alpha, double p);
  // Solves for the activity p that yields the requested mean.
  static OffspringLaw zeta_tail_with_mean(double alpha, double mean);
  static OffspringLaw mixed_poisson(double alpha, double p, double x_m, double phi);

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double activity() const { return p_; }
  double pareto_scale() const { return x_m_; }
  double fertility() const { return phi_; }

  double mean() const;
  // P(B > x) for x >= 0.
  double survival(double x) const;
  // E[B 1{B <= m}].
  double truncated_mean(double m) const;
  // P(B = 0).
  double zero_probability() const { return 1.0 - survival(0.0); }

  std::uint64_t sample(Stream& stream) const;

  std::string describe() const;

 private:
  struct ZetaTable;

  OffspringLaw() = default;
  std::uint64_t sample_zeta(Stream& stream, double v) const;
  std::uint64_t sample_mixed_poisson(Stream& stream) const;

  Family family_ = Family::ZetaTail;
  double alpha_ = 2.0;
  double p_ = 0.0;
  double x_m_ = 0.0;
  double phi_ = 0.0;
  std::shared_ptr<const ZetaTable> table_;
};

// Poisson variate; inversion for small means, PTRS rejection otherwise.
std::uint64_t sample_poisson(Stream& stream, double mean);

}  // namespace clustertail
