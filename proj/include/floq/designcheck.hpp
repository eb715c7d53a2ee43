#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "floq/chain.hpp"
#include "floq/ergodicity.hpp"
#include "floq/mc.hpp"

namespace floq {

// The uniform transition reference gamma = (2^{2NL} - 1)^{-1}, exact.
struct HaarReference {
  ExactCount support;  // 2^{2NL} - 1
  long double gamma = 0.0L;
};
HaarReference haar_reference(const ChainGeometry& geo);

struct DesignReport {
  std::size_t L = 0, N = 0;
  std::uint64_t t2 = 0;
  bool exact = false;
  std::uint64_t samples = 0, seed = 0;
  unsigned streams = 0;
  std::vector<double> per_input_l1;
  double worst_l1 = 0.0;
  double p_guess = 0.0;           // 1/2 + worst_l1 / 4
  double p_guess_bound = 0.0;     // 1/2 + 8 t L 2^{-N}
  double l1_bound_appendix = 0.0; // 33 t L 2^{-N}
  bool p_bound_vacuous = false;
  bool l1_bound_vacuous = false;
  bool pass = false;

  std::string to_json() const;
};

// Distinguishability of W(t) from Haar at half-integer t in [t_scr, 2 t_scr]
// through the l1 reduction: worst_l1 = max over inputs of
// sum_{u' != 0} |P_t(u'|u0) - gamma|.
//
// With `exact` set the full gate-pair enumeration is used (L = 2, N = 1
// only). Otherwise the distribution is resolved exactly over the outcome
// space through its zero-pattern classes -- at half-integer times the law
// is constant on each class -- and only the pattern probabilities are
// estimated by Monte Carlo.
DesignReport advantage_estimate(const ChainGeometry& geo, HalfTime t,
                                const std::vector<PhaseVector>& inputs,
                                bool exact, const McConfig& cfg);

// Default input list: one representative per local-twirl orbit that the
// experiments use, the single-site X seed and the full-support X seed.
std::vector<PhaseVector> default_design_inputs(const ChainGeometry& geo);

// l1 assembled from zero-pattern probabilities: sum over patterns Z of
// |p_Z - gamma #\{u': pattern(u') = Z\}|.
double l1_from_pattern_counts(const ChainGeometry& geo,
                              const std::vector<std::uint64_t>& counts,
                              std::uint64_t total);

}  // namespace floq
