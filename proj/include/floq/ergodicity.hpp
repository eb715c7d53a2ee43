#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "floq/chain.hpp"
#include "floq/mc.hpp"

namespace floq {

// Observed mass outside the reference support; for pre-scrambling windows
// this is exactly a causality violation.
class CausalityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmpiricalDistribution {
  CountMap counts;
  std::uint64_t total = 0;
  unsigned outcome_bits = 0;
  std::uint64_t seed = 0;
  unsigned streams = 0;

  double frequency(Key128 k) const;
};

// Uniform reference: all 2^dim vectors, or all nonzero ones.
struct UniformReference {
  unsigned dim_bits = 0;
  bool include_zero = false;

  long double support_size() const;
  long double point_mass() const;
  bool contains(Key128 k) const;
};

// Sum of |P_hat - Q| over the full support, using the closed form
// sum_observed |P_hat - Q| + (|support| - #observed) Q for the unobserved
// points. Throws CausalityViolation for outcomes outside the support.
long double l1_to_uniform(const EmpiricalDistribution& p,
                          const UniformReference& q);

// Re-keys a full-chain distribution to the given site window, checking that
// no observed outcome has support outside the window.
EmpiricalDistribution compress_to_window(const EmpiricalDistribution& p,
                                         const ChainGeometry& geo,
                                         const std::vector<std::size_t>& sites);

// One evolve per sampled realization; outcomes keyed by the evolved vector,
// optionally projected onto `restrict` sites. Runs on the word-packed
// kernel whenever the geometry fits it.
EmpiricalDistribution transition_histogram(
    const PhaseVector& u0, HalfTime t, const ChainGeometry& geo,
    const McConfig& cfg,
    const std::optional<std::vector<std::size_t>>& restrict_sites = {});

// Reference implementation on the matrix path; draw-compatible with the
// fast kernel, so equal configs give bit-identical histograms. Kept for
// tests and benchmarks.
EmpiricalDistribution transition_histogram_reference(
    const PhaseVector& u0, HalfTime t, const ChainGeometry& geo,
    const McConfig& cfg,
    const std::optional<std::vector<std::size_t>>& restrict_sites = {});

struct ErgodicityReport {
  std::string experiment;
  std::size_t L = 0, N = 0;
  std::uint64_t t2 = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  unsigned streams = 0;
  double l1 = 0.0;
  double bound_main = 0.0;
  double bound_appendix = 0.0;
  bool vacuous_main = false;
  bool vacuous_appendix = false;
  bool restricted = false;
  std::vector<std::size_t> window;
  bool pass = false;

  std::string to_json() const;
};

// Local seed at x0, l1 against the uniform reference on the causal window.
// Exact full-support accounting when the window space is at most 24 bits;
// otherwise the check restricts to `window` (default: the two-site window
// at the seed) and the report says so.
ErgodicityReport weak_ergodicity_check(
    std::size_t x0, HalfTime t, const ChainGeometry& geo, const McConfig& cfg,
    const std::optional<std::vector<std::size_t>>& window = {});

// Any nonzero seed, half-integer t in [t_scr, 2 t_scr], l1 against uniform
// over all nonzero chain vectors (exact path for 2NL <= 24 bits).
ErgodicityReport halfinteger_ergodicity_check(
    const PhaseVector& u0, HalfTime t, const ChainGeometry& geo,
    const McConfig& cfg,
    const std::optional<std::vector<std::size_t>>& window = {});

enum class SeedClass { Local, FullSupport };

struct ZeroSiteRow {
  std::size_t site = 0;
  std::uint64_t zero_count = 0;
  double frequency = 0.0;
  double bound = 0.0;   // 0 when no bound applies
  bool has_bound = false;
  bool pass = true;
};
struct ZeroSiteStats {
  std::size_t L = 0, N = 0;
  std::uint64_t t2 = 0, samples = 0, seed = 0;
  unsigned streams = 0;
  SeedClass seed_class = SeedClass::Local;
  std::size_t x0 = 0;
  std::vector<ZeroSiteRow> rows;

  std::string to_csv() const;
};
ZeroSiteStats zero_site_stats(SeedClass cls, std::size_t x0, HalfTime t,
                              const ChainGeometry& geo, const McConfig& cfg);

// Per-site zero table of a single fixed realization (deterministic).
std::vector<bool> zero_sites_of(const DisorderRealization& r,
                                const PhaseVector& u0, HalfTime t);

// Projection of the full-support evolution onto region {1..Ls} against the
// uniform distribution over all 2^{2N Ls} vectors. Integer t <= (L-Ls)/4.
ErgodicityReport subsystem_check(std::size_t ls, HalfTime t,
                                 const ChainGeometry& geo,
                                 const McConfig& cfg);

// Joint distribution of the symplectic-form bits s_x = <u_x^t, u_x^0> over
// the region x in {1..Ls}, full-support seed, integer t.
struct PhaseStats {
  std::size_t L = 0, N = 0, ls = 0;
  std::uint64_t t2 = 0, samples = 0, seed = 0;
  unsigned streams = 0;
  std::map<std::uint64_t, std::uint64_t> counts;  // key: bits s_1..s_Ls
  double max_probability = 0.0;
  double bound = 0.0;  // 2^{-Ls} + 32 t 3^{Ls/2+1} 2^{-N}
  bool pass = false;
};
PhaseStats phase_statistics(std::size_t ls, HalfTime t,
                            const ChainGeometry& geo, const McConfig& cfg);

// Single-site variant: local seed at x0, s = <u_{x0}^t, u_{x0}^0>, integer t;
// prob{s=0} <= 1/2 + 8 t 2^{-N}.
struct SingleSitePhase {
  std::uint64_t zero_count = 0, samples = 0;
  double frequency = 0.0;
  double bound = 0.0;
  bool pass = false;
};
SingleSitePhase single_site_phase(std::size_t x0, HalfTime t,
                                  const ChainGeometry& geo,
                                  const McConfig& cfg);

// Distributional invariance under fixed local symplectic dressings.
// Integer t: S(t) -> (+S'_x)^{-1} S(t) (+S'_x); half-integer t: independent
// left and right dressings. Compares the chosen statistic bin by bin at 4
// binomial standard errors.
enum class TwirlStatistic { TransitionWindow, ZeroSiteTable };
struct TwirlReport {
  TwirlStatistic statistic;
  std::uint64_t t2 = 0, samples = 0, seed = 0;
  unsigned bins = 0;
  double max_z = 0.0;
  bool pass = false;
};
TwirlReport twirl_invariance_test(
    TwirlStatistic stat, HalfTime t, const ChainGeometry& geo,
    const McConfig& cfg, const std::vector<SymplecticMatrix>& left_dressing,
    const std::vector<SymplecticMatrix>& right_dressing);

// (+S'_x) u, one local symplectic per site.
PhaseVector apply_local_dressing(const std::vector<SymplecticMatrix>& dressing,
                                 const PhaseVector& u);

// Bound helpers (t as a real time).
double weak_bound_main(double t, std::size_t n);
double weak_bound_appendix(double t, std::size_t l, std::size_t n,
                           bool pre_scrambling);
double half_bound_main(double t, std::size_t l, std::size_t n);
double half_bound_appendix(double t, std::size_t l, std::size_t n);
double subsystem_bound_main(double t, std::size_t ls, std::size_t n);
double subsystem_bound_appendix(double t, std::size_t l, std::size_t ls,
                                std::size_t n);

}  // namespace floq
