#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "floq/chain.hpp"
#include "floq/mc.hpp"
#include "floq/oracle.hpp"

namespace floq {

// True iff C1 (D0 A1)^k C0 = 0 for k = 0..4N^2-1, which blocks all
// rightward propagation past the even gate s0 (penetration <= 1).
bool is_right_wall(const SymplecticMatrix& s0, const SymplecticMatrix& s1,
                   std::size_t n_modes);

// N = 1 shortcut: C1 C0 = 0 and C1 D0 A1 C0 = 0 suffice.
bool is_right_wall_n1(const SymplecticMatrix& s0, const SymplecticMatrix& s1);

// Mirror criterion: is_right_wall applied to the block-swapped pair in
// reversed order.
bool is_left_wall(const SymplecticMatrix& s0, const SymplecticMatrix& s1,
                  std::size_t n_modes);

// C = 0 (equivalently B = 0): the gate decouples its two sites.
bool is_product_form(const SymplecticMatrix& s);

struct WallReport {
  std::size_t position = 0;  // even gate index of the pair
  enum class Side { Right, Left } side = Side::Right;
  int penetration = 1;  // 0 for trivial (product-form) walls
  std::vector<std::string> detected_by;
};

// Evaluates the wall conditions on every adjacent even-odd gate pair
// (U_x even, U_{x+1} odd) around the ring.
std::vector<WallReport> scan_chain(const DisorderRealization& r);

struct WallProbabilityReport {
  std::size_t n_modes = 0;
  std::uint64_t samples = 0, hits = 0, seed = 0;
  unsigned streams = 0;
  double frequency = 0.0;
  double bound = 0.0;  // 4N 2^{-2N(N-1)}
  bool pass = false;
};
WallProbabilityReport wall_probability(std::size_t n_modes,
                                       const McConfig& cfg);

// Exact N=1 wall probability over all 720^2 gate pairs.
oracle::Rational exact_wall_probability_n1();
// Rounds a rational to two decimals, exactly (half up).
int round_two_decimals(const oracle::Rational& r);

// Directional confinement check. Seeds are drawn strictly on the allowed
// side of the wall and the support extent is tracked on the covering space;
// the forbidden-side assertion runs until the support wraps the ring (at
// which point sides are no longer distinguishable and the claim is vacuous).
struct ConfinementResult {
  bool pass = true;
  std::optional<std::uint64_t> violated_at_t2;
  std::optional<std::uint64_t> wrapped_at_t2;
  unsigned trials = 0;
};
ConfinementResult confinement_test(const DisorderRealization& r,
                                   const WallReport& wall,
                                   std::uint64_t t2_max, unsigned trials,
                                   Rng& rng);

struct LightconeGrid {
  ChainGeometry geometry;
  // rows[t2][qubit] = 2-bit Pauli class (I=0, X=1, Z=2, Y=3).
  std::vector<std::vector<std::uint8_t>> rows;
  // per-row support extents in covering-space coordinates; meaningful until
  // the support wraps.
  struct Extent {
    std::int64_t leftmost = 0, rightmost = 0;
    bool wrapped = false;
  };
  std::vector<Extent> extents;
};
LightconeGrid lightcone_grid(const DisorderRealization& r,
                             const PhaseVector& u0, std::uint64_t t2_max);

std::string lightcone_svg(const LightconeGrid& grid,
                          const std::vector<WallReport>& walls);
std::string lightcone_pgm(const LightconeGrid& grid);
std::string extents_csv(const LightconeGrid& grid);

// The two 8x8 matrices of the N=2 non-wall construction: both symplectic,
// C1 C0 = 0, C1 D0 A1 C0 = 0, but C1 (D0 A1)^2 C0 != 0.
std::pair<SymplecticMatrix, SymplecticMatrix> counterexample_fixture();

// The N=1 pair whose phase-space matrices satisfy both wall conditions.
std::pair<SymplecticMatrix, SymplecticMatrix> example_wall_pair_n1();

}  // namespace floq
