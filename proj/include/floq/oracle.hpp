#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "floq/gf2.hpp"
#include "floq/symplectic.hpp"

namespace floq::oracle {

// Compact 4x4 GF(2) matrix: row i in the low 4 bits of r[i].
struct Mat4 {
  std::array<std::uint8_t, 4> r{};

  bool operator==(const Mat4&) const = default;
  std::uint8_t apply(std::uint8_t v) const;
  Mat4 mul(const Mat4& o) const;
  Mat4 transposed() const;
  BitMatrix to_bitmatrix() const;
  static Mat4 from_bitmatrix(const BitMatrix& m);
  static Mat4 identity();
  static Mat4 j4();
};

// 2x2 GF(2) matrix: row 0 in bits 0-1, row 1 in bits 2-3.
using Mat2 = std::uint8_t;
Mat2 mul2(Mat2 a, Mat2 b);
std::uint8_t apply2(Mat2 m, std::uint8_t v);
constexpr Mat2 kId2 = 0b10'01;  // rows (1,0),(0,1)

// Blocks of a Mat4 under the 2|2 split: (A B; C D).
struct Blocks4 {
  Mat2 a, b, c, d;
};
Blocks4 blocks4(const Mat4& m);

// All 720 elements of the symplectic group on 4 bits, found by filtering
// all 2^16 candidate matrices. Computed once, then cached.
const std::vector<Mat4>& sp4_elements();

// Brute-force group orders by exhaustive filtering; independent of the
// product formula. Supported for n = 1 (2^4 candidates) and n = 2 (2^16).
std::uint64_t sp_order_bruteforce(std::size_t n);

// Exhaustive check that a uniform S in S_1 maps a fixed nonzero u to each
// nonzero u' equally often; returns the three counts (order 6 / 3 = 2 each).
std::array<std::uint64_t, 3> sp2_output_counts(std::uint8_t u);

// --- exact L=2, N=1 chain distributions -----------------------------------
//
// State is 4 bits: site 0 in bits 0-1, site 1 in bits 2-3. The even half
// step applies gate 0 to (site0, site1); the odd half step applies gate 1
// to (site1, site0).

std::uint8_t evolve_l2(const Mat4& g0, const Mat4& g1, std::uint8_t u0,
                       unsigned t2);

// counts[t2-1][v] = number of the 720^2 gate pairs mapping u0 to v after t2
// half steps.
struct TransitionTable {
  std::vector<std::array<std::uint64_t, 16>> counts;
  std::uint64_t total = 0;

  const std::array<std::uint64_t, 16>& at_t2(unsigned t2) const {
    return counts.at(t2 - 1);
  }
};
TransitionTable exact_transitions(std::uint8_t u0, unsigned t2_max);

// l1 distance between the exact t2 distribution and the uniform
// distribution on the 15 nonzero vectors, as the exact rational
// num / (15 * total).
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  long double value() const {
    return static_cast<long double>(num) / static_cast<long double>(den);
  }
};
Rational exact_l1_to_uniform(const std::array<std::uint64_t, 16>& counts,
                             std::uint64_t total);

// Zero-pattern marginals of a 16-outcome table: index bit x set = site x zero.
std::array<std::uint64_t, 4> zero_pattern_counts_l2(
    const std::array<std::uint64_t, 16>& counts);

// --- exact N=1 wall statistics ---------------------------------------------

bool right_wall_n1(const Mat4& s0, const Mat4& s1);       // two conditions
bool right_wall_full_k(const Mat4& s0, const Mat4& s1);   // k = 0..3
struct WallCounts {
  std::uint64_t pairs = 0;       // total pairs enumerated (720^2)
  std::uint64_t right_walls = 0; // pairs satisfying the N=1 conditions
  std::uint64_t left_walls = 0;  // mirrored pairs
  std::uint64_t mismatches = 0;  // pairs where the two-condition test and the
                                 // full k-range test disagree
};
WallCounts exact_wall_counts();

// Number of the 720 elements with C = 0 (product form).
std::uint64_t product_form_count();

// Number of the 720 elements whose C block has rank <= max_rank.
std::uint64_t c_rank_tail_count(std::size_t max_rank);

// --- exact L=4, N=1 zero-pattern distribution at t = 3/2 -------------------
//
// Even gates are enumerated over all 720^2 assignments; the two odd gates,
// which each act exactly once, are integrated analytically (a uniform
// symplectic maps a nonzero pair input to a uniform nonzero pair output).
// counts[pattern] is over a total weight of 720^2 * 15^2, pattern bit x set
// meaning site x of the evolved vector is zero.
struct PatternTableL4 {
  std::array<std::uint64_t, 16> counts{};
  std::uint64_t total = 0;
};
PatternTableL4 exact_pattern_l4_t3half(std::uint8_t site0_seed,
                                       bool full_support);

}  // namespace floq::oracle
