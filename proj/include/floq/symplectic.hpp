#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "floq/gf2.hpp"
#include "floq/mc.hpp"
#include "floq/rng.hpp"

namespace floq {

// Exact integer counts; group orders overflow 64 bits from n = 4 on.
using ExactCount = boost::multiprecision::cpp_int;

// A 2n x 2n GF(2) matrix validated against S^T J S = J at construction.
class SymplecticMatrix {
 public:
  explicit SymplecticMatrix(BitMatrix m);
  static SymplecticMatrix identity(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t dim() const { return 2 * n_; }
  const BitMatrix& matrix() const { return m_; }

  SymplecticMatrix operator*(const SymplecticMatrix& o) const;
  // S^{-1} = J S^T J.
  SymplecticMatrix inverse() const;
  bool operator==(const SymplecticMatrix&) const = default;

 private:
  struct Unchecked {};
  SymplecticMatrix(Unchecked, std::size_t n, BitMatrix m)
      : n_(n), m_(std::move(m)) {}
  friend SymplecticMatrix sample_uniform(std::size_t, Rng&);

  std::size_t n_;
  BitMatrix m_;
};

// Uniform sample from the symplectic group S_n. Column pairs (u_i, v_i) are
// generated sequentially, each drawn uniformly from the affine solution set
// of the accumulated form constraints, so no rejection is ever needed.
SymplecticMatrix sample_uniform(std::size_t n, Rng& rng);

// Column words of a uniform symplectic for 2n <= 64; the allocation-free
// core behind sample_uniform, exposed for the hot Monte-Carlo loops.
void sample_symplectic_columns(std::size_t n, Rng& rng,
                               std::array<std::uint64_t, 64>& cols);

// Row-major word form of a gate, for 4N <= 64.
struct WordGate {
  unsigned dim = 0;
  std::array<std::uint64_t, 64> rows{};

  std::uint64_t apply(std::uint64_t v) const {
    std::uint64_t out = 0;
    for (unsigned r = 0; r < dim; ++r)
      if (std::popcount(rows[r] & v) & 1) out |= std::uint64_t{1} << r;
    return out;
  }
};
// Uniform symplectic of size 2n into g, same draw sequence as
// sample_uniform.
void sample_word_gate(std::size_t n, Rng& rng, WordGate& g);

// |S_n| = prod_{i=1..n} (2^{2i} - 1) 2^{2i-1}.
ExactCount group_order(std::size_t n);

// Number of k-dimensional subspaces of Z_2^n.
ExactCount count_subspaces(std::size_t n, std::size_t k);

// Bounds a(n) 2^{2n^2+n} <= |S_n| <= b(n) 2^{2n^2+n} with
// 0.64 < a(n) < b(n) < 0.78; used by tests.
bool group_order_in_bound_window(std::size_t n, long double slack = 1e-9L);

// Half-size block decomposition S = (A B; C D) along the even split
// Z_2^{4m} = Z_2^{2m} + Z_2^{2m}. Requires dim divisible by 4.
struct BlockView {
  BitMatrix a, b, c, d;
};
BlockView blocks(const SymplecticMatrix& s);
BitMatrix assemble_blocks(const BlockView& v);

enum class Block { A, B, C, D };
const char* block_name(Block b);
BitMatrix pick_block(const BlockView& v, Block which);

// Empirical distribution of rank(E) for the chosen block E of a uniform
// S in S_{2n}. Blocks are 2n x 2n.
struct RankHistogram {
  std::size_t n = 0;
  Block which = Block::C;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  unsigned streams = 0;
  std::map<std::size_t, std::uint64_t> counts;

  double tail_frequency(std::size_t max_rank) const;
};
RankHistogram block_rank_histogram(std::size_t n, Block which,
                                   const McConfig& cfg);

// prob{rank E <= 2n - k} <= min{2^k,4} 2^{-k^2} / (1 - 2^{-2n})^k.
double single_rank_tail_bound(std::size_t n, std::size_t k);

// Rank statistics of the product E_r ... E_1 of blocks of r independent
// uniform S in S_{2n}, plus the frequency of E_r ... E_1 u = 0 for uniform u.
struct ProductRankResult {
  std::size_t n = 0;
  std::size_t r = 0;
  Block which = Block::C;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  unsigned streams = 0;
  std::map<std::size_t, std::uint64_t> counts;
  std::uint64_t kernel_hits = 0;  // samples with E_r...E_1 u = 0

  double tail_frequency(std::size_t max_rank) const;
  double kernel_hit_frequency() const;
};
ProductRankResult product_rank_experiment(std::size_t n, std::size_t r,
                                          Block which, const McConfig& cfg);

// prob{rank(E_r...E_1) <= 2n-k} <= 2^k/(1-2^{-2n})^k binom(k+r-1,k) 2^{-k^2/2}
double product_rank_tail_bound(std::size_t n, std::size_t r, std::size_t k);
// prob{E_r...E_1 u = 0} <= 8 r 2^{-n}.
double kernel_hit_bound(std::size_t n, std::size_t r);

// Binomial standard error of a frequency estimate.
double binomial_sigma(double p, std::uint64_t samples);

}  // namespace floq
