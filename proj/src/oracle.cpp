#include "floq/oracle.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace floq::oracle {

namespace {

constexpr std::uint8_t parity4(std::uint8_t v) {
  return static_cast<std::uint8_t>(std::popcount(static_cast<unsigned>(v)) & 1);
}

constexpr std::uint8_t swap_halves(std::uint8_t v) {
  return static_cast<std::uint8_t>(((v >> 2) | (v << 2)) & 0xF);
}

constexpr Mat2 kJ2 = 0b01'10;  // rows (0,1),(1,0)

Mat2 transpose2(Mat2 m) {
  const Mat2 r0 = static_cast<Mat2>((m & 1) | (((m >> 2) & 1) << 1));
  const Mat2 r1 = static_cast<Mat2>(((m >> 1) & 1) | (((m >> 3) & 1) << 1));
  return static_cast<Mat2>(r0 | (r1 << 2));
}

std::size_t rank2(Mat2 m) {
  const Mat2 r0 = m & 3, r1 = (m >> 2) & 3;
  if (m == 0) return 0;
  if (r0 != 0 && r1 != 0 && r0 != r1) return 2;
  return 1;
}

Mat4 mirror4(const Mat4& s) {
  // M S M with M the block swap (0 I; I 0): (A B; C D) -> (D C; B A).
  Mat4 out;
  out.r[0] = swap_halves(s.r[2]);
  out.r[1] = swap_halves(s.r[3]);
  out.r[2] = swap_halves(s.r[0]);
  out.r[3] = swap_halves(s.r[1]);
  return out;
}

}  // namespace

std::uint8_t Mat4::apply(std::uint8_t v) const {
  std::uint8_t out = 0;
  for (int i = 0; i < 4; ++i) out |= static_cast<std::uint8_t>(parity4(r[i] & v) << i);
  return out;
}

Mat4 Mat4::mul(const Mat4& o) const {
  Mat4 out;
  for (int i = 0; i < 4; ++i) {
    std::uint8_t acc = 0;
    for (int k = 0; k < 4; ++k)
      if ((r[i] >> k) & 1) acc ^= o.r[k];
    out.r[i] = acc;
  }
  return out;
}

Mat4 Mat4::transposed() const {
  Mat4 out;
  for (int i = 0; i < 4; ++i) {
    std::uint8_t row = 0;
    for (int j = 0; j < 4; ++j) row |= static_cast<std::uint8_t>(((r[j] >> i) & 1) << j);
    out.r[i] = row;
  }
  return out;
}

BitMatrix Mat4::to_bitmatrix() const {
  BitMatrix m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((r[i] >> j) & 1) m.set(i, j, true);
  return m;
}

Mat4 Mat4::from_bitmatrix(const BitMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4)
    throw std::invalid_argument("Mat4: expected 4x4");
  Mat4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (m.get(i, j)) out.r[i] |= static_cast<std::uint8_t>(1u << j);
  return out;
}

Mat4 Mat4::identity() { return Mat4{{1, 2, 4, 8}}; }

Mat4 Mat4::j4() { return Mat4{{2, 1, 8, 4}}; }

Mat2 mul2(Mat2 a, Mat2 b) {
  const Mat2 b0 = b & 3, b1 = (b >> 2) & 3;
  Mat2 out = 0;
  Mat2 row = static_cast<Mat2>(((a & 1) ? b0 : 0) ^ ((a & 2) ? b1 : 0));
  out |= row;
  row = static_cast<Mat2>(((a & 4) ? b0 : 0) ^ ((a & 8) ? b1 : 0));
  out |= static_cast<Mat2>(row << 2);
  return out;
}

std::uint8_t apply2(Mat2 m, std::uint8_t v) {
  std::uint8_t out = 0;
  if (parity4((m & 3) & v)) out |= 1;
  if (parity4(((m >> 2) & 3) & v)) out |= 2;
  return out;
}

Blocks4 blocks4(const Mat4& m) {
  Blocks4 b;
  b.a = static_cast<Mat2>((m.r[0] & 3) | ((m.r[1] & 3) << 2));
  b.b = static_cast<Mat2>(((m.r[0] >> 2) & 3) | (((m.r[1] >> 2) & 3) << 2));
  b.c = static_cast<Mat2>((m.r[2] & 3) | ((m.r[3] & 3) << 2));
  b.d = static_cast<Mat2>(((m.r[2] >> 2) & 3) | (((m.r[3] >> 2) & 3) << 2));
  return b;
}

const std::vector<Mat4>& sp4_elements() {
  static const std::vector<Mat4> elements = [] {
    std::vector<Mat4> out;
    const Mat4 j = Mat4::j4();
    for (unsigned w = 0; w < (1u << 16); ++w) {
      Mat4 s;
      s.r[0] = w & 0xF;
      s.r[1] = (w >> 4) & 0xF;
      s.r[2] = (w >> 8) & 0xF;
      s.r[3] = (w >> 12) & 0xF;
      if (s.transposed().mul(j.mul(s)) == j) out.push_back(s);
    }
    return out;
  }();
  return elements;
}

std::uint64_t sp_order_bruteforce(std::size_t n) {
  if (n == 1) {
    std::uint64_t count = 0;
    for (unsigned w = 0; w < 16; ++w) {
      const Mat2 s = static_cast<Mat2>(w);
      if (mul2(transpose2(s), mul2(kJ2, s)) == kJ2) ++count;
    }
    return count;
  }
  if (n == 2) return sp4_elements().size();
  throw std::invalid_argument("sp_order_bruteforce: only n = 1, 2 supported");
}

std::array<std::uint64_t, 3> sp2_output_counts(std::uint8_t u) {
  if (u == 0 || u > 3)
    throw std::invalid_argument("sp2_output_counts: u must be nonzero 2-bit");
  std::array<std::uint64_t, 3> counts{};
  for (unsigned w = 0; w < 16; ++w) {
    const Mat2 s = static_cast<Mat2>(w);
    if (mul2(transpose2(s), mul2(kJ2, s)) != kJ2) continue;
    const std::uint8_t out = apply2(s, u);
    ++counts[out - 1];
  }
  return counts;
}

std::uint8_t evolve_l2(const Mat4& g0, const Mat4& g1, std::uint8_t u0,
                       unsigned t2) {
  std::uint8_t v = u0;
  for (unsigned step = 0; step < t2; ++step) {
    if (step % 2 == 0)
      v = g0.apply(v);
    else
      v = swap_halves(g1.apply(swap_halves(v)));
  }
  return v;
}

TransitionTable exact_transitions(std::uint8_t u0, unsigned t2_max) {
  if (u0 == 0) throw std::invalid_argument("exact_transitions: u0 nonzero");
  const auto& sp = sp4_elements();
  TransitionTable table;
  table.counts.assign(t2_max, {});
  table.total = static_cast<std::uint64_t>(sp.size()) * sp.size();
  for (const Mat4& g0 : sp) {
    for (const Mat4& g1 : sp) {
      std::uint8_t v = u0;
      for (unsigned step = 0; step < t2_max; ++step) {
        if (step % 2 == 0)
          v = g0.apply(v);
        else
          v = swap_halves(g1.apply(swap_halves(v)));
        ++table.counts[step][v];
      }
    }
  }
  return table;
}

Rational exact_l1_to_uniform(const std::array<std::uint64_t, 16>& counts,
                             std::uint64_t total) {
  std::uint64_t num = 0;
  for (unsigned v = 1; v < 16; ++v) {
    const std::uint64_t scaled = 15 * counts[v];
    num += scaled > total ? scaled - total : total - scaled;
  }
  num += 15 * counts[0];  // mass on the excluded zero vector
  Rational r{num, 15 * total};
  const std::uint64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

std::array<std::uint64_t, 4> zero_pattern_counts_l2(
    const std::array<std::uint64_t, 16>& counts) {
  std::array<std::uint64_t, 4> out{};
  for (unsigned v = 0; v < 16; ++v) {
    const unsigned pattern =
        ((v & 0b0011) == 0 ? 1u : 0u) | ((v & 0b1100) == 0 ? 2u : 0u);
    out[pattern] += counts[v];
  }
  return out;
}

bool right_wall_n1(const Mat4& s0, const Mat4& s1) {
  const Blocks4 b0 = blocks4(s0);
  const Blocks4 b1 = blocks4(s1);
  if (mul2(b1.c, b0.c) != 0) return false;
  return mul2(b1.c, mul2(mul2(b0.d, b1.a), b0.c)) == 0;
}

bool right_wall_full_k(const Mat4& s0, const Mat4& s1) {
  const Blocks4 b0 = blocks4(s0);
  const Blocks4 b1 = blocks4(s1);
  const Mat2 p = mul2(b0.d, b1.a);
  Mat2 acc = b0.c;
  for (int k = 0; k < 4; ++k) {  // 4N^2 = 4 powers at N = 1
    if (mul2(b1.c, acc) != 0) return false;
    acc = mul2(p, acc);
  }
  return true;
}

WallCounts exact_wall_counts() {
  const auto& sp = sp4_elements();
  WallCounts wc;
  for (const Mat4& s0 : sp) {
    const Mat4 m0 = mirror4(s0);
    for (const Mat4& s1 : sp) {
      ++wc.pairs;
      const bool two_cond = right_wall_n1(s0, s1);
      if (two_cond) ++wc.right_walls;
      if (two_cond != right_wall_full_k(s0, s1)) ++wc.mismatches;
      if (right_wall_n1(mirror4(s1), m0)) ++wc.left_walls;
    }
  }
  return wc;
}

std::uint64_t product_form_count() {
  std::uint64_t count = 0;
  for (const Mat4& s : sp4_elements())
    if (blocks4(s).c == 0) ++count;
  return count;
}

std::uint64_t c_rank_tail_count(std::size_t max_rank) {
  std::uint64_t count = 0;
  for (const Mat4& s : sp4_elements())
    if (rank2(blocks4(s).c) <= max_rank) ++count;
  return count;
}

PatternTableL4 exact_pattern_l4_t3half(std::uint8_t site0_seed,
                                       bool full_support) {
  const std::uint8_t u0 = full_support
                              ? std::uint8_t{0x55}
                              : static_cast<std::uint8_t>(site0_seed & 3);
  if (u0 == 0)
    throw std::invalid_argument("exact_pattern_l4_t3half: zero seed");
  const auto& sp = sp4_elements();
  const int count = static_cast<int>(sp.size());

  PatternTableL4 table;
  table.total =
      static_cast<std::uint64_t>(count) * count * 15 * 15;

  std::array<std::uint64_t, 16> global{};
#if defined(_OPENMP)
#pragma omp parallel
#endif
  {
    std::array<std::uint64_t, 16> local{};
#if defined(_OPENMP)
#pragma omp for schedule(dynamic)
#endif
    for (int i0 = 0; i0 < count; ++i0) {
      const Mat4& s0 = sp[i0];
      for (int i2 = 0; i2 < count; ++i2) {
        const Mat4& s2 = sp[i2];
        // Half step 1 (even): s0 on sites (0,1), s2 on sites (2,3).
        const std::uint8_t y_lo = s0.apply(u0 & 0xF);
        const std::uint8_t y_hi = s2.apply((u0 >> 4) & 0xF);
        // Odd-gate inputs: s1 sees (y1, y2), s3 sees (y3, y0).
        const std::uint8_t in1 =
            static_cast<std::uint8_t>(((y_lo >> 2) & 3) | ((y_hi & 3) << 2));
        const std::uint8_t in3 = static_cast<std::uint8_t>(
            ((y_hi >> 2) & 3) | ((y_lo & 3) << 2));
        // A uniform symplectic gate maps a nonzero pair to a uniform nonzero
        // pair; weights are in units of 1/15 per gate.
        for (unsigned va = (in1 == 0 ? 0 : 1); va < (in1 == 0 ? 1u : 16u);
             ++va) {
          const std::uint64_t wa = (in1 == 0) ? 15 : 1;
          for (unsigned vb = (in3 == 0 ? 0 : 1); vb < (in3 == 0 ? 1u : 16u);
               ++vb) {
            const std::uint64_t wb = (in3 == 0) ? 15 : 1;
            // Reassemble sites: va = (z1, z2), vb = (z3, z0).
            const std::uint8_t z0 = (vb >> 2) & 3;
            const std::uint8_t z1 = va & 3;
            const std::uint8_t z2 = (va >> 2) & 3;
            const std::uint8_t z3 = vb & 3;
            // Half step 3 (even) again.
            const std::uint8_t w_lo =
                s0.apply(static_cast<std::uint8_t>(z0 | (z1 << 2)));
            const std::uint8_t w_hi =
                s2.apply(static_cast<std::uint8_t>(z2 | (z3 << 2)));
            const unsigned pattern = ((w_lo & 3) == 0 ? 1u : 0u) |
                                     ((w_lo >> 2) == 0 ? 2u : 0u) |
                                     ((w_hi & 3) == 0 ? 4u : 0u) |
                                     ((w_hi >> 2) == 0 ? 8u : 0u);
            local[pattern] += wa * wb;
          }
        }
      }
    }
#if defined(_OPENMP)
#pragma omp critical
#endif
    {
      for (unsigned p = 0; p < 16; ++p) global[p] += local[p];
    }
  }
  table.counts = global;
  return table;
}

}  // namespace floq::oracle
