#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "floq/oracle.hpp"
#include "floq/symplectic.hpp"

using namespace floq;

TEST_CASE("sampled matrices are symplectic for several sizes") {
  Rng rng(101);
  for (std::size_t n : {1, 2, 3, 5, 12}) {
    const SymplecticForm form(n);
    for (int i = 0; i < 10; ++i) {
      const SymplecticMatrix s = sample_uniform(n, rng);
      CHECK(is_symplectic(s.matrix(), form));
    }
  }
}

TEST_CASE("fixed seed reproduces the sample") {
  Rng a(42), b(42);
  CHECK(sample_uniform(3, a) == sample_uniform(3, b));
}

TEST_CASE("accepted symplectics are invertible with symplectic inverses") {
  Rng rng(103);
  const SymplecticForm form(4);
  for (int i = 0; i < 50; ++i) {
    const SymplecticMatrix s = sample_uniform(4, rng);
    const SymplecticMatrix inv = s.inverse();
    CHECK(is_symplectic(inv.matrix(), form));
    CHECK((s * inv).matrix() == BitMatrix::identity(8));
  }
}

TEST_CASE("the form is preserved: <Su, Sv> = <u, v>") {
  Rng rng(107);
  const SymplecticForm form(5);
  for (int round = 0; round < 10; ++round) {
    const SymplecticMatrix s = sample_uniform(5, rng);
    for (int i = 0; i < 10; ++i) {
      const BitVector u = BitVector::random(10, rng);
      const BitVector v = BitVector::random(10, rng);
      CHECK(form.form(s.matrix().apply(u), s.matrix().apply(v)) ==
            form.form(u, v));
    }
  }
}

TEST_CASE("group orders match brute-force enumeration") {
  CHECK(group_order(1) == 6);
  CHECK(group_order(2) == 720);
  CHECK(group_order(3) == 1451520);
  CHECK(group_order(1) == oracle::sp_order_bruteforce(1));
  CHECK(group_order(2) == oracle::sp_order_bruteforce(2));
}

TEST_CASE("group order sits in the stated window for n = 1..8") {
  for (std::size_t n = 1; n <= 8; ++n) CHECK(group_order_in_bound_window(n));
}

TEST_CASE("subspace counts") {
  for (std::size_t n = 1; n <= 6; ++n) CHECK(count_subspaces(n, 0) == 1);
  CHECK(count_subspaces(2, 1) == 3);
  CHECK(count_subspaces(4, 2) == 35);
  CHECK_THROWS_AS(count_subspaces(3, 4), std::invalid_argument);
}

TEST_CASE("subspace count sandwich bound") {
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      const long double exact =
          count_subspaces(n, k).convert_to<long double>();
      const long double base =
          std::pow(2.0L, static_cast<long double>((n - k) * k));
      const long double lower =
          base * std::pow(1.0L - std::pow(2.0L, static_cast<long double>(k) -
                                                    static_cast<long double>(n)),
                          static_cast<long double>(k));
      const long double upper =
          base * std::min(std::pow(2.0L, static_cast<long double>(k)), 4.0L);
      CHECK(exact >= lower - 1e-9L);
      CHECK(exact <= upper + 1e-9L);
    }
  }
}

TEST_CASE("uniform output at n = 1: each nonzero image is hit twice") {
  for (std::uint8_t u = 1; u <= 3; ++u) {
    const auto counts = oracle::sp2_output_counts(u);
    CHECK(counts[0] == 2);
    CHECK(counts[1] == 2);
    CHECK(counts[2] == 2);
  }
}

TEST_CASE("n = 1 sampler is uniform over the 6 elements") {
  // 60000 samples, each element expected 10000 times, 4 sigma tolerance.
  Rng rng(42);
  std::map<std::string, int> counts;
  const int samples = 60000;
  for (int i = 0; i < samples; ++i)
    ++counts[sample_uniform(1, rng).matrix().to_text()];
  CHECK(counts.size() == 6);
  const double expect = samples / 6.0;
  const double sigma = std::sqrt(samples * (1.0 / 6.0) * (5.0 / 6.0));
  for (const auto& [key, c] : counts)
    CHECK(std::fabs(c - expect) <= 4.0 * sigma);
}

TEST_CASE("n = 2 sampler hits all 720 elements with flat frequencies") {
  Rng rng(4242);
  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  const std::uint64_t samples = 1000000;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const SymplecticMatrix s = sample_uniform(2, rng);
    std::uint64_t key = 0;
    for (std::size_t r = 0; r < 4; ++r)
      key = key << 4 | s.matrix().row_words(r)[0];
    ++counts[key];
  }
  REQUIRE(counts.size() == 720);
  std::uint32_t mn = UINT32_MAX, mx = 0;
  for (const auto& [k, c] : counts) {
    mn = std::min(mn, c);
    mx = std::max(mx, c);
  }
  CHECK(static_cast<double>(mx) / static_cast<double>(mn) < 1.3);
}

TEST_CASE("blocks round trip and block-swap conjugates stay symplectic") {
  Rng rng(109);
  const SymplecticForm form(2);
  for (int i = 0; i < 30; ++i) {
    const SymplecticMatrix s = sample_uniform(2, rng);
    const BlockView v = blocks(s);
    CHECK(assemble_blocks(v) == s.matrix());
    // (B A; D C), (C D; A B), (D C; B A)
    CHECK(is_symplectic(assemble_blocks({v.b, v.a, v.d, v.c}), form));
    CHECK(is_symplectic(assemble_blocks({v.c, v.d, v.a, v.b}), form));
    CHECK(is_symplectic(assemble_blocks({v.d, v.c, v.b, v.a}), form));
  }
}

TEST_CASE("identity blocks are (I, 0, 0, I)") {
  const BlockView v = blocks(SymplecticMatrix::identity(2));
  CHECK(v.a == BitMatrix::identity(2));
  CHECK(v.b.is_zero());
  CHECK(v.c.is_zero());
  CHECK(v.d == BitMatrix::identity(2));
}

TEST_CASE("odd split is rejected") {
  CHECK_THROWS_AS(blocks(SymplecticMatrix::identity(1)),
                  std::invalid_argument);
}

TEST_CASE("B = 0 iff C = 0 and A = 0 iff D = 0 on samples") {
  Rng rng(113);
  for (int i = 0; i < 4000; ++i) {
    const BlockView v = blocks(sample_uniform(2, rng));
    CHECK(v.b.is_zero() == v.c.is_zero());
    CHECK(v.a.is_zero() == v.d.is_zero());
  }
}

TEST_CASE("exact C-block rank distribution at n = 1") {
  // Tail events over the full 720-element enumeration.
  CHECK(oracle::c_rank_tail_count(0) == 36);  // C = 0, i.e. rank <= 2n-k, k=2
  CHECK(oracle::c_rank_tail_count(2) == 720);
  const double p0 = 36.0 / 720.0;
  CHECK(p0 == doctest::Approx(0.05));
  CHECK(p0 <= single_rank_tail_bound(1, 2));
  CHECK(static_cast<double>(oracle::c_rank_tail_count(1)) / 720.0 <=
        single_rank_tail_bound(1, 1));
}

TEST_CASE("sampled block rank tails respect the decay bound") {
  for (std::size_t n : {2, 3}) {
    McConfig cfg{.seed = 915 + n, .streams = 8, .samples = 40000};
    const RankHistogram h = block_rank_histogram(n, Block::C, cfg);
    for (std::size_t k = 0; k <= 2 * n; ++k) {
      const double bound = single_rank_tail_bound(n, k);
      if (bound >= 1.0) continue;  // vacuous
      const double freq = h.tail_frequency(2 * n - k);
      CHECK(freq <= bound + 4.0 * binomial_sigma(bound, cfg.samples));
    }
    // k = 0: rank <= 2n always.
    CHECK(h.tail_frequency(2 * n) == 1.0);
  }
}

TEST_CASE("all four blocks have the same rank law within tolerance") {
  McConfig cfg{.seed = 77, .streams = 8, .samples = 20000};
  const RankHistogram hc = block_rank_histogram(2, Block::C, cfg);
  McConfig cfg_b = cfg;
  cfg_b.seed = 78;
  const RankHistogram hb = block_rank_histogram(2, Block::B, cfg_b);
  for (std::size_t rank = 0; rank <= 4; ++rank) {
    const double fc = hc.tail_frequency(rank);
    const double fb = hb.tail_frequency(rank);
    CHECK(std::fabs(fc - fb) <=
          4.0 * std::sqrt(2.0) * binomial_sigma(std::max(fc, fb) + 1e-3,
                                                cfg.samples));
  }
}

TEST_CASE("product rank at r = 1 matches the single-block histogram") {
  McConfig cfg{.seed = 55, .streams = 4, .samples = 40000};
  const ProductRankResult pr = product_rank_experiment(2, 1, Block::C, cfg);
  McConfig cfg_h = cfg;
  cfg_h.seed = 56;
  const RankHistogram h = block_rank_histogram(2, Block::C, cfg_h);
  for (std::size_t rank = 0; rank <= 4; ++rank) {
    const double a = pr.tail_frequency(rank);
    const double b = h.tail_frequency(rank);
    CHECK(std::fabs(a - b) <=
          4.0 * std::sqrt(2.0) *
              binomial_sigma(std::max({a, b, 1e-3}), cfg.samples));
  }
}

TEST_CASE("exact rank(C2 C1) distribution at n = 1 matched by sampling") {
  // Enumerate the 720^2 pairs once.
  std::array<std::uint64_t, 3> exact{};  // rank 0, 1, 2
  const auto& sp = oracle::sp4_elements();
  for (const auto& s1 : sp) {
    for (const auto& s2 : sp) {
      const oracle::Mat2 prod =
          oracle::mul2(oracle::blocks4(s2).c, oracle::blocks4(s1).c);
      const oracle::Mat2 r0 = prod & 3, r1 = (prod >> 2) & 3;
      std::size_t rank = 0;
      if (prod != 0) rank = (r0 != 0 && r1 != 0 && r0 != r1) ? 2 : 1;
      ++exact[rank];
    }
  }
  const double total = 720.0 * 720.0;
  McConfig cfg{.seed = 56, .streams = 8, .samples = 200000};
  const ProductRankResult pr = product_rank_experiment(1, 2, Block::C, cfg);
  for (std::size_t rank = 0; rank < 3; ++rank) {
    const double p = exact[rank] / total;
    const auto it = pr.counts.find(rank);
    const double f = it == pr.counts.end()
                         ? 0.0
                         : static_cast<double>(it->second) /
                               static_cast<double>(cfg.samples);
    CHECK(std::fabs(f - p) <= 4.0 * binomial_sigma(p, cfg.samples));
  }
}

TEST_CASE("kernel-hit frequency respects 8 r 2^{-n}") {
  for (std::size_t n : {4, 6}) {
    for (std::size_t r : {2, 4}) {
      McConfig cfg{.seed = 1000 + 10 * n + r, .streams = 8, .samples = 4000};
      const ProductRankResult pr =
          product_rank_experiment(n, r, Block::C, cfg);
      const double bound = kernel_hit_bound(n, r);
      if (bound >= 1.0) continue;
      CHECK(pr.kernel_hit_frequency() <=
            bound + 4.0 * binomial_sigma(bound, cfg.samples));
    }
  }
}

TEST_CASE("product rank tails respect the product bound") {
  McConfig cfg{.seed = 58, .streams = 8, .samples = 30000};
  const ProductRankResult pr = product_rank_experiment(2, 3, Block::C, cfg);
  for (std::size_t k = 1; k <= 4; ++k) {
    const double bound = product_rank_tail_bound(2, 3, k);
    if (bound >= 1.0) continue;
    CHECK(pr.tail_frequency(4 - k) <=
          bound + 4.0 * binomial_sigma(bound, cfg.samples));
  }
}
