#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floq/oracle.hpp"

using namespace floq;
using namespace floq::oracle;

TEST_CASE("brute-force enumeration sizes") {
  CHECK(sp_order_bruteforce(1) == 6);
  CHECK(sp4_elements().size() == 720);
}

TEST_CASE("every enumerated element is symplectic as a BitMatrix") {
  const SymplecticForm form(2);
  for (const Mat4& m : sp4_elements())
    CHECK(is_symplectic(m.to_bitmatrix(), form));
}

TEST_CASE("Mat4 arithmetic agrees with BitMatrix") {
  const auto& sp = sp4_elements();
  const Mat4 a = sp[17], b = sp[300];
  CHECK(a.mul(b).to_bitmatrix() == a.to_bitmatrix() * b.to_bitmatrix());
}

TEST_CASE("exact transitions: mass conservation and invertibility") {
  const TransitionTable t = exact_transitions(1, 6);
  for (unsigned t2 = 1; t2 <= 6; ++t2) {
    std::uint64_t sum = 0;
    for (unsigned v = 0; v < 16; ++v) sum += t.at_t2(t2)[v];
    CHECK(sum == t.total);
    CHECK(t.at_t2(t2)[0] == 0);  // u0 != 0 cannot reach 0
  }
}

TEST_CASE("t2 = 1 transition is exactly uniform over 15 outcomes") {
  const TransitionTable t = exact_transitions(1, 1);
  for (unsigned v = 1; v < 16; ++v)
    CHECK(t.at_t2(1)[v] * 15 == t.total);
  const Rational l1 = exact_l1_to_uniform(t.at_t2(1), t.total);
  CHECK(l1.num == 0);
}

TEST_CASE("conditional uniformity at half-integer t >= t_scr") {
  // L = 2: t_scr = 1, so t2 in {3, 5} are the half-integer times.
  for (std::uint8_t u0 : {1, 2, 3, 5, 15}) {
    const TransitionTable t = exact_transitions(u0, 5);
    for (unsigned t2 : {3u, 5u}) {
      const auto& counts = t.at_t2(t2);
      std::uint64_t both_nonzero = 0;
      for (unsigned v = 1; v < 16; ++v)
        if ((v & 3) != 0 && (v >> 2) != 0) both_nonzero += counts[v];
      for (unsigned v = 1; v < 16; ++v) {
        if ((v & 3) != 0 && (v >> 2) != 0)
          CHECK(counts[v] * 9 == both_nonzero);  // exactly 1/9 conditional
      }
    }
  }
}

TEST_CASE("zero-pattern marginals add up") {
  const TransitionTable t = exact_transitions(1, 3);
  const auto patterns = zero_pattern_counts_l2(t.at_t2(3));
  CHECK(patterns[0] + patterns[1] + patterns[2] + patterns[3] == t.total);
  CHECK(patterns[3] == 0);  // both sites zero is the zero vector
}

TEST_CASE("exact wall counts and the 0.12 probability") {
  const WallCounts wc = exact_wall_counts();
  CHECK(wc.pairs == 720ull * 720ull);
  CHECK(wc.mismatches == 0);              // two conditions <=> full k range
  CHECK(wc.left_walls == wc.right_walls); // mirror symmetry, exactly
  // Rounds to 0.12 at two decimals.
  const std::uint64_t c = wc.right_walls;
  CHECK((200 * c + wc.pairs) / (2 * wc.pairs) == 12);
}

TEST_CASE("product form count is |S_1|^2 = 36") {
  CHECK(product_form_count() == 36);
}

TEST_CASE("L = 4 exact pattern table at t = 3/2") {
  const PatternTableL4 t = exact_pattern_l4_t3half(1, false);
  std::uint64_t sum = 0;
  for (unsigned z = 0; z < 16; ++z) sum += t.counts[z];
  CHECK(sum == t.total);
  CHECK(t.counts[15] == 0);  // all-sites-zero is the zero vector
}
