#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "floq/walls.hpp"

using namespace floq;

TEST_CASE("the N=1 example pair is a right wall") {
  const auto [s0, s1] = example_wall_pair_n1();
  CHECK(is_right_wall_n1(s0, s1));
  CHECK(is_right_wall(s0, s1, 1));
  // The mirrored pair, re-tested, is a left wall.
  BitMatrix m(4, 4);
  m.paste(0, 2, BitMatrix::identity(2));
  m.paste(2, 0, BitMatrix::identity(2));
  const SymplecticMatrix g0(m * s1.matrix() * m);
  const SymplecticMatrix g1(m * s0.matrix() * m);
  CHECK(is_left_wall(g0, g1, 1));
}

TEST_CASE("product-form gates are walls trivially") {
  Rng rng(7);
  const SymplecticMatrix half = sample_uniform(1, rng);
  BitMatrix direct(4, 4);
  direct.paste(0, 0, half.matrix());
  direct.paste(2, 2, sample_uniform(1, rng).matrix());
  const SymplecticMatrix product(direct);
  CHECK(is_product_form(product));
  const SymplecticMatrix other = sample_uniform(2, rng);
  CHECK(is_right_wall(product, other, 1));
  CHECK(is_left_wall(other, product, 1));
}

TEST_CASE("random non-wall pairs fail the first condition") {
  Rng rng(11);
  int nonwalls = 0;
  for (int i = 0; i < 200; ++i) {
    const SymplecticMatrix s0 = sample_uniform(2, rng);
    const SymplecticMatrix s1 = sample_uniform(2, rng);
    const BlockView b0 = blocks(s0);
    const BlockView b1 = blocks(s1);
    if ((b1.c * b0.c).is_zero()) continue;
    ++nonwalls;
    CHECK(!is_right_wall_n1(s0, s1));
    CHECK(!is_right_wall(s0, s1, 1));
  }
  CHECK(nonwalls > 100);
}

TEST_CASE("is_right_wall_n1 rejects wrong sizes") {
  Rng rng(13);
  const SymplecticMatrix big = sample_uniform(4, rng);
  CHECK_THROWS_AS(is_right_wall_n1(big, big), std::invalid_argument);
  CHECK_THROWS_AS(is_right_wall(big, sample_uniform(2, rng), 1),
                  std::invalid_argument);
}

TEST_CASE("counterexample fixture satisfies all printed identities") {
  const auto [s0, s1] = counterexample_fixture();
  const SymplecticForm form(4);
  CHECK(is_symplectic(s0.matrix(), form));
  CHECK(is_symplectic(s1.matrix(), form));
  const BlockView b0 = blocks(s0);
  const BlockView b1 = blocks(s1);
  CHECK((b1.c * b0.c).is_zero());
  CHECK((b1.c * b0.d * b1.a * b0.c).is_zero());
  const BitMatrix da = b0.d * b1.a;
  CHECK(!(b1.c * da * da * b0.c).is_zero());
  CHECK(da * da == SymplecticForm(2).matrix());    // (D0 A1)^2 = J_4
  CHECK(da.pow(4) == BitMatrix::identity(4));      // (D0 A1)^4 = 1
  for (std::uint64_t k : {1, 2})                   // (D0 A1)^{4k+2} = (D0 A1)^2
    CHECK(da.pow(4 * k + 2) == da.pow(2));
  // C0 is the projection onto e1.
  BitMatrix proj_e1(4, 4);
  proj_e1.set(0, 0, true);
  CHECK(b0.c == proj_e1);
  // The two-condition test is fooled, the full k range is not.
  CHECK(!is_right_wall(s0, s1, 2));
}

TEST_CASE("wall probability: exact N=1 rational rounds to 0.12") {
  const oracle::Rational exact = exact_wall_probability_n1();
  CHECK(round_two_decimals(exact) == 12);
  McConfig cfg{.seed = 17, .streams = 8, .samples = 200000};
  const WallProbabilityReport rep = wall_probability(1, cfg);
  CHECK(std::fabs(rep.frequency - static_cast<double>(exact.value())) <=
        4.0 * binomial_sigma(static_cast<double>(exact.value()),
                             cfg.samples));
}

TEST_CASE("wall probability at N=2 sits under the bound") {
  McConfig cfg{.seed = 19, .streams = 8, .samples = 100000};
  const WallProbabilityReport rep = wall_probability(2, cfg);
  CHECK(rep.bound == doctest::Approx(0.5));
  CHECK(rep.pass);
  CHECK(rep.frequency < 0.1);  // empirically near the bound's scale, below it
}

TEST_CASE("product-form probability formula at n=1 and n=2") {
  // Exact at n=1: 36/720 from enumeration = |S_1|^2 / |S_2|.
  CHECK(oracle::product_form_count() == 36);
  const double p1 = 36.0 / 720.0;
  CHECK(p1 == doctest::Approx(0.05));
  // Result bounds: 1/2 2^{-4N^2} <= p <= 2^{-4N^2} at N = 1.
  CHECK(p1 >= 0.5 * std::pow(2.0, -4.0));
  CHECK(p1 <= std::pow(2.0, -4.0));
  // Monte Carlo at n=2 against |S_2|^2/|S_4|.
  const double p2 =
      (group_order(2) * group_order(2)).convert_to<double>() /
      group_order(4).convert_to<double>();
  Rng rng(23);
  const std::uint64_t samples = 2000000;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i)
    if (is_product_form(sample_uniform(4, rng))) ++hits;
  const double f = static_cast<double>(hits) / static_cast<double>(samples);
  CHECK(std::fabs(f - p2) <= 4.0 * binomial_sigma(p2, samples) + 1e-9);
}

TEST_CASE("scan_chain flags planted walls") {
  Rng rng(29);
  const ChainGeometry geo(8, 1);
  const auto [w0, w1] = example_wall_pair_n1();
  std::vector<SymplecticMatrix> gates;
  for (std::size_t x = 0; x < geo.L; ++x)
    gates.push_back(sample_uniform(2, rng));
  gates[0] = w0;
  gates[1] = w1;
  const DisorderRealization r(geo, std::move(gates));
  const auto walls = scan_chain(r);
  bool found = false;
  for (const auto& w : walls)
    if (w.position == 0 && w.side == WallReport::Side::Right) found = true;
  CHECK(found);
}

TEST_CASE("all-product-form gates give trivial walls everywhere") {
  Rng rng(31);
  const ChainGeometry geo(6, 1);
  std::vector<SymplecticMatrix> gates;
  for (std::size_t x = 0; x < geo.L; ++x) {
    BitMatrix m(4, 4);
    m.paste(0, 0, sample_uniform(1, rng).matrix());
    m.paste(2, 2, sample_uniform(1, rng).matrix());
    gates.emplace_back(std::move(m));
  }
  const DisorderRealization r(geo, std::move(gates));
  const auto walls = scan_chain(r);
  CHECK(walls.size() == geo.L);  // L/2 pairs, each a two-sided trivial wall
  for (const auto& w : walls) CHECK(w.penetration == 0);
}

TEST_CASE("confinement holds behind a planted right wall") {
  Rng rng(37);
  const ChainGeometry geo(8, 1);
  const auto [w0, w1] = example_wall_pair_n1();
  std::vector<SymplecticMatrix> gates;
  for (std::size_t x = 0; x < geo.L; ++x)
    gates.push_back(sample_uniform(2, rng));
  gates[2] = w0;
  gates[3] = w1;
  const DisorderRealization r(geo, std::move(gates));
  WallReport wall;
  wall.position = 2;
  wall.side = WallReport::Side::Right;
  wall.penetration = 1;
  const ConfinementResult res =
      confinement_test(r, wall, 6 * geo.L, 50, rng);
  CHECK(res.pass);
}

TEST_CASE("the fixture pair fails confinement quickly") {
  const auto [s0, s1] = counterexample_fixture();
  const ChainGeometry geo(4, 2);
  std::vector<SymplecticMatrix> gates{
      s0, s1, SymplecticMatrix::identity(4), SymplecticMatrix::identity(4)};
  const DisorderRealization r(geo, std::move(gates));
  WallReport fake;
  fake.position = 0;
  fake.side = WallReport::Side::Right;
  fake.penetration = 1;
  Rng rng(41);
  const ConfinementResult res = confinement_test(r, fake, 24, 100, rng);
  CHECK(!res.pass);
  REQUIRE(res.violated_at_t2.has_value());
  CHECK(*res.violated_at_t2 <= 6);  // crossing behind the two conditions
}

TEST_CASE("wall detection implies confinement on random N=1 pairs") {
  Rng rng(43);
  const ChainGeometry geo(6, 1);
  int walls_found = 0;
  int nonwall_crossings = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const SymplecticMatrix s0 = sample_uniform(2, rng);
    const SymplecticMatrix s1 = sample_uniform(2, rng);
    // Isolate the pair on a ring cut by identity (product form) gates.
    std::vector<SymplecticMatrix> gates{
        s0, s1, SymplecticMatrix::identity(2), SymplecticMatrix::identity(2),
        SymplecticMatrix::identity(2), SymplecticMatrix::identity(2)};
    const DisorderRealization r(geo, std::move(gates));
    WallReport wall;
    wall.position = 0;
    wall.side = WallReport::Side::Right;
    wall.penetration = is_product_form(s0) ? 0 : 1;
    const ConfinementResult res = confinement_test(r, wall, 36, 20, rng);
    if (is_right_wall(s0, s1, 1)) {
      ++walls_found;
      CHECK(res.pass);  // every detected wall confines
    } else if (!res.pass) {
      ++nonwall_crossings;  // crossings only happen without a wall
    }
  }
  CHECK(walls_found > 10);
  CHECK(nonwall_crossings > 100);
}

TEST_CASE("left walls confine to the right of the pair") {
  Rng rng(47);
  const ChainGeometry geo(8, 1);
  int tested = 0;
  while (tested < 5) {
    const SymplecticMatrix s0 = sample_uniform(2, rng);
    const SymplecticMatrix s1 = sample_uniform(2, rng);
    if (!is_left_wall(s0, s1, 1)) continue;
    ++tested;
    std::vector<SymplecticMatrix> gates;
    for (std::size_t x = 0; x < geo.L; ++x)
      gates.push_back(SymplecticMatrix::identity(2));
    gates[0] = s0;
    gates[1] = s1;
    const DisorderRealization r(geo, gates);
    WallReport wall;
    wall.position = 0;
    wall.side = WallReport::Side::Left;
    wall.penetration = is_product_form(s1) ? 0 : 1;
    const ConfinementResult res = confinement_test(r, wall, 48, 20, rng);
    CHECK(res.pass);
  }
}

TEST_CASE("lightcone grid basics") {
  const ChainGeometry geo(6, 1);
  const DisorderRealization r = DisorderRealization::all_identity(geo);
  const PhaseVector u0 = local_seed(geo, 3);
  const LightconeGrid grid = lightcone_grid(r, u0, 8);
  REQUIRE(grid.rows.size() == 9);
  for (const auto& row : grid.rows) {
    // single constant column
    for (std::size_t q = 0; q < geo.N * geo.L; ++q)
      CHECK((row[q] != 0) == (q == 3));
  }
  CHECK(grid.extents[0].leftmost == 3);
  CHECK(grid.extents[8].rightmost == 3);
  const std::string svg = lightcone_svg(grid, {});
  CHECK(svg.find("<svg") != std::string::npos);
  const std::string pgm = lightcone_pgm(grid);
  CHECK(pgm.substr(0, 2) == "P2");
  const std::string csv = extents_csv(grid);
  CHECK(csv.find("t2,leftmost,rightmost") == 0);
}

TEST_CASE("pre-wall growth is at most one site per half step") {
  Rng rng(53);
  const ChainGeometry geo(12, 1);
  const DisorderRealization r = build_disorder(geo, rng);
  const LightconeGrid grid = lightcone_grid(r, local_seed(geo, 6), 6);
  for (std::size_t t2 = 1; t2 < grid.extents.size(); ++t2) {
    if (grid.extents[t2].wrapped) break;
    CHECK(grid.extents[t2].rightmost - grid.extents[t2 - 1].rightmost <= 1);
    CHECK(grid.extents[t2 - 1].leftmost - grid.extents[t2].leftmost <= 1);
  }
}

TEST_CASE("left/right wall frequencies agree exactly under enumeration") {
  const oracle::WallCounts wc = oracle::exact_wall_counts();
  CHECK(wc.left_walls == wc.right_walls);
}

TEST_CASE("walls are vanishingly rare at N = 4") {
  // Bound 4N 2^{-2N(N-1)} = 16 2^{-24} per pair; over 10^4 realizations of
  // L = 16 (8 pairs, 2 sides each) the expected count is about 0.3.
  Rng rng(59);
  const ChainGeometry geo(16, 4);
  std::uint64_t walls_seen = 0;
  const int realizations = 10000;
  for (int i = 0; i < realizations; ++i)
    walls_seen += scan_chain(build_disorder(geo, rng)).size();
  const double pairs_scanned = 2.0 * 8.0 * realizations;
  const double bound = 4.0 * 4.0 * std::pow(2.0, -24.0);
  const double sigma = std::sqrt(pairs_scanned * bound);
  CHECK(static_cast<double>(walls_seen) <= pairs_scanned * bound + 4.0 * sigma);
}
