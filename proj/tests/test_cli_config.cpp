#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "floq/cli_config.hpp"
#include "floq/report.hpp"

using namespace floq;

TEST_CASE("the three time spellings agree") {
  CHECK(parse_time("3/2") == parse_time("1.5"));
  CHECK(parse_time("3/2") == parse_time("t2=3"));
  CHECK(parse_time("2") == parse_time("t2=4"));
  CHECK(parse_time("2") == parse_time("2.0"));
}

TEST_CASE("initial vector specs") {
  const ChainGeometry geo(4, 1);
  CHECK(parse_initial(geo, "full") == full_support_seed(geo));
  CHECK(parse_initial(geo, "local:2") == local_seed(geo, 2));
  CHECK(parse_initial(geo, "X I I I") == local_seed(geo, 0));
  CHECK_THROWS_AS(parse_initial(geo, "local:9"), std::invalid_argument);
  CHECK_THROWS_AS(parse_initial(geo, "bogus"), std::invalid_argument);
}

TEST_CASE("site lists") {
  CHECK(parse_site_list("0,1,5") == std::vector<std::size_t>{0, 1, 5});
  CHECK(parse_site_list("3") == std::vector<std::size_t>{3});
  CHECK_THROWS_AS(parse_site_list(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_site_list("1,x"), std::invalid_argument);
}

TEST_CASE("outcome hex keys") {
  BitVector v(12);
  v.set(0, true);
  v.set(9, true);
  CHECK(key_hex(key_of(v), 12) == "201");
  CHECK(key_hex(Key128{0, 0}, 4) == "0");
}

TEST_CASE("histogram CSV is RFC 4180 with CRLF rows") {
  EmpiricalDistribution d;
  d.total = 4;
  d.outcome_bits = 4;
  d.counts[Key128{1, 0}] = 3;
  d.counts[Key128{10, 0}] = 1;
  const std::string csv = histogram_csv(d);
  CHECK(csv.find("outcome_hex,count,frequency\r\n") == 0);
  CHECK(csv.find("1,3,0.750000\r\n") != std::string::npos);
  CHECK(csv.find("a,1,0.250000\r\n") != std::string::npos);
}

TEST_CASE("rank histogram CSV carries the tail bound per rank") {
  RankHistogram h;
  h.n = 1;
  h.samples = 720;
  h.counts[0] = 36;
  h.counts[1] = 324;
  h.counts[2] = 360;
  const std::string csv = rank_histogram_csv(h);
  CHECK(csv.find("rank,count,frequency,paper_bound,pass") == 0);
  // rank 0 row: tail event k = 2, bound min{4,4} 2^{-4} / (1-1/4)^2.
  CHECK(csv.find("0,36,0.050000,0.444444,true") != std::string::npos);
}
