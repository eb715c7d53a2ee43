#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "floq/chain.hpp"
#include "floq/mc.hpp"

namespace floq {

struct RunConfig {
  std::string subcommand;
  std::size_t L = 2;
  std::size_t N = 1;
  HalfTime t{0};
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned streams = 8;
  std::string out = "-";
  std::string format = "json";  // json | csv | svg | pgm
  std::string initial = "local:0";
  bool assert_mode = false;

  McConfig mc() const {
    return McConfig{seed, streams, samples, true};
  }
};

// "full", "local:x", or a Pauli string like "XI IZ".
PhaseVector parse_initial(const ChainGeometry& geo, const std::string& spec);

// Window list "0,1,5".
std::vector<std::size_t> parse_site_list(const std::string& spec);

}  // namespace floq
