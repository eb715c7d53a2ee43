#include "floq/report.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

namespace floq {

void write_artifact(const std::string& path, std::string_view content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
}

std::string key_hex(Key128 k, unsigned bits) {
  const unsigned nibbles = std::max(1u, (bits + 3) / 4);
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < nibbles; ++i) {
    const unsigned shift = 4 * i;
    const unsigned nib =
        shift < 64 ? ((k.lo >> shift) & 0xF)
                   : static_cast<unsigned>((k.hi >> (shift - 64)) & 0xF);
    out += kDigits[nib];
  }
  // Little-endian nibble order flipped for conventional reading.
  std::reverse(out.begin(), out.end());
  return out;
}

std::string histogram_csv(const EmpiricalDistribution& dist) {
  std::map<Key128, std::uint64_t> ordered(dist.counts.begin(),
                                          dist.counts.end());
  std::string out = "outcome_hex,count,frequency\r\n";
  for (const auto& [k, c] : ordered) {
    out += key_hex(k, dist.outcome_bits) + "," + std::to_string(c) + "," +
           std::to_string(static_cast<double>(c) /
                          static_cast<double>(dist.total)) +
           "\r\n";
  }
  return out;
}

std::string rank_histogram_csv(const RankHistogram& hist) {
  std::string out = "rank,count,frequency,paper_bound,pass\r\n";
  for (const auto& [rank, count] : hist.counts) {
    const std::size_t k = 2 * hist.n >= rank ? 2 * hist.n - rank : 0;
    const double bound = single_rank_tail_bound(hist.n, k);
    const double tail = hist.tail_frequency(rank);
    const double sigma =
        binomial_sigma(std::min(bound, 1.0), hist.samples);
    const bool pass = bound >= 1.0 || tail <= bound + 4.0 * sigma;
    out += std::to_string(rank) + "," + std::to_string(count) + "," +
           std::to_string(static_cast<double>(count) /
                          static_cast<double>(hist.samples)) +
           "," + std::to_string(bound) + "," + (pass ? "true" : "false") +
           "\r\n";
  }
  return out;
}

}  // namespace floq
