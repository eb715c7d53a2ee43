#pragma once

#include <string>
#include <string_view>

#include "floq/ergodicity.hpp"
#include "floq/symplectic.hpp"

namespace floq {

// Writes content to path; "-" means stdout.
void write_artifact(const std::string& path, std::string_view content);

// CSV per RFC 4180 (CRLF rows): outcome_hex,count,frequency.
std::string histogram_csv(const EmpiricalDistribution& dist);

// CSV rows (rank,count,frequency,paper_bound,pass); the bound and pass
// columns refer to the tail event rank <= row rank.
std::string rank_histogram_csv(const RankHistogram& hist);

std::string key_hex(Key128 k, unsigned bits);

}  // namespace floq
