#include "floq/cli_config.hpp"

#include <charconv>
#include <stdexcept>

namespace floq {

PhaseVector parse_initial(const ChainGeometry& geo, const std::string& spec) {
  if (spec == "full") return full_support_seed(geo);
  if (spec.starts_with("local:")) {
    std::size_t x0 = 0;
    const std::string_view arg(spec.data() + 6, spec.size() - 6);
    const auto res = std::from_chars(arg.data(), arg.data() + arg.size(), x0);
    if (res.ec != std::errc{} || res.ptr != arg.data() + arg.size())
      throw std::invalid_argument("initial: bad site in '" + spec + "'");
    return local_seed(geo, x0);
  }
  return parse_pauli_string(geo, spec);
}

std::vector<std::size_t> parse_site_list(const std::string& spec) {
  std::vector<std::size_t> sites;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t next = spec.find(',', pos);
    if (next == std::string::npos) next = spec.size();
    std::size_t site = 0;
    const auto res =
        std::from_chars(spec.data() + pos, spec.data() + next, site);
    if (res.ec != std::errc{} || res.ptr != spec.data() + next)
      throw std::invalid_argument("bad site list '" + spec + "'");
    sites.push_back(site);
    pos = next + 1;
  }
  if (sites.empty()) throw std::invalid_argument("empty site list");
  return sites;
}

}  // namespace floq
