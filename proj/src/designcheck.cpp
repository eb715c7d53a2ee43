#include "floq/designcheck.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "floq/oracle.hpp"
#include "floq/version.hpp"

namespace floq {

HaarReference haar_reference(const ChainGeometry& geo) {
  HaarReference ref;
  ref.support = (ExactCount(1) << geo.dim()) - 1;
  ref.gamma = 1.0L / ref.support.convert_to<long double>();
  return ref;
}

std::string DesignReport::to_json() const {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["version"] = kVersion;
  j["experiment"] = "design_check";
  j["L"] = L;
  j["N"] = N;
  j["t2"] = t2;
  j["exact"] = exact;
  j["samples"] = samples;
  j["seed"] = seed;
  j["streams"] = streams;
  j["per_input_l1"] = per_input_l1;
  j["worst_l1"] = worst_l1;
  j["p_guess"] = p_guess;
  j["p_guess_bound"] = p_guess_bound;
  j["l1_bound_appendix"] = l1_bound_appendix;
  j["p_bound_vacuous"] = p_bound_vacuous;
  j["l1_bound_vacuous"] = l1_bound_vacuous;
  j["pass"] = pass;
  return j.dump(2) + "\n";
}

std::vector<PhaseVector> default_design_inputs(const ChainGeometry& geo) {
  return {local_seed(geo, 0), full_support_seed(geo)};
}

double l1_from_pattern_counts(const ChainGeometry& geo,
                              const std::vector<std::uint64_t>& counts,
                              std::uint64_t total) {
  if (counts.size() != (std::size_t{1} << geo.L))
    throw std::invalid_argument("l1_from_pattern_counts: need 2^L patterns");
  const long double nonzero_site =
      std::ldexp(1.0L, static_cast<int>(geo.site_bits())) - 1.0L;
  const long double gamma =
      1.0L / (std::ldexp(1.0L, static_cast<int>(geo.dim())) - 1.0L);
  long double l1 = 0.0L;
  const std::uint64_t all_zero = (std::uint64_t{1} << geo.L) - 1;
  for (std::uint64_t z = 0; z < counts.size(); ++z) {
    if (z == all_zero) continue;  // u' = 0 excluded; its mass is zero anyway
    const unsigned zero_sites = static_cast<unsigned>(std::popcount(z));
    const long double class_size =
        std::pow(nonzero_site,
                 static_cast<long double>(geo.L - zero_sites));
    const long double p = static_cast<long double>(counts[z]) /
                          static_cast<long double>(total);
    l1 += std::fabs(p - gamma * class_size);
  }
  return static_cast<double>(l1);
}

namespace {

double exact_l1_l2n1(const PhaseVector& u0, HalfTime t) {
  std::uint8_t seed = 0;
  for (unsigned b = 0; b < 4; ++b)
    if (u0.bits().get(b)) seed |= static_cast<std::uint8_t>(1u << b);
  const oracle::TransitionTable table =
      oracle::exact_transitions(seed, static_cast<unsigned>(t.t2));
  return static_cast<double>(
      oracle::exact_l1_to_uniform(table.at_t2(static_cast<unsigned>(t.t2)),
                                  table.total)
          .value());
}

}  // namespace

DesignReport advantage_estimate(const ChainGeometry& geo, HalfTime t,
                                const std::vector<PhaseVector>& inputs,
                                bool exact, const McConfig& cfg) {
  if (t.is_integer())
    throw std::invalid_argument("advantage_estimate: integer t rejected");
  const std::uint64_t tscr = scrambling_time(geo.L).t2;
  if (t.t2 < tscr || t.t2 > 2 * tscr)
    throw std::invalid_argument(
        "advantage_estimate: t must lie in [t_scr, 2 t_scr]");
  if (inputs.empty())
    throw std::invalid_argument("advantage_estimate: empty input list");
  for (const PhaseVector& u0 : inputs)
    if (u0.is_zero() || u0.geometry() != geo)
      throw std::invalid_argument("advantage_estimate: bad input vector");
  if (exact && (geo.L != 2 || geo.N != 1))
    throw std::invalid_argument(
        "advantage_estimate: exact enumeration only at L = 2, N = 1");
  if (!exact && geo.L > 63)
    throw std::invalid_argument("advantage_estimate: pattern space too wide");

  DesignReport rep;
  rep.L = geo.L;
  rep.N = geo.N;
  rep.t2 = t.t2;
  rep.exact = exact;
  rep.samples = exact ? 0 : cfg.samples;
  rep.seed = cfg.seed;
  rep.streams = cfg.streams;

  for (const PhaseVector& u0 : inputs) {
    double l1 = 0.0;
    if (exact) {
      l1 = exact_l1_l2n1(u0, t);
    } else {
      using Acc = std::vector<std::uint64_t>;
      const auto merge = [](Acc& a, const Acc& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
      };
      Acc counts =
          2 * geo.site_bits() <= 64 && geo.dim() <= 128
              ? mc_run_stateful(
                    cfg, Acc(std::size_t{1} << geo.L, 0),
                    [&] { return FastChain(geo); },
                    [&](FastChain& fc, Rng& rng, Acc& acc) {
                      fc.resample(rng);
                      ++acc[fc.zero_pattern(
                          fc.evolve(fc.state_of(u0), t.t2))];
                    },
                    merge)
              : mc_run(
                    cfg, Acc(std::size_t{1} << geo.L, 0),
                    [&](Rng& rng, Acc& acc) {
                      const DisorderRealization r = build_disorder(geo, rng);
                      const PhaseVector ut = evolve(r, u0, t);
                      std::uint64_t z = 0;
                      for (std::size_t x = 0; x < geo.L; ++x)
                        if (ut.site_is_zero(x)) z |= std::uint64_t{1} << x;
                      ++acc[z];
                    },
                    merge);
      l1 = l1_from_pattern_counts(geo, counts, cfg.samples);
    }
    rep.per_input_l1.push_back(l1);
    rep.worst_l1 = std::max(rep.worst_l1, l1);
  }

  rep.p_guess = 0.5 + rep.worst_l1 / 4.0;
  rep.p_guess_bound =
      0.5 + 8.0 * t.t() * static_cast<double>(geo.L) *
                std::pow(2.0, -static_cast<double>(geo.N));
  rep.l1_bound_appendix = 33.0 * t.t() * static_cast<double>(geo.L) *
                          std::pow(2.0, -static_cast<double>(geo.N));
  rep.p_bound_vacuous = rep.p_guess_bound >= 1.0;
  rep.l1_bound_vacuous = rep.l1_bound_appendix >= 2.0;
  rep.pass = rep.p_bound_vacuous || rep.p_guess <= rep.p_guess_bound;
  return rep;
}

}  // namespace floq
