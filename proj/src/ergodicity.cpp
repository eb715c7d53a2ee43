#include "floq/ergodicity.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "floq/version.hpp"

namespace floq {

double EmpiricalDistribution::frequency(Key128 k) const {
  const auto it = counts.find(k);
  if (it == counts.end() || total == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total);
}

long double UniformReference::support_size() const {
  return std::ldexp(1.0L, static_cast<int>(dim_bits)) -
         (include_zero ? 0.0L : 1.0L);
}

long double UniformReference::point_mass() const {
  return 1.0L / support_size();
}

bool UniformReference::contains(Key128 k) const {
  if (!include_zero && k.lo == 0 && k.hi == 0) return false;
  if (dim_bits >= 128) return true;
  if (dim_bits >= 64)
    return (k.hi >> (dim_bits - 64)) == 0;
  return k.hi == 0 && (dim_bits == 64 || (k.lo >> dim_bits) == 0);
}

long double l1_to_uniform(const EmpiricalDistribution& p,
                          const UniformReference& q) {
  if (p.total == 0) throw std::invalid_argument("l1_to_uniform: empty sample");
  const long double mass = q.point_mass();
  long double sum = 0.0L;
  for (const auto& [key, count] : p.counts) {
    if (!q.contains(key))
      throw CausalityViolation(
          "observed outcome outside the reference support");
    const long double f = static_cast<long double>(count) /
                          static_cast<long double>(p.total);
    sum += std::fabs(f - mass);
  }
  sum += (q.support_size() - static_cast<long double>(p.counts.size())) * mass;
  return sum;
}

EmpiricalDistribution compress_to_window(
    const EmpiricalDistribution& p, const ChainGeometry& geo,
    const std::vector<std::size_t>& sites) {
  const std::size_t sb = geo.site_bits();
  std::vector<bool> in_window(geo.L, false);
  for (std::size_t s : sites) in_window.at(s) = true;

  EmpiricalDistribution out;
  out.total = p.total;
  out.outcome_bits = static_cast<unsigned>(sb * sites.size());
  out.seed = p.seed;
  out.streams = p.streams;
  for (const auto& [key, count] : p.counts) {
    BitVector full(geo.dim());
    if (geo.dim() > 0) full.words()[0] = key.lo;
    if (geo.dim() > 64) full.words()[1] = key.hi;
    PhaseVector u(geo, full);
    for (std::size_t x = 0; x < geo.L; ++x)
      if (!in_window[x] && !u.site_is_zero(x))
        throw CausalityViolation("support on site " + std::to_string(x) +
                                 " outside the causal window");
    out.counts[key_of(project_sites(u, sites))] += count;
  }
  return out;
}

namespace {

unsigned histogram_bits(const ChainGeometry& geo,
                        const std::optional<std::vector<std::size_t>>& win) {
  const unsigned out_bits = static_cast<unsigned>(
      win ? geo.site_bits() * win->size() : geo.dim());
  if (out_bits > 128)
    throw std::invalid_argument(
        "transition_histogram: outcome space wider than 128 bits; restrict "
        "to a site window");
  return out_bits;
}

void check_histogram_input(const PhaseVector& u0, const ChainGeometry& geo) {
  if (u0.is_zero())
    throw std::invalid_argument(
        "transition_histogram: u0 = 0 is fixed by the dynamics");
  if (u0.geometry() != geo)
    throw std::invalid_argument("transition_histogram: geometry mismatch");
}

}  // namespace

EmpiricalDistribution transition_histogram(
    const PhaseVector& u0, HalfTime t, const ChainGeometry& geo,
    const McConfig& cfg,
    const std::optional<std::vector<std::size_t>>& restrict_sites) {
  check_histogram_input(u0, geo);
  const unsigned out_bits = histogram_bits(geo, restrict_sites);
  const bool word_window =
      !restrict_sites || geo.site_bits() * restrict_sites->size() <= 64;
  if (2 * geo.site_bits() > 64 || geo.dim() > 128 || !word_window)
    return transition_histogram_reference(u0, t, geo, cfg, restrict_sites);

  CountMap counts = mc_run_stateful(
      cfg, CountMap{}, [&] { return FastChain(geo); },
      [&](FastChain& fc, Rng& rng, CountMap& acc) {
        fc.resample(rng);
        const FastChain::State st = fc.evolve(fc.state_of(u0), t.t2);
        Key128 k;
        if (restrict_sites)
          k = Key128{fc.project(st, *restrict_sites), 0};
        else
          k = Key128{st.w[0], st.w[1]};
        ++acc[k];
      },
      [](CountMap& a, const CountMap& b) { merge_counts(a, b); });

  EmpiricalDistribution dist;
  dist.counts = std::move(counts);
  dist.total = cfg.samples;
  dist.outcome_bits = out_bits;
  dist.seed = cfg.seed;
  dist.streams = cfg.streams;
  return dist;
}

EmpiricalDistribution transition_histogram_reference(
    const PhaseVector& u0, HalfTime t, const ChainGeometry& geo,
    const McConfig& cfg,
    const std::optional<std::vector<std::size_t>>& restrict_sites) {
  check_histogram_input(u0, geo);
  const unsigned out_bits = histogram_bits(geo, restrict_sites);

  CountMap counts = mc_count(cfg, [&](Rng& rng) {
    const DisorderRealization r = build_disorder(geo, rng);
    const PhaseVector ut = evolve(r, u0, t);
    return restrict_sites ? key_of(project_sites(ut, *restrict_sites))
                          : key_of(ut.bits());
  });

  EmpiricalDistribution dist;
  dist.counts = std::move(counts);
  dist.total = cfg.samples;
  dist.outcome_bits = out_bits;
  dist.seed = cfg.seed;
  dist.streams = cfg.streams;
  return dist;
}

std::string ErgodicityReport::to_json() const {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["version"] = kVersion;
  j["experiment"] = experiment;
  j["L"] = L;
  j["N"] = N;
  j["t2"] = t2;
  j["samples"] = samples;
  j["seed"] = seed;
  j["streams"] = streams;
  j["l1"] = l1;
  j["bound_main"] = bound_main;
  j["bound_appendix"] = bound_appendix;
  j["vacuous"] = vacuous_main && vacuous_appendix;
  j["vacuous_main"] = vacuous_main;
  j["vacuous_appendix"] = vacuous_appendix;
  j["restricted"] = restricted;
  j["window"] = window;
  j["pass"] = pass;
  return j.dump(2) + "\n";
}

double weak_bound_main(double t, std::size_t n) {
  return 130.0 * t * t * std::pow(2.0, -static_cast<double>(n));
}

double weak_bound_appendix(double t, std::size_t l, std::size_t n,
                           bool pre_scrambling) {
  const double pn = std::pow(2.0, -static_cast<double>(n));
  const double p2n = std::pow(2.0, -2.0 * static_cast<double>(n));
  if (pre_scrambling)
    return 32.0 * t * (4.0 * t + 1.0) * pn + 4.0 * t * p2n;
  return 32.0 * t * (static_cast<double>(l) + 1.0) * pn +
         static_cast<double>(l) * p2n;
}

double half_bound_main(double t, std::size_t l, std::size_t n) {
  return 33.0 * t * static_cast<double>(l) *
         std::pow(2.0, -static_cast<double>(n));
}

double half_bound_appendix(double t, std::size_t l, std::size_t n) {
  return 32.0 * t * static_cast<double>(l) *
             std::pow(2.0, -static_cast<double>(n)) +
         static_cast<double>(l) * std::pow(2.0, -2.0 * static_cast<double>(n));
}

double subsystem_bound_main(double t, std::size_t ls, std::size_t n) {
  // 34 t 2^{c Ls - N} with c = log2 sqrt(3).
  return 34.0 * t *
         std::pow(3.0, static_cast<double>(ls) / 2.0) *
         std::pow(2.0, -static_cast<double>(n));
}

double subsystem_bound_appendix(double t, std::size_t l, std::size_t ls,
                                std::size_t n) {
  const double pn = std::pow(2.0, -static_cast<double>(n));
  const double p2n = std::pow(2.0, -2.0 * static_cast<double>(n));
  return 32.0 * t * pn *
             (2.0 * static_cast<double>(ls) +
              std::pow(3.0, static_cast<double>(ls) / 2.0 + 1.0)) +
         4.0 * static_cast<double>(l) * p2n;
}

namespace {

// Conservative 4-sigma allowance for an l1 estimate; one resample moves the
// statistic by at most 4/m, so the bounded-difference sigma is 2/sqrt(m).
double l1_sigma(std::uint64_t samples) {
  return 2.0 / std::sqrt(static_cast<double>(samples));
}

// Full-support l1 accumulated in a dense 2^bits table; used when the map
// accumulator would not fit. Counts are summed atomically, which keeps the
// result a pure function of (seed, streams): integer sums commute.
double dense_projected_l1(const PhaseVector& u0, HalfTime t,
                          const ChainGeometry& geo,
                          const std::vector<std::size_t>& sites,
                          bool include_zero, const McConfig& cfg) {
  const unsigned bits = static_cast<unsigned>(geo.site_bits() * sites.size());
  if (bits > 24)
    throw std::invalid_argument("dense_projected_l1: window wider than 24 "
                                "bits");
  const std::size_t cells = std::size_t{1} << bits;
  std::vector<std::uint32_t> counts(cells, 0);
  const bool whole_chain = sites.size() == geo.L;
  // For nonzero-restricted references the window is a causal support and
  // mass outside it is an error, not something to project away.
  const bool enforce_support = !include_zero && !whole_chain;
  std::uint64_t outside_mask = 0;
  if (enforce_support) {
    outside_mask = geo.L >= 64 ? ~std::uint64_t{0}
                               : (std::uint64_t{1} << geo.L) - 1;
    for (std::size_t x : sites) outside_mask &= ~(std::uint64_t{1} << x);
  }
  bool violated = false;

  const std::uint64_t per = cfg.samples / cfg.streams;
  const std::uint64_t extra = cfg.samples % cfg.streams;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
#endif
  for (long long s = 0; s < static_cast<long long>(cfg.streams); ++s) {
    FastChain fc(geo);
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    const std::uint64_t n =
        per + (static_cast<std::uint64_t>(s) < extra ? 1 : 0);
    const FastChain::State init = fc.state_of(u0);
    for (std::uint64_t i = 0; i < n; ++i) {
      fc.resample(rng);
      const FastChain::State st = fc.evolve(init, t.t2);
      // bits <= 24 so the whole chain fits in the low word
      const std::uint64_t v = whole_chain ? st.w[0] : fc.project(st, sites);
      if (enforce_support && (~fc.zero_pattern(st) & outside_mask) != 0)
        violated = true;
#if defined(_OPENMP)
#pragma omp atomic
#endif
      ++counts[v];
    }
  }
  if (violated)
    throw CausalityViolation("support outside the causal window");

  const long double q =
      1.0L / (std::ldexp(1.0L, static_cast<int>(bits)) -
              (include_zero ? 0.0L : 1.0L));
  const long double m = static_cast<long double>(cfg.samples);
  long double l1 = 0.0L;
  for (std::size_t v = include_zero ? 0 : 1; v < cells; ++v)
    l1 += std::fabs(static_cast<long double>(counts[v]) / m - q);
  if (!include_zero && counts[0] > 0)
    throw CausalityViolation("observed the zero outcome");
  return static_cast<double>(l1);
}

ErgodicityReport make_report(const char* experiment, const ChainGeometry& geo,
                             HalfTime t, const McConfig& cfg, double l1,
                             double bound_main, double bound_appendix,
                             bool restricted,
                             std::vector<std::size_t> window) {
  ErgodicityReport rep;
  rep.experiment = experiment;
  rep.L = geo.L;
  rep.N = geo.N;
  rep.t2 = t.t2;
  rep.samples = cfg.samples;
  rep.seed = cfg.seed;
  rep.streams = cfg.streams;
  rep.l1 = l1;
  rep.bound_main = bound_main;
  rep.bound_appendix = bound_appendix;
  rep.vacuous_main = bound_main >= 2.0;
  rep.vacuous_appendix = bound_appendix >= 2.0;
  rep.restricted = restricted;
  rep.window = std::move(window);
  // Acceptance compares against the appendix form, which the proofs back.
  rep.pass = rep.vacuous_appendix ||
             l1 <= bound_appendix + 4.0 * l1_sigma(cfg.samples);
  return rep;
}

}  // namespace

ErgodicityReport weak_ergodicity_check(
    std::size_t x0, HalfTime t, const ChainGeometry& geo, const McConfig& cfg,
    const std::optional<std::vector<std::size_t>>& window) {
  if (t.t2 < 1 || t.t2 > 2 * scrambling_time(geo.L).t2)
    throw std::invalid_argument(
        "weak_ergodicity_check: t must lie in [1/2, 2 t_scr]");
  const PhaseVector u0 = local_seed(geo, x0);
  const std::vector<std::size_t> causal = causal_window(x0, t, geo.L);
  const bool pre_scrambling = 2 * t.t2 < geo.L;

  const double bound_main = weak_bound_main(t.t(), geo.N);
  const double bound_app =
      weak_bound_appendix(t.t(), geo.L, geo.N, pre_scrambling);

  if (!window && geo.site_bits() * causal.size() <= 24) {
    const unsigned bits =
        static_cast<unsigned>(geo.site_bits() * causal.size());
    double l1 = 0.0;
    if (bits > 16 && 2 * geo.site_bits() <= 64 && geo.dim() <= 128) {
      l1 = dense_projected_l1(u0, t, geo, causal, /*include_zero=*/false,
                              cfg);
    } else {
      EmpiricalDistribution full =
          transition_histogram(u0, t, geo, cfg, std::nullopt);
      EmpiricalDistribution windowed = compress_to_window(full, geo, causal);
      l1 = static_cast<double>(
          l1_to_uniform(windowed, UniformReference{bits, false}));
    }
    return make_report("weak_ergodicity", geo, t, cfg, l1, bound_main,
                       bound_app, false, causal);
  }

  std::vector<std::size_t> win =
      window ? *window
             : std::vector<std::size_t>{x0, (x0 + 1) % geo.L};
  EmpiricalDistribution proj = transition_histogram(u0, t, geo, cfg, win);
  const UniformReference q{
      static_cast<unsigned>(geo.site_bits() * win.size()), true};
  const double l1 = static_cast<double>(l1_to_uniform(proj, q));
  return make_report("weak_ergodicity", geo, t, cfg, l1, bound_main, bound_app,
                     true, std::move(win));
}

ErgodicityReport halfinteger_ergodicity_check(
    const PhaseVector& u0, HalfTime t, const ChainGeometry& geo,
    const McConfig& cfg,
    const std::optional<std::vector<std::size_t>>& window) {
  if (t.is_integer())
    throw std::invalid_argument(
        "halfinteger_ergodicity_check: integer t rejected");
  const std::uint64_t tscr = scrambling_time(geo.L).t2;
  if (t.t2 < tscr || t.t2 > 2 * tscr)
    throw std::invalid_argument(
        "halfinteger_ergodicity_check: t must lie in [t_scr, 2 t_scr]");

  const double bound_main = half_bound_main(t.t(), geo.L, geo.N);
  const double bound_app = half_bound_appendix(t.t(), geo.L, geo.N);

  if (!window && geo.dim() <= 24) {
    double l1 = 0.0;
    if (geo.dim() > 16 && 2 * geo.site_bits() <= 64) {
      std::vector<std::size_t> all(geo.L);
      for (std::size_t x = 0; x < geo.L; ++x) all[x] = x;
      l1 = dense_projected_l1(u0, t, geo, all, /*include_zero=*/false, cfg);
    } else {
      EmpiricalDistribution full =
          transition_histogram(u0, t, geo, cfg, std::nullopt);
      const UniformReference q{static_cast<unsigned>(geo.dim()), false};
      l1 = static_cast<double>(l1_to_uniform(full, q));
    }
    return make_report("halfinteger_ergodicity", geo, t, cfg, l1, bound_main,
                       bound_app, false, {});
  }

  std::vector<std::size_t> win =
      window ? *window : std::vector<std::size_t>{0};
  EmpiricalDistribution proj = transition_histogram(u0, t, geo, cfg, win);
  const UniformReference q{
      static_cast<unsigned>(geo.site_bits() * win.size()), true};
  const double l1 = static_cast<double>(l1_to_uniform(proj, q));
  return make_report("halfinteger_ergodicity", geo, t, cfg, l1, bound_main,
                     bound_app, true, std::move(win));
}

ZeroSiteStats zero_site_stats(SeedClass cls, std::size_t x0, HalfTime t,
                              const ChainGeometry& geo, const McConfig& cfg) {
  const PhaseVector u0 =
      cls == SeedClass::Local ? local_seed(geo, x0) : full_support_seed(geo);
  using Acc = std::vector<std::uint64_t>;
  const auto merge = [](Acc& a, const Acc& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  Acc zeros =
      2 * geo.site_bits() <= 64 && geo.dim() <= 128
          ? mc_run_stateful(
                cfg, Acc(geo.L, 0), [&] { return FastChain(geo); },
                [&](FastChain& fc, Rng& rng, Acc& acc) {
                  fc.resample(rng);
                  const std::uint64_t z =
                      fc.zero_pattern(fc.evolve(fc.state_of(u0), t.t2));
                  for (std::size_t x = 0; x < geo.L; ++x)
                    if ((z >> x) & 1) ++acc[x];
                },
                merge)
          : mc_run(
                cfg, Acc(geo.L, 0),
                [&](Rng& rng, Acc& acc) {
                  const DisorderRealization r = build_disorder(geo, rng);
                  const PhaseVector ut = evolve(r, u0, t);
                  for (std::size_t x = 0; x < geo.L; ++x)
                    if (ut.site_is_zero(x)) ++acc[x];
                },
                merge);

  ZeroSiteStats stats;
  stats.L = geo.L;
  stats.N = geo.N;
  stats.t2 = t.t2;
  stats.samples = cfg.samples;
  stats.seed = cfg.seed;
  stats.streams = cfg.streams;
  stats.seed_class = cls;
  stats.x0 = x0;
  const double qt_bound =
      2.0 * t.t() * std::pow(2.0, -2.0 * static_cast<double>(geo.N));
  const double full_bound =
      16.0 * t.t() * std::pow(2.0, -static_cast<double>(geo.N));
  // For local seeds the q_t bound covers the two leading lightcone sites.
  const std::size_t edge1 = (x0 + t.t2) % geo.L;
  const std::size_t edge2 = (x0 + t.t2 + geo.L - 1) % geo.L;
  for (std::size_t x = 0; x < geo.L; ++x) {
    ZeroSiteRow row;
    row.site = x;
    row.zero_count = zeros[x];
    row.frequency =
        static_cast<double>(zeros[x]) / static_cast<double>(cfg.samples);
    if (cls == SeedClass::FullSupport) {
      row.has_bound = true;
      row.bound = full_bound;
    } else if (x == edge1 || x == edge2) {
      row.has_bound = true;
      row.bound = qt_bound;
    }
    if (row.has_bound) {
      const double sigma =
          binomial_sigma(std::min(row.bound, 1.0), cfg.samples);
      row.pass = row.bound >= 1.0 || row.frequency <= row.bound + 4.0 * sigma;
    }
    stats.rows.push_back(row);
  }
  return stats;
}

std::string ZeroSiteStats::to_csv() const {
  std::string out = "site,zero_count,frequency,bound,pass\r\n";
  for (const auto& row : rows) {
    out += std::to_string(row.site) + "," + std::to_string(row.zero_count) +
           "," + std::to_string(row.frequency) + ",";
    out += row.has_bound ? std::to_string(row.bound) : std::string();
    out += ",";
    out += row.has_bound ? (row.pass ? "true" : "false") : std::string();
    out += "\r\n";
  }
  return out;
}

std::vector<bool> zero_sites_of(const DisorderRealization& r,
                                const PhaseVector& u0, HalfTime t) {
  const PhaseVector ut = evolve(r, u0, t);
  std::vector<bool> out(r.geometry.L);
  for (std::size_t x = 0; x < r.geometry.L; ++x) out[x] = ut.site_is_zero(x);
  return out;
}

ErgodicityReport subsystem_check(std::size_t ls, HalfTime t,
                                 const ChainGeometry& geo,
                                 const McConfig& cfg) {
  if (ls == 0 || ls % 2 != 0 || ls >= geo.L)
    throw std::invalid_argument("subsystem_check: region length must be even "
                                "and smaller than L");
  if (!t.is_integer() || t.t2 == 0)
    throw std::invalid_argument("subsystem_check: integer t >= 1 required");
  if (t.t() > static_cast<double>(geo.L - ls) / 4.0)
    throw std::invalid_argument("subsystem_check: t must satisfy "
                                "t <= (L - Ls)/4");
  std::vector<std::size_t> region(ls);
  for (std::size_t i = 0; i < ls; ++i) region[i] = i + 1;

  const PhaseVector u0 = full_support_seed(geo);
  const unsigned bits = static_cast<unsigned>(geo.site_bits() * ls);
  double l1 = 0.0;
  if (bits > 16 && bits <= 24 && 2 * geo.site_bits() <= 64 &&
      geo.dim() <= 128) {
    l1 = dense_projected_l1(u0, t, geo, region, /*include_zero=*/true, cfg);
  } else {
    EmpiricalDistribution proj =
        transition_histogram(u0, t, geo, cfg, region);
    l1 = static_cast<double>(
        l1_to_uniform(proj, UniformReference{bits, true}));
  }
  return make_report("subsystem_ergodicity", geo, t, cfg, l1,
                     subsystem_bound_main(t.t(), ls, geo.N),
                     subsystem_bound_appendix(t.t(), geo.L, ls, geo.N), true,
                     std::move(region));
}

PhaseStats phase_statistics(std::size_t ls, HalfTime t,
                            const ChainGeometry& geo, const McConfig& cfg) {
  if (ls == 0 || ls % 2 != 0 || ls >= geo.L)
    throw std::invalid_argument("phase_statistics: region length must be even "
                                "and smaller than L");
  if (!t.is_integer() || t.t2 == 0)
    throw std::invalid_argument("phase_statistics: integer t >= 1 required");
  if (t.t() > static_cast<double>(geo.L - ls) / 4.0)
    throw std::invalid_argument("phase_statistics: t <= (L - Ls)/4 required");

  const PhaseVector u0 = full_support_seed(geo);
  using Acc = std::map<std::uint64_t, std::uint64_t>;
  const auto merge = [](Acc& a, const Acc& b) {
    for (const auto& [k, v] : b) a[k] += v;
  };
  Acc counts;
  if (2 * geo.site_bits() <= 64 && geo.dim() <= 128) {
    counts = mc_run_stateful(
        cfg, Acc{}, [&] { return FastChain(geo); },
        [&](FastChain& fc, Rng& rng, Acc& acc) {
          fc.resample(rng);
          const FastChain::State ref = fc.state_of(u0);
          const FastChain::State st = fc.evolve(ref, t.t2);
          std::uint64_t key = 0;
          for (std::size_t i = 0; i < ls; ++i) {
            const std::size_t x = i + 1;
            const std::uint64_t a = fc.site(st, x);
            const std::uint64_t b = fc.site(ref, x);
            // <a, b> = parity(a & J b), J swapping bit pairs.
            constexpr std::uint64_t kOdd = 0xaaaaaaaaaaaaaaaaULL;
            constexpr std::uint64_t kEven = 0x5555555555555555ULL;
            const std::uint64_t jb = ((b & kOdd) >> 1) | ((b & kEven) << 1);
            if (std::popcount(a & jb) & 1) key |= std::uint64_t{1} << i;
          }
          ++acc[key];
        },
        merge);
  } else {
    const SymplecticForm site_form(geo.N);
    counts = mc_run(
        cfg, Acc{},
        [&](Rng& rng, Acc& acc) {
          const DisorderRealization r = build_disorder(geo, rng);
          const PhaseVector ut = evolve(r, u0, t);
          std::uint64_t key = 0;
          for (std::size_t i = 0; i < ls; ++i) {
            const std::size_t x = i + 1;
            if (site_form.form(ut.site(x), u0.site(x)))
              key |= std::uint64_t{1} << i;
          }
          ++acc[key];
        },
        merge);
  }

  PhaseStats stats;
  stats.L = geo.L;
  stats.N = geo.N;
  stats.ls = ls;
  stats.t2 = t.t2;
  stats.samples = cfg.samples;
  stats.seed = cfg.seed;
  stats.streams = cfg.streams;
  stats.counts = std::move(counts);
  double maxp = 0.0;
  for (const auto& [k, v] : stats.counts)
    maxp = std::max(maxp,
                    static_cast<double>(v) / static_cast<double>(cfg.samples));
  stats.max_probability = maxp;
  stats.bound = std::pow(2.0, -static_cast<double>(ls)) +
                32.0 * t.t() *
                    std::pow(3.0, static_cast<double>(ls) / 2.0 + 1.0) *
                    std::pow(2.0, -static_cast<double>(geo.N));
  const double sigma = binomial_sigma(std::min(stats.bound, 1.0), cfg.samples);
  stats.pass = stats.bound >= 1.0 ||
               stats.max_probability <= stats.bound + 4.0 * sigma;
  return stats;
}

SingleSitePhase single_site_phase(std::size_t x0, HalfTime t,
                                  const ChainGeometry& geo,
                                  const McConfig& cfg) {
  if (!t.is_integer() || t.t2 == 0)
    throw std::invalid_argument("single_site_phase: integer t >= 1 required");
  const PhaseVector u0 = local_seed(geo, x0);
  const auto merge = [](std::uint64_t& a, const std::uint64_t& b) { a += b; };
  std::uint64_t zeros;
  if (2 * geo.site_bits() <= 64 && geo.dim() <= 128) {
    zeros = mc_run_stateful(
        cfg, std::uint64_t{0}, [&] { return FastChain(geo); },
        [&](FastChain& fc, Rng& rng, std::uint64_t& acc) {
          fc.resample(rng);
          const FastChain::State ref = fc.state_of(u0);
          const FastChain::State st = fc.evolve(ref, t.t2);
          const std::uint64_t b = fc.site(ref, x0);
          constexpr std::uint64_t kOdd = 0xaaaaaaaaaaaaaaaaULL;
          constexpr std::uint64_t kEven = 0x5555555555555555ULL;
          const std::uint64_t jb = ((b & kOdd) >> 1) | ((b & kEven) << 1);
          if (!(std::popcount(fc.site(st, x0) & jb) & 1)) ++acc;
        },
        merge);
  } else {
    const SymplecticForm site_form(geo.N);
    zeros = mc_run(
        cfg, std::uint64_t{0},
        [&](Rng& rng, std::uint64_t& acc) {
          const DisorderRealization r = build_disorder(geo, rng);
          const PhaseVector ut = evolve(r, u0, t);
          if (!site_form.form(ut.site(x0), u0.site(x0))) ++acc;
        },
        merge);
  }

  SingleSitePhase out;
  out.zero_count = zeros;
  out.samples = cfg.samples;
  out.frequency =
      static_cast<double>(zeros) / static_cast<double>(cfg.samples);
  out.bound =
      0.5 + 8.0 * t.t() * std::pow(2.0, -static_cast<double>(geo.N));
  const double sigma = binomial_sigma(0.5, cfg.samples);
  out.pass = out.bound >= 1.0 || out.frequency <= out.bound + 4.0 * sigma;
  return out;
}

PhaseVector apply_local_dressing(const std::vector<SymplecticMatrix>& dressing,
                                 const PhaseVector& u) {
  const ChainGeometry& geo = u.geometry();
  if (dressing.size() != geo.L)
    throw std::invalid_argument("apply_local_dressing: need one matrix per "
                                "site");
  PhaseVector out(geo);
  for (std::size_t x = 0; x < geo.L; ++x) {
    if (dressing[x].dim() != geo.site_bits())
      throw std::invalid_argument("apply_local_dressing: local matrix size");
    out.set_site(x, dressing[x].matrix().apply(u.site(x)));
  }
  return out;
}

TwirlReport twirl_invariance_test(
    TwirlStatistic stat, HalfTime t, const ChainGeometry& geo,
    const McConfig& cfg, const std::vector<SymplecticMatrix>& left_dressing,
    const std::vector<SymplecticMatrix>& right_dressing) {
  // The dressed operator is (+L) S(t) (+R). Integer time admits only
  // conjugations, so there L is forced to R^{-1}; half-integer time admits
  // independent dressings.
  std::vector<SymplecticMatrix> left = left_dressing;
  if (t.is_integer()) {
    left.clear();
    for (const auto& s : right_dressing) left.push_back(s.inverse());
  }

  const PhaseVector u0 = local_seed(geo, 0);
  const std::vector<std::size_t> win{0, 1 % geo.L};
  const PhaseVector u0_dressed = apply_local_dressing(right_dressing, u0);

  McConfig cfg_base = cfg;
  McConfig cfg_dressed = cfg;
  cfg_dressed.seed = mix_seed(cfg.seed, 0x7477697264ULL);

  const auto run = [&](const McConfig& c, const PhaseVector& seed,
                       bool dress_output) {
    return mc_run(
        c, CountMap{},
        [&](Rng& rng, CountMap& acc) {
          const DisorderRealization r = build_disorder(geo, rng);
          PhaseVector ut = evolve(r, seed, t);
          if (dress_output) ut = apply_local_dressing(left, ut);
          if (stat == TwirlStatistic::TransitionWindow) {
            ++acc[key_of(project_sites(ut, win))];
          } else {
            Key128 k{};
            for (std::size_t x = 0; x < geo.L && x < 64; ++x)
              if (ut.site_is_zero(x)) k.lo |= std::uint64_t{1} << x;
            ++acc[k];
          }
        },
        [](CountMap& a, const CountMap& b) { merge_counts(a, b); });
  };

  const CountMap base = run(cfg_base, u0, false);
  const CountMap dressed = run(cfg_dressed, u0_dressed, true);

  TwirlReport rep;
  rep.statistic = stat;
  rep.t2 = t.t2;
  rep.samples = cfg.samples;
  rep.seed = cfg.seed;
  std::vector<Key128> keys;
  for (const auto& [k, v] : base) keys.push_back(k);
  for (const auto& [k, v] : dressed)
    if (!base.contains(k)) keys.push_back(k);
  const double m = static_cast<double>(cfg.samples);
  double max_z = 0.0;
  for (const Key128& k : keys) {
    const auto f = [&](const CountMap& c) {
      const auto it = c.find(k);
      return it == c.end() ? 0.0 : static_cast<double>(it->second) / m;
    };
    const double f1 = f(base), f2 = f(dressed);
    const double pooled = (f1 + f2) / 2.0;
    const double sigma = std::sqrt(std::max(pooled * (1.0 - pooled), 1e-12) *
                                   (2.0 / m));
    max_z = std::max(max_z, std::fabs(f1 - f2) / sigma);
  }
  rep.bins = static_cast<unsigned>(keys.size());
  rep.max_z = max_z;
  rep.pass = max_z <= 4.0;
  return rep;
}

}  // namespace floq
