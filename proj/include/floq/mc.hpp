#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "floq/gf2.hpp"
#include "floq/rng.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace floq {

// 128-bit outcome key; enough for every histogram this project counts.
struct Key128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  bool operator==(const Key128&) const = default;
  bool operator<(const Key128& o) const {
    return hi != o.hi ? hi < o.hi : lo < o.lo;
  }
};

struct Key128Hash {
  std::size_t operator()(const Key128& k) const {
    return splitmix64(k.lo ^ splitmix64(k.hi));
  }
};

inline Key128 key_of(const BitVector& v) {
  if (v.size() > 128)
    throw std::invalid_argument("key_of: outcome wider than 128 bits (" +
                                std::to_string(v.size()) + ")");
  Key128 k;
  auto w = v.words();
  if (!w.empty()) k.lo = w[0];
  if (w.size() > 1) k.hi = w[1];
  return k;
}

using CountMap = std::unordered_map<Key128, std::uint64_t, Key128Hash>;

inline void merge_counts(CountMap& into, const CountMap& from) {
  for (const auto& [k, c] : from) into[k] += c;
}

struct McConfig {
  std::uint64_t seed = 0;
  unsigned streams = 8;
  std::uint64_t samples = 0;
  bool parallel = true;
};

// Runs `samples` independent draws split over `streams` RNG streams and
// merges the per-stream accumulators in stream order. The merged result is
// a function of (seed, streams, samples) only, so the parallel and serial
// paths are bit-identical; the serial path is kept as the reference for
// tests and benchmarks.
//
// Body: void(Rng&, Acc&) -- one sample. Merge: void(Acc&, const Acc&).
template <class Acc, class Body, class Merge>
Acc mc_run(const McConfig& cfg, const Acc& init, Body&& body, Merge&& merge) {
  if (cfg.streams == 0) throw std::invalid_argument("mc_run: streams == 0");
  const std::uint64_t per = cfg.samples / cfg.streams;
  const std::uint64_t extra = cfg.samples % cfg.streams;
  std::vector<Acc> partials(cfg.streams, init);

#if defined(_OPENMP)
  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long s = 0; s < static_cast<long long>(cfg.streams); ++s) {
      Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(s)));
      const std::uint64_t n =
          per + (static_cast<std::uint64_t>(s) < extra ? 1 : 0);
      for (std::uint64_t i = 0; i < n; ++i) body(rng, partials[s]);
    }
  } else
#endif
  {
    for (unsigned s = 0; s < cfg.streams; ++s) {
      Rng rng(mix_seed(cfg.seed, s));
      const std::uint64_t n = per + (s < extra ? 1 : 0);
      for (std::uint64_t i = 0; i < n; ++i) body(rng, partials[s]);
    }
  }

  Acc out = std::move(partials[0]);
  for (unsigned s = 1; s < cfg.streams; ++s) merge(out, partials[s]);
  return out;
}

// Count-map flavour, the common case.
template <class Body>
CountMap mc_count(const McConfig& cfg, Body&& body) {
  return mc_run(
      cfg, CountMap{},
      [&body](Rng& rng, CountMap& acc) { ++acc[body(rng)]; },
      [](CountMap& a, const CountMap& b) { merge_counts(a, b); });
}

// Variant with per-stream scratch state (e.g. a reusable FastChain), built
// once per stream by `make_state`. Body: void(State&, Rng&, Acc&).
template <class Acc, class StateFactory, class Body, class Merge>
Acc mc_run_stateful(const McConfig& cfg, const Acc& init,
                    StateFactory&& make_state, Body&& body, Merge&& merge) {
  if (cfg.streams == 0) throw std::invalid_argument("mc_run: streams == 0");
  const std::uint64_t per = cfg.samples / cfg.streams;
  const std::uint64_t extra = cfg.samples % cfg.streams;
  std::vector<Acc> partials(cfg.streams, init);

#if defined(_OPENMP)
  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long s = 0; s < static_cast<long long>(cfg.streams); ++s) {
      auto state = make_state();
      Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(s)));
      const std::uint64_t n =
          per + (static_cast<std::uint64_t>(s) < extra ? 1 : 0);
      for (std::uint64_t i = 0; i < n; ++i) body(state, rng, partials[s]);
    }
  } else
#endif
  {
    for (unsigned s = 0; s < cfg.streams; ++s) {
      auto state = make_state();
      Rng rng(mix_seed(cfg.seed, s));
      const std::uint64_t n = per + (s < extra ? 1 : 0);
      for (std::uint64_t i = 0; i < n; ++i) body(state, rng, partials[s]);
    }
  }

  Acc out = std::move(partials[0]);
  for (unsigned s = 1; s < cfg.streams; ++s) merge(out, partials[s]);
  return out;
}

}  // namespace floq
