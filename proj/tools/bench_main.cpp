// Compares the OpenMP-parallel Monte-Carlo path against the serial
// reference, and the word-packed chain kernel against the matrix path.
// Equal configurations must produce identical results; the timings show
// what the parallel and packed paths buy.

#include <chrono>
#include <cstdio>
#include <string>

#include "floq/ergodicity.hpp"
#include "floq/walls.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace floq;

namespace {

template <class Fn>
double seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void row(const char* name, double serial, double parallel, bool equal) {
  std::printf("%-38s %9.3fs %9.3fs %7.2fx %s\n", name, serial, parallel,
              serial / parallel, equal ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t scale = 1;
  if (argc > 1) scale = std::stoull(argv[1]);
#if defined(_OPENMP)
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run serially\n");
#endif
  std::printf("%-38s %10s %10s %8s\n", "kernel", "serial", "parallel",
              "speedup");

  {
    McConfig par{.seed = 1, .streams = 16, .samples = 200000 * scale};
    McConfig ser = par;
    ser.parallel = false;
    WallProbabilityReport a, b;
    const double ts = seconds([&] { a = wall_probability(2, ser); });
    const double tp = seconds([&] { b = wall_probability(2, par); });
    row("wall_probability N=2", ts, tp, a.hits == b.hits);
  }
  {
    McConfig par{.seed = 2, .streams = 16, .samples = 50000 * scale};
    McConfig ser = par;
    ser.parallel = false;
    RankHistogram a, b;
    const double ts =
        seconds([&] { a = block_rank_histogram(4, Block::C, ser); });
    const double tp =
        seconds([&] { b = block_rank_histogram(4, Block::C, par); });
    row("block_rank_histogram n=4", ts, tp, a.counts == b.counts);
  }
  {
    const ChainGeometry geo(6, 2);
    const PhaseVector u0 = local_seed(geo, 0);
    McConfig par{.seed = 3, .streams = 16, .samples = 100000 * scale};
    McConfig ser = par;
    ser.parallel = false;
    EmpiricalDistribution a, b;
    const double ts =
        seconds([&] { a = transition_histogram(u0, HalfTime{4}, geo, ser); });
    const double tp =
        seconds([&] { b = transition_histogram(u0, HalfTime{4}, geo, par); });
    row("transition_histogram L=6 N=2", ts, tp, a.counts == b.counts);
  }
  {
    // Word-packed kernel vs the matrix reference, both parallel.
    const ChainGeometry geo(6, 2);
    const PhaseVector u0 = local_seed(geo, 0);
    McConfig cfg{.seed = 4, .streams = 16, .samples = 50000 * scale};
    EmpiricalDistribution fast, ref;
    const double tr = seconds(
        [&] { ref = transition_histogram_reference(u0, HalfTime{4}, geo, cfg); });
    const double tf =
        seconds([&] { fast = transition_histogram(u0, HalfTime{4}, geo, cfg); });
    std::printf("%-38s %9.3fs %9.3fs %7.2fx %s\n",
                "matrix reference vs packed kernel", tr, tf, tr / tf,
                fast.counts == ref.counts ? "identical" : "MISMATCH");
  }
  return 0;
}
