#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "floq/gf2.hpp"
#include "floq/rng.hpp"
#include "floq/symplectic.hpp"

namespace floq {

struct ChainGeometry {
  std::size_t L = 2;  // even site count >= 2
  std::size_t N = 1;  // modes (qubits) per site >= 1

  ChainGeometry() = default;
  ChainGeometry(std::size_t sites, std::size_t modes);

  std::size_t dim() const { return 2 * N * L; }
  std::size_t site_bits() const { return 2 * N; }
  bool operator==(const ChainGeometry&) const = default;
};

// Time in integer half-steps: t = t2 / 2.
struct HalfTime {
  std::uint64_t t2 = 0;

  bool is_integer() const { return t2 % 2 == 0; }
  double t() const { return static_cast<double>(t2) / 2.0; }
  bool operator==(const HalfTime&) const = default;
};

// Accepts "3/2", "1.5", "t2=3" and plain integers like "2".
HalfTime parse_time(std::string_view s);
std::string format_time(HalfTime t);

class PhaseVector {
 public:
  PhaseVector() = default;
  PhaseVector(ChainGeometry geo, BitVector bits);
  explicit PhaseVector(ChainGeometry geo)
      : geo_(geo), bits_(geo.dim()) {}

  const ChainGeometry& geometry() const { return geo_; }
  const BitVector& bits() const { return bits_; }
  BitVector& bits() { return bits_; }

  BitVector site(std::size_t x) const;
  void set_site(std::size_t x, const BitVector& v);
  bool site_is_zero(std::size_t x) const;
  std::vector<std::size_t> support() const;
  bool is_zero() const { return bits_.is_zero(); }
  bool operator==(const PhaseVector&) const = default;

 private:
  ChainGeometry geo_;
  BitVector bits_;
};

// X on the first qubit of site x0, identity elsewhere.
PhaseVector local_seed(const ChainGeometry& geo, std::size_t x0);
// X on every qubit: the fixed full-support representative.
PhaseVector full_support_seed(const ChainGeometry& geo);

// Pauli-string codec, phase-free: per qubit (q,p) with
// (0,0)=I (1,0)=X (0,1)=Z (1,1)=Y; sites separated by single spaces.
std::string pauli_string(const PhaseVector& u);
PhaseVector parse_pauli_string(const ChainGeometry& geo, std::string_view s);

// One circuit sample: L two-site gates, gate x acting on sites (x, x+1 mod L),
// each a uniform symplectic of size 4N.
struct DisorderRealization {
  ChainGeometry geometry;
  std::vector<SymplecticMatrix> gates;

  DisorderRealization(ChainGeometry geo, std::vector<SymplecticMatrix> g);
  static DisorderRealization all_identity(const ChainGeometry& geo);

  std::string to_json(std::uint64_t seed) const;
  static DisorderRealization from_json(std::string_view text);
};

DisorderRealization build_disorder(const ChainGeometry& geo, Rng& rng);

enum class Parity { Even, Odd };

// The dense 2NL x 2NL half-step matrix: even parity is block-diagonal over
// gates 0,2,...,L-2; odd parity is shifted by one site with gate L-1
// contributing the four wraparound corner blocks.
BitMatrix half_step_matrix(const DisorderRealization& r, Parity parity);

// In-place gate-by-gate application; equivalent to multiplying by
// half_step_matrix but without forming it.
void apply_half_step(const DisorderRealization& r, Parity parity,
                     PhaseVector& u);

// S(t) u0 with t2 alternating half-steps, even first.
PhaseVector evolve(const DisorderRealization& r, const PhaseVector& u0,
                   HalfTime t);

// L/4 if L/2 even, else (L/2 + 1)/2, as a half-step count.
HalfTime scrambling_time(std::size_t L);

// Sites reachable from a seed at x0 after time t; the whole ring once the
// window length 4t reaches L. For odd x0 the window mirrors, since even
// gates pair odd sites with their left neighbour.
std::vector<std::size_t> causal_window(std::size_t x0, HalfTime t,
                                       std::size_t L);

// Projection of u onto the listed sites, concatenated in the given order.
BitVector project_sites(const PhaseVector& u,
                        const std::vector<std::size_t>& sites);

// Allocation-free word-packed realization + evolution for gate size
// 4N <= 64 and chain dimension 2NL <= 128. Draw-compatible with
// build_disorder/evolve: the same rng stream produces the same dynamics,
// which the tests use to pin this kernel against the reference path.
class FastChain {
 public:
  explicit FastChain(const ChainGeometry& geo);

  const ChainGeometry& geometry() const { return geo_; }
  void resample(Rng& rng);

  struct State {
    std::uint64_t w[2] = {0, 0};
  };
  State state_of(const PhaseVector& u) const;
  State evolve(State u, std::uint64_t t2) const;

  std::uint64_t site(const State& s, std::size_t x) const;
  bool site_is_zero(const State& s, std::size_t x) const {
    return site(s, x) == 0;
  }
  // Zero-pattern bits: bit x set iff site x is zero.
  std::uint64_t zero_pattern(const State& s) const;
  // Concatenated site words of the listed sites (total bits <= 64).
  std::uint64_t project(const State& s,
                        const std::vector<std::size_t>& sites) const;

 private:
  void half_step(State& s, bool even) const;

  ChainGeometry geo_;
  std::vector<WordGate> gates_;
};

}  // namespace floq
