#include "floq/walls.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace floq {

namespace {

// Block swap M = (0 I; I 0) of size 2h.
BitMatrix block_swap(std::size_t h) {
  BitMatrix m(2 * h, 2 * h);
  for (std::size_t i = 0; i < h; ++i) {
    m.set(i, h + i, true);
    m.set(h + i, i, true);
  }
  return m;
}

SymplecticMatrix mirror_gate(const SymplecticMatrix& s) {
  const std::size_t h = s.dim() / 2;
  const BitMatrix m = block_swap(h);
  return SymplecticMatrix(m * s.matrix() * m);
}

void check_gate_size(const SymplecticMatrix& s, std::size_t n_modes,
                     const char* who) {
  if (s.dim() != 4 * n_modes)
    throw std::invalid_argument(std::string(who) + ": gate size " +
                                std::to_string(s.dim()) + ", expected " +
                                std::to_string(4 * n_modes));
}

}  // namespace

bool is_right_wall(const SymplecticMatrix& s0, const SymplecticMatrix& s1,
                   std::size_t n_modes) {
  check_gate_size(s0, n_modes, "is_right_wall");
  check_gate_size(s1, n_modes, "is_right_wall");
  const BlockView b0 = blocks(s0);
  const BlockView b1 = blocks(s1);
  const BitMatrix p = b0.d * b1.a;
  BitMatrix acc = b0.c;
  const std::size_t k_max = 4 * n_modes * n_modes;
  for (std::size_t k = 0; k < k_max; ++k) {
    if (!(b1.c * acc).is_zero()) return false;
    acc = p * acc;
  }
  return true;
}

bool is_right_wall_n1(const SymplecticMatrix& s0,
                      const SymplecticMatrix& s1) {
  if (s0.dim() != 4 || s1.dim() != 4)
    throw std::invalid_argument("is_right_wall_n1: N = 1 gates required");
  const BlockView b0 = blocks(s0);
  const BlockView b1 = blocks(s1);
  if (!(b1.c * b0.c).is_zero()) return false;
  return (b1.c * b0.d * b1.a * b0.c).is_zero();
}

bool is_left_wall(const SymplecticMatrix& s0, const SymplecticMatrix& s1,
                  std::size_t n_modes) {
  check_gate_size(s0, n_modes, "is_left_wall");
  check_gate_size(s1, n_modes, "is_left_wall");
  return is_right_wall(mirror_gate(s1), mirror_gate(s0), n_modes);
}

bool is_product_form(const SymplecticMatrix& s) {
  return blocks(s).c.is_zero();
}

std::vector<WallReport> scan_chain(const DisorderRealization& r) {
  const std::size_t n_modes = r.geometry.N;
  std::vector<WallReport> out;
  for (std::size_t x = 0; x + 1 < r.geometry.L; x += 2) {
    const SymplecticMatrix& even = r.gates[x];
    const SymplecticMatrix& odd = r.gates[x + 1];
    const bool even_product = is_product_form(even);
    const bool odd_product = is_product_form(odd);
    if (is_right_wall(even, odd, n_modes)) {
      WallReport w;
      w.position = x;
      w.side = WallReport::Side::Right;
      w.penetration = even_product ? 0 : 1;
      if (even_product) w.detected_by.push_back("product_form_even_gate");
      if (odd_product) w.detected_by.push_back("product_form_odd_gate");
      if (!even_product && !odd_product)
        w.detected_by.push_back("k_range_conditions");
      out.push_back(std::move(w));
    }
    if (is_left_wall(even, odd, n_modes)) {
      WallReport w;
      w.position = x;
      w.side = WallReport::Side::Left;
      w.penetration = odd_product ? 0 : 1;
      if (even_product) w.detected_by.push_back("product_form_even_gate");
      if (odd_product) w.detected_by.push_back("product_form_odd_gate");
      if (!even_product && !odd_product)
        w.detected_by.push_back("k_range_conditions");
      out.push_back(std::move(w));
    }
  }
  return out;
}

WallProbabilityReport wall_probability(std::size_t n_modes,
                                       const McConfig& cfg) {
  if (cfg.samples == 0)
    throw std::invalid_argument("wall_probability: samples >= 1");
  std::uint64_t hits = mc_run(
      cfg, std::uint64_t{0},
      [&](Rng& rng, std::uint64_t& acc) {
        const SymplecticMatrix s0 = sample_uniform(2 * n_modes, rng);
        const SymplecticMatrix s1 = sample_uniform(2 * n_modes, rng);
        if (is_right_wall(s0, s1, n_modes)) ++acc;
      },
      [](std::uint64_t& a, const std::uint64_t& b) { a += b; });

  WallProbabilityReport rep;
  rep.n_modes = n_modes;
  rep.samples = cfg.samples;
  rep.hits = hits;
  rep.seed = cfg.seed;
  rep.streams = cfg.streams;
  rep.frequency =
      static_cast<double>(hits) / static_cast<double>(cfg.samples);
  rep.bound = 4.0 * static_cast<double>(n_modes) *
              std::pow(2.0, -2.0 * static_cast<double>(n_modes) *
                                 (static_cast<double>(n_modes) - 1.0));
  const double sigma = binomial_sigma(std::min(rep.bound, 1.0), cfg.samples);
  rep.pass = rep.bound >= 1.0 || rep.frequency <= rep.bound + 4.0 * sigma;
  return rep;
}

oracle::Rational exact_wall_probability_n1() {
  const oracle::WallCounts wc = oracle::exact_wall_counts();
  oracle::Rational r{wc.right_walls, wc.pairs};
  const std::uint64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

int round_two_decimals(const oracle::Rational& r) {
  // round(100 num / den) half up, in exact integer arithmetic
  return static_cast<int>((200 * r.num + r.den) / (2 * r.den));
}

ConfinementResult confinement_test(const DisorderRealization& r,
                                   const WallReport& wall,
                                   std::uint64_t t2_max, unsigned trials,
                                   Rng& rng) {
  const ChainGeometry& geo = r.geometry;
  const std::int64_t L = static_cast<std::int64_t>(geo.L);
  const std::int64_t x = static_cast<std::int64_t>(wall.position);
  const bool right = wall.side == WallReport::Side::Right;
  // Right wall at x: seeds at site x must stay at cover coordinate
  // <= x + penetration. Left wall at x: seeds at site x+2 must stay
  // >= x + 2 - penetration. The seed is lifted at its unreduced cover
  // coordinate so the wall sits on the correct side even across the seam.
  const std::int64_t seed_cover = right ? x : x + 2;
  const std::int64_t limit =
      right ? x + wall.penetration : x + 2 - wall.penetration;

  ConfinementResult res;
  res.trials = trials;
  for (unsigned trial = 0; trial < trials; ++trial) {
    PhaseVector u(geo);
    u.set_site(static_cast<std::size_t>(seed_cover % L),
               BitVector::random_nonzero(geo.site_bits(), rng));
    std::int64_t a = seed_cover, b = seed_cover;  // cover-space extents
    for (std::uint64_t step = 0; step < t2_max; ++step) {
      apply_half_step(r, step % 2 == 0 ? Parity::Even : Parity::Odd, u);
      if (b - a + 2 >= L) {
        // Fronts meet: left and right growth are no longer separable.
        if (!res.wrapped_at_t2) res.wrapped_at_t2 = step + 1;
        break;
      }
      const auto occupied = [&](std::int64_t cover) {
        const std::size_t site =
            static_cast<std::size_t>(((cover % L) + L) % L);
        return !u.site_is_zero(site);
      };
      if (occupied(a - 1)) --a;
      if (occupied(b + 1)) ++b;
      const std::int64_t extent = right ? b : a;
      const bool violated = right ? extent > limit : extent < limit;
      if (violated) {
        res.pass = false;
        if (!res.violated_at_t2) res.violated_at_t2 = step + 1;
        return res;
      }
    }
  }
  return res;
}

LightconeGrid lightcone_grid(const DisorderRealization& r,
                             const PhaseVector& u0, std::uint64_t t2_max) {
  const ChainGeometry& geo = r.geometry;
  LightconeGrid grid;
  grid.geometry = geo;
  grid.rows.reserve(t2_max + 1);
  grid.extents.reserve(t2_max + 1);

  const auto classes = [&](const PhaseVector& u) {
    std::vector<std::uint8_t> row(geo.N * geo.L, 0);
    for (std::size_t q = 0; q < geo.N * geo.L; ++q)
      row[q] = static_cast<std::uint8_t>(
          static_cast<unsigned>(u.bits().get(2 * q)) |
          (static_cast<unsigned>(u.bits().get(2 * q + 1)) << 1));
    return row;
  };

  const std::int64_t L = static_cast<std::int64_t>(geo.L);
  std::int64_t a = 0, b = -1;
  bool wrapped = false;
  for (std::size_t s = 0; s < geo.L; ++s) {
    if (!u0.site_is_zero(s)) {
      if (b < a) a = b = static_cast<std::int64_t>(s);
      b = static_cast<std::int64_t>(s);
    }
  }
  if (b < a) {  // zero vector
    a = 0;
    b = 0;
  }

  PhaseVector u = u0;
  for (std::uint64_t step = 0;; ++step) {
    grid.rows.push_back(classes(u));
    if (!wrapped && b - a + 2 >= L) wrapped = true;
    if (!wrapped) {
      const auto occupied = [&](std::int64_t cover) {
        const std::size_t site =
            static_cast<std::size_t>(((cover % L) + L) % L);
        return !u.site_is_zero(site);
      };
      if (occupied(a - 1)) --a;
      if (occupied(b + 1)) ++b;
    }
    grid.extents.push_back({a, b, wrapped});
    if (step == t2_max) break;
    apply_half_step(r, step % 2 == 0 ? Parity::Even : Parity::Odd, u);
  }
  return grid;
}

std::string lightcone_svg(const LightconeGrid& grid,
                          const std::vector<WallReport>& walls) {
  const std::size_t cell = 4;
  const std::size_t qubits = grid.geometry.N * grid.geometry.L;
  const std::size_t w = qubits * cell;
  const std::size_t h = grid.rows.size() * cell;
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
      std::to_string(w) + "\" height=\"" + std::to_string(h) + "\">\n";
  svg += "<rect width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" fill=\"white\"/>\n";
  for (std::size_t t = 0; t < grid.rows.size(); ++t) {
    for (std::size_t q = 0; q < qubits; ++q) {
      if (grid.rows[t][q] == 0) continue;
      svg += "<rect x=\"" + std::to_string(q * cell) + "\" y=\"" +
             std::to_string(t * cell) + "\" width=\"" + std::to_string(cell) +
             "\" height=\"" + std::to_string(cell) + "\" fill=\"black\"/>\n";
    }
  }
  for (const WallReport& wall : walls) {
    const std::size_t boundary_site =
        wall.side == WallReport::Side::Right
            ? wall.position + 1 + static_cast<std::size_t>(wall.penetration)
            : wall.position + 2 - static_cast<std::size_t>(wall.penetration);
    const std::size_t px =
        (boundary_site % grid.geometry.L) * grid.geometry.N * cell;
    svg += "<line x1=\"" + std::to_string(px) + "\" y1=\"0\" x2=\"" +
           std::to_string(px) + "\" y2=\"" + std::to_string(h) +
           "\" stroke=\"red\" stroke-width=\"1\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string lightcone_pgm(const LightconeGrid& grid) {
  const std::size_t qubits = grid.geometry.N * grid.geometry.L;
  std::string out = "P2\n" + std::to_string(qubits) + " " +
                    std::to_string(grid.rows.size()) + "\n255\n";
  for (const auto& row : grid.rows) {
    for (std::size_t q = 0; q < qubits; ++q) {
      out += row[q] ? "0" : "255";
      out += q + 1 < qubits ? ' ' : '\n';
    }
  }
  return out;
}

std::string extents_csv(const LightconeGrid& grid) {
  std::string out = "t2,leftmost,rightmost\r\n";
  for (std::size_t t = 0; t < grid.extents.size(); ++t) {
    const auto& e = grid.extents[t];
    out += std::to_string(t) + ",";
    if (e.wrapped) {
      out += "wrapped,wrapped\r\n";
    } else {
      out += std::to_string(e.leftmost) + "," + std::to_string(e.rightmost) +
             "\r\n";
    }
  }
  return out;
}

std::pair<SymplecticMatrix, SymplecticMatrix> counterexample_fixture() {
  static const char* kS0 =
      "8 8\n"
      "10000000\n"
      "01000010\n"
      "00100000\n"
      "00010000\n"
      "10000001\n"
      "00000010\n"
      "00001000\n"
      "00000100\n";
  static const char* kS1 =
      "8 8\n"
      "10001000\n"
      "01000000\n"
      "00100000\n"
      "00010000\n"
      "00001000\n"
      "01000100\n"
      "00000010\n"
      "00000001\n";
  return {SymplecticMatrix(BitMatrix::from_text(kS0)),
          SymplecticMatrix(BitMatrix::from_text(kS1))};
}

std::pair<SymplecticMatrix, SymplecticMatrix> example_wall_pair_n1() {
  static const char* kS0 =
      "4 4\n"
      "1101\n"
      "0101\n"
      "1010\n"
      "0001\n";
  static const char* kS1 =
      "4 4\n"
      "1001\n"
      "0100\n"
      "0110\n"
      "0001\n";
  return {SymplecticMatrix(BitMatrix::from_text(kS0)),
          SymplecticMatrix(BitMatrix::from_text(kS1))};
}

}  // namespace floq
