#include "floq/chain.hpp"

#include <charconv>
#include <stdexcept>

#include <json.hpp>

namespace floq {

ChainGeometry::ChainGeometry(std::size_t sites, std::size_t modes)
    : L(sites), N(modes) {
  if (L < 2 || L % 2 != 0)
    throw std::invalid_argument("ChainGeometry: L must be even and >= 2, got " +
                                std::to_string(L));
  if (N < 1) throw std::invalid_argument("ChainGeometry: N >= 1 required");
}

namespace {

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("parse_time: bad integer '" + std::string(s) +
                                "'");
  return v;
}

}  // namespace

HalfTime parse_time(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("parse_time: empty");
  if (s.starts_with("t2=")) return HalfTime{parse_u64(s.substr(3))};
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const std::uint64_t num = parse_u64(s.substr(0, slash));
    const std::uint64_t den = parse_u64(s.substr(slash + 1));
    if (den != 2)
      throw std::invalid_argument("parse_time: only halves supported, got '" +
                                  std::string(s) + "'");
    return HalfTime{num};
  }
  if (const auto point = s.find('.'); point != std::string_view::npos) {
    const std::uint64_t whole = parse_u64(s.substr(0, point));
    const std::string_view frac = s.substr(point + 1);
    if (frac == "0" || frac == "00") return HalfTime{2 * whole};
    if (frac == "5" || frac == "50") return HalfTime{2 * whole + 1};
    throw std::invalid_argument("parse_time: only .0/.5 supported, got '" +
                                std::string(s) + "'");
  }
  return HalfTime{2 * parse_u64(s)};
}

std::string format_time(HalfTime t) {
  if (t.is_integer()) return std::to_string(t.t2 / 2);
  return std::to_string(t.t2) + "/2";
}

PhaseVector::PhaseVector(ChainGeometry geo, BitVector bits)
    : geo_(geo), bits_(std::move(bits)) {
  if (bits_.size() != geo_.dim())
    throw std::invalid_argument("PhaseVector: got " +
                                std::to_string(bits_.size()) + " bits for 2NL = " +
                                std::to_string(geo_.dim()));
}

BitVector PhaseVector::site(std::size_t x) const {
  const std::size_t sb = geo_.site_bits();
  BitVector v(sb);
  for (std::size_t i = 0; i < sb; ++i)
    if (bits_.get(x * sb + i)) v.set(i, true);
  return v;
}

void PhaseVector::set_site(std::size_t x, const BitVector& v) {
  const std::size_t sb = geo_.site_bits();
  if (v.size() != sb)
    throw std::invalid_argument("set_site: wrong site width");
  for (std::size_t i = 0; i < sb; ++i) bits_.set(x * sb + i, v.get(i));
}

bool PhaseVector::site_is_zero(std::size_t x) const {
  const std::size_t sb = geo_.site_bits();
  for (std::size_t i = 0; i < sb; ++i)
    if (bits_.get(x * sb + i)) return false;
  return true;
}

std::vector<std::size_t> PhaseVector::support() const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < geo_.L; ++x)
    if (!site_is_zero(x)) out.push_back(x);
  return out;
}

PhaseVector local_seed(const ChainGeometry& geo, std::size_t x0) {
  if (x0 >= geo.L) throw std::invalid_argument("local_seed: site out of range");
  PhaseVector u(geo);
  u.bits().set(x0 * geo.site_bits(), true);  // q-bit of the first qubit
  return u;
}

PhaseVector full_support_seed(const ChainGeometry& geo) {
  PhaseVector u(geo);
  for (std::size_t q = 0; q < geo.N * geo.L; ++q) u.bits().set(2 * q, true);
  return u;
}

std::string pauli_string(const PhaseVector& u) {
  static constexpr char kLetter[4] = {'I', 'X', 'Z', 'Y'};
  const ChainGeometry& geo = u.geometry();
  std::string out;
  for (std::size_t x = 0; x < geo.L; ++x) {
    if (x) out += ' ';
    for (std::size_t q = 0; q < geo.N; ++q) {
      const std::size_t base = x * geo.site_bits() + 2 * q;
      const unsigned code = static_cast<unsigned>(u.bits().get(base)) |
                            (static_cast<unsigned>(u.bits().get(base + 1)) << 1);
      out += kLetter[code];
    }
  }
  return out;
}

PhaseVector parse_pauli_string(const ChainGeometry& geo, std::string_view s) {
  PhaseVector u(geo);
  std::size_t qubit = 0;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '|') continue;
    if (qubit >= geo.N * geo.L)
      throw std::invalid_argument("parse_pauli_string: too many letters");
    bool q = false, p = false;
    switch (ch) {
      case 'I': case 'i': break;
      case 'X': case 'x': q = true; break;
      case 'Z': case 'z': p = true; break;
      case 'Y': case 'y': q = p = true; break;
      default:
        throw std::invalid_argument(
            std::string("parse_pauli_string: bad letter '") + ch + "'");
    }
    u.bits().set(2 * qubit, q);
    u.bits().set(2 * qubit + 1, p);
    ++qubit;
  }
  if (qubit != geo.N * geo.L)
    throw std::invalid_argument("parse_pauli_string: expected " +
                                std::to_string(geo.N * geo.L) + " letters, got " +
                                std::to_string(qubit));
  return u;
}

DisorderRealization::DisorderRealization(ChainGeometry geo,
                                         std::vector<SymplecticMatrix> g)
    : geometry(geo), gates(std::move(g)) {
  if (gates.size() != geometry.L)
    throw std::invalid_argument("DisorderRealization: expected " +
                                std::to_string(geometry.L) + " gates, got " +
                                std::to_string(gates.size()));
  for (const auto& gate : gates)
    if (gate.dim() != 2 * geometry.site_bits())
      throw std::invalid_argument("DisorderRealization: gate size " +
                                  std::to_string(gate.dim()) + ", expected " +
                                  std::to_string(2 * geometry.site_bits()));
}

DisorderRealization DisorderRealization::all_identity(
    const ChainGeometry& geo) {
  std::vector<SymplecticMatrix> gates(
      geo.L, SymplecticMatrix::identity(geo.site_bits()));
  return DisorderRealization(geo, std::move(gates));
}

std::string DisorderRealization::to_json(std::uint64_t seed) const {
  nlohmann::json j;
  j["schema"] = 1;
  j["L"] = geometry.L;
  j["N"] = geometry.N;
  j["seed"] = seed;
  auto arr = nlohmann::json::array();
  for (const auto& g : gates) arr.push_back(g.matrix().to_text());
  j["gates"] = std::move(arr);
  return j.dump(2) + "\n";
}

DisorderRealization DisorderRealization::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  ChainGeometry geo(j.at("L").get<std::size_t>(), j.at("N").get<std::size_t>());
  std::vector<SymplecticMatrix> gates;
  for (const auto& g : j.at("gates"))
    gates.emplace_back(BitMatrix::from_text(g.get<std::string>()));
  return DisorderRealization(geo, std::move(gates));
}

DisorderRealization build_disorder(const ChainGeometry& geo, Rng& rng) {
  std::vector<SymplecticMatrix> gates;
  gates.reserve(geo.L);
  for (std::size_t x = 0; x < geo.L; ++x)
    gates.push_back(sample_uniform(geo.site_bits(), rng));
  return DisorderRealization(geo, std::move(gates));
}

BitMatrix half_step_matrix(const DisorderRealization& r, Parity parity) {
  const ChainGeometry& geo = r.geometry;
  const std::size_t sb = geo.site_bits();
  BitMatrix m(geo.dim(), geo.dim());
  const std::size_t first = parity == Parity::Even ? 0 : 1;
  for (std::size_t x = first; x < geo.L; x += 2) {
    const std::size_t left = x;
    const std::size_t right = (x + 1) % geo.L;
    const BitMatrix& g = r.gates[x].matrix();
    // Gate layout on (left, right): (A B; C D) with the output
    // (A u_l + B u_r) at `left` and (C u_l + D u_r) at `right`.
    m.paste(left * sb, left * sb, g.submatrix(0, 0, sb, sb));
    m.paste(left * sb, right * sb, g.submatrix(0, sb, sb, sb));
    m.paste(right * sb, left * sb, g.submatrix(sb, 0, sb, sb));
    m.paste(right * sb, right * sb, g.submatrix(sb, sb, sb, sb));
  }
  return m;
}

void apply_half_step(const DisorderRealization& r, Parity parity,
                     PhaseVector& u) {
  const ChainGeometry& geo = r.geometry;
  const std::size_t sb = geo.site_bits();
  const std::size_t first = parity == Parity::Even ? 0 : 1;
  if (2 * sb <= 64) {
    const unsigned w = static_cast<unsigned>(sb);
    for (std::size_t x = first; x < geo.L; x += 2) {
      const std::size_t left = x;
      const std::size_t right = (x + 1) % geo.L;
      const std::uint64_t in = u.bits().extract_word(left * sb, w) |
                               (u.bits().extract_word(right * sb, w) << w);
      const std::uint64_t out = r.gates[x].matrix().apply_word(in);
      u.bits().deposit_word(left * sb, w, out);
      u.bits().deposit_word(right * sb, w, out >> w);
    }
    return;
  }
  for (std::size_t x = first; x < geo.L; x += 2) {
    const std::size_t left = x;
    const std::size_t right = (x + 1) % geo.L;
    BitVector in(2 * sb);
    const BitVector ul = u.site(left);
    const BitVector ur = u.site(right);
    for (std::size_t i = 0; i < sb; ++i) {
      if (ul.get(i)) in.set(i, true);
      if (ur.get(i)) in.set(sb + i, true);
    }
    const BitVector out = r.gates[x].matrix().apply(in);
    BitVector ol(sb), orr(sb);
    for (std::size_t i = 0; i < sb; ++i) {
      if (out.get(i)) ol.set(i, true);
      if (out.get(sb + i)) orr.set(i, true);
    }
    u.set_site(left, ol);
    u.set_site(right, orr);
  }
}

PhaseVector evolve(const DisorderRealization& r, const PhaseVector& u0,
                   HalfTime t) {
  if (u0.geometry() != r.geometry)
    throw std::invalid_argument("evolve: geometry mismatch");
  PhaseVector u = u0;
  for (std::uint64_t step = 0; step < t.t2; ++step)
    apply_half_step(r, step % 2 == 0 ? Parity::Even : Parity::Odd, u);
  return u;
}

HalfTime scrambling_time(std::size_t L) {
  if (L < 2 || L % 2 != 0)
    throw std::invalid_argument("scrambling_time: L must be even");
  const std::size_t half = L / 2;
  // t = L/4 if L/2 even, else (L/2+1)/2; stored as t2 = 2t.
  return HalfTime{half % 2 == 0 ? half : half + 1};
}

std::vector<std::size_t> causal_window(std::size_t x0, HalfTime t,
                                       std::size_t L) {
  if (x0 >= L) throw std::invalid_argument("causal_window: site out of range");
  const std::uint64_t len = 2 * t.t2;  // window length 4t in sites
  std::vector<std::size_t> sites;
  if (t.t2 == 0) {
    sites.push_back(x0);
    return sites;
  }
  if (len >= L) {
    sites.resize(L);
    for (std::size_t x = 0; x < L; ++x) sites[x] = x;
    return sites;
  }
  // Even seeds: [x0 - 2t + 1, x0 + 2t]; odd seeds mirror to
  // [x0 - 2t, x0 + 2t - 1] because their even-layer gate sits on the left.
  const std::int64_t t2 = static_cast<std::int64_t>(t.t2);
  const std::int64_t lo = static_cast<std::int64_t>(x0) -
                          (x0 % 2 == 0 ? t2 - 1 : t2);
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(len); ++k) {
    const std::int64_t site = ((lo + k) % static_cast<std::int64_t>(L) +
                               static_cast<std::int64_t>(L)) %
                              static_cast<std::int64_t>(L);
    sites.push_back(static_cast<std::size_t>(site));
  }
  return sites;
}

BitVector project_sites(const PhaseVector& u,
                        const std::vector<std::size_t>& sites) {
  const std::size_t sb = u.geometry().site_bits();
  BitVector out(sb * sites.size());
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const BitVector sv = u.site(sites[k]);
    for (std::size_t i = 0; i < sb; ++i)
      if (sv.get(i)) out.set(k * sb + i, true);
  }
  return out;
}

FastChain::FastChain(const ChainGeometry& geo) : geo_(geo), gates_(geo.L) {
  if (2 * geo.site_bits() > 64 || geo.dim() > 128)
    throw std::invalid_argument(
        "FastChain: needs 4N <= 64 and 2NL <= 128; use the matrix path");
}

void FastChain::resample(Rng& rng) {
  for (std::size_t x = 0; x < geo_.L; ++x)
    sample_word_gate(geo_.site_bits(), rng, gates_[x]);
}

FastChain::State FastChain::state_of(const PhaseVector& u) const {
  if (u.geometry() != geo_)
    throw std::invalid_argument("FastChain: geometry mismatch");
  State s;
  auto w = u.bits().words();
  s.w[0] = w[0];
  if (w.size() > 1) s.w[1] = w[1];
  return s;
}

std::uint64_t FastChain::site(const State& s, std::size_t x) const {
  const std::size_t sb = geo_.site_bits();
  const std::size_t pos = x * sb;
  const std::size_t w = pos >> 6;
  const unsigned off = pos & 63;
  std::uint64_t out = s.w[w] >> off;
  if (off + sb > 64 && w == 0) out |= s.w[1] << (64 - off);
  return out & ((std::uint64_t{1} << sb) - 1);
}

std::uint64_t FastChain::zero_pattern(const State& s) const {
  std::uint64_t z = 0;
  for (std::size_t x = 0; x < geo_.L; ++x)
    if (site(s, x) == 0) z |= std::uint64_t{1} << x;
  return z;
}

std::uint64_t FastChain::project(const State& s,
                                 const std::vector<std::size_t>& sites) const {
  const std::size_t sb = geo_.site_bits();
  if (sb * sites.size() > 64)
    throw std::invalid_argument("FastChain::project: window wider than 64");
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < sites.size(); ++k)
    out |= site(s, sites[k]) << (k * sb);
  return out;
}

void FastChain::half_step(State& s, bool even) const {
  const std::size_t sb = geo_.site_bits();
  for (std::size_t x = even ? 0 : 1; x < geo_.L; x += 2) {
    const std::size_t right = (x + 1) % geo_.L;
    const std::uint64_t in = site(s, x) | (site(s, right) << sb);
    const std::uint64_t out = gates_[x].apply(in);
    // deposit both halves
    const std::uint64_t mask = (std::uint64_t{1} << sb) - 1;
    const auto put = [&](std::size_t sx, std::uint64_t val) {
      const std::size_t pos = sx * sb;
      const std::size_t w = pos >> 6;
      const unsigned off = pos & 63;
      s.w[w] = (s.w[w] & ~(mask << off)) | (val << off);
      if (off + sb > 64 && w == 0) {
        const unsigned spill = static_cast<unsigned>(off + sb - 64);
        const std::uint64_t hm = (std::uint64_t{1} << spill) - 1;
        s.w[1] = (s.w[1] & ~hm) | (val >> (64 - off));
      }
    };
    put(x, out & mask);
    put(right, (out >> sb) & mask);
  }
}

FastChain::State FastChain::evolve(State u, std::uint64_t t2) const {
  for (std::uint64_t step = 0; step < t2; ++step)
    half_step(u, step % 2 == 0);
  return u;
}

}  // namespace floq
