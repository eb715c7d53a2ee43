#include "floq/symplectic.hpp"

#include <cmath>
#include <stdexcept>

namespace floq {

SymplecticMatrix::SymplecticMatrix(BitMatrix m) : n_(0), m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() % 2 != 0)
    throw std::invalid_argument("SymplecticMatrix: need square even size, got " +
                                std::to_string(m_.rows()) + "x" +
                                std::to_string(m_.cols()));
  n_ = m_.rows() / 2;
  if (!is_symplectic(m_, SymplecticForm(n_)))
    throw std::invalid_argument("SymplecticMatrix: S^T J S != J");
}

SymplecticMatrix SymplecticMatrix::identity(std::size_t n) {
  return SymplecticMatrix(Unchecked{}, n, BitMatrix::identity(2 * n));
}

SymplecticMatrix SymplecticMatrix::operator*(const SymplecticMatrix& o) const {
  if (n_ != o.n_)
    throw std::invalid_argument("SymplecticMatrix product: size mismatch");
  return SymplecticMatrix(Unchecked{}, n_, m_ * o.m_);
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  const SymplecticForm form(n_);
  BitMatrix inv = form.matrix() * m_.transposed() * form.matrix();
  return SymplecticMatrix(Unchecked{}, n_, std::move(inv));
}

namespace {

std::uint64_t pair_swap_word(std::uint64_t w) {
  constexpr std::uint64_t kOdd = 0xaaaaaaaaaaaaaaaaULL;
  constexpr std::uint64_t kEven = 0x5555555555555555ULL;
  return ((w & kOdd) >> 1) | ((w & kEven) << 1);
}

bool parity_word(std::uint64_t w) { return std::popcount(w) & 1; }

// Homogeneous form constraints kept in fully reduced echelon form; each
// stored row holds no other row's pivot bit.
struct ReducedRows {
  std::array<std::uint64_t, 64> row{};
  std::array<std::uint8_t, 64> pivot{};
  int nrows = 0;
  std::uint64_t pivot_mask = 0;

  std::uint64_t reduce(std::uint64_t r) const {
    for (int i = 0; i < nrows; ++i)
      r ^= row[i] & (-static_cast<std::uint64_t>((r >> pivot[i]) & 1));
    return r;
  }
  void add(std::uint64_t r) {
    r = reduce(r);
    if (r == 0) throw std::logic_error("sample_uniform: dependent constraint");
    const int p = std::countr_zero(r);
    for (int i = 0; i < nrows; ++i)
      row[i] ^= r & (-static_cast<std::uint64_t>((row[i] >> p) & 1));
    row[nrows] = r;
    pivot[nrows] = static_cast<std::uint8_t>(p);
    ++nrows;
    pivot_mask |= std::uint64_t{1} << p;
  }
  // Pivot bits forced by the homogeneous constraints for a free-bit choice.
  std::uint64_t complete(std::uint64_t x) const {
    for (int i = 0; i < nrows; ++i)
      x |= static_cast<std::uint64_t>(std::popcount(row[i] & x) & 1)
           << pivot[i];
    return x;
  }
};

}  // namespace

void sample_symplectic_columns(std::size_t n, Rng& rng,
                               std::array<std::uint64_t, 64>& cols) {
  const unsigned d = static_cast<unsigned>(2 * n);
  if (d > 64)
    throw std::invalid_argument("sample_symplectic_columns: 2n <= 64");
  const std::uint64_t full =
      d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
  ReducedRows sys;

  for (std::size_t i = 0; i < n; ++i) {
    // u_i: uniform nonzero solution of the accumulated constraints.
    std::uint64_t x;
    do {
      x = rng.word() & full & ~sys.pivot_mask;
    } while (x == 0);
    const std::uint64_t u = sys.complete(x);

    // v_i: <u_i, v_i> = 1 on top of the same constraints. The new row is
    // reduced against sys, so its pivot can be filled before sys's pivots.
    const std::uint64_t r = sys.reduce(pair_swap_word(u));
    const int p = std::countr_zero(r);
    std::uint64_t y =
        rng.word() & full & ~sys.pivot_mask & ~(std::uint64_t{1} << p);
    if (parity_word(r & y) == 0) y |= std::uint64_t{1} << p;
    const std::uint64_t v = sys.complete(y);

    cols[2 * i] = u;
    cols[2 * i + 1] = v;
    sys.add(pair_swap_word(u));
    sys.add(pair_swap_word(v));
  }

  // Validate S^T J S = J on the column words.
  for (unsigned i = 0; i < d; ++i) {
    const std::uint64_t ji = pair_swap_word(cols[i]);
    for (unsigned j = i; j < d; ++j) {
      const bool want = (i >> 1 == j >> 1) && i != j;
      if (parity_word(ji & cols[j]) != want)
        throw std::logic_error("sample_uniform: constraint solve failed");
    }
  }
}

void sample_word_gate(std::size_t n, Rng& rng, WordGate& g) {
  std::array<std::uint64_t, 64> cols{};
  sample_symplectic_columns(n, rng, cols);
  const unsigned d = static_cast<unsigned>(2 * n);
  g.dim = d;
  for (unsigned r = 0; r < d; ++r) {
    std::uint64_t row = 0;
    for (unsigned c = 0; c < d; ++c) row |= ((cols[c] >> r) & 1) << c;
    g.rows[r] = row;
  }
}

SymplecticMatrix sample_uniform(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_uniform: n >= 1 required");
  const std::size_t d = 2 * n;
  if (d <= 64) {
    WordGate g;
    sample_word_gate(n, rng, g);
    BitMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        if ((g.rows[r] >> c) & 1) m.set(r, c, true);
    return SymplecticMatrix(SymplecticMatrix::Unchecked{}, n, std::move(m));
  }

  const SymplecticForm form(n);
  std::vector<BitVector> cols;
  cols.reserve(d);
  // Constraint row for a chosen column c is Jc: <c, x> = (Jc).x.
  std::vector<BitVector> rows;
  rows.reserve(d);

  for (std::size_t i = 0; i < n; ++i) {
    // u_i: orthogonal to all previous columns, nonzero.
    std::vector<bool> rhs_u(rows.size(), false);
    BitVector u = solve_uniform(rows, rhs_u, d, /*exclude_zero=*/true, rng);

    // v_i: orthogonal to all previous columns, <u_i, v_i> = 1.
    std::vector<BitVector> rows_v = rows;
    rows_v.push_back(form.apply(u));
    std::vector<bool> rhs_v(rows_v.size(), false);
    rhs_v.back() = true;
    BitVector v = solve_uniform(rows_v, rhs_v, d, /*exclude_zero=*/false, rng);

    rows.push_back(form.apply(u));
    rows.push_back(form.apply(v));
    cols.push_back(std::move(u));
    cols.push_back(std::move(v));
  }
  return SymplecticMatrix(BitMatrix::from_cols(cols));
}

ExactCount group_order(std::size_t n) {
  if (n == 0) throw std::invalid_argument("group_order: n >= 1 required");
  ExactCount order = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    order *= (ExactCount(1) << (2 * i)) - 1;
    order <<= 2 * i - 1;
  }
  return order;
}

ExactCount count_subspaces(std::size_t n, std::size_t k) {
  if (k > n)
    throw std::invalid_argument("count_subspaces: k = " + std::to_string(k) +
                                " exceeds n = " + std::to_string(n));
  ExactCount num = 1, den = 1;
  for (std::size_t i = 0; i < k; ++i) {
    num *= (ExactCount(1) << n) - (ExactCount(1) << i);
    den *= (ExactCount(1) << k) - (ExactCount(1) << i);
  }
  ExactCount q, r;
  boost::multiprecision::divide_qr(num, den, q, r);
  if (r != 0) throw std::logic_error("count_subspaces: non-integral result");
  return q;
}

bool group_order_in_bound_window(std::size_t n, long double slack) {
  const ExactCount order = group_order(n);
  const ExactCount scale = ExactCount(1) << (2 * n * n + n);
  const long double ratio =
      order.convert_to<long double>() / scale.convert_to<long double>();
  long double a = 0.0L, b = 0.0L;
  for (std::size_t i = 1; i <= n; ++i) {
    const long double p = std::pow(2.0L, -2.0L * static_cast<long double>(i));
    a += -p / (1.0L - p);
    b += -p;
  }
  a = std::exp(a);
  b = std::exp(b);
  return ratio >= a - slack && ratio <= b + slack && a > 0.64L && b < 0.78L;
}

BlockView blocks(const SymplecticMatrix& s) {
  const std::size_t d = s.dim();
  if (d % 4 != 0)
    throw std::invalid_argument(
        "blocks: size " + std::to_string(d) +
        " has no even site split (need dim divisible by 4)");
  const std::size_t h = d / 2;
  const BitMatrix& m = s.matrix();
  return BlockView{m.submatrix(0, 0, h, h), m.submatrix(0, h, h, h),
                   m.submatrix(h, 0, h, h), m.submatrix(h, h, h, h)};
}

BitMatrix assemble_blocks(const BlockView& v) {
  const std::size_t h = v.a.rows();
  BitMatrix m(2 * h, 2 * h);
  m.paste(0, 0, v.a);
  m.paste(0, h, v.b);
  m.paste(h, 0, v.c);
  m.paste(h, h, v.d);
  return m;
}

const char* block_name(Block b) {
  switch (b) {
    case Block::A: return "A";
    case Block::B: return "B";
    case Block::C: return "C";
    case Block::D: return "D";
  }
  return "?";
}

BitMatrix pick_block(const BlockView& v, Block which) {
  switch (which) {
    case Block::A: return v.a;
    case Block::B: return v.b;
    case Block::C: return v.c;
    case Block::D: return v.d;
  }
  throw std::invalid_argument("pick_block: bad block");
}

namespace {

double tail_freq(const std::map<std::size_t, std::uint64_t>& counts,
                 std::uint64_t samples, std::size_t max_rank) {
  std::uint64_t c = 0;
  for (const auto& [rank, cnt] : counts)
    if (rank <= max_rank) c += cnt;
  return samples ? static_cast<double>(c) / static_cast<double>(samples) : 0.0;
}

}  // namespace

double RankHistogram::tail_frequency(std::size_t max_rank) const {
  return tail_freq(counts, samples, max_rank);
}

RankHistogram block_rank_histogram(std::size_t n, Block which,
                                   const McConfig& cfg) {
  if (cfg.samples == 0)
    throw std::invalid_argument("block_rank_histogram: samples >= 1");
  using Acc = std::map<std::size_t, std::uint64_t>;
  Acc counts = mc_run(
      cfg, Acc{},
      [&](Rng& rng, Acc& acc) {
        const SymplecticMatrix s = sample_uniform(2 * n, rng);
        ++acc[pick_block(blocks(s), which).rank()];
      },
      [](Acc& a, const Acc& b) {
        for (const auto& [k, v] : b) a[k] += v;
      });
  RankHistogram h;
  h.n = n;
  h.which = which;
  h.samples = cfg.samples;
  h.seed = cfg.seed;
  h.streams = cfg.streams;
  h.counts = std::move(counts);
  return h;
}

double single_rank_tail_bound(std::size_t n, std::size_t k) {
  const double cap = std::min(std::pow(2.0, static_cast<double>(k)), 4.0);
  const double denom =
      std::pow(1.0 - std::pow(2.0, -2.0 * static_cast<double>(n)),
               static_cast<double>(k));
  return cap * std::pow(2.0, -static_cast<double>(k) * static_cast<double>(k)) /
         denom;
}

double ProductRankResult::tail_frequency(std::size_t max_rank) const {
  return tail_freq(counts, samples, max_rank);
}

double ProductRankResult::kernel_hit_frequency() const {
  return samples ? static_cast<double>(kernel_hits) /
                       static_cast<double>(samples)
                 : 0.0;
}

ProductRankResult product_rank_experiment(std::size_t n, std::size_t r,
                                          Block which, const McConfig& cfg) {
  if (r == 0) throw std::invalid_argument("product_rank_experiment: r >= 1");
  if (cfg.samples == 0)
    throw std::invalid_argument("product_rank_experiment: samples >= 1");
  struct Acc {
    std::map<std::size_t, std::uint64_t> counts;
    std::uint64_t kernel_hits = 0;
  };
  Acc acc = mc_run(
      cfg, Acc{},
      [&](Rng& rng, Acc& a) {
        BitMatrix prod = pick_block(blocks(sample_uniform(2 * n, rng)), which);
        for (std::size_t i = 1; i < r; ++i)
          prod = pick_block(blocks(sample_uniform(2 * n, rng)), which) * prod;
        ++a.counts[prod.rank()];
        const BitVector u = BitVector::random(2 * n, rng);
        if (prod.apply(u).is_zero()) ++a.kernel_hits;
      },
      [](Acc& a, const Acc& b) {
        for (const auto& [k, v] : b.counts) a.counts[k] += v;
        a.kernel_hits += b.kernel_hits;
      });
  ProductRankResult res;
  res.n = n;
  res.r = r;
  res.which = which;
  res.samples = cfg.samples;
  res.seed = cfg.seed;
  res.streams = cfg.streams;
  res.counts = std::move(acc.counts);
  res.kernel_hits = acc.kernel_hits;
  return res;
}

double product_rank_tail_bound(std::size_t n, std::size_t r, std::size_t k) {
  const double dk = static_cast<double>(k);
  double binom = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    binom *= static_cast<double>(k + r - i) / static_cast<double>(i);
  const double denom = std::pow(
      1.0 - std::pow(2.0, -2.0 * static_cast<double>(n)), dk);
  return std::pow(2.0, dk) / denom * binom * std::pow(2.0, -0.5 * dk * dk);
}

double kernel_hit_bound(std::size_t n, std::size_t r) {
  return 8.0 * static_cast<double>(r) *
         std::pow(2.0, -static_cast<double>(n));
}

double binomial_sigma(double p, std::uint64_t samples) {
  if (samples == 0) return 0.0;
  const double q = std::min(std::max(p, 0.0), 1.0);
  return std::sqrt(q * (1.0 - q) / static_cast<double>(samples));
}

}  // namespace floq
