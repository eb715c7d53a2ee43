#include "floq/gf2.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace floq {

namespace {

std::uint64_t tail_mask(std::size_t length) {
  const unsigned rem = length & 63;
  return rem == 0 ? ~std::uint64_t{0} : ((std::uint64_t{1} << rem) - 1);
}

}  // namespace

BitVector BitVector::from_string01(std::string_view s) {
  BitVector v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      v.set(i, true);
    else if (s[i] != '0')
      throw std::invalid_argument("BitVector: expected 0/1 string");
  }
  return v;
}

BitVector BitVector::random(std::size_t length, Rng& rng) {
  BitVector v(length);
  if (length == 0) return v;
  for (std::size_t w = 0; w < v.words_.size(); ++w) v.words_[w] = rng.word();
  v.words_.back() &= tail_mask(length);
  return v;
}

BitVector BitVector::random_nonzero(std::size_t length, Rng& rng) {
  if (length == 0)
    throw std::invalid_argument("random_nonzero: empty vector space");
  BitVector v;
  do {
    v = random(length, rng);
  } while (v.is_zero());
  return v;
}

bool BitVector::is_zero() const {
  for (std::uint64_t w : words_)
    if (w) return false;
  return true;
}

std::size_t BitVector::popcount() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += std::popcount(w);
  return c;
}

BitVector& BitVector::operator^=(const BitVector& o) {
  if (length_ != o.length_)
    throw std::invalid_argument("BitVector xor: length " +
                                std::to_string(length_) + " vs " +
                                std::to_string(o.length_));
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
  return *this;
}

std::uint64_t BitVector::extract_word(std::size_t pos, unsigned len) const {
  const std::size_t w = pos >> 6;
  const unsigned off = pos & 63;
  std::uint64_t out = words_[w] >> off;
  if (off + len > 64 && w + 1 < words_.size())
    out |= words_[w + 1] << (64 - off);
  return len >= 64 ? out : out & ((std::uint64_t{1} << len) - 1);
}

void BitVector::deposit_word(std::size_t pos, unsigned len,
                             std::uint64_t value) {
  const std::uint64_t mask =
      len >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << len) - 1;
  value &= mask;
  const std::size_t w = pos >> 6;
  const unsigned off = pos & 63;
  words_[w] = (words_[w] & ~(mask << off)) | (value << off);
  if (off + len > 64 && w + 1 < words_.size()) {
    const unsigned spill = off + len - 64;
    const std::uint64_t hi_mask = (std::uint64_t{1} << spill) - 1;
    words_[w + 1] =
        (words_[w + 1] & ~hi_mask) | (value >> (64 - off));
  }
}

std::string BitVector::to_string01() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

bool dot(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: length " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  std::uint64_t acc = 0;
  auto aw = a.words();
  auto bw = b.words();
  for (std::size_t w = 0; w < aw.size(); ++w) acc ^= aw[w] & bw[w];
  return std::popcount(acc) & 1;
}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols))
    throw std::invalid_argument("BitMatrix::from_text: missing header");
  BitMatrix m(rows, cols);
  std::string line;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!(in >> line) || line.size() != cols)
      throw std::invalid_argument("BitMatrix::from_text: bad row " +
                                  std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c) {
      if (line[c] == '1')
        m.set(r, c, true);
      else if (line[c] != '0')
        throw std::invalid_argument("BitMatrix::from_text: bad char");
    }
  }
  return m;
}

BitMatrix BitMatrix::random(std::size_t rows, std::size_t cols, Rng& rng) {
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto* w = m.data_.data() + r * m.wpr_;
    for (std::size_t k = 0; k < m.wpr_; ++k) w[k] = rng.word();
    if (cols) w[m.wpr_ - 1] &= tail_mask(cols);
  }
  return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVector>& rows) {
  if (rows.empty()) return BitMatrix(0, 0);
  BitMatrix m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_)
      throw std::invalid_argument("from_rows: ragged rows");
    std::copy(rows[r].words().begin(), rows[r].words().end(),
              m.data_.begin() + r * m.wpr_);
  }
  return m;
}

BitMatrix BitMatrix::from_cols(const std::vector<BitVector>& cols) {
  if (cols.empty()) return BitMatrix(0, 0);
  BitMatrix m(cols[0].size(), cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != m.rows_)
      throw std::invalid_argument("from_cols: ragged columns");
    for (std::size_t r = 0; r < m.rows_; ++r)
      if (cols[c].get(r)) m.set(r, c, true);
  }
  return m;
}

BitVector BitMatrix::row(std::size_t r) const {
  BitVector v(cols_);
  std::copy(data_.begin() + r * wpr_, data_.begin() + (r + 1) * wpr_,
            v.words().begin());
  return v;
}

BitVector BitMatrix::col(std::size_t c) const {
  BitVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    if (get(r, c)) v.set(r, true);
  return v;
}

bool BitMatrix::is_zero() const {
  for (std::uint64_t w : data_)
    if (w) return false;
  return true;
}

BitMatrix BitMatrix::operator*(const BitMatrix& o) const {
  if (cols_ != o.rows_)
    throw std::invalid_argument(
        "mat_mul: dimension mismatch " + std::to_string(rows_) + "x" +
        std::to_string(cols_) + " * " + std::to_string(o.rows_) + "x" +
        std::to_string(o.cols_));
  BitMatrix out(rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t* dst = out.data_.data() + r * out.wpr_;
    for (std::size_t k = 0; k < cols_; ++k) {
      if (get(r, k)) {
        const std::uint64_t* src = o.data_.data() + k * o.wpr_;
        for (std::size_t w = 0; w < o.wpr_; ++w) dst[w] ^= src[w];
      }
    }
  }
  return out;
}

BitVector BitMatrix::apply(const BitVector& v) const {
  if (v.size() != cols_)
    throw std::invalid_argument("apply: matrix " + std::to_string(rows_) +
                                "x" + std::to_string(cols_) + " to vector " +
                                std::to_string(v.size()));
  BitVector out(rows_);
  auto vw = v.words();
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    const std::uint64_t* rw = data_.data() + r * wpr_;
    for (std::size_t w = 0; w < wpr_; ++w) acc ^= rw[w] & vw[w];
    if (std::popcount(acc) & 1) out.set(r, true);
  }
  return out;
}

std::uint64_t BitMatrix::apply_word(std::uint64_t v) const {
  std::uint64_t out = 0;
  for (std::size_t r = 0; r < rows_; ++r)
    if (std::popcount(data_[r * wpr_] & v) & 1) out |= std::uint64_t{1} << r;
  return out;
}

BitMatrix BitMatrix::operator+(const BitMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw std::invalid_argument("mat add: dimension mismatch");
  BitMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] ^= o.data_[i];
  return out;
}

BitMatrix BitMatrix::transposed() const {
  BitMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (get(r, c)) out.set(c, r, true);
  return out;
}

BitMatrix BitMatrix::pow(std::uint64_t e) const {
  if (rows_ != cols_) throw std::invalid_argument("pow: non-square matrix");
  BitMatrix acc = identity(rows_);
  BitMatrix base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

void BitMatrix::xor_row_into(std::size_t src, std::size_t dst) {
  std::uint64_t* d = data_.data() + dst * wpr_;
  const std::uint64_t* s = data_.data() + src * wpr_;
  for (std::size_t w = 0; w < wpr_; ++w) d[w] ^= s[w];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  std::swap_ranges(data_.begin() + a * wpr_, data_.begin() + (a + 1) * wpr_,
                   data_.begin() + b * wpr_);
}

std::vector<std::size_t> BitMatrix::eliminate(bool reduce) {
  std::vector<std::size_t> pivot_cols;
  std::size_t pr = 0;
  for (std::size_t c = 0; c < cols_ && pr < rows_; ++c) {
    std::size_t sel = rows_;
    for (std::size_t r = pr; r < rows_; ++r) {
      if (get(r, c)) {
        sel = r;
        break;
      }
    }
    if (sel == rows_) continue;
    swap_rows(sel, pr);
    for (std::size_t r = pr + 1; r < rows_; ++r)
      if (get(r, c)) xor_row_into(pr, r);
    if (reduce) {
      for (std::size_t r = 0; r < pr; ++r)
        if (get(r, c)) xor_row_into(pr, r);
    }
    pivot_cols.push_back(c);
    ++pr;
  }
  return pivot_cols;
}

std::size_t BitMatrix::rank() const {
  BitMatrix work = *this;
  return work.eliminate(false).size();
}

std::vector<BitVector> BitMatrix::kernel_basis() const {
  BitMatrix work = *this;
  const std::vector<std::size_t> pivots = work.eliminate(true);
  std::vector<bool> is_pivot(cols_, false);
  for (std::size_t c : pivots) is_pivot[c] = true;

  std::vector<BitVector> basis;
  for (std::size_t free_c = 0; free_c < cols_; ++free_c) {
    if (is_pivot[free_c]) continue;
    BitVector v(cols_);
    v.set(free_c, true);
    for (std::size_t p = 0; p < pivots.size(); ++p)
      if (work.get(p, free_c)) v.set(pivots[p], true);
    basis.push_back(std::move(v));
  }
  return basis;
}

BitMatrix BitMatrix::inverse() const {
  if (rows_ != cols_)
    throw std::invalid_argument("inverse: non-square matrix");
  // Gauss-Jordan on [M | I].
  BitMatrix work(rows_, 2 * cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c)
      if (get(r, c)) work.set(r, c, true);
    work.set(r, cols_ + r, true);
  }
  const auto pivots = work.eliminate(true);
  // A pivot in the augmented block means the left block lost rank.
  if (pivots.size() != rows_ || (!pivots.empty() && pivots.back() >= cols_))
    throw std::invalid_argument("inverse: singular matrix");
  return work.submatrix(0, cols_, rows_, cols_);
}

BitMatrix BitMatrix::submatrix(std::size_t r0, std::size_t c0,
                               std::size_t rows, std::size_t cols) const {
  if (r0 + rows > rows_ || c0 + cols > cols_)
    throw std::invalid_argument("submatrix: out of range");
  BitMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (get(r0 + r, c0 + c)) out.set(r, c, true);
  return out;
}

void BitMatrix::paste(std::size_t r0, std::size_t c0, const BitMatrix& m) {
  if (r0 + m.rows() > rows_ || c0 + m.cols() > cols_)
    throw std::invalid_argument("paste: out of range");
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      set(r0 + r, c0 + c, m.get(r, c));
}

std::string BitMatrix::to_text() const {
  std::string out = std::to_string(rows_) + " " + std::to_string(cols_) + "\n";
  for (std::size_t r = 0; r < rows_; ++r) {
    out += row(r).to_string01();
    out += '\n';
  }
  return out;
}

BitMatrix SymplecticForm::matrix() const {
  BitMatrix j(dim(), dim());
  for (std::size_t i = 0; i < n_; ++i) {
    j.set(2 * i, 2 * i + 1, true);
    j.set(2 * i + 1, 2 * i, true);
  }
  return j;
}

BitVector SymplecticForm::apply(const BitVector& u) const {
  if (u.size() != dim())
    throw std::invalid_argument("SymplecticForm: vector length " +
                                std::to_string(u.size()) + ", expected " +
                                std::to_string(dim()));
  // Pairs never straddle a word boundary, so swap bit pairs per word.
  constexpr std::uint64_t kOdd = 0xaaaaaaaaaaaaaaaaULL;
  constexpr std::uint64_t kEven = 0x5555555555555555ULL;
  BitVector out = u;
  for (auto& w : out.words()) w = ((w & kOdd) >> 1) | ((w & kEven) << 1);
  return out;
}

bool SymplecticForm::form(const BitVector& u, const BitVector& v) const {
  if (u.size() != dim() || v.size() != dim())
    throw std::invalid_argument(
        "SymplecticForm: lengths " + std::to_string(u.size()) + ", " +
        std::to_string(v.size()) + " do not match 2n = " +
        std::to_string(dim()));
  return dot(u, apply(v));
}

bool is_symplectic(const BitMatrix& s, const SymplecticForm& form) {
  if (s.rows() != s.cols())
    throw std::invalid_argument("is_symplectic: non-square " +
                                std::to_string(s.rows()) + "x" +
                                std::to_string(s.cols()));
  if (s.rows() != form.dim())
    throw std::invalid_argument("is_symplectic: size " +
                                std::to_string(s.rows()) + ", form expects " +
                                std::to_string(form.dim()));
  const std::size_t d = form.dim();
  std::vector<BitVector> cols(d);
  for (std::size_t c = 0; c < d; ++c) cols[c] = s.col(c);
  std::vector<BitVector> jcols(d);
  for (std::size_t c = 0; c < d; ++c) jcols[c] = form.apply(cols[c]);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      // J_{ij} = 1 iff i,j are the two halves of the same pair.
      const bool want = (i >> 1 == j >> 1) && (i != j);
      if (dot(cols[i], jcols[j]) != want) return false;
    }
  }
  return true;
}

BitVector solve_uniform(const std::vector<BitVector>& constraint_rows,
                        const std::vector<bool>& rhs, std::size_t dim,
                        bool exclude_zero, Rng& rng) {
  if (constraint_rows.size() != rhs.size())
    throw std::invalid_argument("solve_uniform: rows/rhs size mismatch");
  // Augmented system [M | b], RREF.
  BitMatrix aug(constraint_rows.size(), dim + 1);
  for (std::size_t r = 0; r < constraint_rows.size(); ++r) {
    if (constraint_rows[r].size() != dim)
      throw std::invalid_argument("solve_uniform: constraint length");
    for (std::size_t c = 0; c < dim; ++c)
      if (constraint_rows[r].get(c)) aug.set(r, c, true);
    if (rhs[r]) aug.set(r, dim, true);
  }
  const auto pivots = aug.eliminate(true);
  if (!pivots.empty() && pivots.back() == dim)
    throw std::invalid_argument("solve_uniform: inconsistent system");

  std::vector<bool> is_pivot(dim, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < dim; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);

  BitVector particular(dim);
  for (std::size_t p = 0; p < pivots.size(); ++p)
    if (aug.get(p, dim)) particular.set(pivots[p], true);

  const bool homogeneous = particular.is_zero();
  if (exclude_zero && homogeneous && free_cols.empty())
    throw std::invalid_argument("solve_uniform: only the zero solution");

  // Uniform over the solution set: particular + random combination of the
  // kernel basis. Each coefficient pattern gives a distinct solution, so a
  // nonzero pattern is exactly what excludes the zero vector when needed.
  BitVector coeffs;
  do {
    coeffs = BitVector::random(free_cols.size(), rng);
  } while (exclude_zero && homogeneous && coeffs.is_zero());

  BitVector x = particular;
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    if (!coeffs.get(k)) continue;
    x.flip(free_cols[k]);
    for (std::size_t p = 0; p < pivots.size(); ++p)
      if (aug.get(p, free_cols[k])) x.flip(pivots[p]);
  }
  if (exclude_zero && x.is_zero())
    throw std::logic_error("solve_uniform: produced excluded zero");
  return x;
}

}  // namespace floq
