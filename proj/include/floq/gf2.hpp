#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "floq/rng.hpp"

namespace floq {

// Dense bit-packed linear algebra over GF(2). Addition is XOR, bit order is
// little-endian within a 64-bit word, padding bits past the logical length
// are kept zero.

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t length)
      : length_(length), words_((length + 63) / 64, 0) {}

  static BitVector from_string01(std::string_view s);
  static BitVector random(std::size_t length, Rng& rng);
  static BitVector random_nonzero(std::size_t length, Rng& rng);

  std::size_t size() const { return length_; }
  bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= m;
    else
      words_[i >> 6] &= ~m;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  bool is_zero() const;
  std::size_t popcount() const;

  BitVector& operator^=(const BitVector& o);
  friend BitVector operator^(BitVector a, const BitVector& b) {
    a ^= b;
    return a;
  }
  bool operator==(const BitVector&) const = default;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }
  std::size_t word_count() const { return words_.size(); }

  // len <= 64 bits starting at pos, as a word (low bits).
  std::uint64_t extract_word(std::size_t pos, unsigned len) const;
  void deposit_word(std::size_t pos, unsigned len, std::uint64_t value);

  std::string to_string01() const;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

// Parity of the AND of two equal-length vectors.
bool dot(const BitVector& a, const BitVector& b);

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), wpr_((cols + 63) / 64),
        data_(rows * wpr_, 0) {}

  static BitMatrix identity(std::size_t n);
  static BitMatrix from_text(std::string_view text);
  static BitMatrix random(std::size_t rows, std::size_t cols, Rng& rng);
  static BitMatrix from_rows(const std::vector<BitVector>& rows);
  static BitMatrix from_cols(const std::vector<BitVector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (c & 63);
    if (v)
      data_[r * wpr_ + (c >> 6)] |= m;
    else
      data_[r * wpr_ + (c >> 6)] &= ~m;
  }

  std::span<const std::uint64_t> row_words(std::size_t r) const {
    return {data_.data() + r * wpr_, wpr_};
  }
  BitVector row(std::size_t r) const;
  BitVector col(std::size_t c) const;

  bool is_zero() const;
  bool operator==(const BitMatrix&) const = default;

  BitMatrix operator*(const BitMatrix& o) const;
  BitVector apply(const BitVector& v) const;
  // M v for matrices with at most 64 columns and rows, in word form.
  std::uint64_t apply_word(std::uint64_t v) const;
  BitMatrix operator+(const BitMatrix& o) const;  // XOR
  BitMatrix transposed() const;
  BitMatrix pow(std::uint64_t e) const;

  std::size_t rank() const;
  std::vector<BitVector> kernel_basis() const;
  // Inverse of a square matrix; throws std::invalid_argument if singular.
  BitMatrix inverse() const;

  BitMatrix submatrix(std::size_t r0, std::size_t c0, std::size_t rows,
                      std::size_t cols) const;
  void paste(std::size_t r0, std::size_t c0, const BitMatrix& m);

  // Text format: first line "rows cols", then one 0/1 string per row.
  std::string to_text() const;

  // In-place forward elimination with left-to-right column pivot search,
  // ties broken by lowest row index. Returns pivot columns; if `reduce`
  // also clears entries above pivots (RREF).
  std::vector<std::size_t> eliminate(bool reduce);

 private:
  void xor_row_into(std::size_t src, std::size_t dst);
  void swap_rows(std::size_t a, std::size_t b);

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t wpr_ = 0;
  std::vector<std::uint64_t> data_;
};

// The symplectic form on 2n bits: J is block-diagonal with 2x2 antidiagonal
// blocks, pairing bits (2i, 2i+1).
class SymplecticForm {
 public:
  explicit SymplecticForm(std::size_t n) : n_(n) {}

  std::size_t n() const { return n_; }
  std::size_t dim() const { return 2 * n_; }

  BitMatrix matrix() const;
  // J u: swaps the two bits of every pair.
  BitVector apply(const BitVector& u) const;
  // <u,v> = u^T J v mod 2.
  bool form(const BitVector& u, const BitVector& v) const;

 private:
  std::size_t n_;
};

// True iff S^T J S = J. S must be square of size 2n.
bool is_symplectic(const BitMatrix& s, const SymplecticForm& form);

// Solves M x = b over GF(2) and returns a sample drawn uniformly from the
// solution set (optionally excluding the zero vector, which is only a
// solution when b = 0). Throws std::invalid_argument if no solution exists
// or if the solution set is {0} but zero is excluded.
BitVector solve_uniform(const std::vector<BitVector>& constraint_rows,
                        const std::vector<bool>& rhs, std::size_t dim,
                        bool exclude_zero, Rng& rng);

}  // namespace floq
