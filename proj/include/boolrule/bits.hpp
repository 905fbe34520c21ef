// Copyright 2026 The boolrule Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BOOLRULE_BITS_HPP_
#define BOOLRULE_BITS_HPP_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace boolrule {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

inline std::size_t words_for(std::size_t bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

// Packed vector of bits, 64 rows per word. Bits past size() in the last word
// are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false);

  static BitVector from_bools(const std::vector<bool>& values);
  static BitVector from_string(const std::string& zeros_and_ones);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool get(std::size_t i) const {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
  }
  void set(std::size_t i, bool value = true) {
    const Word mask = Word{1} << (i % kWordBits);
    if (value) {
      words_[i / kWordBits] |= mask;
    } else {
      words_[i / kWordBits] &= ~mask;
    }
  }

  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  std::size_t count() const;

  BitVector& operator&=(const BitVector& other);
  BitVector& operator|=(const BitVector& other);
  BitVector& operator^=(const BitVector& other);
  BitVector operator~() const;
  void flip();

  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
  friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend bool operator==(const BitVector&, const BitVector&) = default;

  // Indices of set bits, ascending.
  std::vector<std::size_t> ones() const;
  BitVector select(std::span<const std::size_t> rows) const;
  std::string to_string() const;

  // Mask of valid bits in the last word.
  Word tail_mask() const;
  void clear_tail();

 private:
  std::size_t size_ = 0;
  std::vector<Word> words_;
};

// popcount(a & b) without materialising the intersection.
std::size_t count_and(const BitVector& a, const BitVector& b);

// Binary feature matrix stored column-major: each feature column is one
// packed BitVector over the rows, so evaluating a literal is a column lookup.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  // rows[r][c]
  static BitMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }

  const BitVector& column(std::size_t c) const { return columns_[c]; }
  BitVector& column(std::size_t c) { return columns_[c]; }

  bool get(std::size_t r, std::size_t c) const { return columns_[c].get(r); }
  void set(std::size_t r, std::size_t c, bool v = true) {
    columns_[c].set(r, v);
  }

  BitMatrix select_rows(std::span<const std::size_t> rows) const;
  BitMatrix select_rows(const BitVector& mask) const;
  BitMatrix select_cols(std::span<const std::size_t> cols) const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::vector<BitVector> columns_;
};

// Bit-sliced per-row counter: plane b holds bit b of each row's count.
class RowCounter {
 public:
  RowCounter(std::size_t rows, std::size_t max_count);

  void add(const BitVector& v);
  // Fills `ge` with count >= k and `eq` with count == k, row-wise.
  void compare(std::size_t k, BitVector& ge, BitVector& eq) const;

 private:
  std::size_t rows_;
  std::vector<BitVector> planes_;
};

}  // namespace boolrule

#endif  // BOOLRULE_BITS_HPP_
