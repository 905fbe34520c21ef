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

#include "boolrule/bits.hpp"

#include <cassert>

#include "boolrule/error.hpp"

namespace boolrule {

BitVector::BitVector(std::size_t size, bool value)
    : size_(size), words_(words_for(size), value ? ~Word{0} : Word{0}) {
  clear_tail();
}

BitVector BitVector::from_bools(const std::vector<bool>& values) {
  BitVector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i]) v.set(i);
  }
  return v;
}

BitVector BitVector::from_string(const std::string& zeros_and_ones) {
  BitVector v(zeros_and_ones.size());
  for (std::size_t i = 0; i < zeros_and_ones.size(); ++i) {
    if (zeros_and_ones[i] == '1') {
      v.set(i);
    } else if (zeros_and_ones[i] != '0') {
      throw UsageError("bit string may only contain 0 and 1");
    }
  }
  return v;
}

Word BitVector::tail_mask() const {
  const std::size_t r = size_ % kWordBits;
  return r == 0 ? ~Word{0} : ((Word{1} << r) - 1);
}

void BitVector::clear_tail() {
  if (!words_.empty()) words_.back() &= tail_mask();
}

std::size_t BitVector::count() const {
  std::size_t total = 0;
  for (Word w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

BitVector& BitVector::operator&=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  assert(size_ == other.size_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

void BitVector::flip() {
  for (Word& w : words_) w = ~w;
  clear_tail();
}

BitVector BitVector::operator~() const {
  BitVector out = *this;
  out.flip();
  return out;
}

std::vector<std::size_t> BitVector::ones() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    Word bits = words_[w];
    while (bits != 0) {
      out.push_back(w * kWordBits +
                    static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

BitVector BitVector::select(std::span<const std::size_t> rows) const {
  BitVector out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (get(rows[i])) out.set(i);
  }
  return out;
}

std::string BitVector::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

std::size_t count_and(const BitVector& a, const BitVector& b) {
  assert(a.size() == b.size());
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t total = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    total += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  }
  return total;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), columns_(cols, BitVector(rows)) {}

BitMatrix BitMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  BitMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DataError("ragged rows in bit matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      if (rows[r][c] != 0) m.set(r, c);
    }
  }
  return m;
}

BitMatrix BitMatrix::select_rows(std::span<const std::size_t> rows) const {
  BitMatrix out;
  out.rows_ = rows.size();
  out.columns_.reserve(columns_.size());
  for (const BitVector& col : columns_) out.columns_.push_back(col.select(rows));
  return out;
}

BitMatrix BitMatrix::select_rows(const BitVector& mask) const {
  const auto idx = mask.ones();
  return select_rows(idx);
}

BitMatrix BitMatrix::select_cols(std::span<const std::size_t> cols) const {
  BitMatrix out;
  out.rows_ = rows_;
  out.columns_.reserve(cols.size());
  for (std::size_t c : cols) out.columns_.push_back(columns_[c]);
  return out;
}

RowCounter::RowCounter(std::size_t rows, std::size_t max_count)
    : rows_(rows),
      planes_(static_cast<std::size_t>(std::bit_width(max_count)), BitVector(rows)) {}

void RowCounter::add(const BitVector& v) {
  const std::size_t nwords = words_for(rows_);
  for (std::size_t w = 0; w < nwords; ++w) {
    Word carry = v.words()[w];
    for (auto& plane : planes_) {
      if (carry == 0) break;
      Word& p = plane.words()[w];
      const Word next = p & carry;
      p ^= carry;
      carry = next;
    }
  }
}

void RowCounter::compare(std::size_t k, BitVector& ge, BitVector& eq) const {
  const std::size_t nwords = words_for(rows_);
  ge = BitVector(rows_);
  eq = BitVector(rows_);
  if (k >= (std::size_t{1} << planes_.size())) return;  // every count is below k
  for (std::size_t w = 0; w < nwords; ++w) {
    Word gt = 0;
    Word same = ~Word{0};
    for (std::size_t b = planes_.size(); b-- > 0;) {
      const Word p = planes_[b].words()[w];
      if ((k >> b) & 1U) {
        same &= p;
      } else {
        gt |= same & p;
        same &= ~p;
      }
    }
    ge.words()[w] = gt | same;
    eq.words()[w] = same;
  }
  ge.clear_tail();
  eq.clear_tail();
}

}  // namespace boolrule
