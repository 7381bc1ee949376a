#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcnc/error.hpp"
#include "rcnc/random.hpp"

namespace rcnc {

// A row of GF(2) coefficients, one bit per segment of a generation.
// Bits past size() in the last word are kept zero.
class CoefficientVector {
 public:
  CoefficientVector() = default;
  explicit CoefficientVector(std::size_t k) : size_(k), words_((k + 63) / 64, 0) {}

  // "1011" -> bit 0 = 1, bit 1 = 0, ...
  static CoefficientVector from_string(std::string_view bits) {
    CoefficientVector v(bits.size());
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (bits[j] == '1') {
        v.set(j);
      } else if (bits[j] != '0') {
        throw InvalidInput("coefficient string may only contain '0' and '1'");
      }
    }
    return v;
  }

  // Uniform over GF(2)^k minus the zero vector.
  static CoefficientVector random_nonzero(std::size_t k, Rng& rng) {
    if (k == 0) throw InvalidInput("coefficient vector length must be positive");
    CoefficientVector v(k);
    do {
      for (auto& w : v.words_) w = rng.next();
      v.clear_tail();
    } while (v.is_zero());
    return v;
  }

  std::size_t size() const { return size_; }

  bool test(std::size_t j) const { return (words_[j / 64] >> (j % 64)) & 1u; }
  void set(std::size_t j, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    if (value) {
      words_[j / 64] |= mask;
    } else {
      words_[j / 64] &= ~mask;
    }
  }

  bool is_zero() const {
    for (auto w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // Index of the lowest set bit at or after `from`, or size() if none.
  std::size_t next_set(std::size_t from) const {
    if (from >= size_) return size_;
    std::size_t wi = from / 64;
    std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from % 64));
    while (true) {
      if (w != 0) return wi * 64 + static_cast<std::size_t>(std::countr_zero(w));
      if (++wi == words_.size()) return size_;
      w = words_[wi];
    }
  }

  std::size_t lowest_set() const { return next_set(0); }

  CoefficientVector& operator^=(const CoefficientVector& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
  }

  friend bool operator==(const CoefficientVector&, const CoefficientVector&) = default;

  std::span<const std::uint64_t> words() const { return words_; }

  // Wire form: ceil(k/8) bytes, bit j stored at bit (7 - j % 8) of byte j / 8.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
    for (std::size_t j = next_set(0); j < size_; j = next_set(j + 1)) {
      out[j / 8] |= static_cast<std::uint8_t>(0x80u >> (j % 8));
    }
    return out;
  }

  static CoefficientVector from_bytes(std::size_t k, std::span<const std::uint8_t> bytes) {
    if (bytes.size() != (k + 7) / 8) {
      throw ProtocolError("coefficient field has " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string((k + 7) / 8));
    }
    CoefficientVector v(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (bytes[j / 8] & (0x80u >> (j % 8))) v.set(j);
    }
    return v;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t j = 0; j < size_; ++j) {
      if (test(j)) s[j] = '1';
    }
    return s;
  }

 private:
  void clear_tail() {
    if (size_ % 64 != 0) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace rcnc
