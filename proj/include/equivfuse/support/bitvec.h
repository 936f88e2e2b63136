#pragma once

#include <boost/container/small_vector.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace equivfuse {

/// Fixed-width two's-complement bit-vector of arbitrary width.
///
/// Bits above the width are always kept zero, so word-wise comparison is
/// value comparison. Widths up to 64 never allocate.
class BitVec {
 public:
  using Word = uint64_t;
  static constexpr unsigned kWordBits = 64;

  BitVec() = default;
  explicit BitVec(unsigned width, Word value = 0);

  static BitVec zeros(unsigned width) { return BitVec(width); }
  static BitVec ones(unsigned width);
  /// Parses `[01]+`, MSB first; width is the string length.
  static BitVec fromBinary(std::string_view bits);
  /// Parses hex digits (no prefix) into the given width, truncating.
  static BitVec fromHex(std::string_view digits, unsigned width);
  /// Parses an unsigned decimal into the given width, truncating.
  static BitVec fromDecimal(std::string_view digits, unsigned width);
  /// Sign- or zero-extends `value` (interpreted as int64) into `width` bits.
  static BitVec fromInt(unsigned width, int64_t value);

  unsigned width() const { return width_; }
  std::size_t numWords() const { return words_.size(); }
  Word word(std::size_t i) const { return words_[i]; }

  bool bit(unsigned i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1; }
  void setBit(unsigned i, bool value);
  bool msb() const { return width_ != 0 && bit(width_ - 1); }

  bool isZero() const;
  bool isAllOnes() const;
  bool isOne() const;
  /// Low 64 bits.
  Word toU64() const { return words_.empty() ? 0 : words_[0]; }
  /// Value as signed, valid only when width <= 64.
  int64_t toI64() const;
  /// Value as an unsigned integer if it fits in 64 bits.
  bool fitsU64() const;

  std::string toBinary() const;
  std::string toHex() const;
  std::string toDecimal() const;

  BitVec operator~() const;
  BitVec operator&(const BitVec &rhs) const;
  BitVec operator|(const BitVec &rhs) const;
  BitVec operator^(const BitVec &rhs) const;
  BitVec operator+(const BitVec &rhs) const;
  BitVec operator-(const BitVec &rhs) const;
  BitVec operator*(const BitVec &rhs) const;
  BitVec neg() const;

  /// Shifts with SMT-LIB semantics: amounts >= width yield zero (or the
  /// sign fill for ashr). The amount is read as an unsigned number.
  BitVec shl(const BitVec &amount) const;
  BitVec lshr(const BitVec &amount) const;
  BitVec ashr(const BitVec &amount) const;
  BitVec shl(uint64_t amount) const;
  BitVec lshr(uint64_t amount) const;
  BitVec ashr(uint64_t amount) const;

  bool ult(const BitVec &rhs) const;
  bool slt(const BitVec &rhs) const;
  bool ule(const BitVec &rhs) const { return !rhs.ult(*this); }
  bool sle(const BitVec &rhs) const { return !rhs.slt(*this); }

  /// `hi` occupies the upper bits of the result.
  static BitVec concat(const BitVec &hi, const BitVec &lo);
  BitVec extract(unsigned hi, unsigned lo) const;
  BitVec zext(unsigned width) const;
  BitVec sext(unsigned width) const;
  /// Truncates or extends (per `isSigned`) to `width`.
  BitVec resize(unsigned width, bool isSigned) const;

  /// Unsigned value clamped to UINT64_MAX when wider bits are set.
  uint64_t toU64Saturating() const;

  bool operator==(const BitVec &rhs) const {
    return width_ == rhs.width_ && words_ == rhs.words_;
  }
  bool operator!=(const BitVec &rhs) const { return !(*this == rhs); }
  /// Orders by width, then by unsigned value.
  bool operator<(const BitVec &rhs) const;

  std::size_t hash() const;

 private:
  void normalize();

  unsigned width_ = 0;
  boost::container::small_vector<Word, 1> words_;
};

struct BitVecHash {
  std::size_t operator()(const BitVec &v) const { return v.hash(); }
};

} // namespace equivfuse
