#include "equivfuse/support/bitvec.h"

#include "equivfuse/support/error.h"

#include <algorithm>
#include <cassert>

namespace equivfuse {

namespace {

std::size_t wordsFor(unsigned width) {
  return (width + BitVec::kWordBits - 1) / BitVec::kWordBits;
}

} // namespace

BitVec::BitVec(unsigned width, Word value) : width_(width), words_(wordsFor(width), 0) {
  if (!words_.empty())
    words_[0] = value;
  normalize();
}

void BitVec::normalize() {
  if (words_.empty())
    return;
  unsigned rem = width_ % kWordBits;
  if (rem != 0)
    words_.back() &= (Word{1} << rem) - 1;
}

BitVec BitVec::ones(unsigned width) {
  BitVec v(width);
  for (auto &w : v.words_)
    w = ~Word{0};
  v.normalize();
  return v;
}

BitVec BitVec::fromBinary(std::string_view bits) {
  BitVec v(static_cast<unsigned>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    char c = bits[bits.size() - 1 - i];
    if (c != '0' && c != '1')
      fail(ErrorKind::ParseFailure, "invalid binary digit '" + std::string(1, c) + "'");
    v.setBit(static_cast<unsigned>(i), c == '1');
  }
  return v;
}

BitVec BitVec::fromHex(std::string_view digits, unsigned width) {
  BitVec v(width);
  unsigned bitPos = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    char c = digits[i];
    unsigned d;
    if (c >= '0' && c <= '9')
      d = c - '0';
    else if (c >= 'a' && c <= 'f')
      d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      d = c - 'A' + 10;
    else
      fail(ErrorKind::ParseFailure, "invalid hex digit '" + std::string(1, c) + "'");
    for (unsigned b = 0; b < 4; ++b, ++bitPos)
      if (bitPos < width)
        v.setBit(bitPos, (d >> b) & 1);
  }
  return v;
}

BitVec BitVec::fromDecimal(std::string_view digits, unsigned width) {
  if (digits.empty())
    fail(ErrorKind::ParseFailure, "empty decimal literal");
  // Accumulate at a width large enough for the literal, then truncate.
  unsigned work = std::max<unsigned>(width, static_cast<unsigned>(digits.size() * 4 + 4));
  BitVec acc(work);
  BitVec ten(work, 10);
  for (char c : digits) {
    if (c < '0' || c > '9')
      fail(ErrorKind::ParseFailure, "invalid decimal digit '" + std::string(1, c) + "'");
    acc = acc * ten + BitVec(work, static_cast<Word>(c - '0'));
  }
  return acc.extract(width - 1, 0);
}

BitVec BitVec::fromInt(unsigned width, int64_t value) {
  BitVec v(std::max(width, 64u), static_cast<Word>(value));
  if (value < 0)
    for (unsigned i = 64; i < v.width_; ++i)
      v.setBit(i, true);
  if (width == v.width_)
    return v;
  return v.extract(width - 1, 0);
}

void BitVec::setBit(unsigned i, bool value) {
  assert(i < width_);
  Word mask = Word{1} << (i % kWordBits);
  if (value)
    words_[i / kWordBits] |= mask;
  else
    words_[i / kWordBits] &= ~mask;
}

bool BitVec::isZero() const {
  return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
}

bool BitVec::isAllOnes() const { return *this == ones(width_); }

bool BitVec::isOne() const {
  if (words_.empty() || words_[0] != 1)
    return false;
  return std::all_of(words_.begin() + 1, words_.end(), [](Word w) { return w == 0; });
}

int64_t BitVec::toI64() const {
  assert(width_ <= 64);
  if (width_ == 0)
    return 0;
  Word v = words_[0];
  if (width_ < 64 && msb())
    v |= ~Word{0} << width_;
  return static_cast<int64_t>(v);
}

bool BitVec::fitsU64() const {
  for (std::size_t i = 1; i < words_.size(); ++i)
    if (words_[i] != 0)
      return false;
  return true;
}

uint64_t BitVec::toU64Saturating() const {
  return fitsU64() ? toU64() : ~uint64_t{0};
}

std::string BitVec::toBinary() const {
  std::string out;
  out.reserve(width_);
  for (unsigned i = width_; i-- > 0;)
    out.push_back(bit(i) ? '1' : '0');
  return out;
}

std::string BitVec::toHex() const {
  static const char *kDigits = "0123456789abcdef";
  unsigned nibbles = std::max(1u, (width_ + 3) / 4);
  std::string out;
  out.reserve(nibbles);
  for (unsigned n = nibbles; n-- > 0;) {
    unsigned d = 0;
    for (unsigned b = 0; b < 4; ++b) {
      unsigned pos = n * 4 + b;
      if (pos < width_ && bit(pos))
        d |= 1u << b;
    }
    out.push_back(kDigits[d]);
  }
  return out;
}

std::string BitVec::toDecimal() const {
  if (fitsU64())
    return std::to_string(toU64());
  // Repeated division by 10 over the word array.
  std::vector<Word> words(words_.begin(), words_.end());
  std::string out;
  auto nonZero = [&] {
    return std::any_of(words.begin(), words.end(), [](Word w) { return w != 0; });
  };
  while (nonZero()) {
    unsigned __int128 rem = 0;
    for (std::size_t i = words.size(); i-- > 0;) {
      unsigned __int128 cur = (rem << 64) | words[i];
      words[i] = static_cast<Word>(cur / 10);
      rem = cur % 10;
    }
    out.push_back(static_cast<char>('0' + static_cast<int>(rem)));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

BitVec BitVec::operator~() const {
  BitVec r = *this;
  for (auto &w : r.words_)
    w = ~w;
  r.normalize();
  return r;
}

BitVec BitVec::operator&(const BitVec &rhs) const {
  assert(width_ == rhs.width_);
  BitVec r = *this;
  for (std::size_t i = 0; i < r.words_.size(); ++i)
    r.words_[i] &= rhs.words_[i];
  return r;
}

BitVec BitVec::operator|(const BitVec &rhs) const {
  assert(width_ == rhs.width_);
  BitVec r = *this;
  for (std::size_t i = 0; i < r.words_.size(); ++i)
    r.words_[i] |= rhs.words_[i];
  return r;
}

BitVec BitVec::operator^(const BitVec &rhs) const {
  assert(width_ == rhs.width_);
  BitVec r = *this;
  for (std::size_t i = 0; i < r.words_.size(); ++i)
    r.words_[i] ^= rhs.words_[i];
  return r;
}

BitVec BitVec::operator+(const BitVec &rhs) const {
  assert(width_ == rhs.width_);
  BitVec r(width_);
  Word carry = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    Word a = words_[i];
    Word s = a + rhs.words_[i];
    Word c1 = s < a;
    Word s2 = s + carry;
    Word c2 = s2 < s;
    r.words_[i] = s2;
    carry = c1 | c2;
  }
  r.normalize();
  return r;
}

BitVec BitVec::neg() const { return ~*this + BitVec(width_, 1); }

BitVec BitVec::operator-(const BitVec &rhs) const { return *this + rhs.neg(); }

BitVec BitVec::operator*(const BitVec &rhs) const {
  assert(width_ == rhs.width_);
  if (words_.size() == 1) {
    BitVec r(width_, words_[0] * rhs.words_[0]);
    return r;
  }
  std::size_t n = words_.size();
  std::vector<Word> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned __int128 carry = 0;
    for (std::size_t j = 0; i + j < n; ++j) {
      unsigned __int128 cur =
          static_cast<unsigned __int128>(words_[i]) * rhs.words_[j] + out[i + j] + carry;
      out[i + j] = static_cast<Word>(cur);
      carry = cur >> 64;
    }
  }
  BitVec r(width_);
  std::copy(out.begin(), out.end(), r.words_.begin());
  r.normalize();
  return r;
}

BitVec BitVec::shl(uint64_t amount) const {
  BitVec r(width_);
  if (amount >= width_)
    return r;
  std::size_t wordShift = amount / kWordBits;
  unsigned bitShift = amount % kWordBits;
  for (std::size_t i = words_.size(); i-- > wordShift;) {
    Word v = words_[i - wordShift] << bitShift;
    if (bitShift != 0 && i - wordShift > 0)
      v |= words_[i - wordShift - 1] >> (kWordBits - bitShift);
    r.words_[i] = v;
  }
  r.normalize();
  return r;
}

BitVec BitVec::lshr(uint64_t amount) const {
  BitVec r(width_);
  if (amount >= width_)
    return r;
  std::size_t wordShift = amount / kWordBits;
  unsigned bitShift = amount % kWordBits;
  for (std::size_t i = 0; i + wordShift < words_.size(); ++i) {
    Word v = words_[i + wordShift] >> bitShift;
    if (bitShift != 0 && i + wordShift + 1 < words_.size())
      v |= words_[i + wordShift + 1] << (kWordBits - bitShift);
    r.words_[i] = v;
  }
  return r;
}

BitVec BitVec::ashr(uint64_t amount) const {
  if (!msb())
    return lshr(amount);
  if (amount >= width_)
    return ones(width_);
  BitVec r = lshr(amount);
  for (unsigned i = width_ - static_cast<unsigned>(amount); i < width_; ++i)
    r.setBit(i, true);
  return r;
}

BitVec BitVec::shl(const BitVec &amount) const { return shl(amount.toU64Saturating()); }
BitVec BitVec::lshr(const BitVec &amount) const { return lshr(amount.toU64Saturating()); }
BitVec BitVec::ashr(const BitVec &amount) const { return ashr(amount.toU64Saturating()); }

bool BitVec::ult(const BitVec &rhs) const {
  assert(width_ == rhs.width_);
  for (std::size_t i = words_.size(); i-- > 0;)
    if (words_[i] != rhs.words_[i])
      return words_[i] < rhs.words_[i];
  return false;
}

bool BitVec::slt(const BitVec &rhs) const {
  bool a = msb(), b = rhs.msb();
  if (a != b)
    return a;
  return ult(rhs);
}

BitVec BitVec::concat(const BitVec &hi, const BitVec &lo) {
  BitVec r = lo.zext(lo.width_ + hi.width_);
  for (unsigned i = 0; i < hi.width_; ++i)
    if (hi.bit(i))
      r.setBit(lo.width_ + i, true);
  return r;
}

BitVec BitVec::extract(unsigned hi, unsigned lo) const {
  assert(hi >= lo && hi < width_);
  unsigned w = hi - lo + 1;
  if (lo == 0 && words_.size() == 1)
    return BitVec(w, words_[0]);
  BitVec shifted = lshr(lo);
  BitVec r(w);
  for (std::size_t i = 0; i < r.words_.size(); ++i)
    r.words_[i] = shifted.words_[i];
  r.normalize();
  return r;
}

BitVec BitVec::zext(unsigned width) const {
  assert(width >= width_);
  BitVec r(width);
  for (std::size_t i = 0; i < words_.size(); ++i)
    r.words_[i] = words_[i];
  return r;
}

BitVec BitVec::sext(unsigned width) const {
  BitVec r = zext(width);
  if (msb())
    for (unsigned i = width_; i < width; ++i)
      r.setBit(i, true);
  return r;
}

BitVec BitVec::resize(unsigned width, bool isSigned) const {
  if (width == width_)
    return *this;
  if (width < width_)
    return extract(width - 1, 0);
  return isSigned ? sext(width) : zext(width);
}

bool BitVec::operator<(const BitVec &rhs) const {
  if (width_ != rhs.width_)
    return width_ < rhs.width_;
  return ult(rhs);
}

std::size_t BitVec::hash() const {
  std::size_t h = width_ * 0x9e3779b97f4a7c15ULL;
  for (Word w : words_)
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

} // namespace equivfuse
