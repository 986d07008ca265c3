#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace hiercache {

// Packed bit string. Bits past size() are always zero so that equality and
// popcount can work word-wise.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t bits) : bits_(bits), words_(word_count(bits), 0) {}

  std::size_t size() const { return bits_; }
  bool empty() const { return bits_ == 0; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= m;
    else
      words_[i >> 6] &= ~m;
  }

  void resize(std::size_t bits) {
    words_.resize(word_count(bits), 0);
    bits_ = bits;
    clear_tail();
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  // XOR with `other`, zero-padding whichever operand is shorter.
  void xor_padded(const BitVector& other) {
    if (other.bits_ > bits_) resize(other.bits_);
    for (std::size_t w = 0; w < other.words_.size(); ++w) words_[w] ^= other.words_[w];
  }

  BitVector& operator&=(const BitVector& other) {
    if (other.bits_ != bits_) throw std::invalid_argument("BitVector &=: size mismatch");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
    return *this;
  }

  // Bits [begin, begin + len).
  BitVector slice(std::size_t begin, std::size_t len) const {
    if (begin + len > bits_) throw std::out_of_range("BitVector::slice");
    BitVector out(len);
    for (std::size_t i = 0; i < len; ++i)
      if (test(begin + i)) out.set(i);
    return out;
  }

  void append(const BitVector& tail) {
    const std::size_t base = bits_;
    resize(bits_ + tail.bits_);
    for (std::size_t i = 0; i < tail.bits_; ++i)
      if (tail.test(i)) set(base + i);
  }

  // Packs the bits at the given positions, in order.
  static BitVector gather(const BitVector& src, std::span<const std::uint32_t> positions) {
    BitVector out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
      if (src.test(positions[i])) out.set(i);
    return out;
  }

  // Inverse of gather: writes bit i of *this to dst[positions[i]].
  void scatter(BitVector& dst, std::span<const std::uint32_t> positions) const {
    const std::size_t n = std::min(bits_, positions.size());
    for (std::size_t i = 0; i < n; ++i) dst.set(positions[i], test(i));
  }

  template <class Engine>
  static BitVector random(std::size_t bits, Engine& rng) {
    BitVector out(bits);
    for (auto& w : out.words_) w = rng();
    out.clear_tail();
    return out;
  }

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const BitVector& a, const BitVector& b) {
    return a.bits_ == b.bits_ && a.words_ == b.words_;
  }

 private:
  static std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }
  void clear_tail() {
    if (bits_ & 63) words_.back() &= (std::uint64_t{1} << (bits_ & 63)) - 1;
  }

  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

// Independent deterministic generator per (seed, stream, index).
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint32_t stream,
                                     std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream, index};
  return std::mt19937_64(seq);
}

// Uniform `count`-subset of {0..universe-1}, ascending. Floyd's algorithm on
// the smaller of the subset and its complement.
template <class Engine>
std::vector<std::uint32_t> sample_sorted(std::uint32_t universe, std::uint32_t count,
                                         Engine& rng) {
  if (count > universe) throw std::invalid_argument("sample_sorted: count exceeds universe");
  const bool complement = count > universe / 2;
  const std::uint32_t draws = complement ? universe - count : count;
  BitVector marked(universe);
  for (std::uint32_t j = universe - draws; j < universe; ++j) {
    std::uniform_int_distribution<std::uint32_t> pick(0, j);
    const std::uint32_t t = pick(rng);
    marked.set(marked.test(t) ? j : t);
  }
  std::vector<std::uint32_t> out;
  out.reserve(count);
  const auto words = marked.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t x = complement ? ~words[w] : words[w];
    while (x) {
      const auto i = static_cast<std::uint32_t>(w * 64 + std::countr_zero(x));
      if (i >= universe) break;
      out.push_back(i);
      x &= x - 1;
    }
  }
  return out;
}

}  // namespace hiercache
