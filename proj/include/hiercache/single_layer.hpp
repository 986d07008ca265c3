#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hiercache/bit_vector.hpp"

namespace hiercache {

// Bit k set <=> cache k (zero-based) is a member.
using SubsetMask = std::uint64_t;

// 2^K subsets are enumerated per delivery, so K is capped.
inline constexpr std::size_t kMaxCodecCaches = 24;

class undecodable_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Calls fn(mask) for every nonempty subset of {0..K-1}: sizes K down to 1,
// and within one size in lexicographic order of the sorted member list.
template <class Fn>
void for_each_subset_by_size_desc(std::size_t num_caches, Fn&& fn) {
  std::vector<std::size_t> comb;
  for (std::size_t s = num_caches; s >= 1; --s) {
    comb.resize(s);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    while (true) {
      SubsetMask mask = 0;
      for (auto c : comb) mask |= SubsetMask{1} << c;
      fn(mask);
      // advance to the next combination in lex order
      std::size_t i = s;
      while (i > 0 && comb[i - 1] == num_caches - s + (i - 1)) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t k = i; k < s; ++k) comb[k] = comb[k - 1] + 1;
    }
  }
}

// "1,3,4" (one-based members).
inline std::string format_subset(SubsetMask mask) {
  std::string out;
  while (mask) {
    const int k = std::countr_zero(mask);
    if (!out.empty()) out += ',';
    out += std::to_string(k + 1);
    mask &= mask - 1;
  }
  return out;
}

// Random placement: cache k holds a uniformly chosen subset of exactly
// bits_per_file bit positions of each file, independently across caches and
// files.
struct PlacementState {
  std::size_t num_files = 0;
  std::size_t num_caches = 0;
  std::uint32_t file_size = 0;
  std::uint32_t bits_per_file = 0;
  // stored[cache * num_files + file], ascending bit positions
  std::vector<std::vector<std::uint32_t>> stored;

  std::span<const std::uint32_t> stored_bits(std::size_t cache, std::size_t file) const {
    return stored.at(cache * num_files + file);
  }
};

template <class Engine>
PlacementState place_subsets(std::size_t num_files, std::size_t num_caches,
                             std::uint32_t bits_per_file, std::uint32_t file_size,
                             Engine& rng) {
  if (num_caches == 0 || num_caches > kMaxCodecCaches)
    throw std::invalid_argument("placement: number of caches must be in [1, 24]");
  if (bits_per_file > file_size)
    throw std::invalid_argument("placement: cannot store more bits than the file has");
  PlacementState p;
  p.num_files = num_files;
  p.num_caches = num_caches;
  p.file_size = file_size;
  p.bits_per_file = bits_per_file;
  p.stored.reserve(num_caches * num_files);
  for (std::size_t k = 0; k < num_caches; ++k)
    for (std::size_t n = 0; n < num_files; ++n)
      p.stored.push_back(sample_sorted(file_size, bits_per_file, rng));
  return p;
}

// Stream tags keep the placement of each layer independent for one seed.
namespace stream {
inline constexpr std::uint32_t kSingleLayer = 1;
inline constexpr std::uint32_t kLibrary = 2;
inline constexpr std::uint32_t kMirrors = 3;
inline constexpr std::uint32_t kMirrorUsers = 4;
inline constexpr std::uint32_t kAllUsers = 5;
inline constexpr std::uint32_t kDemands = 6;
}  // namespace stream

// Each of K caches stores floor(M F / N) random bits of every file.
inline PlacementState base_placement(std::size_t num_files, std::size_t num_caches,
                                     double mem, std::uint32_t file_size, std::uint64_t seed) {
  if (!(mem >= 0.0) || mem > static_cast<double>(num_files))
    throw std::invalid_argument("base_placement: memory must lie in [0, N]");
  if (file_size == 0) throw std::invalid_argument("base_placement: file size must be >= 1");
  const auto bits = static_cast<std::uint32_t>(
      std::floor(mem * file_size / static_cast<double>(num_files)));
  auto rng = stream_engine(seed, stream::kSingleLayer);
  return place_subsets(num_files, num_caches, std::min(bits, file_size), file_size, rng);
}

// Bits of one file grouped by the exact set of caches holding them.
class SubfilePartition {
 public:
  SubfilePartition() = default;

  static SubfilePartition build(const PlacementState& placement, std::size_t file) {
    if (file >= placement.num_files) throw std::out_of_range("partition_file: invalid file id");
    std::vector<SubsetMask> holders(placement.file_size, 0);
    for (std::size_t k = 0; k < placement.num_caches; ++k)
      for (auto b : placement.stored_bits(k, file)) holders[b] |= SubsetMask{1} << k;

    std::unordered_map<SubsetMask, std::vector<std::uint32_t>> by_mask;
    for (std::uint32_t b = 0; b < placement.file_size; ++b) by_mask[holders[b]].push_back(b);

    SubfilePartition out;
    out.file_ = file;
    out.num_caches_ = placement.num_caches;
    out.file_size_ = placement.file_size;
    out.cells_.assign(std::make_move_iterator(by_mask.begin()),
                      std::make_move_iterator(by_mask.end()));
    std::sort(out.cells_.begin(), out.cells_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

  // Bits held by exactly the caches in `subset`; empty if there are none.
  std::span<const std::uint32_t> cell(SubsetMask subset) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), subset,
                               [](const auto& c, SubsetMask m) { return c.first < m; });
    if (it == cells_.end() || it->first != subset) return {};
    return it->second;
  }

  // Nonempty cells in ascending mask order.
  const std::vector<std::pair<SubsetMask, std::vector<std::uint32_t>>>& cells() const {
    return cells_;
  }

  std::size_t file() const { return file_; }
  std::size_t num_caches() const { return num_caches_; }
  std::uint32_t file_size() const { return file_size_; }

 private:
  std::size_t file_ = 0;
  std::size_t num_caches_ = 0;
  std::uint32_t file_size_ = 0;
  std::vector<std::pair<SubsetMask, std::vector<std::uint32_t>>> cells_;
};

inline SubfilePartition partition_file(const PlacementState& placement, std::size_t file) {
  return SubfilePartition::build(placement, file);
}

// Partitions of the files a delivery touches. Placement metadata is public
// to all nodes, so encoder and decoders share one index.
class PartitionIndex {
 public:
  PartitionIndex(const PlacementState& placement, std::span<const std::size_t> files) {
    for (auto f : files)
      if (!parts_.contains(f)) parts_.emplace(f, SubfilePartition::build(placement, f));
  }
  const SubfilePartition& of(std::size_t file) const {
    auto it = parts_.find(file);
    if (it == parts_.end()) throw std::out_of_range("PartitionIndex: file not indexed");
    return it->second;
  }

 private:
  std::map<std::size_t, SubfilePartition> parts_;
};

// One summand V_{cache, subset} of a multicast: the bits of `file`
// (demanded by `cache`) held exactly by the caches in `subset`.
struct MessageTerm {
  std::size_t cache;
  std::size_t file;
  SubsetMask subset;
  std::size_t length;
};

// Zero-padded XOR of the terms of one subset S. Term lengths travel with
// the message header.
struct MulticastMessage {
  SubsetMask subset = 0;
  BitVector payload;
  std::vector<MessageTerm> terms;

  std::size_t bits() const { return payload.size(); }
  const MessageTerm* term_for(std::size_t cache) const {
    for (const auto& t : terms)
      if (t.cache == cache) return &t;
    return nullptr;
  }
};

// For s = K..1 and every S with |S| = s, sends XOR_{j in S} V_{j, S\{j}}.
// demanded_files[j] is the content of file demands[j]. All-empty subsets are
// skipped.
inline std::vector<MulticastMessage> base_delivery(const PlacementState& placement,
                                                   const PartitionIndex& partitions,
                                                   std::span<const std::size_t> demands,
                                                   std::span<const BitVector> demanded_files) {
  const std::size_t k = placement.num_caches;
  if (demands.size() != k || demanded_files.size() != k)
    throw std::invalid_argument("base_delivery: need one demand per cache");
  for (auto d : demands)
    if (d >= placement.num_files) throw std::invalid_argument("base_delivery: bad file id");

  std::vector<MulticastMessage> out;
  for_each_subset_by_size_desc(k, [&](SubsetMask s) {
    MulticastMessage msg;
    msg.subset = s;
    for (SubsetMask rest = s; rest; rest &= rest - 1) {
      const auto j = static_cast<std::size_t>(std::countr_zero(rest));
      const SubsetMask others = s & ~(SubsetMask{1} << j);
      const auto cell = partitions.of(demands[j]).cell(others);
      msg.terms.push_back({j, demands[j], others, cell.size()});
      if (!cell.empty()) msg.payload.xor_padded(BitVector::gather(demanded_files[j], cell));
    }
    if (!msg.payload.empty()) out.push_back(std::move(msg));
  });
  return out;
}

inline std::vector<MulticastMessage> base_delivery(const PlacementState& placement,
                                                   std::span<const std::size_t> demands,
                                                   std::span<const BitVector> library) {
  PartitionIndex idx(placement, demands);
  std::vector<BitVector> files;
  files.reserve(demands.size());
  for (auto d : demands) files.push_back(library[d]);
  return base_delivery(placement, idx, demands, files);
}

// What one cache physically holds after placement.
class CacheContents {
 public:
  CacheContents() = default;

  static CacheContents fill(const PlacementState& placement, std::size_t cache,
                            std::span<const BitVector> library) {
    CacheContents c;
    c.present_.reserve(placement.num_files);
    c.values_.reserve(placement.num_files);
    for (std::size_t n = 0; n < placement.num_files; ++n) {
      BitVector present(placement.file_size);
      for (auto b : placement.stored_bits(cache, n)) present.set(b);
      BitVector values = library[n];
      values &= present;
      c.stored_ += present.count();
      c.present_.push_back(std::move(present));
      c.values_.push_back(std::move(values));
    }
    return c;
  }

  bool holds(std::size_t file, std::size_t bit) const { return present_[file].test(bit); }
  const BitVector& values(std::size_t file) const { return values_[file]; }
  const BitVector& present(std::size_t file) const { return present_[file]; }
  std::uint64_t stored_bits() const { return stored_; }

 private:
  std::vector<BitVector> present_;
  std::vector<BitVector> values_;
  std::uint64_t stored_ = 0;
};

// Recovers file `demand` at `cache`: cached bits first, then each message
// whose subset contains `cache` yields V_{cache, S\{cache}} after XOR-ing
// out the other terms, all of which this cache holds.
inline BitVector base_decode(const PlacementState& placement, const PartitionIndex& partitions,
                             std::size_t cache, const CacheContents& contents,
                             std::span<const MulticastMessage> messages, std::size_t demand) {
  BitVector file = contents.values(demand);
  BitVector known = contents.present(demand);

  for (const auto& msg : messages) {
    if (!(msg.subset >> cache & 1u)) continue;
    const MessageTerm* mine = msg.term_for(cache);
    if (!mine) throw undecodable_error("message header lacks a term for this cache");
    if (mine->file != demand) throw undecodable_error("message term disagrees with demand");
    if (mine->length == 0) continue;

    BitVector buf = msg.payload;
    for (const auto& t : msg.terms) {
      if (t.cache == cache || t.length == 0) continue;
      const auto cell = partitions.of(t.file).cell(t.subset);
      if (cell.size() != t.length) throw undecodable_error("term length mismatch");
      for (auto b : cell)
        if (!contents.holds(t.file, b))
          throw undecodable_error("interfering subfile is not cached");
      buf.xor_padded(BitVector::gather(contents.values(t.file), cell));
    }
    const auto target = partitions.of(demand).cell(mine->subset);
    if (target.size() != mine->length) throw undecodable_error("own term length mismatch");
    buf.resize(mine->length);
    buf.scatter(file, target);
    for (auto b : target) known.set(b);
  }
  if (known.count() != placement.file_size)
    throw undecodable_error("file not fully recovered at cache " + std::to_string(cache + 1));
  return file;
}

inline std::uint64_t total_bits(std::span<const MulticastMessage> messages) {
  std::uint64_t bits = 0;
  for (const auto& m : messages) bits += m.bits();
  return bits;
}

inline double measured_rate(std::span<const MulticastMessage> messages,
                            std::uint64_t file_size) {
  return static_cast<double>(total_bits(messages)) / static_cast<double>(file_size);
}

// One line per message: S=<ids> len=<bits> terms=<file>:{<ids>},...
// Cache and file ids are one-based.
inline std::string transcript_line(const MulticastMessage& m) {
  std::ostringstream os;
  os << "S=" << format_subset(m.subset) << " len=" << m.bits() << " terms=";
  for (std::size_t i = 0; i < m.terms.size(); ++i) {
    if (i) os << ',';
    os << (m.terms[i].file + 1) << ":{" << format_subset(m.terms[i].subset) << '}';
  }
  return os.str();
}

inline std::string transcript(std::span<const MulticastMessage> messages,
                              const std::string& prefix = {}) {
  std::string out;
  for (const auto& m : messages) {
    out += prefix;
    out += transcript_line(m);
    out += '\n';
  }
  return out;
}

}  // namespace hiercache
