#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <set>
#include <vector>

#include "hiercache/hierarchy.hpp"
#include "hiercache/single_layer.hpp"

using namespace hiercache;

namespace {

std::vector<BitVector> library(std::size_t n, std::uint32_t f, std::uint64_t seed) {
  auto rng = stream_engine(seed, 99);
  std::vector<BitVector> lib;
  for (std::size_t i = 0; i < n; ++i) lib.push_back(BitVector::random(f, rng));
  return lib;
}

// Encodes and decodes every cache; returns the number of wrong reconstructions.
std::size_t round_trip(const PlacementState& p, const std::vector<std::size_t>& demands,
                       const std::vector<BitVector>& lib,
                       std::vector<MulticastMessage>* out = nullptr) {
  const PartitionIndex idx(p, demands);
  std::vector<BitVector> files;
  for (auto d : demands) files.push_back(lib[d]);
  const auto msgs = base_delivery(p, idx, demands, files);
  std::size_t bad = 0;
  for (std::size_t k = 0; k < p.num_caches; ++k) {
    const auto cache = CacheContents::fill(p, k, lib);
    if (!(base_decode(p, idx, k, cache, msgs, demands[k]) == lib[demands[k]])) ++bad;
  }
  if (out) *out = msgs;
  return bad;
}

}  // namespace

TEST(SubsetOrder, SizeDescendingThenLexicographic) {
  std::vector<std::string> seen;
  for_each_subset_by_size_desc(4, [&](SubsetMask m) { seen.push_back(format_subset(m)); });
  const std::vector<std::string> expect = {"1,2,3,4", "1,2,3", "1,2,4", "1,3,4", "2,3,4",
                                           "1,2",     "1,3",   "1,4",   "2,3",   "2,4",
                                           "3,4",     "1",     "2",     "3",     "4"};
  EXPECT_EQ(seen, expect);
}

TEST(SampleSorted, ExactSizeAscendingUnique) {
  auto rng = stream_engine(3, 0);
  for (std::uint32_t count : {0u, 1u, 37u, 500u, 999u, 1000u}) {
    const auto s = sample_sorted(1000, count, rng);
    ASSERT_EQ(s.size(), count);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::uint32_t>(s.begin(), s.end()).size(), count);
    if (!s.empty()) {
      EXPECT_LT(s.back(), 1000u);
    }
  }
  EXPECT_THROW(sample_sorted(10, 11, rng), std::invalid_argument);
}

TEST(BasePlacement, StoresFloorMFOverNBits) {
  const auto p = base_placement(2, 2, 1.0, 1000, 11);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t n = 0; n < 2; ++n) EXPECT_EQ(p.stored_bits(k, n).size(), 500u);

  const auto none = base_placement(3, 2, 0.0, 100, 1);
  for (const auto& s : none.stored) EXPECT_TRUE(s.empty());
  const auto all = base_placement(3, 2, 3.0, 100, 1);
  for (const auto& s : all.stored) EXPECT_EQ(s.size(), 100u);

  // fractional M F / N is floored
  EXPECT_EQ(base_placement(3, 1, 1.0, 100, 1).stored_bits(0, 0).size(), 33u);

  EXPECT_THROW(base_placement(2, 2, -0.5, 100, 1), std::invalid_argument);
  EXPECT_THROW(base_placement(2, 2, 2.5, 100, 1), std::invalid_argument);
}

TEST(BasePlacement, DeterministicInSeed) {
  const auto a = base_placement(4, 3, 1.5, 4096, 42);
  const auto b = base_placement(4, 3, 1.5, 4096, 42);
  const auto c = base_placement(4, 3, 1.5, 4096, 43);
  EXPECT_EQ(a.stored, b.stored);
  EXPECT_NE(a.stored, c.stored);
}

TEST(PartitionFile, CellsPartitionTheFile) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = base_placement(5, 4, 2.0, 3000, seed);
    for (std::size_t n = 0; n < 5; ++n) {
      const auto part = partition_file(p, n);
      std::vector<int> hits(3000, 0);
      for (const auto& [mask, bits] : part.cells()) {
        for (auto b : bits) {
          ++hits[b];
          // b sits in cell S iff the caches holding b are exactly S
          SubsetMask holders = 0;
          for (std::size_t k = 0; k < 4; ++k) {
            const auto s = p.stored_bits(k, n);
            if (std::binary_search(s.begin(), s.end(), b)) holders |= SubsetMask{1} << k;
          }
          EXPECT_EQ(holders, mask);
        }
      }
      for (int h : hits) EXPECT_EQ(h, 1);
    }
  }
}

TEST(PartitionFile, TwoCachesHalfMemory) {
  const auto p = base_placement(2, 2, 1.0, 1'000'000, 5);
  const auto part = partition_file(p, 0);
  for (SubsetMask m = 0; m < 4; ++m) {
    const double size = static_cast<double>(part.cell(m).size());
    EXPECT_NEAR(size, 250'000.0, 0.03 * 250'000.0) << "cell " << m;
  }
  const auto empty = base_placement(2, 2, 0.0, 100, 5);
  EXPECT_EQ(partition_file(empty, 1).cell(0).size(), 100u);
  EXPECT_EQ(partition_file(empty, 1).cells().size(), 1u);
  EXPECT_THROW(partition_file(empty, 2), std::out_of_range);
}

TEST(BaseDelivery, TwoFilesTwoCaches) {
  const auto p = base_placement(2, 2, 1.0, 1 << 16, 8);
  const auto lib = library(2, 1 << 16, 8);
  std::vector<MulticastMessage> msgs;
  EXPECT_EQ(round_trip(p, {0, 1}, lib, &msgs), 0u);
  ASSERT_EQ(msgs.size(), 3u);
  EXPECT_EQ(transcript_line(msgs[0]).substr(0, 5), "S=1,2");
  EXPECT_NE(transcript_line(msgs[0]).find("terms=1:{2},2:{1}"), std::string::npos);
  EXPECT_NE(transcript_line(msgs[1]).find("S=1 "), std::string::npos);
  EXPECT_NE(transcript_line(msgs[1]).find("terms=1:{}"), std::string::npos);
  EXPECT_NE(transcript_line(msgs[2]).find("terms=2:{}"), std::string::npos);

  // payload is the longer of the two zero-padded terms
  const auto& t = msgs[0].terms;
  EXPECT_EQ(msgs[0].bits(), std::max(t[0].length, t[1].length));
}

TEST(BaseDelivery, FourCachesFifteenSums) {
  const auto p = base_placement(4, 4, 1.0, 1 << 14, 4);
  const auto lib = library(4, 1 << 14, 4);
  std::vector<MulticastMessage> msgs;
  EXPECT_EQ(round_trip(p, {0, 1, 2, 3}, lib, &msgs), 0u);
  ASSERT_EQ(msgs.size(), 15u);
  std::vector<int> by_size(5, 0);
  for (const auto& m : msgs) ++by_size[std::popcount(m.subset)];
  EXPECT_EQ(by_size, (std::vector<int>{0, 4, 6, 4, 1}));
}

TEST(BaseDelivery, SingleCacheSendsUncachedBits) {
  const auto p = base_placement(3, 1, 1.0, 3000, 2);
  const auto lib = library(3, 3000, 2);
  std::vector<MulticastMessage> msgs;
  EXPECT_EQ(round_trip(p, {2}, lib, &msgs), 0u);
  ASSERT_EQ(msgs.size(), 1u);
  EXPECT_EQ(msgs[0].bits(), 2000u);
}

TEST(BaseDecode, FullMemoryNeedsNoMessages) {
  const auto p = base_placement(3, 3, 3.0, 512, 2);
  const auto lib = library(3, 512, 2);
  std::vector<MulticastMessage> msgs;
  EXPECT_EQ(round_trip(p, {0, 0, 2}, lib, &msgs), 0u);
  EXPECT_TRUE(msgs.empty());
}

TEST(BaseDecode, MissingMessageIsUndecodable) {
  const auto p = base_placement(2, 2, 1.0, 4096, 1);
  const auto lib = library(2, 4096, 1);
  const std::vector<std::size_t> d{0, 1};
  const PartitionIndex idx(p, d);
  auto msgs = base_delivery(p, d, lib);
  msgs.pop_back();  // drop B_empty
  const auto cache = CacheContents::fill(p, 1, lib);
  EXPECT_THROW(base_decode(p, idx, 1, cache, msgs, 1), undecodable_error);
}

TEST(BaseDecode, RandomConfigsManySeeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = base_placement(6, 3, 2.0, 4096, seed);
    const auto lib = library(6, 4096, seed);
    auto rng = stream_engine(seed, 7);
    std::uniform_int_distribution<std::size_t> pick(0, 5);
    std::vector<std::size_t> d{pick(rng), pick(rng), pick(rng)};
    ASSERT_EQ(round_trip(p, d, lib), 0u) << "seed " << seed;
  }
}

TEST(BaseDecode, GridOfSmallSystems) {
  for (std::size_t n : {2u, 4u, 8u})
    for (std::size_t k : {1u, 2u, 3u, 4u})
      for (double frac : {0.0, 0.125, 0.3, 0.5, 0.75, 1.0})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
          const auto p = base_placement(n, k, frac * n, 4096, seed);
          const auto lib = library(n, 4096, seed + 1000);
          std::vector<std::size_t> d(k);
          for (std::size_t j = 0; j < k; ++j) d[j] = (seed + j * 3) % n;  // includes repeats
          ASSERT_EQ(round_trip(p, d, lib), 0u)
              << "N=" << n << " K=" << k << " M/N=" << frac << " seed=" << seed;
        }
}

TEST(MeasuredRate, ConcentratesOnClosedForm) {
  {
    const auto p = base_placement(2, 2, 1.0, 1'000'000, 21);
    const auto msgs = base_delivery(p, std::vector<std::size_t>{0, 1}, library(2, 1'000'000, 3));
    EXPECT_NEAR(measured_rate(msgs, 1'000'000), 0.75, 0.03 * 0.75);
  }
  {
    const auto p = base_placement(4, 4, 1.0, 1'000'000, 22);
    const auto msgs =
        base_delivery(p, std::vector<std::size_t>{0, 1, 2, 3}, library(4, 1'000'000, 3));
    EXPECT_NEAR(measured_rate(msgs, 1'000'000), 525.0 / 256.0, 0.03 * 525.0 / 256.0);
  }
  EXPECT_EQ(measured_rate(std::vector<MulticastMessage>{}, 100), 0.0);
}

TEST(BaseDelivery, Deterministic) {
  const auto lib = library(4, 2048, 1);
  const std::vector<std::size_t> d{3, 1, 1};
  const auto a = base_delivery(base_placement(4, 3, 1.0, 2048, 9), d, lib);
  const auto b = base_delivery(base_placement(4, 3, 1.0, 2048, 9), d, lib);
  EXPECT_EQ(transcript(a), transcript(b));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i].payload == b[i].payload);
}
