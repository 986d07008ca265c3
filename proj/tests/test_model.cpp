#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hiercache/model.hpp"
#include "oracle.hpp"

using namespace hiercache;

TEST(RateR, FrozenValues) {
  EXPECT_DOUBLE_EQ(rate_r(0.5, 2), 0.75);
  EXPECT_DOUBLE_EQ(rate_r(0.25, 4), 525.0 / 256.0);
  EXPECT_DOUBLE_EQ(rate_r(0.25, 2), 21.0 / 16.0);
  EXPECT_EQ(rate_r(0.0, 5), 5.0);
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_EQ(rate_r(1.0, k), 0.0);
  EXPECT_EQ(rate_r(2.0, 3), 0.0);
}

TEST(RateR, ClosedFormMatchesSubsetSum) {
  for (std::size_t k = 1; k <= 12; ++k)
    for (int i = 1; i <= 100; ++i) {
      const double p = i / 100.0;
      const double expect = oracle::rate_sum(p, k);
      const double got = rate_r(p, k);
      if (expect == 0.0)
        EXPECT_EQ(got, 0.0);
      else
        EXPECT_LE(std::abs(got - expect) / expect, 1e-12) << "p=" << p << " K=" << k;
    }
}

TEST(RateR, NonincreasingInMemory) {
  for (std::size_t k = 1; k <= 12; ++k) {
    double prev = rate_r(0.0, k);
    for (int i = 1; i <= 200; ++i) {
      const double cur = rate_r(i / 200.0, k);
      EXPECT_LE(cur, prev + 1e-15);
      prev = cur;
    }
  }
}

TEST(RateR, BoundedByUpperForm) {
  for (std::size_t k = 1; k <= 12; ++k)
    for (int i = 1; i <= 120; ++i) {
      const double p = i / 100.0;
      const double r = rate_r(p, k);
      const double u = rate_r_upper(p, k);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, u + 1e-12);
      EXPECT_LE(r, std::min(static_cast<double>(k), u + 1.0));
    }
}

TEST(RateRUpper, Branches) {
  EXPECT_EQ(rate_r_upper(0.5, 10), 1.0);
  EXPECT_EQ(rate_r_upper(2.0, 10), 0.0);
  EXPECT_EQ(rate_r_upper(0.25, 4), 3.0);
  EXPECT_EQ(rate_r_upper(0.01, 4), 4.0);
  EXPECT_EQ(rate_r_upper(0.0, 7), 7.0);
}

TEST(RateR, RejectsBadArguments) {
  EXPECT_THROW(rate_r(-0.1, 3), std::invalid_argument);
  EXPECT_THROW(rate_r(0.5, 0), std::invalid_argument);
  EXPECT_THROW(rate_r(std::nan(""), 2), std::invalid_argument);
  EXPECT_THROW(rate_r_upper(-1.0, 3), std::invalid_argument);
  EXPECT_THROW(rate_r_upper(0.5, 0), std::invalid_argument);
}

TEST(SystemConfig, ValidatesAndClamps) {
  std::ostringstream warn;
  const auto c = SystemConfig::make(4, 2, 2, 9.0, 5.0, 1024, 7, &warn);
  EXPECT_EQ(c.mirror_mem, 4.0);
  EXPECT_EQ(c.user_mem, 4.0);
  EXPECT_NE(warn.str().find("clamping"), std::string::npos);

  EXPECT_THROW(SystemConfig::make(3, 2, 2, 1, 1, 64, 0, nullptr), std::invalid_argument);
  EXPECT_THROW(SystemConfig::make(4, 0, 2, 1, 1, 64, 0, nullptr), std::invalid_argument);
  EXPECT_THROW(SystemConfig::make(4, 2, 2, -1, 1, 64, 0, nullptr), std::invalid_argument);
  EXPECT_THROW(SystemConfig::make(4, 2, 2, 1, 1, 0, 0, nullptr), std::invalid_argument);
}

TEST(RequestMatrix, ShapeAndRange) {
  const auto c = SystemConfig::make(6, 2, 3, 1, 1, 64, 0, nullptr);
  const auto d = RequestMatrix::distinct(c);
  EXPECT_EQ(d.at(1, 2), 5u);
  EXPECT_EQ(d.row(1), (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_EQ(d.column(0), (std::vector<std::size_t>{0, 3}));
  EXPECT_THROW(RequestMatrix(2, 3, {0, 1}), std::invalid_argument);
  EXPECT_THROW(RequestMatrix(1, 1, {6}).validate(6), std::invalid_argument);
}
