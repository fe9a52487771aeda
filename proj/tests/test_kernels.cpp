// Copyright 2026 The unipark Authors
//
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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "unipark/kernels.hpp"

#include "data/oracle_values.inc"

namespace unipark {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Sinc, KnownValues) {
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(kPi), 0.0, 1e-16);
  EXPECT_NEAR(sinc(kPi / 2), 0.636619772367581343, 1e-15);
}

TEST(Sinc, MatchesOracle) {
  for (const auto& c : kSincCases) {
    EXPECT_NEAR(sinc(c.x), c.y, 1e-15 * std::max(1.0, std::abs(c.y))) << "x=" << c.x;
  }
}

TEST(Sinc, ContinuousAcrossTaylorThreshold) {
  const double below = std::nextafter(kSincTaylorThreshold, 0.0);
  EXPECT_NEAR(sinc(below), sinc(kSincTaylorThreshold), 1e-15);
}

TEST(Sinc, EvenAndBounded) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng);
    EXPECT_EQ(sinc(a), sinc(-a));
    EXPECT_LE(sinc(a), 1.0);
    EXPECT_GE(sinc(a), -0.2173);
  }
}

TEST(Sinc, RejectsNonFinite) {
  EXPECT_THROW(sinc(kNaN), DomainError);
  EXPECT_THROW(sinc(kInf), DomainError);
}

TEST(SineIntegral, KnownValues) {
  EXPECT_EQ(sine_integral(0.0), 0.0);
  EXPECT_NEAR(sine_integral(kPi), 1.851937052, 1e-9);
}

TEST(SineIntegral, MatchesQuadratureOracle) {
  for (const auto& c : kSineIntegralCases) {
    EXPECT_NEAR(sine_integral(c.x), c.y, 1e-12) << "x=" << c.x;
  }
}

TEST(SineIntegral, Odd) {
  for (double a : {0.1, 1.0, 3.9, 4.0, 4.1, 17.0, 300.0}) {
    EXPECT_EQ(sine_integral(-a), -sine_integral(a));
  }
}

TEST(SineIntegral, DerivativeIsSinc) {
  for (double a : {0.3, 2.0, 3.99, 4.01, 9.0, 40.0}) {
    const double h = 1e-5;
    const double fd = (sine_integral(a + h) - sine_integral(a - h)) / (2 * h);
    EXPECT_NEAR(fd, sinc(a), 1e-8) << "a=" << a;
  }
}

TEST(SineIntegral, TendsToHalfPi) {
  EXPECT_NEAR(sine_integral(1e6), kPi / 2, 2e-6);
  EXPECT_THROW(sine_integral(kInf), DomainError);
}

TEST(Psi, KnownValues) {
  EXPECT_EQ(psi(0.0, 0.0), 1.0);
  for (double g : {-2.0, 0.4, 1.0, kPi}) EXPECT_NEAR(psi(0.0, g), std::cos(2 * g), 1e-15);
  EXPECT_NEAR(psi(kPi / 4, kPi / 4), 2.0 / kPi, 1e-15);
}

TEST(Psi, MatchesOracle) {
  for (const auto& c : kPsiCases) {
    EXPECT_NEAR(psi(c.z, c.gamma), c.psi, 1e-14) << "z=" << c.z << " gamma=" << c.gamma;
  }
}

TEST(Psi, MatchesDefiningQuotientAndIsBounded) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 2000; ++i) {
    const double z = u(rng), g = u(rng);
    const double v = psi(z, g);
    EXPECT_LE(std::abs(v), 1.0);
    if (std::abs(z) > 1e-2) {
      const double q = (std::sin(2 * z - 2 * g) + std::sin(2 * g)) / (2 * z);
      EXPECT_NEAR(v, q, 1e-13);
    }
  }
  EXPECT_THROW(psi(kNaN, 0.0), DomainError);
}

TEST(HalfTan, KnownValuesAndBarrier) {
  EXPECT_EQ(half_tan(0.0), 0.0);
  EXPECT_NEAR(half_tan(kPi / 2), 1.0, 1e-15);
  EXPECT_NEAR(half_tan(-kPi / 2), -1.0, 1e-15);
  EXPECT_THROW(half_tan(kPi), BarrierDomainError);
  EXPECT_THROW(half_tan(-kPi), BarrierDomainError);
  EXPECT_THROW(half_tan(4.0), BarrierDomainError);
  EXPECT_GT(half_tan(kPi - 1e-9), 1e8);
}

TEST(HalfTan, Monotone) {
  double prev = -kInf;
  for (double a = -3.14; a <= 3.14; a += 1e-3) {
    const double v = half_tan(a);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(WrapAngle, FundamentalDomain) {
  EXPECT_EQ(wrap_angle(0.5), 0.5);
  EXPECT_EQ(wrap_angle(-kPi), -kPi);
  EXPECT_NEAR(wrap_angle(kTwoPi), 0.0, 1e-15);
  EXPECT_NEAR(wrap_angle(3 * kPi), -kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(kPi), -kPi, 0.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double w = wrap_angle(a);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_NEAR(std::remainder(a - w, kTwoPi), 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace unipark
