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
#include <random>
#include <string>

#include "unipark/control.hpp"
#include "unipark/dynamics.hpp"

#include "data/oracle_values.inc"

namespace unipark {
namespace {

Gains unit() { return Gains{}; }

TEST(SteeringTilde, Examples) {
  const Gains g = unit();
  EXPECT_DOUBLE_EQ(steering_tilde(ControllerId::Genova, g, 1.0, 0.0), 1.0);
  EXPECT_NEAR(steering_tilde(ControllerId::Genova, g, 1.0, kPi / 4), kPi / 4 + 2 / kPi, 1e-15);
  EXPECT_DOUBLE_EQ(steering_tilde(ControllerId::BoLSA, g, 1.0, 0.0), 1.0);
  EXPECT_NEAR(steering_tilde(ControllerId::BoPA, g, kPi / 2, 0.0), 4.0, 1e-14);
  EXPECT_DOUBLE_EQ(steering_tilde(ControllerId::GloFo, g, 1.0, 0.0), 1.0);
  EXPECT_NEAR(steering_tilde(ControllerId::GloBa, g, 0.0, kPi / 4), kPi / 4 + 0.5, 1e-15);
  for (ControllerId id : kAllControllers) {
    EXPECT_EQ(steering_tilde(id, g, 0.0, 0.0), 0.0) << to_string(id);
    EXPECT_EQ(steering_total(id, g, 0.0, 0.0), 0.0) << to_string(id);
  }
}

TEST(SteeringTotal, Examples) {
  EXPECT_NEAR(steering_total(ControllerId::Genova, unit(), 0.0, kPi / 4), 0.5 + kPi / 4, 1e-15);
}

TEST(SteeringTotal, MatchesHighPrecisionOracle) {
  for (const auto& c : kSteeringCases) {
    const ControllerId id = controller_from_string(c.law);
    Gains g;
    g.k1 = c.k1;
    g.k2 = c.k2;
    g.k3 = c.k3;
    g.k4 = c.k4;
    const double w = steering_total(id, g, c.delta, c.gamma);
    if (c.omega == 0.0) {
      EXPECT_EQ(w, 0.0) << c.law;
    } else {
      EXPECT_LE(std::abs(w - c.omega), 1e-12 * std::abs(c.omega))
          << c.law << " delta=" << c.delta << " gamma=" << c.gamma << " got " << w
          << " want " << c.omega;
    }
  }
}

TEST(SteeringTotal, CancellationSplit) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Gains g;
  g.k1 = 1.7;
  for (ControllerId id : kAllControllers) {
    for (int i = 0; i < 100; ++i) {
      const double d = u(rng), c = u(rng);
      EXPECT_NEAR(steering_total(id, g, d, c), 0.5 * g.k1 * std::sin(2 * c) + steering_tilde(id, g, d, c),
                  1e-12 * (1 + std::abs(steering_total(id, g, d, c))));
    }
  }
}

TEST(Steering, OddSymmetry) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0), k(0.3, 3.0);
  for (ControllerId id : kAllControllers) {
    for (int i = 0; i < 200; ++i) {
      Gains g;
      g.k1 = k(rng);
      g.k2 = k(rng);
      g.k3 = k(rng);
      g.k4 = k(rng);
      const double d = u(rng), c = u(rng);
      const double a = steering_total(id, g, d, c);
      EXPECT_NEAR(steering_total(id, g, -d, -c), -a, 1e-12 * (1 + std::abs(a))) << to_string(id);
    }
  }
}

TEST(Steering, BoundedInGammaForS1Laws) {
  for (ControllerId id : {ControllerId::BoLSA, ControllerId::BoFo, ControllerId::BAgAl}) {
    double sup = 0.0;
    for (double c = -kPi + 1e-6; c < kPi; c += 1e-3) {
      sup = std::max(sup, std::abs(steering_tilde(id, unit(), 0.5, c)));
    }
    EXPECT_LT(sup, 10.0) << to_string(id);
  }
}

TEST(Steering, DivergesAtPolarBarrier) {
  for (ControllerId id : {ControllerId::BoPA, ControllerId::BARFLi, ControllerId::BAgAl}) {
    double prev = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const double w = steering_tilde(id, unit(), kPi - std::pow(10.0, -k), 0.1);
      EXPECT_GT(w, prev) << to_string(id);
      prev = w;
    }
    EXPECT_GT(prev, 1e15);
    EXPECT_THROW(steering_tilde(id, unit(), kPi, 0.0), BarrierDomainError);
  }
  EXPECT_THROW(steering_tilde(ControllerId::BoLSA, unit(), 0.0, -kPi), BarrierDomainError);
}

TEST(Steering, GlobalLawsFiniteFarOut) {
  for (ControllerId id : {ControllerId::Genova, ControllerId::GloFo, ControllerId::GloBa,
                          ControllerId::GloBaInterpretable, ControllerId::GloBaConservative}) {
    for (double d : {-1e3, 1e3}) {
      for (double c : {-1e3, 0.0, 1e3}) EXPECT_TRUE(std::isfinite(steering_total(id, unit(), d, c)));
    }
  }
}

TEST(Steering, GloFoAndGenovaShareFirstOrderTerms) {
  const Gains g;
  const double h = 1e-6;
  auto dd = [&](ControllerId id) {
    return (steering_tilde(id, g, h, 0) - steering_tilde(id, g, -h, 0)) / (2 * h);
  };
  auto dg = [&](ControllerId id) {
    return (steering_tilde(id, g, 0, h) - steering_tilde(id, g, 0, -h)) / (2 * h);
  };
  EXPECT_EQ(steering_tilde(ControllerId::GloFo, g, 0, 0), steering_tilde(ControllerId::Genova, g, 0, 0));
  EXPECT_NEAR(dd(ControllerId::GloFo), dd(ControllerId::Genova), 1e-8);
  // In gamma they differ by k3 k1/k2, the slope of the Si term of zeta.
  EXPECT_NEAR(dg(ControllerId::GloFo) - dg(ControllerId::Genova), g.k3 * g.k1 / g.k2, 1e-8);
}

TEST(Backstepping, AlternativeLaws) {
  const Gains g = unit();
  EXPECT_DOUBLE_EQ(g.k5(), 6.0);
  EXPECT_EQ(interpretable_backstepping(g, 0.0, 0.0), 0.0);
  EXPECT_EQ(conservative_backstepping(g, 0.0, 0.0), 0.0);
  Gains h;
  h.k1 = 0.7;
  h.k2 = 1.3;
  h.k3 = 2.2;
  h.k4 = 0.4;
  const double c = 1.0 - h.k1 * h.k2 / h.k3 * (1.0 + h.k2);
  const double want = h.k4 + h.k3 / (2 * h.k2) * c * c + h.k1 * (1.0 + h.k2);
  EXPECT_NEAR(interpretable_gain_factor(h, 0.0, 0.0), want, 1e-15);
  // Along z the law is a positive gain times z.
  EXPECT_GT(interpretable_backstepping(h, 0.3, 0.2) * globa_z(h, 0.3, 0.2), 0.0);
  EXPECT_GT(conservative_backstepping(h, -0.3, 0.9) * globa_z(h, -0.3, 0.9), 0.0);
}

TEST(Gains, Validation) {
  Gains g;
  g.k3 = 0.0;
  EXPECT_THROW(validate_gains(ControllerId::Genova, g), ContractViolation);
  g.k3 = 1.0;
  g.k4 = -1.0;
  EXPECT_NO_THROW(validate_gains(ControllerId::Genova, g));
  EXPECT_THROW(validate_gains(ControllerId::GloBa, g), ContractViolation);
  EXPECT_THROW(Controller(ControllerId::BARFLi, g), ContractViolation);
  g.k4 = 1.0;
  g.k2 = 2.0;
  EXPECT_FALSE(Controller(ControllerId::Genova, g).strict_condition_ok());
  EXPECT_TRUE(Controller(ControllerId::GloBa, g).strict_condition_ok());
  const double v[] = {1, 2};
  EXPECT_THROW(Gains::from_vector(v, 2), ConfigError);
}

TEST(Names, RoundTrip) {
  for (ControllerId id : kAllControllers) EXPECT_EQ(controller_from_string(to_string(id)), id);
  EXPECT_THROW(controller_from_string("GENOVA?"), ConfigError);
  EXPECT_EQ(state_space_of(ControllerId::BoLSA), StateSpaceId::S1);
  EXPECT_EQ(state_space_of(ControllerId::BARFLi), StateSpaceId::S2);
  EXPECT_EQ(state_space_of(ControllerId::BAgAl), StateSpaceId::S3);
  EXPECT_EQ(state_space_of(ControllerId::GloBaConservative), StateSpaceId::S);
}

TEST(Velocity, Law) {
  EXPECT_EQ(velocity({0, 1, 0}, 1), 0.0);
  EXPECT_DOUBLE_EQ(velocity({2, 0.3, 0}, 1.5), 3.0);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const CartesianState c{u(rng), u(rng), u(rng)};
    EXPECT_NEAR(velocity(cartesian_to_polar(c), 1.3), velocity_cartesian(c, 1.3), 1e-12);
  }
}

TEST(HeadingOnly, ExamplesAndRates) {
  EXPECT_EQ(heading_only(1.0, 2.0, HeadingLaw::Linear), -2.0);
  EXPECT_DOUBLE_EQ(heading_only(kPi / 2, 1.0, HeadingLaw::Sine), -1.0);
  EXPECT_NEAR(heading_only(kPi / 2, 1.0, HeadingLaw::HalfTan), -1.0, 1e-15);
  EXPECT_THROW(heading_only(kPi, 1.0, HeadingLaw::HalfTan), BarrierDomainError);
  EXPECT_THROW(heading_only(-4.0, 1.0, HeadingLaw::Sine), BarrierDomainError);
  for (HeadingLaw law : {HeadingLaw::Linear, HeadingLaw::Sine, HeadingLaw::HalfTan}) {
    for (double th : {-2.5, -0.4, 0.9, 3.0}) {
      const double h = 1e-6;
      const double dv = (heading_lyapunov(th + h, law) - heading_lyapunov(th - h, law)) / (2 * h);
      const double rate = dv * heading_only(th, 0.8, law);
      EXPECT_NEAR(heading_lyapunov_rate(th, 0.8, law), rate, 1e-6 * (1 + std::abs(rate)));
    }
  }
}

TEST(ReverseParking, Wrap) {
  const ControlInput a = reverse_parking_wrap({1.0, 0.5});
  EXPECT_EQ(a.v, -1.0);
  EXPECT_EQ(a.omega, 0.5);
  const ControlInput b = reverse_parking_wrap(a);
  EXPECT_EQ(b.v, 1.0);
  EXPECT_EQ(b.omega, 0.5);
  const ControlInput c = reverse_parking_wrap({0.0, -2.0});
  EXPECT_EQ(c.v, 0.0);
  EXPECT_EQ(c.omega, -2.0);
}

TEST(Dynamics, ClosedLoopField) {
  const PolarRate r = closed_loop_field(ControllerId::Genova, unit(), {1, 1, 0});
  EXPECT_DOUBLE_EQ(r.rho, -1.0);
  EXPECT_DOUBLE_EQ(r.delta, 0.0);
  EXPECT_DOUBLE_EQ(r.gamma, -1.0);
  EXPECT_THROW(open_loop_polar_field({0, 0, 0}, {1, 0}), SingularityError);
}

TEST(Dynamics, PolarFieldMatchesCartesianKinematics) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const CartesianState c{u(rng), u(rng), u(rng)};
    const ControlInput in{u(rng), u(rng)};
    const PolarState p = cartesian_to_polar(c);
    const PolarRate pr = open_loop_polar_field(p, in);
    const CartesianRate cr = unicycle_field(c, in);
    const double h = 1e-6;
    const PolarState q = cartesian_to_polar({c.x + h * cr.x, c.y + h * cr.y, c.theta + h * cr.theta});
    const PolarState m = cartesian_to_polar({c.x - h * cr.x, c.y - h * cr.y, c.theta - h * cr.theta});
    auto unwrap = [](double a) { return std::remainder(a, kTwoPi); };
    EXPECT_NEAR(pr.rho, (q.rho - m.rho) / (2 * h), 1e-5 * (1 + std::abs(pr.rho)));
    EXPECT_NEAR(pr.delta, unwrap(q.delta - m.delta) / (2 * h), 1e-5 * (1 + std::abs(pr.delta)));
    EXPECT_NEAR(pr.gamma, unwrap(q.gamma - m.gamma) / (2 * h), 1e-5 * (1 + std::abs(pr.gamma)));
  }
}

}  // namespace
}  // namespace unipark
