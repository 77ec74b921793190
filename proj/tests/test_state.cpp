// Copyright 2026 The ququart-emu Authors
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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ququart/gates.hpp"
#include "ququart/state.hpp"
#include "test_util.hpp"

namespace ququart {
namespace {

using testing::amplitudes;
using testing::dense_pair;
using testing::dense_single;
using testing::random_unitary;
using testing::register_from;

TEST(NewRegister, SingleIonStartsInZero) {
  QuditRegister reg(1);
  ASSERT_EQ(reg.size(), 4u);
  EXPECT_EQ(reg.amplitudes()[0], Complex(1.0));
  for (int i = 1; i < 4; ++i) EXPECT_EQ(reg.amplitudes()[i], Complex(0.0));
}

TEST(NewRegister, TwoIonsHaveSixteenEntries) {
  QuditRegister reg(2);
  ASSERT_EQ(reg.size(), 16u);
  EXPECT_EQ(reg.amplitudes()[0], Complex(1.0));
}

TEST(NewRegister, EightIonsHaveUnitNorm) {
  QuditRegister reg(8);
  EXPECT_EQ(reg.size(), 65536u);
  EXPECT_NEAR(reg.norm(), 1.0, 1e-15);
}

TEST(NewRegister, RejectsBadShapes) {
  EXPECT_THROW(QuditRegister(0), Error);
  EXPECT_THROW(QuditRegister(1, 1), Error);
  try {
    QuditRegister(20, 4, RegisterLimits{1 << 20});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
}

TEST(NewRegister, IonZeroIsMostSignificant) {
  QuditRegister reg(3);
  EXPECT_EQ(reg.stride(0), 16u);
  EXPECT_EQ(reg.stride(2), 1u);
  EXPECT_EQ(reg.label_of(1 * 16 + 2 * 4 + 3).str(), "123");
  EXPECT_EQ(reg.index_of(BasisLabel::parse("123", 4)), 27u);
}

TEST(ApplySingle, IdentityLeavesStateUnchanged) {
  std::mt19937_64 gen(1);
  const Vector v = testing::random_state(64, gen);
  QuditRegister reg = register_from(3, 4, v);
  reg.apply_single(1, Matrix::Identity(4, 4));
  EXPECT_LT((amplitudes(reg) - v).norm(), 1e-14);
}

TEST(ApplySingle, PermutationMovesZeroToOne) {
  Matrix p = Matrix::Identity(4, 4);
  p.row(0).swap(p.row(1));
  QuditRegister reg(1);
  reg.apply_single(0, p);
  EXPECT_EQ(reg.amplitudes()[1], Complex(1.0));
}

TEST(ApplySingle, MatchesDenseOracle) {
  std::mt19937_64 gen(2);
  for (int n = 1; n <= 3; ++n) {
    for (int ion = 0; ion < n; ++ion) {
      const Eigen::Index dim = static_cast<Eigen::Index>(std::pow(4, n));
      const Vector v = testing::random_state(dim, gen);
      const Matrix u = random_unitary(4, gen);
      QuditRegister reg = register_from(n, 4, v);
      reg.apply_single(ion, u);
      EXPECT_LT((amplitudes(reg) - dense_single(n, 4, ion, u) * v).norm(), 1e-10);
      EXPECT_NEAR(reg.norm(), 1.0, 1e-12);
    }
  }
}

TEST(ApplySingle, ErrorPaths) {
  QuditRegister reg(2);
  Matrix bad = Matrix::Identity(4, 4);
  bad(0, 0) = 2.0;
  try {
    reg.apply_single(0, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
  }
  try {
    reg.apply_single(2, Matrix::Identity(4, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::index);
  }
  EXPECT_THROW(reg.apply_single(0, Matrix::Identity(3, 3)), Error);
}

TEST(ApplyPair, IdentityLeavesStateUnchanged) {
  std::mt19937_64 gen(3);
  const Vector v = testing::random_state(16, gen);
  QuditRegister reg = register_from(2, 4, v);
  reg.apply_pair(0, 1, Matrix::Identity(16, 16));
  EXPECT_LT((amplitudes(reg) - v).norm(), 1e-14);
}

TEST(ApplyPair, SwapExchangesDigits) {
  Matrix swap = Matrix::Zero(16, 16);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) swap(b * 4 + a, a * 4 + b) = 1.0;
  }
  QuditRegister reg(3);
  reg.set_basis_state(BasisLabel::parse("013", 4));
  reg.apply_pair(0, 2, swap);
  EXPECT_NEAR(std::abs(reg.amplitude(BasisLabel::parse("310", 4))), 1.0, 1e-15);
}

TEST(ApplyPair, MatchesDenseOracleOnThreeIons) {
  std::mt19937_64 gen(4);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}}) {
    const Vector v = testing::random_state(64, gen);
    const Matrix u = random_unitary(16, gen);
    QuditRegister reg = register_from(3, 4, v);
    reg.apply_pair(a, b, u);
    EXPECT_LT((amplitudes(reg) - dense_pair(3, 4, a, b, u) * v).norm(), 1e-10) << a << "," << b;
  }
}

TEST(ApplyPair, AdjacentPairEqualsKroneckerOrder) {
  std::mt19937_64 gen(5);
  const Matrix ua = random_unitary(4, gen);
  const Matrix ub = random_unitary(4, gen);
  const Vector v = testing::random_state(16, gen);
  QuditRegister reg = register_from(2, 4, v);
  reg.apply_pair(0, 1, testing::kron(ua, ub));
  QuditRegister ref = register_from(2, 4, v);
  ref.apply_single(0, ua);
  ref.apply_single(1, ub);
  EXPECT_LT((amplitudes(reg) - amplitudes(ref)).norm(), 1e-12);
}

TEST(ApplyPair, ErrorPaths) {
  QuditRegister reg(2);
  try {
    reg.apply_pair(1, 1, Matrix::Identity(16, 16));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::index);
  }
  EXPECT_THROW(reg.apply_pair(0, 2, Matrix::Identity(16, 16)), Error);
  Matrix bad = Matrix::Identity(16, 16);
  bad(3, 4) = 0.5;
  EXPECT_THROW(reg.apply_pair(0, 1, bad), Error);
}

TEST(Populations, ZeroState) {
  QuditRegister reg(2);
  const auto p = reg.populations();
  EXPECT_EQ(p[0], 1.0);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_EQ(p[i], 0.0);
}

TEST(Populations, EqualSuperposition) {
  QuditRegister reg(1);
  reg.apply_single(0, r_phi_matrix(1, kPi / 2.0, 0.0));
  const auto p = reg.populations();
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(p[3], 0.0);
}

TEST(Populations, AfterMsQuarterPi) {
  QuditRegister reg(2);
  reg.apply_pair(0, 1, ms_matrix(kPi / 4.0));
  const auto p = reg.populations();
  EXPECT_NEAR(p[reg.index_of(BasisLabel::parse("00", 4))], 0.5, 1e-12);
  EXPECT_NEAR(p[reg.index_of(BasisLabel::parse("11", 4))], 0.5, 1e-12);
  EXPECT_NEAR(p[reg.index_of(BasisLabel::parse("01", 4))], 0.0, 1e-12);
  EXPECT_NEAR(p[reg.index_of(BasisLabel::parse("10", 4))], 0.0, 1e-12);
}

TEST(Sample, ZeroStateAlwaysZero) {
  QuditRegister reg(3);
  const Histogram h = reg.sample(100, 7);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h.begin()->first.str(), "000");
  EXPECT_EQ(h.begin()->second, 100u);
}

TEST(Sample, FiftyFiftyWithinFiveSigma) {
  QuditRegister reg(1);
  reg.apply_single(0, r_phi_matrix(1, kPi / 2.0, 0.0));
  const Histogram h = reg.sample(10000, 11);
  const double n0 = static_cast<double>(h.at(BasisLabel::parse("0", 4)));
  EXPECT_LT(std::abs(n0 - 5000.0), 5.0 * 50.0);
  EXPECT_EQ(h.at(BasisLabel::parse("0", 4)) + h.at(BasisLabel::parse("1", 4)), 10000u);
}

TEST(Sample, DeterministicForSeed) {
  std::mt19937_64 gen(6);
  QuditRegister reg = register_from(2, 4, testing::random_state(16, gen));
  EXPECT_EQ(reg.sample(500, 99), reg.sample(500, 99));
  EXPECT_NE(reg.sample(500, 99), reg.sample(500, 100));
  EXPECT_THROW(reg.sample(0, 1), Error);
}

TEST(Overlap, SelfOverlapIsOne) {
  std::mt19937_64 gen(7);
  QuditRegister reg = register_from(2, 4, testing::random_state(16, gen));
  EXPECT_NEAR(std::abs(reg.overlap(reg) - 1.0), 0.0, 1e-14);
}

TEST(Overlap, OrthogonalBasisStates) {
  QuditRegister a(2);
  QuditRegister b(2);
  b.set_basis_state(BasisLabel::parse("01", 4));
  EXPECT_EQ(a.overlap(b), Complex(0.0));
}

TEST(Overlap, PauliXYOnZeroOne) {
  // qubit state |01> in levels {0,1}; XY applied as a unitary
  QuditRegister psi(2);
  psi.set_basis_state(BasisLabel::parse("01", 4));
  QuditRegister w = psi;
  Matrix x = Matrix::Identity(4, 4);
  x.topLeftCorner(2, 2) << 0, 1, 1, 0;
  Matrix y = Matrix::Identity(4, 4);
  y.topLeftCorner(2, 2) << 0, -kI, kI, 0;
  w.apply_single(0, x);
  w.apply_single(1, y);
  EXPECT_NEAR(std::abs(w.amplitude(BasisLabel::parse("10", 4)) - (-kI)), 0.0, 1e-15);
  EXPECT_EQ(psi.overlap(w), Complex(0.0));
}

TEST(Overlap, ShapeMismatch) {
  QuditRegister a(2);
  QuditRegister b(3);
  try {
    (void)a.overlap(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape);
  }
}

TEST(BasisLabel, ParseRejectsBadDigits) {
  EXPECT_THROW(BasisLabel::parse("04", 4), Error);
  EXPECT_THROW(BasisLabel::parse("0a", 4), Error);
  QuditRegister reg(2);
  EXPECT_THROW(reg.set_basis_state(BasisLabel::parse("0", 4)), Error);
}

// Properties

TEST(Property, NormPreservedOverLongSequences) {
  std::mt19937_64 gen(8);
  QuditRegister reg(3);
  const int steps = 200;
  for (int s = 0; s < steps; ++s) {
    if (s % 3 == 0) {
      const int a = static_cast<int>(gen() % 3);
      const int b = (a + 1 + static_cast<int>(gen() % 2)) % 3;
      reg.apply_pair(a, b, random_unitary(16, gen));
    } else {
      reg.apply_single(static_cast<int>(gen() % 3), random_unitary(4, gen));
    }
  }
  EXPECT_LT(std::abs(reg.norm() - 1.0), 1e-10 * steps);
}

TEST(Property, SingleIonOpsOnDifferentIonsCommute) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = testing::random_state(64, gen);
    const Matrix u = random_unitary(4, gen);
    const Matrix w = random_unitary(4, gen);
    const int k = static_cast<int>(gen() % 3);
    const int m = (k + 1 + static_cast<int>(gen() % 2)) % 3;
    QuditRegister a = register_from(3, 4, v);
    QuditRegister b = register_from(3, 4, v);
    a.apply_single(k, u);
    a.apply_single(m, w);
    b.apply_single(m, w);
    b.apply_single(k, u);
    EXPECT_LT((amplitudes(a) - amplitudes(b)).norm(), 1e-13);
  }
}

TEST(Property, DenseOracleAgreementRandomCircuits) {
  std::mt19937_64 gen(10);
  for (int n = 2; n <= 3; ++n) {
    const Eigen::Index dim = static_cast<Eigen::Index>(std::pow(4, n));
    Vector v = testing::random_state(dim, gen);
    QuditRegister reg = register_from(n, 4, v);
    for (int s = 0; s < 10; ++s) {
      if (gen() % 2) {
        const int ion = static_cast<int>(gen() % n);
        const Matrix u = random_unitary(4, gen);
        reg.apply_single(ion, u);
        v = dense_single(n, 4, ion, u) * v;
      } else {
        const int a = static_cast<int>(gen() % n);
        const int b = (a + 1 + static_cast<int>(gen() % (n - 1))) % n;
        const Matrix u = random_unitary(16, gen);
        reg.apply_pair(a, b, u);
        v = dense_pair(n, 4, a, b, u) * v;
      }
      EXPECT_LT((amplitudes(reg) - v).norm(), 1e-10);
    }
  }
}

TEST(Property, QubitRegistersWork) {
  // d is a runtime parameter; d = 2 follows the same conventions
  QuditRegister reg(2, 2);
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  reg.apply_single(1, x);
  EXPECT_EQ(reg.label_of(1).str(), "01");
  EXPECT_NEAR(std::abs(reg.amplitude(BasisLabel::parse("01", 2))), 1.0, 1e-15);
}

}  // namespace
}  // namespace ququart
