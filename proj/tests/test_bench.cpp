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

#include "ququart/bench.hpp"

namespace ququart {
namespace {

NoiseParams confusion_only(const Matrix& c) {
  NoiseParams p = NoiseParams::off();
  p.spam_confusion = c;
  return p;
}

Matrix qubit_confusion(double e0, double e1) {
  Matrix c = Matrix::Identity(kLevels, kLevels);
  c(0, 0) = 1.0 - e0;
  c(0, 1) = e0;
  c(1, 1) = 1.0 - e1;
  c(1, 0) = e1;
  return c;
}

TEST(FitExponential, RecoversExactData) {
  std::vector<double> l;
  std::vector<double> y;
  for (int k = 2; k <= 100; k += 2) {
    l.push_back(k);
    y.push_back(0.5 + 0.5 * std::pow(0.99, k));
  }
  const ExpFit f = fit_exponential(l, y);
  EXPECT_NEAR(f.a, 0.5, 1e-9);
  EXPECT_NEAR(f.b, 0.5, 1e-9);
  EXPECT_NEAR(f.p, 0.99, 1e-9);
  EXPECT_FALSE(f.degenerate);
  EXPECT_TRUE(f.converged);
}

TEST(FitExponential, BinomialNoiseWithinQuotedError) {
  std::mt19937_64 gen(2024);
  std::vector<double> l;
  std::vector<double> y;
  std::vector<double> w;
  const int shots = 300;
  for (int k = 2; k <= 100; k += 2) {
    const double s = 0.5 + 0.5 * std::pow(0.995, k);
    std::binomial_distribution<int> draw(shots, s);
    const double obs = static_cast<double>(draw(gen)) / shots;
    l.push_back(k);
    y.push_back(obs);
    w.push_back(shots / (s * (1.0 - s) + 1.0 / shots));
  }
  const ExpFit f = fit_exponential(l, y, w);
  EXPECT_NEAR(f.p, 0.995, 0.0011);
  EXPECT_NEAR(f.p, 0.995, 3.0 * f.p_err);
  EXPECT_GT(f.p_err, 0.0);
}

TEST(FitExponential, Deterministic) {
  const std::vector<double> l{1, 5, 10, 20};
  const std::vector<double> y{0.97, 0.9, 0.82, 0.7};
  const ExpFit a = fit_exponential(l, y);
  const ExpFit b = fit_exponential(l, y);
  EXPECT_EQ(a.p, b.p);
  EXPECT_EQ(a.a, b.a);
  EXPECT_GT(a.p, 0.0);
  EXPECT_LE(a.p, 1.0);
}

TEST(FitExponential, FlatDataIsDegenerate) {
  const ExpFit f = fit_exponential({2, 4, 6, 8}, {0.8, 0.8, 0.8, 0.8});
  EXPECT_TRUE(f.degenerate);
  EXPECT_NEAR(f.b, 0.0, 1e-15);
  EXPECT_NEAR(f.a, 0.8, 1e-15);
}

TEST(FitExponential, Errors) {
  try {
    fit_exponential({1, 1, 2}, {0.9, 0.8, 0.7});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::fit);
  }
  EXPECT_THROW(fit_exponential({1, 2, 3}, {0.9, 0.8}), Error);
  EXPECT_THROW(fit_exponential({1, 2, 3}, {0.9, 0.8, 0.7}, {1.0, 0.0, 1.0}), Error);
}

TEST(Clifford, GroupStructure) {
  const auto& g = clifford_group();
  ASSERT_EQ(g.size(), 24u);
  EXPECT_EQ(clifford_index(Matrix2::Identity()), 0u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(clifford_index(g[i]), i);
    EXPECT_NO_THROW(clifford_index(g[i].adjoint()));
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NO_THROW(clifford_index(g[i] * g[j]));
  }
  Matrix2 t;
  t << 1, 0, 0, std::exp(kI * kPi / 4.0);
  EXPECT_THROW(clifford_index(t), Error);
}

TEST(Clifford, NativeBlocksImplementGroupElements) {
  for (std::size_t c = 0; c < 24; ++c) {
    for (int level : {1, 2, 3}) {
      Matrix u = Matrix::Identity(kLevels, kLevels);
      for (const NativeOp& op : clifford_to_native(c, 0, level, {}, 0.3)) u = native_matrix(op) * u;
      Matrix block(2, 2);
      block << u(0, 0), u(0, level), u(level, 0), u(level, level);
      EXPECT_LT(phase_invariant_distance(block, clifford_group()[c]), 1e-10) << c << " " << level;
    }
  }
}

TEST(RandomizedBenchmarking, NoiselessFidelityIsOne) {
  RBConfig cfg;
  cfg.lengths = {2, 10, 20, 40};
  cfg.samples = 5;
  cfg.shots = 50;
  const RBResult r = rb_run(cfg, NoiseParams::off(), 3);
  for (double s : r.survival) EXPECT_EQ(s, 1.0);
  EXPECT_FALSE(r.fit_failed);
  EXPECT_TRUE(r.fit.degenerate);
  EXPECT_EQ(r.fidelity, 1.0);
}

TEST(RandomizedBenchmarking, SyntheticDepolarizingRecovered) {
  RBConfig cfg;
  cfg.level = 2;
  for (int k = 2; k <= 62; k += 6) cfg.lengths.push_back(k);
  cfg.samples = 10;
  cfg.shots = 300;
  cfg.depolarizing = 0.02;
  const RBResult r = rb_run(cfg, NoiseParams::off(), 5);
  ASSERT_FALSE(r.fit_failed);
  EXPECT_NEAR(r.fit.p, 0.98, 4.0 * r.fit.p_err + 1e-3);
  EXPECT_NEAR(r.fidelity, 0.99, 2.0 * r.fit.p_err + 1e-3);
}

TEST(RandomizedBenchmarking, Deterministic) {
  RBConfig cfg;
  cfg.lengths = {2, 8, 16};
  cfg.samples = 3;
  cfg.shots = 40;
  const RBResult a = rb_run(cfg, default_noise_params(), 8);
  const RBResult b = rb_run(cfg, default_noise_params(), 8);
  EXPECT_EQ(a.survival, b.survival);
}

TEST(RandomizedBenchmarking, Errors) {
  RBConfig cfg;
  cfg.lengths = {2, 4, 6};
  cfg.level = 0;
  EXPECT_THROW(rb_run(cfg, NoiseParams::off(), 1), Error);
  cfg.level = 1;
  cfg.samples = 0;
  EXPECT_THROW(rb_run(cfg, NoiseParams::off(), 1), Error);
  cfg.samples = 1;
  cfg.lengths.clear();
  EXPECT_THROW(rb_run(cfg, NoiseParams::off(), 1), Error);
}

TEST(RandomizedBenchmarking, GlobalVirtualPhaseInvariance) {
  RBConfig cfg;
  cfg.lengths = {2, 10, 20, 40};
  cfg.samples = 4;
  cfg.shots = 100;
  const RBResult plain = rb_run(cfg, default_noise_params(), 12);
  cfg.extra_virtual_phase = 0.7;
  const RBResult phased = rb_run(cfg, default_noise_params(), 12);
  for (std::size_t i = 0; i < plain.survival.size(); ++i) {
    EXPECT_NEAR(plain.survival[i], phased.survival[i], 1e-9);
  }
}

TEST(Parity, NoiselessIsPerfect) {
  ParityConfig cfg;
  cfg.shots = 0;
  const ParityResult r = parity_benchmark(cfg, NoiseParams::off(), 1);
  EXPECT_NEAR(r.a, 1.0, 1e-12);
  EXPECT_NEAR(r.b, 1.0, 1e-12);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  double extreme = 0.0;
  for (double p : r.parity) extreme = std::max(extreme, std::abs(p));
  EXPECT_NEAR(extreme, 1.0, 1e-12);
}

TEST(Parity, PeriodPiAndNoOtherHarmonics) {
  ParityConfig cfg;
  cfg.shots = 0;
  cfg.phi_points = 16;
  const ParityResult r = parity_benchmark(cfg, NoiseParams::off(), 1);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(r.parity[k], r.parity[k + 8], 1e-12);
  EXPECT_LT(r.harmonics, 0.05 * r.b);
  EXPECT_LT(std::abs(r.offset), 0.05 * r.b);
}

TEST(Parity, SymmetricConfusionGivesQuotedPopulation) {
  ParityConfig cfg;
  cfg.shots = 0;
  const ParityResult r = parity_benchmark(cfg, confusion_only(qubit_confusion(0.02, 0.02)), 1);
  EXPECT_NEAR(r.a, 0.96, 0.01);
  EXPECT_NEAR(r.a, 0.98 * 0.98 + 0.02 * 0.02, 1e-12);
}

TEST(Parity, SampledNoiselessPopulation) {
  ParityConfig cfg;
  cfg.shots = 200;
  const ParityResult r = parity_benchmark(cfg, NoiseParams::off(), 4);
  EXPECT_EQ(r.a, 1.0);
  EXPECT_NEAR(r.b, 1.0, 0.1);
}

TEST(Parity, Errors) {
  ParityConfig cfg;
  cfg.phi_points = 4;
  EXPECT_THROW(parity_benchmark(cfg, NoiseParams::off(), 1), Error);
  cfg = ParityConfig{};
  cfg.ion_b = 2;
  EXPECT_THROW(parity_benchmark(cfg, NoiseParams::off(), 1), Error);
  cfg = ParityConfig{};
  cfg.ion_b = 0;
  EXPECT_THROW(parity_benchmark(cfg, NoiseParams::off(), 1), Error);
  cfg = ParityConfig{};
  cfg.n_ions = 4;
  cfg.ion_b = 2;  // same group as ion 0
  try {
    parity_benchmark(cfg, NoiseParams::off(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported);
  }
}

TEST(OutcomeDistribution, ExactNeedsGateNoiseOff) {
  NativeCircuit c(1);
  c.ops.push_back(NativeOp::rotation(0, 1, kPi, 0.0));
  EXPECT_THROW(outcome_distribution(c, default_noise_params(), 0, 1), Error);
  NoiseParams readout_only = NoiseParams::off();
  readout_only.spam_confusion.reset();
  readout_only.t1 = kInf;
  const Distribution d = outcome_distribution(c, readout_only, 0, 1);
  EXPECT_NEAR(d.at(BasisLabel::parse("1", 4)), 1.0, 1e-15);
}

TEST(BernsteinVazirani, NoiselessIsExact) {
  for (Regime regime : {Regime::qubit, Regime::ququart}) {
    for (std::uint64_t a : {0u, 1u}) {
      EXPECT_NEAR(bv_run(1, a, regime, NoiseParams::off(), 0, 1).success, 1.0, 1e-12);
      EXPECT_EQ(bv_run(1, a, regime, NoiseParams::off(), 500, 1).success, 1.0);
    }
  }
  for (std::uint64_t a = 0; a < 8; ++a) {
    EXPECT_NEAR(bv_run(3, a, Regime::qubit, NoiseParams::off(), 0, 1).success, 1.0, 1e-12);
  }
}

TEST(BernsteinVazirani, QuquartRegimeUsesOneIon) {
  const AlgoResult r = bv_run(1, 1, Regime::ququart, NoiseParams::off(), 0, 1);
  EXPECT_EQ(r.ms_gates, 0u);
}

TEST(BernsteinVazirani, Errors) {
  EXPECT_THROW(bv_run(2, 4, Regime::qubit, NoiseParams::off(), 0, 1), Error);
  EXPECT_THROW(bv_run(0, 0, Regime::qubit, NoiseParams::off(), 0, 1), Error);
  try {
    bv_run(2, 1, Regime::ququart, NoiseParams::off(), 0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported);
  }
}

TEST(BernsteinVazirani, SuccessFactorsOverIons) {
  const Matrix c = qubit_confusion(0.03, 0.05);
  const NoiseParams p = confusion_only(c);
  for (std::uint64_t a = 0; a < 4; ++a) {
    double expect = 1.0;
    for (int q = 0; q < 2; ++q) {
      const int bit = static_cast<int>((a >> (1 - q)) & 1);
      expect *= c(bit, bit).real();
    }
    EXPECT_NEAR(bv_run(2, a, Regime::qubit, p, 0, 1).success, expect, 1e-12) << a;
  }
}

TEST(Grover, NoiselessIsExactWithTwoMs) {
  for (int s = 0; s < 4; ++s) {
    const AlgoResult r = grover_run(s, NoiseParams::off(), 0, 1);
    EXPECT_NEAR(r.success, 1.0, 1e-12) << s;
    EXPECT_EQ(r.ms_gates, 2u);
  }
}

TEST(Grover, NoiseLowersSuccess) {
  const AlgoResult r = grover_run(3, default_noise_params(), 4096, 7);
  EXPECT_LT(r.success + 3.0 * r.success_err, 1.0);
}

TEST(Grover, Errors) {
  EXPECT_THROW(grover_run(4, NoiseParams::off(), 0, 1), Error);
  EXPECT_THROW(grover_run(-1, NoiseParams::off(), 0, 1), Error);
}

}  // namespace
}  // namespace ququart
