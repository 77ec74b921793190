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

#include "ququart/noise.hpp"
#include "ququart/transpiler.hpp"
#include "test_util.hpp"

namespace ququart {
namespace {

Matrix confusion_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(kLevels, kLevels);
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

TEST(DefaultNoise, QuotedValues) {
  const NoiseParams p = default_noise_params();
  EXPECT_EQ(p.t1, 53e-3);
  EXPECT_EQ(p.t2_01, 16e-3);
  EXPECT_EQ(p.t2_mag, 1e-3);
  EXPECT_EQ(p.crosstalk_ratio, 0.04);
  EXPECT_EQ(p.pi_pulse_duration, 20e-6);
  EXPECT_EQ(p.ms_duration, 800e-6);
  EXPECT_EQ(p.readout_stage_duration, 1e-3);
  EXPECT_FALSE(p.spam_confusion.has_value());
  EXPECT_LT((effective_confusion(p) - spam_from_decay(p)).norm(), 1e-15);
  EXPECT_NO_THROW(p.validate());
}

TEST(NoiseParams, OffIsIdeal) {
  EXPECT_TRUE(NoiseParams::off().ideal());
  EXPECT_FALSE(default_noise_params().ideal());
  EXPECT_NO_THROW(NoiseParams::off().validate());
}

TEST(NoiseParams, ValidationErrors) {
  NoiseParams p;
  p.t1 = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = NoiseParams{};
  p.crosstalk_ratio = 1.0;
  EXPECT_THROW(p.validate(), Error);
  p = NoiseParams{};
  p.t2_01 = 1.0;  // above 2 t1
  EXPECT_THROW(p.validate(), Error);
  p = NoiseParams{};
  p.spam_confusion = confusion_rows({{0.9, 0.0, 0.0, 0.0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  try {
    p.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
  }
  p = NoiseParams{};
  p.pulse_depolarizing = -0.1;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Decoherence, ZeroDurationUnchanged) {
  std::mt19937_64 gen(1);
  const Vector v = testing::random_state(16, gen);
  QuditRegister reg = testing::register_from(2, kLevels, v);
  Rng rng(1);
  apply_decoherence(reg, 0.0, default_noise_params(), rng);
  EXPECT_LT((testing::amplitudes(reg) - v).norm(), 1e-15);
  EXPECT_THROW(apply_decoherence(reg, -1.0, default_noise_params(), rng), Error);
}

TEST(Decoherence, HalfLifeDecay) {
  const NoiseParams p = default_noise_params();
  const int n = 10000;
  int excited = 0;
  for (int s = 0; s < n; ++s) {
    QuditRegister reg(1);
    reg.set_basis_state(BasisLabel::parse("1", 4));
    Rng rng = Rng::stream(11, s);
    apply_decoherence(reg, p.t1 * std::log(2.0), p, rng);
    excited += reg.ion_populations(0)[1] > 0.5 ? 1 : 0;
  }
  EXPECT_NEAR(excited / static_cast<double>(n), 0.5, 0.02);
}

TEST(Decoherence, PopulationDecaysExponentially) {
  // level 3 decays with the same lifetime
  const NoiseParams p = default_noise_params();
  const int n = 10000;
  const double t = 20e-3;
  int excited = 0;
  for (int s = 0; s < n; ++s) {
    QuditRegister reg(1);
    reg.set_basis_state(BasisLabel::parse("3", 4));
    Rng rng = Rng::stream(12, s);
    apply_decoherence(reg, t, p, rng);
    excited += reg.ion_populations(0)[3] > 0.5 ? 1 : 0;
  }
  const double expect = std::exp(-t / p.t1);
  EXPECT_NEAR(excited / static_cast<double>(n), expect, 3.0 * std::sqrt(expect * (1 - expect) / n));
}

/// Ensemble |rho_0j| after `t`, with per-trajectory quasi-static detunings.
std::pair<double, double> ensemble_coherence(int j, double t, const NoiseParams& p, int n) {
  Complex sum = 0.0;
  std::vector<Complex> values;
  for (int s = 0; s < n; ++s) {
    Trajectory tr(1, p, Rng::stream(21 + j, s));
    tr.reg.apply_single(0, r_phi_matrix(j, kPi / 2.0, -kPi / 2.0));  // (|0> + |j>)/sqrt2
    apply_decoherence(tr.reg, t, p, tr.rng, &tr.detuning);
    const Complex c = tr.reg.amplitudes()[0] * std::conj(tr.reg.amplitudes()[j]);
    values.push_back(c);
    sum += c;
  }
  const Complex mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (const Complex& c : values) var += std::norm(c - mean);
  return {std::abs(mean), std::sqrt(var / (n - 1) / n)};
}

TEST(Decoherence, QubitCoherenceDecaysAtT2) {
  const NoiseParams p = default_noise_params();
  const auto [mag, se] = ensemble_coherence(1, p.t2_01, p, 10000);
  EXPECT_NEAR(mag, std::exp(-1.0) / 2.0, 3.0 * se + 1e-12);
}

TEST(Decoherence, MagneticCoherenceDecaysAtT2Mag) {
  const NoiseParams p = default_noise_params();
  for (int j : {2, 3}) {
    const auto [mag, se] = ensemble_coherence(j, p.t2_mag, p, 10000);
    EXPECT_NEAR(mag, std::exp(-1.0) / 2.0, 3.0 * se + 1e-12) << j;
  }
}

TEST(Crosstalk, ZeroRatioOnlyOriginal) {
  const auto ops = inject_crosstalk(NativeOp::rotation(3, 1, kPi, 0.2), 0.0, 8);
  ASSERT_EQ(ops.size(), 1u);
}

TEST(Crosstalk, NearestNeighbours) {
  const NativeOp op = NativeOp::rotation(3, 2, kPi, 0.3);
  const auto ops = inject_crosstalk(op, 0.04, 8);
  ASSERT_EQ(ops.size(), 3u);
  EXPECT_EQ(ops[1].ions[0], 2);
  EXPECT_EQ(ops[2].ions[0], 4);
  for (int k = 1; k < 3; ++k) {
    EXPECT_NEAR(ops[k].theta, 0.04 * kPi, 1e-15);
    EXPECT_EQ(ops[k].phi, 0.3);
    EXPECT_EQ(ops[k].level, 2);
    EXPECT_EQ(ops[k].duration, 0.0);
  }
}

TEST(Crosstalk, EdgeIonHasOneSpectator) {
  const auto ops = inject_crosstalk(NativeOp::rotation(0, 1, kPi, 0.0), 0.04, 8);
  ASSERT_EQ(ops.size(), 2u);
  EXPECT_EQ(ops[1].ions[0], 1);
}

TEST(Crosstalk, MsLeaksOntoNeighbours) {
  const auto ops = inject_crosstalk(NativeOp::ms(2, 3, kPi / 4.0), 0.04, 8);
  // neighbours 1 (of 2) and 4 (of 3) couple to the partner ion
  ASSERT_EQ(ops.size(), 3u);
  EXPECT_EQ(ops[1].ions[0], 1);
  EXPECT_EQ(ops[1].ions[1], 3);
  EXPECT_EQ(ops[2].ions[0], 4);
  EXPECT_EQ(ops[2].ions[1], 2);
  EXPECT_NEAR(ops[1].chi, 0.04 * kPi / 4.0, 1e-15);
}

TEST(Crosstalk, SpectatorRotatesInTrajectory) {
  NoiseParams p = NoiseParams::off();
  p.crosstalk_ratio = 0.04;
  NativeCircuit c(2);
  c.ops.push_back(NativeOp::rotation(0, 1, kPi, 0.0));
  Trajectory t(2, p, Rng(1));
  evolve_trajectory(t, c, p);
  EXPECT_NEAR(t.reg.ion_populations(1)[1], std::pow(std::sin(0.02 * kPi), 2), 1e-12);
  EXPECT_NEAR(t.reg.ion_populations(0)[1], 1.0, 1e-12);
}

TEST(Shelving, IdealLevelsReadCorrectly) {
  NoiseParams p = NoiseParams::off();
  p.spam_confusion.reset();
  for (int level = 0; level < 4; ++level) {
    QuditRegister reg(1);
    reg.set_basis_state(BasisLabel{{level}});
    Rng rng(5);
    EXPECT_EQ(shelving_readout(reg, p, rng).digits[0], level);
  }
}

TEST(Shelving, DecayBeforeStageTwo) {
  const NoiseParams p = default_noise_params();
  const int n = 10000;
  int zeros = 0;
  for (int s = 0; s < n; ++s) {
    QuditRegister reg(1);
    reg.set_basis_state(BasisLabel::parse("1", 4));
    Rng rng = Rng::stream(31, s);
    zeros += shelving_readout(reg, p, rng).digits[0] == 0 ? 1 : 0;
  }
  EXPECT_NEAR(zeros / static_cast<double>(n), 1.0 - std::exp(-1.0 / 53.0), 0.005);
}

TEST(Shelving, MonteCarloMatchesAnalyticConfusion) {
  const NoiseParams p = default_noise_params();
  const Matrix analytic = spam_from_decay(p);
  const int n = 10000;
  for (int level = 0; level < 4; ++level) {
    std::array<int, 4> counts{};
    for (int s = 0; s < n; ++s) {
      QuditRegister reg(1);
      reg.set_basis_state(BasisLabel{{level}});
      Rng rng = Rng::stream(40 + level, s);
      ++counts[shelving_readout(reg, p, rng).digits[0]];
    }
    for (int c = 0; c < 4; ++c) {
      const double q = analytic(level, c).real();
      EXPECT_NEAR(counts[c] / static_cast<double>(n), q, 5.0 * std::sqrt(q * (1 - q) / n) + 1e-12) << level << c;
    }
  }
}

TEST(SpamFromDecay, Structure) {
  NoiseParams p;
  p.t1 = kInf;
  EXPECT_LT((spam_from_decay(p) - Matrix::Identity(4, 4)).norm(), 1e-15);
  const Matrix m = spam_from_decay(default_noise_params());
  EXPECT_NO_THROW(check_stochastic(m));
  EXPECT_GT(m(1, 0).real(), 0.0);
  EXPECT_EQ(m(1, 2), Complex(0.0));
  EXPECT_EQ(m(1, 3), Complex(0.0));
  const double mean_diag = m.diagonal().real().mean();
  EXPECT_NEAR(mean_diag, 0.96, 0.02);
  EXPECT_GE(mean_diag, 0.95);
  EXPECT_LE(mean_diag, 0.99);
}

TEST(ApplyConfusion, IdentityUnchanged) {
  Rng rng(1);
  const BasisLabel in = BasisLabel::parse("0123", 4);
  EXPECT_EQ(apply_confusion(in, Matrix::Identity(4, 4), rng), in);
}

TEST(ApplyConfusion, DeterministicRow) {
  const Matrix m = confusion_rows({{0, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  Rng rng(2);
  for (int s = 0; s < 100; ++s) EXPECT_EQ(apply_confusion(BasisLabel::parse("0", 4), m, rng).digits[0], 1);
}

TEST(ApplyConfusion, UniformRows) {
  const Matrix m = Matrix::Constant(4, 4, 0.25);
  Rng rng(3);
  std::array<int, 4> counts{};
  const int n = 10000;
  for (int s = 0; s < n; ++s) ++counts[apply_confusion(BasisLabel::parse("2", 4), m, rng).digits[0]];
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) EXPECT_LT(std::abs(c - n / 4.0), 5.0 * sigma);
}

TEST(ApplyConfusion, RejectsNonStochastic) {
  Rng rng(4);
  Matrix bad = Matrix::Identity(4, 4);
  bad(0, 1) = 0.5;
  EXPECT_THROW(apply_confusion(BasisLabel::parse("0", 4), bad, rng), Error);
  EXPECT_THROW(check_stochastic(Matrix::Identity(3, 3)), Error);
}

TEST(ConfuseDistribution, MatchesKroneckerProduct) {
  const Matrix c = spam_from_decay(default_noise_params());
  std::mt19937_64 gen(5);
  const Vector v = testing::random_state(16, gen);
  std::vector<double> probs(16);
  for (int i = 0; i < 16; ++i) probs[i] = std::norm(v(i));
  const std::vector<double> out = confuse_distribution(probs, 2, c);
  const Matrix k = testing::kron(c, c);  // row = true pair, column = detected pair
  for (int d = 0; d < 16; ++d) {
    double expect = 0.0;
    for (int t = 0; t < 16; ++t) expect += probs[t] * k(t, d).real();
    EXPECT_NEAR(out[d], expect, 1e-14);
  }
}

TEST(PulseDepolarizing, FlipsAfterPiPulse) {
  NoiseParams p = NoiseParams::off();
  p.pulse_depolarizing = 0.2;
  NativeCircuit c(1);
  c.ops.push_back(NativeOp::rotation(0, 1, kPi, 0.0));
  const std::size_t n = 10000;
  const Histogram h = run_shots(c, p, n, 3);
  const double p0 = h.count(BasisLabel::parse("0", 4)) ? h.at(BasisLabel::parse("0", 4)) / double(n) : 0.0;
  // X or Y (half of the non-identity draws plus none of I, Z) undo the flip
  EXPECT_NEAR(p0, 0.1, 5.0 * std::sqrt(0.1 * 0.9 / n));
}

TEST(PairPauli, AreUnitaryPaulis) {
  for (int j = 1; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      const Matrix& m = pair_pauli(j, k).matrix();
      EXPECT_LT((m * m - Matrix::Identity(4, 4)).norm(), 1e-15);
    }
  }
  EXPECT_THROW(pair_pauli(0, 1), Error);
}

// Properties

NativeCircuit sample_circuit() {
  NativeCircuit c(2);
  c.ops.push_back(NativeOp::rotation(0, 1, 1.1, 0.3));
  c.ops.push_back(NativeOp::rotation(1, 2, 0.7, -0.4));
  c.ops.push_back(NativeOp::ms(0, 1, 0.5));
  c.ops.push_back(NativeOp::virtual_phase(0, 1, 0.9));
  c.ops.push_back(NativeOp::rotation(0, 3, 2.1, 1.0));
  return c;
}

TEST(Property, NoiseOffEqualsNoiselessSimulator) {
  const NativeCircuit c = sample_circuit();
  EXPECT_EQ(run_shots(c, NoiseParams::off(), 2000, 9), ideal_state(c).sample(2000, 9));
  // the trajectory path with every channel off gives the exact final state
  NoiseParams p = NoiseParams::off();
  p.spam_confusion.reset();
  Trajectory t(2, p, Rng(1));
  evolve_trajectory(t, c, p);
  EXPECT_LT(testing::phase_distance(testing::amplitudes(t.reg), testing::amplitudes(ideal_state(c))), 1e-12);
}

TEST(Property, ShelvingWithoutDecayIsProjective) {
  const NativeCircuit c = sample_circuit();
  NoiseParams p = NoiseParams::off();
  p.spam_confusion.reset();
  const std::size_t n = 20000;
  const Histogram h = run_shots(c, p, n, 17);
  const QuditRegister ideal = ideal_state(c);
  const auto pops = ideal.populations();
  for (std::size_t i = 0; i < pops.size(); ++i) {
    const auto it = h.find(ideal.label_of(i));
    const double got = it == h.end() ? 0.0 : it->second / static_cast<double>(n);
    EXPECT_NEAR(got, pops[i], 5.0 * std::sqrt(pops[i] * (1 - pops[i]) / n) + 1e-12);
  }
}

TEST(Property, ShotsAreIndependentStreams) {
  const NativeCircuit c = sample_circuit();
  const NoiseParams p = default_noise_params();
  const std::size_t n = 200;
  Histogram manual;
  for (std::size_t s = 0; s < n; ++s) {
    Trajectory t(c.n_ions, p, Rng::stream(77, s));
    evolve_trajectory(t, c, p);
    ++manual[read_trajectory(t, p)];
  }
  EXPECT_EQ(run_shots(c, p, n, 77), manual);
  EXPECT_EQ(run_shots(c, p, n, 77), run_shots(c, p, n, 77));
}

TEST(Property, StandardErrorHalvesWithFourTimesTrajectories) {
  const NoiseParams p = default_noise_params();
  std::vector<double> log_n;
  std::vector<double> log_se;
  const int repeats = 40;
  for (int n : {250, 500, 1000, 2000, 4000}) {
    std::vector<double> est;
    for (int r = 0; r < repeats; ++r) {
      int excited = 0;
      for (int s = 0; s < n; ++s) {
        QuditRegister reg(1);
        reg.set_basis_state(BasisLabel::parse("1", 4));
        Rng rng = Rng::stream(1000 + r, s);
        apply_decoherence(reg, p.t1, p, rng);
        excited += reg.ion_populations(0)[1] > 0.5;
      }
      est.push_back(excited / static_cast<double>(n));
    }
    double mean = 0.0;
    for (double e : est) mean += e / repeats;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean) / (repeats - 1);
    log_n.push_back(std::log(n));
    log_se.push_back(0.5 * std::log(var));
  }
  const int m = static_cast<int>(log_n.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += log_n[i];
    sy += log_se[i];
    sxx += log_n[i] * log_n[i];
    sxy += log_n[i] * log_se[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  EXPECT_NEAR(slope, -0.5, 0.15);
}

}  // namespace
}  // namespace ququart
