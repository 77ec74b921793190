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

// Calibrated noise by trajectory sampling, cross-talk, and staged
// electron-shelving readout.
//
// Amplitude damping moves levels 1..3 to |0> with rate 1/t1. Level 1
// dephases so that the |0><1| coherence decays with t2_01 overall; levels
// 2 and 3 do the same with t2_mag. Each level group can use Markovian
// dephasing (random phase flips) or quasi-static dephasing (a detuning
// drawn once per trajectory, giving a Gaussian coherence envelope).

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ququart/common.hpp"
#include "ququart/gates.hpp"
#include "ququart/state.hpp"
#include "ququart/transpiler.hpp"

namespace ququart {

enum class DephasingModel { markovian, quasi_static };

inline std::string_view dephasing_name(DephasingModel m) {
  return m == DephasingModel::markovian ? "markovian" : "quasi_static";
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// 4x4 row-stochastic matrix, row = prepared level, column = detected level.
inline void check_stochastic(const Matrix& m) {
  if (m.rows() != kLevels || m.cols() != kLevels) {
    throw Error(ErrorKind::shape, "confusion matrix must be 4x4");
  }
  for (int r = 0; r < kLevels; ++r) {
    double sum = 0.0;
    for (int c = 0; c < kLevels; ++c) {
      const Complex v = m(r, c);
      if (v.imag() != 0.0 || v.real() < 0.0 || !std::isfinite(v.real())) {
        throw Error(ErrorKind::validation, "confusion entries must be real and non-negative");
      }
      sum += v.real();
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorKind::validation, "confusion row " + std::to_string(r) + " sums to " +
                                             std::to_string(sum) + ", not 1");
    }
  }
}

struct NoiseParams {
  double t1 = 53e-3;
  double t2_01 = 16e-3;
  double t2_mag = 1e-3;
  double crosstalk_ratio = 0.04;
  double pi_pulse_duration = 20e-6;
  double ms_duration = 800e-6;
  double readout_stage_duration = 1e-3;
  /// Probability of a uniformly random Pauli on the driven {0, j} pair after
  /// each real pulse; sets the single-qudit gate error not explained by
  /// decay and dephasing.
  double pulse_depolarizing = 2.4e-3;
  DephasingModel dephasing_01 = DephasingModel::markovian;
  DephasingModel dephasing_mag = DephasingModel::quasi_static;
  /// Explicit confusion matrix; when unset, readout runs the staged
  /// shelving simulation whose statistics are spam_from_decay().
  std::optional<Matrix> spam_confusion;

  /// Every channel disabled.
  static NoiseParams off() {
    NoiseParams p;
    p.t1 = kInf;
    p.t2_01 = kInf;
    p.t2_mag = kInf;
    p.crosstalk_ratio = 0.0;
    p.pulse_depolarizing = 0.0;
    p.spam_confusion = Matrix::Identity(kLevels, kLevels);
    return p;
  }

  GateTiming timing() const { return GateTiming{pi_pulse_duration, ms_duration}; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw Error(ErrorKind::validation, std::string(name) + " must be > 0");
    };
    positive(t1, "t1");
    positive(t2_01, "t2_01");
    positive(t2_mag, "t2_mag");
    positive(pi_pulse_duration, "pi_pulse_duration");
    positive(ms_duration, "ms_duration");
    positive(readout_stage_duration, "readout_stage_duration");
    if (!(crosstalk_ratio >= 0.0 && crosstalk_ratio < 1.0)) {
      throw Error(ErrorKind::validation, "crosstalk_ratio must lie in [0, 1)");
    }
    if (!(pulse_depolarizing >= 0.0 && pulse_depolarizing <= 1.0)) {
      throw Error(ErrorKind::validation, "pulse_depolarizing must lie in [0, 1]");
    }
    // a finite coherence time cannot exceed twice the lifetime; an infinite
    // one means no dephasing beyond the decay itself
    for (double t2 : {t2_01, t2_mag}) {
      if (std::isfinite(t2) && t2 > 2.0 * t1) throw Error(ErrorKind::validation, "t2 must not exceed 2 t1");
    }
    if (spam_confusion) check_stochastic(*spam_confusion);
  }

  bool ideal() const {
    return std::isinf(t1) && std::isinf(t2_01) && std::isinf(t2_mag) && crosstalk_ratio == 0.0 &&
           pulse_depolarizing == 0.0 && spam_confusion && spam_confusion->isIdentity(0.0);
  }
};

inline NoiseParams default_noise_params() { return NoiseParams{}; }

/// Pure-dephasing rate that, combined with amplitude damping at 1/t1,
/// gives an overall coherence time t2.
inline double dephasing_rate(double t2, double t1) {
  return std::max(0.0, 1.0 / t2 - 1.0 / (2.0 * t1));
}

/// Detuning spread of quasi-static dephasing whose Gaussian envelope,
/// combined with damping, decays to 1/e at t2.
inline double quasi_static_sigma(double t2, double t1) {
  if (std::isinf(t2)) return 0.0;
  const double ratio = 1.0 - t2 / (2.0 * t1);
  return std::sqrt(2.0 * std::max(0.0, ratio)) / t2;
}

/// Analytic readout confusion of the staged shelving protocol when the only
/// error is spontaneous decay toward |0> during each stage.
inline Matrix spam_from_decay(const NoiseParams& params) {
  const double p = std::isinf(params.t1) ? 0.0 : 1.0 - std::exp(-params.readout_stage_duration / params.t1);
  const double q = 1.0 - p;
  Matrix m = Matrix::Zero(kLevels, kLevels);
  m(0, 0) = 1.0;
  m(1, 0) = p;
  m(1, 1) = q;
  m(2, 0) = p;
  m(2, 1) = q * p;
  m(2, 2) = q * q;
  m(3, 0) = p;
  m(3, 1) = q * p;
  m(3, 2) = q * q * p;
  m(3, 3) = q * q * q;
  return m;
}

inline Matrix effective_confusion(const NoiseParams& params) {
  return params.spam_confusion ? *params.spam_confusion : spam_from_decay(params);
}

/// Per-trajectory state: the register, its random stream, and the
/// quasi-static detunings drawn at the start of the shot.
struct Trajectory {
  QuditRegister reg;
  Rng rng;
  std::vector<std::array<double, kLevels>> detuning;  // rad/s, [ion][level]

  Trajectory(int ions, const NoiseParams& params, Rng stream)
      : reg(ions), rng(stream), detuning(ions, {0.0, 0.0, 0.0, 0.0}) {
    const double s01 = params.dephasing_01 == DephasingModel::quasi_static
                           ? quasi_static_sigma(params.t2_01, params.t1)
                           : 0.0;
    const double smag = params.dephasing_mag == DephasingModel::quasi_static
                            ? quasi_static_sigma(params.t2_mag, params.t1)
                            : 0.0;
    for (auto& d : detuning) {
      if (s01 > 0.0) d[1] = s01 * rng.normal();
      if (smag > 0.0) {
        d[2] = smag * rng.normal();
        d[3] = smag * rng.normal();
      }
    }
  }
};

/// Advances every ion through `duration` seconds of decay and dephasing.
inline void apply_decoherence(QuditRegister& reg, double duration, const NoiseParams& params, Rng& rng,
                              const std::vector<std::array<double, kLevels>>* detuning = nullptr) {
  if (duration < 0.0) throw Error(ErrorKind::validation, "duration must be >= 0");
  if (duration == 0.0) return;
  const int d = reg.levels();
  const double p_decay = std::isinf(params.t1) ? 0.0 : 1.0 - std::exp(-duration / params.t1);
  std::array<double, kLevels> flip{0.0, 0.0, 0.0, 0.0};
  if (params.dephasing_01 == DephasingModel::markovian) {
    flip[1] = (1.0 - std::exp(-dephasing_rate(params.t2_01, params.t1) * duration)) / 2.0;
  }
  if (params.dephasing_mag == DephasingModel::markovian) {
    const double q = (1.0 - std::exp(-dephasing_rate(params.t2_mag, params.t1) * duration)) / 2.0;
    flip[2] = flip[3] = q;
  }
  auto amps = reg.amplitudes_mut();
  for (int ion = 0; ion < reg.ions(); ++ion) {
    if (p_decay > 0.0) {
      const std::vector<double> pop = reg.ion_populations(ion);
      double r = rng.uniform();
      int jumped = -1;
      for (int k = 1; k < d; ++k) {
        const double pk = p_decay * pop[k];
        if (r < pk) {
          jumped = k;
          break;
        }
        r -= pk;
      }
      const std::size_t stride = reg.stride(ion);
      if (jumped > 0) {
        // Kraus |0><k|: keep only the level-k branch and relabel it as 0
        for (std::size_t i = 0; i < amps.size(); ++i) {
          const int digit = reg.digit(i, ion);
          if (digit == 0) amps[i] = amps[i + static_cast<std::size_t>(jumped) * stride];
        }
        for (std::size_t i = 0; i < amps.size(); ++i) {
          if (reg.digit(i, ion) != 0) amps[i] = 0.0;
        }
      } else {
        const double keep = std::sqrt(1.0 - p_decay);
        for (std::size_t i = 0; i < amps.size(); ++i) {
          if (reg.digit(i, ion) != 0) amps[i] *= keep;
        }
      }
      reg.normalize();
    }
    std::array<Complex, kLevels> phases{1.0, 1.0, 1.0, 1.0};
    bool any = false;
    for (int k = 1; k < d; ++k) {
      if (flip[k] > 0.0 && rng.uniform() < flip[k]) {
        phases[k] = -phases[k];
        any = true;
      }
      if (detuning && (*detuning)[ion][k] != 0.0) {
        phases[k] *= std::exp(-kI * (*detuning)[ion][k] * duration);
        any = true;
      }
    }
    if (any) reg.apply_diagonal(ion, std::span<const Complex>(phases.data(), d));
  }
}

/// Spectator ops leaked onto the nearest neighbours of each addressed ion.
/// Spectator ops run concurrently with the target and carry no duration.
inline std::vector<NativeOp> inject_crosstalk(const NativeOp& op, double ratio, int n_ions) {
  std::vector<NativeOp> out{op};
  if (ratio == 0.0 || op.kind == OpKind::virtual_phase) return out;
  if (op.kind == OpKind::partial_rotation) {
    for (int nb : {op.ions[0] - 1, op.ions[0] + 1}) {
      if (nb < 0 || nb >= n_ions) continue;
      NativeOp s = op;
      s.ions = {nb, -1};
      s.theta = ratio * op.theta;
      s.duration = 0.0;
      s.frame_wrap = false;
      out.push_back(s);
    }
    return out;
  }
  // MS: a spectator next to one addressed ion couples to the other one
  for (int slot = 0; slot < 2; ++slot) {
    const int ion = op.ions[slot];
    const int partner = op.ions[1 - slot];
    for (int nb : {ion - 1, ion + 1}) {
      if (nb < 0 || nb >= n_ions || nb == op.ions[0] || nb == op.ions[1]) continue;
      NativeOp s = NativeOp::ms(nb, partner, ratio * op.chi);
      s.duration = 0.0;
      out.push_back(s);
    }
  }
  return out;
}

/// Projectively asks whether `ion` is bright (level 0); collapses the state.
inline bool detect_bright(QuditRegister& reg, int ion, Rng& rng) {
  const double p0 = reg.ion_populations(ion)[0];
  const bool bright = rng.uniform() < p0;
  auto amps = reg.amplitudes_mut();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if ((reg.digit(i, ion) == 0) != bright) amps[i] = 0.0;
  }
  reg.normalize();
  return bright;
}

/// Three-stage shelving readout. An ion first seen bright in stage s reads
/// s-1; an ion dark in all stages reads 3. Transfer pulses are noiseless.
inline BasisLabel shelving_readout(QuditRegister& reg, const NoiseParams& params, Rng& rng,
                                   const std::vector<std::array<double, kLevels>>* detuning = nullptr) {
  const int n = reg.ions();
  BasisLabel out;
  out.digits.assign(n, 3);
  std::vector<bool> done(n, false);
  for (int stage = 0; stage < 3; ++stage) {
    if (stage > 0) {
      const Matrix transfer = r_phi_matrix(stage, kPi, 0.0);
      for (int ion = 0; ion < n; ++ion) {
        if (!done[ion]) reg.apply_single(ion, transfer);
      }
    }
    apply_decoherence(reg, params.readout_stage_duration, params, rng, detuning);
    for (int ion = 0; ion < n; ++ion) {
      if (done[ion]) continue;
      if (detect_bright(reg, ion, rng)) {
        out.digits[ion] = stage;
        done[ion] = true;
      }
    }
  }
  return out;
}

/// Resamples each ion's level from the confusion row of its true level.
inline BasisLabel apply_confusion(const BasisLabel& outcome, const Matrix& confusion, Rng& rng) {
  check_stochastic(confusion);
  BasisLabel out = outcome;
  for (int& level : out.digits) {
    if (level < 0 || level >= kLevels) throw Error(ErrorKind::level, "outcome level out of range");
    double r = rng.uniform();
    int detected = kLevels - 1;
    for (int c = 0; c < kLevels; ++c) {
      const double pc = confusion(level, c).real();
      if (r < pc) {
        detected = c;
        break;
      }
      r -= pc;
    }
    // guard against rounding in the last bin
    while (confusion(level, detected).real() == 0.0 && detected > 0) --detected;
    level = detected;
  }
  return out;
}

/// Exact outcome distribution after independent per-ion confusion.
inline std::vector<double> confuse_distribution(const std::vector<double>& probs, int ions, const Matrix& confusion) {
  check_stochastic(confusion);
  std::vector<double> cur = probs;
  std::size_t stride = 1;
  for (int ion = ions - 1; ion >= 0; --ion) {
    std::vector<double> next(cur.size(), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (cur[i] == 0.0) continue;
      const int level = static_cast<int>((i / stride) % kLevels);
      const std::size_t base = i - static_cast<std::size_t>(level) * stride;
      for (int c = 0; c < kLevels; ++c) next[base + c * stride] += cur[i] * confusion(level, c).real();
    }
    cur = std::move(next);
    stride *= kLevels;
  }
  return cur;
}

/// Draws one basis label from the register's populations without collapse.
inline BasisLabel sample_once(const QuditRegister& reg, Rng& rng) {
  double r = rng.uniform();
  const auto amps = reg.amplitudes();
  std::size_t chosen = amps.size() - 1;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (r < p) {
      chosen = i;
      break;
    }
    r -= p;
  }
  while (chosen > 0 && std::norm(amps[chosen]) == 0.0) --chosen;
  return reg.label_of(chosen);
}

/// Noiseless state after a native circuit, starting from |0...0>.
inline QuditRegister ideal_state(const NativeCircuit& circuit) {
  QuditRegister reg(circuit.n_ions);
  apply_natives(reg, circuit.ops);
  return reg;
}

/// Pauli k in {I, X, Y, Z} on the {0, level} pair, identity elsewhere.
inline const Unitary& pair_pauli(int level, int k) {
  static const std::vector<Unitary> table = [] {
    std::vector<Unitary> t;
    for (int j = 1; j < kLevels; ++j) {
      for (const Matrix2& p : {Matrix2(Matrix2::Identity()), qubit::x(), qubit::y(), qubit::z()}) {
        t.push_back(Unitary::checked(embed_pair(p, j)));
      }
    }
    return t;
  }();
  check_rotation_level(level);
  return table.at(static_cast<std::size_t>((level - 1) * 4 + k));
}

/// Runs one noisy trajectory up to (not including) readout. Virtual phases
/// are first folded into the laser phases of later pulses, so leaked light
/// on a neighbour carries the same phase the hardware beam would.
inline void evolve_trajectory(Trajectory& t, const NativeCircuit& circuit, const NoiseParams& params) {
  const FramedCircuit framed = to_phase_frame(circuit.ops, circuit.n_ions);
  for (const NativeOp& op : framed.ops) {
    for (const NativeOp& applied : inject_crosstalk(op, params.crosstalk_ratio, circuit.n_ions)) {
      apply_native(t.reg, applied);
    }
    if (op.kind == OpKind::partial_rotation && params.pulse_depolarizing > 0.0 &&
        t.rng.uniform() < params.pulse_depolarizing) {
      t.reg.apply_single(op.ions[0], pair_pauli(op.level, static_cast<int>(t.rng.below(4))));
    }
    apply_decoherence(t.reg, op.duration, params, t.rng, &t.detuning);
  }
  apply_natives(t.reg, frame_to_ops(framed.residual));
}

/// Reads out one trajectory with the configured readout model.
inline BasisLabel read_trajectory(Trajectory& t, const NoiseParams& params) {
  if (params.spam_confusion) {
    return apply_confusion(sample_once(t.reg, t.rng), *params.spam_confusion, t.rng);
  }
  return shelving_readout(t.reg, params, t.rng, &t.detuning);
}

/// Histogram of `shots` noisy runs of a native circuit. Shot s draws all of
/// its randomness from stream (seed, s). With all noise off, the ideal state
/// is computed once and sampled directly.
inline Histogram run_shots(const NativeCircuit& circuit, const NoiseParams& params, std::size_t shots,
                           std::uint64_t seed) {
  params.validate();
  if (shots < 1) throw Error(ErrorKind::validation, "shots must be at least 1");
  if (params.ideal()) return ideal_state(circuit).sample(shots, seed);
  Histogram hist;
  for (std::size_t s = 0; s < shots; ++s) {
    Trajectory t(circuit.n_ions, params, Rng::stream(seed, s));
    evolve_trajectory(t, circuit, params);
    ++hist[read_trajectory(t, params)];
  }
  return hist;
}

}  // namespace ququart
