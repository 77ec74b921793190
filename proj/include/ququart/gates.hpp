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

// Native gate set of the ququart processor.
//
//   R_phi^{0j}(theta) = exp(-i sigma_phi^{0j} theta / 2),  j in {1,2,3}
//   R_z^j(theta)      = exp(i theta |j><j|),              j in {0,1,2,3}
//   XX(chi)           = exp(-i chi/2 (sigma_x^{01} (x) I + I (x) sigma_x^{01})^2)
//
// with sigma_phi^{0j} = cos(phi) sigma_x^{0j} + sin(phi) sigma_y^{0j} and
// sigma_y^{0j} = -i|0><j| + i|j><0|.

#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "ququart/common.hpp"
#include "ququart/state.hpp"

namespace ququart {

enum class OpKind { partial_rotation, virtual_phase, ms };

/// Individual addressing beam. Each ion has a home beam (its group).
enum class Beam { iab1, iab2 };

inline Beam other_beam(Beam b) { return b == Beam::iab1 ? Beam::iab2 : Beam::iab1; }

/// Calibrated pulse durations, seconds.
struct GateTiming {
  double pi_pulse = 20e-6;
  double ms = 800e-6;

  /// Resonant pulse time grows linearly with the rotation angle.
  double rotation(double theta) const { return pi_pulse * std::abs(theta) / kPi; }
};

struct NativeOp {
  OpKind kind = OpKind::virtual_phase;
  std::array<int, 2> ions{0, -1};
  int level = 1;
  double theta = 0.0;
  double phi = 0.0;    // rotation axis; for MS, the drive phase on ions[0]
  double phi_b = 0.0;  // MS drive phase on ions[1]
  double chi = 0.0;
  double duration = 0.0;
  std::array<Beam, 2> beams{Beam::iab1, Beam::iab1};
  bool frame_wrap = false;  // part of a phase-insensitive wrap around an MS gate

  static NativeOp rotation(int ion, int level, double theta, double phi,
                           const GateTiming& timing = {}) {
    NativeOp op;
    op.kind = OpKind::partial_rotation;
    op.ions = {ion, -1};
    op.level = level;
    op.theta = theta;
    op.phi = phi;
    op.duration = timing.rotation(theta);
    return op;
  }

  static NativeOp virtual_phase(int ion, int level, double theta) {
    NativeOp op;
    op.kind = OpKind::virtual_phase;
    op.ions = {ion, -1};
    op.level = level;
    op.theta = theta;
    return op;
  }

  static NativeOp ms(int ion_a, int ion_b, double chi, const GateTiming& timing = {}) {
    NativeOp op;
    op.kind = OpKind::ms;
    op.ions = {ion_a, ion_b};
    op.level = 1;
    op.chi = chi;
    // chi is set by laser power at fixed pulse length
    op.duration = chi == 0.0 ? 0.0 : timing.ms;
    return op;
  }

  bool two_ion() const { return kind == OpKind::ms; }
};

inline void check_rotation_level(int j) {
  if (j < 1 || j > 3) {
    throw Error(ErrorKind::level, "partial rotations couple level 0 to j in {1,2,3}, got " +
                                      std::to_string(j));
  }
}

/// 4x4 partial rotation on the {0, j} pair; identity on the spectators.
inline Matrix r_phi_matrix(int j, double theta, double phi) {
  check_rotation_level(j);
  Matrix m = Matrix::Identity(kLevels, kLevels);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  m(0, 0) = c;
  m(j, j) = c;
  m(0, j) = -kI * std::exp(-kI * phi) * s;
  m(j, 0) = -kI * std::exp(kI * phi) * s;
  return m;
}

/// Virtual phase exp(i theta |j><j|).
inline Matrix rz_matrix(int j, double theta) {
  if (j < 0 || j >= kLevels) {
    throw Error(ErrorKind::level, "virtual phase level must be in 0..3");
  }
  Matrix m = Matrix::Identity(kLevels, kLevels);
  m(j, j) = std::exp(kI * theta);
  return m;
}

/// 16x16 MS gate with optional drive phases on each ion. The operator is
/// exp(-i chi/2 A^2) with A = sigma_{phi_a}^{01} (x) I + I (x) sigma_{phi_b}^{01}.
/// A^2 splits by sector: on {0,1}x{0,1} it is 2 + 2 sigma sigma, with one ion
/// outside {0,1} it is the projector onto the other ion's {0,1}, and it
/// vanishes when both ions are outside.
inline Matrix ms_matrix(double chi, double phi_a = 0.0, double phi_b = 0.0) {
  constexpr int d = kLevels;
  Matrix m = Matrix::Zero(d * d, d * d);
  auto in_qubit = [](int level) { return level < 2; };
  // sigma_phi^{01} matrix element <r|sigma|c> on a single ion
  auto sigma = [](double phi, int r, int c) -> Complex {
    if (r == 0 && c == 1) return std::exp(-kI * phi);
    if (r == 1 && c == 0) return std::exp(kI * phi);
    return 0.0;
  };
  const Complex global = std::exp(-kI * chi);
  const double cs = std::cos(chi);
  const Complex sn = -kI * std::sin(chi);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const int col = a * d + b;
      const bool qa = in_qubit(a);
      const bool qb = in_qubit(b);
      if (qa && qb) {
        for (int ra = 0; ra < 2; ++ra) {
          for (int rb = 0; rb < 2; ++rb) {
            Complex v = sn * sigma(phi_a, ra, a) * sigma(phi_b, rb, b);
            if (ra == a && rb == b) v += cs;
            m(ra * d + rb, col) = global * v;
          }
        }
      } else if (qa || qb) {
        m(col, col) = std::exp(-kI * chi / 2.0);
      } else {
        m(col, col) = 1.0;
      }
    }
  }
  return m;
}

/// Virtual phases that, appended after XX(chi) on (ion_a, ion_b), give every
/// sector touching levels 2 or 3 the same phase exp(-i chi) as the {0,1}x{0,1}
/// sector, so the spectator levels see no relative phase.
inline std::vector<NativeOp> spectator_phase_compensation(double chi, int ion_a, int ion_b) {
  std::vector<NativeOp> ops;
  if (chi == 0.0) return ops;
  for (int ion : {ion_a, ion_b}) {
    for (int level : {2, 3}) ops.push_back(NativeOp::virtual_phase(ion, level, -chi / 2.0));
  }
  return ops;
}

inline Matrix native_matrix(const NativeOp& op) {
  switch (op.kind) {
    case OpKind::partial_rotation: return r_phi_matrix(op.level, op.theta, op.phi);
    case OpKind::virtual_phase: return rz_matrix(op.level, op.theta);
    case OpKind::ms: return ms_matrix(op.chi, op.phi, op.phi_b);
  }
  return {};
}

inline void apply_native(QuditRegister& reg, const NativeOp& op) {
  if (reg.levels() != kLevels) {
    throw Error(ErrorKind::shape, "native gates act on four-level registers");
  }
  if (op.kind == OpKind::virtual_phase) {
    if (op.level < 0 || op.level >= kLevels) {
      throw Error(ErrorKind::level, "virtual phase level must be in 0..3");
    }
    std::array<Complex, kLevels> phases{1.0, 1.0, 1.0, 1.0};
    phases[op.level] = std::exp(kI * op.theta);
    reg.apply_diagonal(op.ions[0], phases);
    return;
  }
  if (op.kind == OpKind::ms) {
    reg.apply_pair(op.ions[0], op.ions[1], Unitary::checked(native_matrix(op)));
    return;
  }
  reg.apply_single(op.ions[0], Unitary::checked(native_matrix(op)));
}

inline void apply_natives(QuditRegister& reg, const std::vector<NativeOp>& ops) {
  for (const NativeOp& op : ops) apply_native(reg, op);
}

/// Per-ion accumulated virtual phases, indexed [ion][level].
using PhaseFrame = std::vector<std::array<double, kLevels>>;

struct FramedCircuit {
  std::vector<NativeOp> ops;  // no virtual phases left
  PhaseFrame residual;        // diagonal still owed at the end of the circuit
};

/// Removes every virtual phase by advancing the drive phase of later real
/// pulses, the way the hardware realizes R_z. Running `ops` followed by the
/// residual frame reproduces the input circuit exactly.
inline FramedCircuit to_phase_frame(const std::vector<NativeOp>& ops, int ions) {
  FramedCircuit out;
  out.residual.assign(ions, {0.0, 0.0, 0.0, 0.0});
  PhaseFrame& f = out.residual;
  for (NativeOp op : ops) {
    switch (op.kind) {
      case OpKind::virtual_phase:
        f.at(op.ions[0]).at(op.level) += op.theta;
        break;
      case OpKind::partial_rotation: {
        const auto& fi = f.at(op.ions[0]);
        op.phi += fi[0] - fi[op.level];
        out.ops.push_back(op);
        break;
      }
      case OpKind::ms: {
        const auto& fa = f.at(op.ions[0]);
        const auto& fb = f.at(op.ions[1]);
        op.phi += fa[0] - fa[1];
        op.phi_b += fb[0] - fb[1];
        out.ops.push_back(op);
        break;
      }
    }
  }
  return out;
}

inline std::vector<NativeOp> frame_to_ops(const PhaseFrame& frame) {
  std::vector<NativeOp> ops;
  for (int ion = 0; ion < static_cast<int>(frame.size()); ++ion) {
    for (int level = 0; level < kLevels; ++level) {
      if (frame[ion][level] != 0.0) ops.push_back(NativeOp::virtual_phase(ion, level, frame[ion][level]));
    }
  }
  return ops;
}

}  // namespace ququart
