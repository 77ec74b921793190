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

// Lowering of qubit circuits to native ququart operations.
//
// Qubit regime: qubit k lives on ion k in levels {0, 1}.
// Ququart regime: two qubits share one ion with the level encoding
//   |0> = |01>, |1> = |11>, |2> = |10>, |3> = |00>
// (first qubit of the pair written first).

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ququart/common.hpp"
#include "ququart/gates.hpp"
#include "ququart/state.hpp"

namespace ququart {

// ---------------------------------------------------------------------------
// 2x2 qubit algebra

using Matrix2 = Eigen::Matrix2cd;

namespace qubit {

inline Matrix2 u3(double theta, double phi, double lambda) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Matrix2 m;
  m << c, -std::exp(kI * lambda) * s, std::exp(kI * phi) * s, std::exp(kI * (phi + lambda)) * c;
  return m;
}

inline Matrix2 h() {
  Matrix2 m;
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return m;
}

inline Matrix2 x() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix2 y() {
  Matrix2 m;
  m << 0, -kI, kI, 0;
  return m;
}

inline Matrix2 z() {
  Matrix2 m;
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix2 s() {
  Matrix2 m;
  m << 1, 0, 0, kI;
  return m;
}

/// 4x4 CX on (control, target) with the control as the high bit.
inline Matrix cx(bool control_is_high = true) {
  Matrix m = Matrix::Zero(4, 4);
  if (control_is_high) {
    m(0, 0) = m(1, 1) = 1.0;
    m(3, 2) = m(2, 3) = 1.0;
  } else {
    m(0, 0) = m(2, 2) = 1.0;
    m(3, 1) = m(1, 3) = 1.0;
  }
  return m;
}

/// exp(-i chi/2 (X(x)I + I(x)X)^2) = exp(-i chi) exp(-i chi X(x)X)
inline Matrix xx(double chi) {
  Matrix xx_op = Matrix::Zero(4, 4);
  xx_op(0, 3) = xx_op(3, 0) = xx_op(1, 2) = xx_op(2, 1) = 1.0;
  Matrix id = Matrix::Identity(4, 4);
  return std::exp(-kI * chi) * (std::cos(chi) * id - kI * std::sin(chi) * xx_op);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace qubit

struct U3Angles {
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
  double global_phase = 0.0;  // u = exp(i global_phase) * U3(theta, phi, lambda)
};

/// Euler angles of an arbitrary 2x2 unitary.
inline U3Angles u3_angles(const Matrix2& u) {
  U3Angles a;
  const double c = std::abs(u(0, 0));
  const double s = std::abs(u(1, 0));
  a.theta = 2.0 * std::atan2(s, c);
  constexpr double tiny = 1e-14;
  if (s <= tiny) {
    a.global_phase = std::arg(u(0, 0));
    a.phi = 0.0;
    a.lambda = std::arg(u(1, 1)) - a.global_phase;
  } else if (c <= tiny) {
    a.lambda = 0.0;
    a.global_phase = std::arg(-u(0, 1));
    a.phi = std::arg(u(1, 0)) - a.global_phase;
  } else {
    a.global_phase = std::arg(u(0, 0));
    a.phi = std::arg(u(1, 0)) - a.global_phase;
    a.lambda = std::arg(-u(0, 1)) - a.global_phase;
  }
  return a;
}

/// Embeds a 2x2 matrix into the {0, j} block of a 4x4 identity.
inline Matrix embed_pair(const Matrix2& u, int j) {
  check_rotation_level(j);
  Matrix m = Matrix::Identity(kLevels, kLevels);
  m(0, 0) = u(0, 0);
  m(0, j) = u(0, 1);
  m(j, 0) = u(1, 0);
  m(j, j) = u(1, 1);
  return m;
}

/// U3 as R_z(phi) R_x(-pi/2) R_z(theta) R_x(pi/2) R_z(lambda) on the {0, j}
/// pair, returned in time order. The relative-phase rotation R_z^{0j}(a)
/// equals the virtual phase R_z^j(a) up to a global phase.
inline std::vector<NativeOp> u3_to_native(double theta, double phi, double lambda, int ion, int j,
                                          const GateTiming& timing = {}) {
  check_rotation_level(j);
  return {
      NativeOp::virtual_phase(ion, j, lambda),
      NativeOp::rotation(ion, j, kPi / 2.0, 0.0, timing),
      NativeOp::virtual_phase(ion, j, theta),
      NativeOp::rotation(ion, j, -kPi / 2.0, 0.0, timing),
      NativeOp::virtual_phase(ion, j, phi),
  };
}

// ---------------------------------------------------------------------------
// Ion groups

/// Which addressing beam owns each ion. Defaults to alternating groups.
struct IonGroups {
  std::vector<Beam> home;

  static IonGroups alternating(int ions) {
    IonGroups g;
    for (int i = 0; i < ions; ++i) g.home.push_back(i % 2 == 0 ? Beam::iab1 : Beam::iab2);
    return g;
  }

  Beam of(int ion) const {
    if (ion < 0 || ion >= static_cast<int>(home.size())) {
      throw Error(ErrorKind::index, "ion " + std::to_string(ion) + " has no group assignment");
    }
    return home[ion];
  }

  bool same(int a, int b) const { return of(a) == of(b); }
};

/// The rotation that turns sigma_phi^{01} into +-sigma_z^{01} for every phi:
/// R_{phi + pi/2}(pi/2), written in the frame of the driving beam.
inline Matrix2 zz_wrap_rotation() { return qubit::u3(kPi / 2.0, 0.0, 0.0); }

/// Surrounds an MS gate on a same-group pair with quarter-wave rotations
/// driven by the same beams as the MS pulse, turning it into a ZZ-type gate
/// whose action does not depend on the relative phase between the two beams.
/// Ions from different groups need no wrapping; the op is returned as is.
inline std::vector<NativeOp> zz_wrap_same_group(NativeOp ms, const IonGroups& groups,
                                                const GateTiming& timing = {}) {
  if (ms.kind != OpKind::ms) throw Error(ErrorKind::validation, "zz wrap applies to MS gates");
  const int a = ms.ions[0];
  const int b = ms.ions[1];
  if (!groups.same(a, b)) {
    ms.beams = {groups.of(a), groups.of(b)};
    return {ms};
  }
  const Beam home = groups.of(a);
  const Beam foreign = other_beam(home);
  ms.beams = {home, foreign};
  auto wrap = [&](int ion, Beam beam, double theta) {
    NativeOp op = NativeOp::rotation(ion, 1, theta, kPi / 2.0, timing);
    op.beams = {beam, beam};
    op.frame_wrap = true;
    return op;
  };
  return {wrap(a, home, kPi / 2.0), wrap(b, foreign, kPi / 2.0), ms,
          wrap(a, home, -kPi / 2.0), wrap(b, foreign, -kPi / 2.0)};
}

// ---------------------------------------------------------------------------
// Circuits

enum class QubitGate { u3, cx, xx, barrier };

struct QubitOp {
  QubitGate gate = QubitGate::u3;
  std::array<int, 2> qubits{0, -1};
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
  double chi = 0.0;
};

struct QubitCircuit {
  int n_qubits = 0;
  std::vector<QubitOp> ops;

  explicit QubitCircuit(int n = 0) : n_qubits(n) {}

  QubitCircuit& u3(int q, double theta, double phi, double lambda) {
    QubitOp op;
    op.gate = QubitGate::u3;
    op.qubits = {q, -1};
    op.theta = theta;
    op.phi = phi;
    op.lambda = lambda;
    ops.push_back(op);
    return *this;
  }
  QubitCircuit& h(int q) { return u3(q, kPi / 2.0, 0.0, kPi); }
  QubitCircuit& x(int q) { return u3(q, kPi, 0.0, kPi); }
  QubitCircuit& z(int q) { return u3(q, 0.0, 0.0, kPi); }
  QubitCircuit& cx(int control, int target) {
    QubitOp op;
    op.gate = QubitGate::cx;
    op.qubits = {control, target};
    ops.push_back(op);
    return *this;
  }
  /// CZ as H_t CX H_t.
  QubitCircuit& cz(int a, int b) { return h(b).cx(a, b).h(b); }
  QubitCircuit& xx(int a, int b, double chi) {
    QubitOp op;
    op.gate = QubitGate::xx;
    op.qubits = {a, b};
    op.chi = chi;
    ops.push_back(op);
    return *this;
  }
  QubitCircuit& barrier() {
    QubitOp op;
    op.gate = QubitGate::barrier;
    op.qubits = {-1, -1};
    ops.push_back(op);
    return *this;
  }

  void validate() const {
    if (n_qubits < 1) throw Error(ErrorKind::validation, "circuit needs at least one qubit");
    for (const QubitOp& op : ops) {
      auto check = [&](int q) {
        if (q < 0 || q >= n_qubits) {
          throw Error(ErrorKind::index, "qubit index " + std::to_string(q) + " out of range");
        }
      };
      switch (op.gate) {
        case QubitGate::barrier: break;
        case QubitGate::u3:
          check(op.qubits[0]);
          if (!std::isfinite(op.theta) || !std::isfinite(op.phi) || !std::isfinite(op.lambda)) {
            throw Error(ErrorKind::validation, "non-finite gate angle");
          }
          break;
        case QubitGate::cx:
        case QubitGate::xx:
          check(op.qubits[0]);
          check(op.qubits[1]);
          if (op.qubits[0] == op.qubits[1]) {
            throw Error(ErrorKind::index, "two-qubit gate on equal indices");
          }
          if (!std::isfinite(op.chi)) throw Error(ErrorKind::validation, "non-finite gate angle");
          break;
      }
    }
  }
};

struct NativeCircuit {
  int n_ions = 0;
  std::vector<NativeOp> ops;
  IonGroups groups;

  explicit NativeCircuit(int ions = 0) : n_ions(ions), groups(IonGroups::alternating(ions)) {}

  std::size_t count(OpKind kind) const {
    std::size_t n = 0;
    for (const NativeOp& op : ops) n += op.kind == kind ? 1 : 0;
    return n;
  }
};

/// Rejects any rotation driven by a beam other than its ion's home beam,
/// except rotations that belong to a ZZ wrap.
inline void validate_groups(const NativeCircuit& circuit) {
  for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
    const NativeOp& op = circuit.ops[i];
    if (op.kind != OpKind::partial_rotation || op.frame_wrap) continue;
    if (op.beams[0] != circuit.groups.of(op.ions[0])) {
      throw Error(ErrorKind::validation, "op " + std::to_string(i) + ": rotation on ion " +
                                             std::to_string(op.ions[0]) +
                                             " is driven by the other group's beam");
    }
  }
}

inline void validate_native(const NativeCircuit& circuit) {
  for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
    const NativeOp& op = circuit.ops[i];
    const std::string where = "op " + std::to_string(i) + ": ";
    auto check = [&](int ion) {
      if (ion < 0 || ion >= circuit.n_ions) {
        throw Error(ErrorKind::index, where + "ion index " + std::to_string(ion) + " out of range");
      }
    };
    check(op.ions[0]);
    if (op.kind == OpKind::ms) {
      check(op.ions[1]);
      if (op.ions[0] == op.ions[1]) throw Error(ErrorKind::index, where + "MS on equal ions");
    } else if (op.kind == OpKind::partial_rotation) {
      if (op.level < 1 || op.level > 3) throw Error(ErrorKind::level, where + "rotation level must be 1..3");
    } else if (op.level < 0 || op.level > 3) {
      throw Error(ErrorKind::level, where + "virtual phase level must be 0..3");
    }
  }
  validate_groups(circuit);
}

// ---------------------------------------------------------------------------
// Qubit-regime lowering

namespace detail {

/// Lowers qubit gates while fusing runs of single-qubit gates per qubit.
/// Fusion never crosses a barrier.
class QubitLowering {
 public:
  QubitLowering(int n_qubits, const IonGroups& groups, const GateTiming& timing)
      : pending_(n_qubits, Matrix2::Identity()), groups_(groups), timing_(timing) {}

  void single(int q, const Matrix2& u) { pending_[q] = u * pending_[q]; }

  void flush(int q) {
    const Matrix2 u = pending_[q];
    pending_[q] = Matrix2::Identity();
    if (phase_invariant_distance(u, Matrix2::Identity()) < 1e-12) return;
    const U3Angles a = u3_angles(u);
    for (NativeOp op : u3_to_native(a.theta, a.phi, a.lambda, q, 1, timing_)) emit(op);
  }

  void flush_all() {
    for (int q = 0; q < static_cast<int>(pending_.size()); ++q) flush(q);
  }

  /// Emits the entangling core XX(chi) and returns the local corrections that
  /// make the emitted block equal XX(chi) regardless of the group layout.
  void entangle(int a, int b, double chi, const Matrix2& pre_a, const Matrix2& pre_b,
                const Matrix2& post_a, const Matrix2& post_b) {
    Matrix2 wrap_pre = Matrix2::Identity();
    Matrix2 wrap_post = Matrix2::Identity();
    const bool same = groups_.same(a, b);
    if (same) {
      const Matrix2 w = zz_wrap_rotation();
      wrap_pre = w.adjoint();
      wrap_post = w;
    }
    single(a, wrap_pre * pre_a);
    single(b, wrap_pre * pre_b);
    flush(a);
    flush(b);
    for (const NativeOp& op : zz_wrap_same_group(NativeOp::ms(a, b, chi, timing_), groups_, timing_)) {
      out_.push_back(op);
    }
    for (const NativeOp& op : spectator_phase_compensation(chi, a, b)) out_.push_back(op);
    pending_[a] = post_a * wrap_post;
    pending_[b] = post_b * wrap_post;
  }

  void cx(int control, int target) {
    // CX = e^{i pi/4} (H (x) I) exp(-i pi/4 XX) (H S^dag (x) H S^dag H), and
    // exp(-i pi/4 XX) equals XX(pi/4) on the qubit sector up to a global phase.
    const Matrix2 h = qubit::h();
    const Matrix2 sdg = qubit::s().adjoint();
    entangle(control, target, kPi / 4.0, h * sdg, h * sdg * h, h, Matrix2::Identity());
  }

  void xx(int a, int b, double chi) {
    const Matrix2 id = Matrix2::Identity();
    entangle(a, b, chi, id, id, id, id);
  }

  std::vector<NativeOp> take() {
    flush_all();
    return std::move(out_);
  }

 private:
  void emit(NativeOp op) {
    if (op.kind == OpKind::partial_rotation) op.beams = {groups_.of(op.ions[0]), groups_.of(op.ions[0])};
    out_.push_back(op);
  }

  std::vector<Matrix2> pending_;
  const IonGroups& groups_;
  GateTiming timing_;
  std::vector<NativeOp> out_;
};

}  // namespace detail

/// CX on the qubit sector of (control, target) using exactly one XX(pi/4).
inline std::vector<NativeOp> cx_to_native(int control, int target, const IonGroups& groups,
                                          const GateTiming& timing = {}) {
  if (control == target) throw Error(ErrorKind::index, "CX needs distinct control and target");
  const int n = std::max(control, target) + 1;
  detail::QubitLowering lower(n, groups, timing);
  lower.cx(control, target);
  return lower.take();
}

inline std::vector<NativeOp> cx_to_native(int control, int target, const GateTiming& timing = {}) {
  return cx_to_native(control, target, IonGroups::alternating(std::max(control, target) + 1), timing);
}

// ---------------------------------------------------------------------------
// Qubit pair <-> ququart level encoding

/// Two-qubit label (first, second) -> ququart level.
inline int encode_pair_to_ququart(int first, int second) {
  if ((first != 0 && first != 1) || (second != 0 && second != 1)) {
    throw Error(ErrorKind::validation, "qubit values must be 0 or 1");
  }
  static constexpr int table[2][2] = {{3, 0}, {2, 1}};
  return table[first][second];
}

inline int encode_pair_to_ququart(std::string_view label) {
  if (label.size() != 2) throw Error(ErrorKind::validation, "two-qubit label must have two bits");
  return encode_pair_to_ququart(label[0] - '0', label[1] - '0');
}

inline std::array<int, 2> decode_ququart_level(int level) {
  static constexpr std::array<std::array<int, 2>, 4> table{{{0, 1}, {1, 1}, {1, 0}, {0, 0}}};
  if (level < 0 || level > 3) throw Error(ErrorKind::level, "ququart level must be 0..3");
  return table[level];
}

// ---------------------------------------------------------------------------
// Single-ququart synthesis

namespace detail {

/// Left-multiplies a matrix by partial rotations that clear chosen entries,
/// remembering each rotation so the inverse sequence can be emitted.
class GivensReducer {
 public:
  explicit GivensReducer(Matrix w) : w_(std::move(w)) {}

  /// Zeroes w(j, col) by mixing it into row 0.
  void clear_row_j(int col, int j) {
    const Complex a = w_(0, col);
    const Complex b = w_(j, col);
    if (std::abs(b) <= kTiny) return;
    const double alpha = std::abs(a) <= kTiny ? 0.0 : std::arg(a);
    rotate(j, 2.0 * std::atan2(std::abs(b), std::abs(a)), std::arg(b) - alpha - kPi / 2.0);
  }

  /// Zeroes w(0, col) by moving it into row j.
  void clear_row_0(int col, int j) {
    const Complex a = w_(0, col);
    const Complex b = w_(j, col);
    if (std::abs(a) <= kTiny) return;
    const double beta = std::abs(b) <= kTiny ? 0.0 : std::arg(b);
    rotate(j, 2.0 * std::atan2(std::abs(a), std::abs(b)), beta - std::arg(a) + kPi / 2.0);
  }

  const Matrix& reduced() const { return w_; }

  /// Inverse rotations in time order: their product maps the reduced
  /// matrix back to the input.
  void emit_inverse(std::vector<NativeOp>& ops, int ion, const GateTiming& timing) const {
    for (auto it = applied_.rbegin(); it != applied_.rend(); ++it) {
      ops.push_back(NativeOp::rotation(ion, it->level, -it->theta, it->phi, timing));
    }
  }

 private:
  static constexpr double kTiny = 1e-13;

  struct Givens {
    int level;
    double theta;
    double phi;
  };

  void rotate(int j, double theta, double phi) {
    w_ = r_phi_matrix(j, theta, phi) * w_;
    applied_.push_back({j, theta, phi});
  }

  Matrix w_;
  std::vector<Givens> applied_;
};

}  // namespace detail

/// Native sequence (time order) whose product equals u up to a global phase.
/// Givens rotations through level 0 clear columns 3, 2, 1 in turn; the
/// remaining diagonal becomes virtual phases.
inline std::vector<NativeOp> synthesize_ququart_unitary(const Matrix& u, int ion,
                                                        const GateTiming& timing = {}) {
  if (u.rows() != kLevels || u.cols() != kLevels) {
    throw Error(ErrorKind::shape, "ququart synthesis needs a 4x4 matrix");
  }
  if (!is_unitary(u, 1e-10)) throw Error(ErrorKind::validation, "matrix is not unitary within tolerance");
  detail::GivensReducer g(u);
  g.clear_row_j(3, 1);
  g.clear_row_j(3, 2);
  g.clear_row_0(3, 3);
  g.clear_row_j(2, 1);
  g.clear_row_0(2, 2);
  g.clear_row_0(1, 1);

  std::vector<NativeOp> ops;
  const Matrix& w = g.reduced();
  const double ref = std::arg(w(0, 0));
  for (int k = 1; k < kLevels; ++k) {
    double angle = std::remainder(std::arg(w(k, k)) - ref, 2.0 * kPi);
    if (std::abs(angle) > 1e-14) ops.push_back(NativeOp::virtual_phase(ion, k, angle));
  }
  g.emit_inverse(ops, ion, timing);
  return ops;
}

/// Native sequence (time order) taking |0> to the normalized state v up to a
/// global phase, using at most three rotations.
inline std::vector<NativeOp> synthesize_ququart_state(const Vector& v, int ion, const GateTiming& timing = {}) {
  if (v.size() != kLevels) throw Error(ErrorKind::shape, "ququart state must have 4 amplitudes");
  if (std::abs(v.norm() - 1.0) > 1e-10) throw Error(ErrorKind::validation, "state must be normalized");
  detail::GivensReducer g(v);
  g.clear_row_j(0, 3);
  g.clear_row_j(0, 2);
  g.clear_row_j(0, 1);
  std::vector<NativeOp> ops;
  g.emit_inverse(ops, ion, timing);
  return ops;
}

// ---------------------------------------------------------------------------
// Whole-circuit transpilation

struct QubitRegime {};

/// pairing[ion] = {first qubit, second qubit} stored on that ion.
struct QuquartRegime {
  std::vector<std::array<int, 2>> pairing;

  static QuquartRegime consecutive(int n_qubits) {
    QuquartRegime r;
    for (int q = 0; q + 1 < n_qubits; q += 2) r.pairing.push_back({q, q + 1});
    return r;
  }
};

using TranspileMode = std::variant<QubitRegime, QuquartRegime>;

struct TranspileOptions {
  std::optional<IonGroups> groups;
  GateTiming timing;
};

namespace detail {

inline NativeCircuit transpile_qubit(const QubitCircuit& c, const TranspileOptions& opt) {
  NativeCircuit out(c.n_qubits);
  if (opt.groups) out.groups = *opt.groups;
  QubitLowering lower(c.n_qubits, out.groups, opt.timing);
  for (const QubitOp& op : c.ops) {
    switch (op.gate) {
      case QubitGate::u3: lower.single(op.qubits[0], qubit::u3(op.theta, op.phi, op.lambda)); break;
      case QubitGate::cx: lower.cx(op.qubits[0], op.qubits[1]); break;
      case QubitGate::xx: lower.xx(op.qubits[0], op.qubits[1], op.chi); break;
      case QubitGate::barrier: lower.flush_all(); break;
    }
  }
  out.ops = lower.take();
  return out;
}

/// Level index <- two-qubit basis index (2 * first + second).
inline Matrix encoding_permutation() {
  Matrix p = Matrix::Zero(4, 4);
  for (int idx = 0; idx < 4; ++idx) p(encode_pair_to_ququart(idx >> 1, idx & 1), idx) = 1.0;
  return p;
}

inline NativeCircuit transpile_ququart(const QubitCircuit& c, const QuquartRegime& mode,
                                       const TranspileOptions& opt) {
  if (c.n_qubits % 2 != 0) {
    throw Error(ErrorKind::validation, "ququart regime needs an even number of qubits");
  }
  const int ions = c.n_qubits / 2;
  if (static_cast<int>(mode.pairing.size()) != ions) {
    throw Error(ErrorKind::validation, "pairing must assign two qubits to each of " +
                                           std::to_string(ions) + " ions");
  }
  std::vector<int> ion_of(c.n_qubits, -1);
  std::vector<int> slot_of(c.n_qubits, -1);
  for (int ion = 0; ion < ions; ++ion) {
    for (int slot = 0; slot < 2; ++slot) {
      const int q = mode.pairing[ion][slot];
      if (q < 0 || q >= c.n_qubits || ion_of[q] != -1) {
        throw Error(ErrorKind::validation, "invalid pairing: qubit " + std::to_string(q) +
                                               " missing, repeated or out of range");
      }
      ion_of[q] = ion;
      slot_of[q] = slot;
    }
  }
  NativeCircuit out(ions);
  if (opt.groups) out.groups = *opt.groups;

  const Matrix p = encoding_permutation();
  const Matrix id2 = Matrix::Identity(2, 2);
  // Register starts in level 0 = |01>; the circuit assumes |00>.
  const Matrix init = qubit::kron(id2, qubit::x());
  std::vector<Matrix> seg(ions, init);
  bool first = true;
  auto emit_segment = [&]() {
    for (int ion = 0; ion < ions; ++ion) {
      const Matrix level_u = p * seg[ion] * p.transpose();
      // the first segment only ever acts on |0>, so preparing its image suffices
      const std::vector<NativeOp> synth =
          first ? synthesize_ququart_state(level_u.col(0), ion, opt.timing)
                : synthesize_ququart_unitary(level_u, ion, opt.timing);
      if (first || phase_invariant_distance(level_u, Matrix::Identity(4, 4)) > 1e-12) {
        for (NativeOp op : synth) {
          if (op.kind == OpKind::partial_rotation) op.beams = {out.groups.of(ion), out.groups.of(ion)};
          out.ops.push_back(op);
        }
      }
      seg[ion] = Matrix::Identity(4, 4);
    }
    first = false;
  };
  for (const QubitOp& op : c.ops) {
    if (op.gate == QubitGate::barrier) {
      emit_segment();
      continue;
    }
    const int ion = ion_of[op.qubits[0]];
    Matrix local;
    if (op.gate == QubitGate::u3) {
      const Matrix u = qubit::u3(op.theta, op.phi, op.lambda);
      local = slot_of[op.qubits[0]] == 0 ? qubit::kron(u, id2) : qubit::kron(id2, u);
    } else {
      if (ion_of[op.qubits[1]] != ion) {
        throw Error(ErrorKind::unsupported,
                    "two-qubit gates between qubits on different ququarts are not supported");
      }
      if (op.gate == QubitGate::cx) {
        local = qubit::cx(slot_of[op.qubits[0]] == 0);
      } else {
        local = qubit::xx(op.chi);
      }
    }
    seg[ion] = local * seg[ion];
  }
  emit_segment();
  return out;
}

}  // namespace detail

/// Lowers a qubit circuit to native operations. Barriers delimit segments
/// that are lowered independently; no gate fusion crosses a barrier. The
/// result reproduces the circuit's action on the all-zero input state; in
/// the ququart regime the first segment is synthesized as a state
/// preparation.
inline NativeCircuit transpile(const QubitCircuit& circuit, const TranspileMode& mode = QubitRegime{},
                               const TranspileOptions& options = {}) {
  circuit.validate();
  NativeCircuit out = std::holds_alternative<QubitRegime>(mode)
                          ? detail::transpile_qubit(circuit, options)
                          : detail::transpile_ququart(circuit, std::get<QuquartRegime>(mode), options);
  validate_native(out);
  return out;
}

/// Direct qubit-level simulation on a two-level register; the reference the
/// lowered circuits are checked against.
inline QuditRegister qubit_reference_state(const QubitCircuit& circuit) {
  circuit.validate();
  QuditRegister reg(circuit.n_qubits, 2);
  for (const QubitOp& op : circuit.ops) {
    switch (op.gate) {
      case QubitGate::barrier: break;
      case QubitGate::u3: reg.apply_single(op.qubits[0], Matrix(qubit::u3(op.theta, op.phi, op.lambda))); break;
      case QubitGate::cx: reg.apply_pair(op.qubits[0], op.qubits[1], qubit::cx(true)); break;
      case QubitGate::xx: reg.apply_pair(op.qubits[0], op.qubits[1], qubit::xx(op.chi)); break;
    }
  }
  return reg;
}

/// Converts a measured native label to qubit bits under the given mode.
/// In the qubit regime any level other than 0 reads as 1.
inline std::vector<int> decode_outcome(const BasisLabel& label, const TranspileMode& mode, int n_qubits) {
  std::vector<int> bits(n_qubits, 0);
  if (std::holds_alternative<QubitRegime>(mode)) {
    for (int q = 0; q < n_qubits; ++q) bits[q] = label.digits.at(q) == 0 ? 0 : 1;
    return bits;
  }
  const auto& pairing = std::get<QuquartRegime>(mode).pairing;
  for (std::size_t ion = 0; ion < pairing.size(); ++ion) {
    const auto pair = decode_ququart_level(label.digits.at(ion));
    bits[pairing[ion][0]] = pair[0];
    bits[pairing[ion][1]] = pair[1];
  }
  return bits;
}

}  // namespace ququart
