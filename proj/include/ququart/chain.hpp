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

// Linear ion chain: equilibrium positions, normal modes, and segmented
// amplitude shaping of the MS drive.
//
// Positions are in units of l = (q^2 / (4 pi eps0 m wz^2))^(1/3). For a
// drive Omega(t) at detuning delta_k = mu - omega_k from mode k,
//   alpha_k(t) = int_0^t Omega(s) exp(i delta_k s) ds
//   Phi_k      = 2 int_0^tau dt int_0^t ds Omega(t) Omega(s) sin(delta_k (t - s))
//   chi        = sum_k eta_ak eta_bk Phi_k
// so that exp(-i chi/2 A^2) is the resulting two-ion operator.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ququart/common.hpp"

namespace ququart {

namespace phys {
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kEpsilon0 = 8.8541878128e-12;
inline constexpr double kAtomicMass = 1.66053906660e-27;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kYb171Mass = 170.9363258 * kAtomicMass;
inline constexpr double kGateWavelength = 435.5e-9;
}  // namespace phys

inline double two_pi_hz(double hz) { return 2.0 * kPi * hz; }

struct IonChain {
  int n_ions = 8;
  double omega_x = two_pi_hz(3.7e6);
  double omega_y = two_pi_hz(3.8e6);
  double omega_z = two_pi_hz(116e3);
  double mass = phys::kYb171Mass;
  double charge = phys::kElementaryCharge;

  void validate() const {
    if (n_ions < 1) throw Error(ErrorKind::validation, "chain needs at least one ion");
    if (!(omega_x > 0 && omega_y > 0 && omega_z > 0 && mass > 0 && charge > 0)) {
      throw Error(ErrorKind::validation, "trap frequencies, mass and charge must be positive");
    }
    if (!(omega_z < omega_x && omega_z < omega_y)) {
      throw Error(ErrorKind::validation, "a linear chain needs omega_z below both radial frequencies");
    }
  }

  /// Length unit of the dimensionless positions, metres.
  double length_scale() const {
    const double k = charge * charge / (4.0 * kPi * phys::kEpsilon0);
    return std::cbrt(k / (mass * omega_z * omega_z));
  }
};

/// Dimensionless axial equilibrium, sorted ascending and centred on 0.
inline std::vector<double> equilibrium_positions(int n_ions, int max_iterations = 100) {
  if (n_ions < 1) throw Error(ErrorKind::validation, "chain needs at least one ion");
  const int n = n_ions;
  Eigen::VectorXd u(n);
  // evenly spread start with roughly the right extent
  const double span = n > 1 ? 1.9 * std::pow(static_cast<double>(n), 0.56) : 0.0;
  for (int i = 0; i < n; ++i) u(i) = n > 1 ? -span / 2.0 + span * i / (n - 1) : 0.0;
  auto force = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) {
      double s = x(i);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = x(i) - x(j);
        s -= (d > 0 ? 1.0 : -1.0) / (d * d);
      }
      f(i) = s;
    }
    return f;
  };
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd f = force(u);
    if (f.cwiseAbs().maxCoeff() < 1e-13) {
      std::vector<double> out(u.data(), u.data() + n);
      std::sort(out.begin(), out.end());
      return out;
    }
    Eigen::MatrixXd jac(n, n);
    for (int i = 0; i < n; ++i) {
      double diag = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double c = 2.0 / std::pow(std::abs(u(i) - u(j)), 3);
        diag += c;
        jac(i, j) = -c;
      }
      jac(i, i) = diag;
    }
    u -= jac.ldlt().solve(f);
  }
  throw Error(ErrorKind::convergence,
              "equilibrium solver did not converge in " + std::to_string(max_iterations) + " iterations");
}

enum class Axis { x, y, z };

inline std::string_view axis_name(Axis a) { return a == Axis::x ? "x" : (a == Axis::y ? "y" : "z"); }

struct ModeStructure {
  Axis axis = Axis::x;
  Eigen::VectorXd frequencies;  // rad/s; ascending for z, descending for x and y
  Eigen::MatrixXd vectors;      // vectors(i, k): participation of ion i in mode k
};

/// Normal modes along one axis from the dimensionless Hessian.
inline ModeStructure normal_modes(const IonChain& chain, Axis axis) {
  chain.validate();
  const int n = chain.n_ions;
  const std::vector<double> u = equilibrium_positions(n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  const double radial = axis == Axis::x ? chain.omega_x : chain.omega_y;
  const double beta2 = (radial / chain.omega_z) * (radial / chain.omega_z);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double c = 1.0 / std::pow(std::abs(u[i] - u[j]), 3);
      sum += c;
      h(i, j) = axis == Axis::z ? -2.0 * c : c;
    }
    h(i, i) = axis == Axis::z ? 1.0 + 2.0 * sum : beta2 - sum;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd lambda = es.eigenvalues();
  if (lambda.minCoeff() <= 0.0) {
    throw Error(ErrorKind::instability, "imaginary mode frequency along " + std::string(axis_name(axis)) +
                                            ": the linear chain is unstable (zigzag)");
  }
  ModeStructure m;
  m.axis = axis;
  m.frequencies.resize(n);
  m.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    // eigenvalues come ascending; radial modes are reported highest first
    const int src = axis == Axis::z ? k : n - 1 - k;
    m.frequencies(k) = chain.omega_z * std::sqrt(lambda(src));
    Eigen::VectorXd v = es.eigenvectors().col(src);
    // deterministic sign: first clearly nonzero entry positive
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-9) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    m.vectors.col(k) = v;
  }
  return m;
}

/// Lamb-Dicke parameter of a mode at angular frequency omega.
inline double lamb_dicke(double omega, double mass = phys::kYb171Mass,
                         double wavelength = phys::kGateWavelength) {
  const double k = 2.0 * kPi / wavelength;
  return k * std::sqrt(phys::kHbar / (2.0 * mass * omega));
}

// ---------------------------------------------------------------------------
// Pulse shaping

struct PulseShapeOptions {
  int n_segments = 0;                       // 0 selects 2N+1 for N modes
  double max_amplitude = two_pi_hz(500e3);  // rad/s
};

struct PulseShape {
  int n_segments = 0;
  Eigen::VectorXd amplitudes;  // rad/s per segment
  double total_duration = 0.0;
  double mu = 0.0;
  double target_chi = 0.0;
  std::array<int, 2> ions{0, 1};
  Eigen::VectorXd closure_residuals;  // |alpha_k(tau)| / max_t |alpha_k(t)| from the solver
  double achieved_chi = 0.0;          // analytic quadratic form
};

namespace detail {

inline Complex segment_integral(double delta, double t0, double t1) {
  if (delta == 0.0) return t1 - t0;
  return (std::exp(kI * delta * t1) - std::exp(kI * delta * t0)) / (kI * delta);
}

/// Phi_k as a quadratic form in the segment amplitudes.
inline Eigen::MatrixXd phase_form(double delta, double duration, int segments) {
  const double h = duration / segments;
  std::vector<Complex> e(segments);
  for (int s = 0; s < segments; ++s) e[s] = segment_integral(delta, s * h, (s + 1) * h);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(segments, segments);
  const double self = delta == 0.0 ? 0.0 : 2.0 * (h / delta - std::sin(delta * h) / (delta * delta));
  for (int s = 0; s < segments; ++s) {
    q(s, s) = self;
    for (int r = 0; r < s; ++r) {
      // 2 Omega_s Omega_r Im(E_s conj(E_r)), split evenly over (s, r) and (r, s)
      const double c = std::imag(e[s] * std::conj(e[r]));
      q(s, r) = c;
      q(r, s) = c;
    }
  }
  return q;
}

}  // namespace detail

/// Coupling of the pair (a, b) to each radial-x mode: eta_ak * eta_bk.
inline Eigen::VectorXd pair_coupling(const IonChain& chain, const ModeStructure& modes, int a, int b) {
  const int n = static_cast<int>(modes.frequencies.size());
  Eigen::VectorXd c(n);
  for (int k = 0; k < n; ++k) {
    const double eta = lamb_dicke(modes.frequencies(k), chain.mass);
    c(k) = eta * modes.vectors(a, k) * eta * modes.vectors(b, k);
  }
  return c;
}

/// Default detuning: 2 pi * 10 kHz above the highest radial-x mode.
inline double default_detuning(const IonChain& chain) {
  return normal_modes(chain, Axis::x).frequencies(0) + two_pi_hz(10e3);
}

/// Unit vector of equal-duration segment amplitudes whose displacement
/// integral vanishes for every detuning: 2 real constraints per mode, so
/// segments = 2 * modes + 1 leaves a one-dimensional null space.
inline Eigen::VectorXd closing_amplitudes(const std::vector<double>& deltas, double total_duration, int segs) {
  if (segs < 1) throw Error(ErrorKind::validation, "need at least one segment");
  const int n_modes = static_cast<int>(deltas.size());
  const double h = total_duration / segs;
  Eigen::MatrixXd constraints(2 * n_modes, segs);
  for (int k = 0; k < n_modes; ++k) {
    for (int s = 0; s < segs; ++s) {
      const Complex e = detail::segment_integral(deltas[k], s * h, (s + 1) * h);
      constraints(2 * k, s) = e.real();
      constraints(2 * k + 1, s) = e.imag();
    }
  }
  // rows scaled to unit norm so every mode constrains with equal weight; a
  // row that vanishes (whole periods per segment) constrains nothing
  for (int r = 0; r < constraints.rows(); ++r) {
    const double norm = constraints.row(r).norm();
    if (norm > 1e-12 * h) {
      constraints.row(r) /= norm;
    } else {
      constraints.row(r).setZero();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cut = 1e-10 * (sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > cut ? 1 : 0;
  const int nullity = segs - rank;
  if (nullity != 1) {
    throw Error(ErrorKind::degeneracy, "closure constraints leave a " + std::to_string(nullity) +
                                           "-dimensional null space; expected 1 (degenerate duration or detuning)");
  }
  Eigen::VectorXd v = svd.matrixV().col(segs - 1);
  if (v.sum() < 0) v = -v;
  return v;
}

/// Piecewise-constant drive that closes every radial-x mode trajectory and
/// accumulates target_chi on the pair.
inline PulseShape solve_pulse_shape(const IonChain& chain, std::array<int, 2> ions, double total_duration,
                                    double mu, double target_chi, const PulseShapeOptions& options = {}) {
  chain.validate();
  if (!(total_duration > 0.0)) throw Error(ErrorKind::validation, "gate duration must be > 0");
  if (ions[0] == ions[1]) throw Error(ErrorKind::index, "pulse shaping needs two distinct ions");
  for (int ion : ions) {
    if (ion < 0 || ion >= chain.n_ions) throw Error(ErrorKind::index, "ion index out of range");
  }
  const ModeStructure modes = normal_modes(chain, Axis::x);
  const int n_modes = chain.n_ions;
  const int segs = options.n_segments > 0 ? options.n_segments : 2 * n_modes + 1;
  const double h = total_duration / segs;

  std::vector<double> deltas(n_modes);
  for (int k = 0; k < n_modes; ++k) deltas[k] = mu - modes.frequencies(k);
  const Eigen::VectorXd v = closing_amplitudes(deltas, total_duration, segs);

  const Eigen::VectorXd coupling = pair_coupling(chain, modes, ions[0], ions[1]);
  Eigen::MatrixXd form = Eigen::MatrixXd::Zero(segs, segs);
  for (int k = 0; k < n_modes; ++k) {
    form += coupling(k) * detail::phase_form(mu - modes.frequencies(k), total_duration, segs);
  }
  const double unit_chi = v.dot(form * v);

  PulseShape shape;
  shape.n_segments = segs;
  shape.total_duration = total_duration;
  shape.mu = mu;
  shape.target_chi = target_chi;
  shape.ions = ions;
  shape.amplitudes = Eigen::VectorXd::Zero(segs);
  if (target_chi != 0.0) {
    if (std::abs(unit_chi) < 1e-300 || unit_chi * target_chi < 0.0) {
      throw Error(ErrorKind::degeneracy, "the closing pulse accumulates a phase of the wrong sign or none at all");
    }
    shape.amplitudes = v * std::sqrt(target_chi / unit_chi);
  }
  if (shape.amplitudes.cwiseAbs().maxCoeff() > options.max_amplitude) {
    throw Error(ErrorKind::power, "required peak amplitude " + std::to_string(shape.amplitudes.cwiseAbs().maxCoeff()) +
                                      " rad/s exceeds the cap " + std::to_string(options.max_amplitude) + " rad/s");
  }
  shape.achieved_chi = shape.amplitudes.dot(form * shape.amplitudes);

  shape.closure_residuals.resize(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const double delta = mu - modes.frequencies(k);
    Complex alpha = 0.0;
    double peak = 0.0;
    for (int s = 0; s < segs; ++s) {
      alpha += shape.amplitudes(s) * detail::segment_integral(delta, s * h, (s + 1) * h);
      peak = std::max(peak, std::abs(alpha));
    }
    shape.closure_residuals(k) = peak > 0 ? std::abs(alpha) / peak : 0.0;
  }
  return shape;
}

/// Constant-amplitude drive over the same duration and detuning with the same chi.
inline PulseShape square_pulse(const IonChain& chain, std::array<int, 2> ions, double total_duration, double mu,
                               double target_chi) {
  const ModeStructure modes = normal_modes(chain, Axis::x);
  const Eigen::VectorXd coupling = pair_coupling(chain, modes, ions[0], ions[1]);
  double unit = 0.0;
  for (int k = 0; k < chain.n_ions; ++k) {
    unit += coupling(k) * detail::phase_form(mu - modes.frequencies(k), total_duration, 1)(0, 0);
  }
  if (unit * target_chi < 0.0 || unit == 0.0) {
    throw Error(ErrorKind::degeneracy, "a square pulse cannot reach this chi at the given detuning");
  }
  PulseShape p;
  p.n_segments = 1;
  p.total_duration = total_duration;
  p.mu = mu;
  p.target_chi = target_chi;
  p.ions = ions;
  p.amplitudes = Eigen::VectorXd::Constant(1, std::sqrt(target_chi / unit));
  p.achieved_chi = target_chi;
  p.closure_residuals = Eigen::VectorXd::Zero(chain.n_ions);
  return p;
}

struct TrajectoryCheck {
  Eigen::VectorXd residuals;           // |alpha_k(tau)| / max_t |alpha_k(t)|
  Eigen::VectorXd final_displacement;  // |alpha_k(tau)|, seconds * rad/s
  double achieved_chi = 0.0;
  double spin_motion_residual = 0.0;  // sqrt(sum_k (eta_ak^2 + eta_bk^2) |alpha_k(tau)|^2)
};

/// Integrates alpha_k and Phi_k with RK4 on a fine grid; independent of the
/// closed-form segment integrals used by the solver.
inline TrajectoryCheck integrate_trajectories(const PulseShape& shape, const IonChain& chain,
                                              double frequency_offset = 0.0, int steps_per_segment = 2000) {
  if (steps_per_segment < 1000) throw Error(ErrorKind::validation, "need at least 1000 steps per segment");
  const ModeStructure modes = normal_modes(chain, Axis::x);
  const int n_modes = chain.n_ions;
  const int a = shape.ions[0];
  const int b = shape.ions[1];
  const double h = shape.total_duration / shape.n_segments;
  const double dt = h / steps_per_segment;
  TrajectoryCheck out;
  out.residuals.resize(n_modes);
  out.final_displacement.resize(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const double omega = modes.frequencies(k) + frequency_offset;
    const double delta = shape.mu - omega;
    Complex alpha = 0.0;
    double phi = 0.0;
    double peak = 0.0;
    for (int s = 0; s < shape.n_segments; ++s) {
      const double amp = shape.amplitudes(s);
      // y = (alpha, phi); dalpha = amp e^{i delta t}, dphi = 2 amp Im(e^{i delta t} conj(alpha))
      auto rhs = [&](double t, Complex al) {
        const Complex e = std::exp(kI * delta * t);
        return std::pair<Complex, double>{amp * e, 2.0 * amp * std::imag(e * std::conj(al))};
      };
      for (int step = 0; step < steps_per_segment; ++step) {
        const double t = s * h + step * dt;
        const auto [k1a, k1p] = rhs(t, alpha);
        const auto [k2a, k2p] = rhs(t + dt / 2, alpha + dt / 2 * k1a);
        const auto [k3a, k3p] = rhs(t + dt / 2, alpha + dt / 2 * k2a);
        const auto [k4a, k4p] = rhs(t + dt, alpha + dt * k3a);
        alpha += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        phi += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        peak = std::max(peak, std::abs(alpha));
      }
    }
    const double eta = lamb_dicke(omega, chain.mass);
    const double ea = eta * modes.vectors(a, k);
    const double eb = eta * modes.vectors(b, k);
    out.achieved_chi += ea * eb * phi;
    out.residuals(k) = peak > 0 ? std::abs(alpha) / peak : 0.0;
    out.final_displacement(k) = std::abs(alpha);
    out.spin_motion_residual += (ea * ea + eb * eb) * std::norm(alpha);
  }
  out.spin_motion_residual = std::sqrt(out.spin_motion_residual);
  return out;
}

struct RobustnessPoint {
  double offset = 0.0;  // rad/s, added to every radial mode frequency
  double achieved_chi = 0.0;
  double spin_motion_residual = 0.0;
  double max_residual = 0.0;
};

struct TrajectoryReport {
  TrajectoryCheck nominal;
  std::vector<RobustnessPoint> robustness;
  double dchi_doffset = 0.0;  // rad per rad/s, central difference at 0
};

/// Residuals and chi at nominal frequencies plus a sweep of common secular
/// frequency offsets in [-span, +span].
inline TrajectoryReport verify_trajectories(const PulseShape& shape, const IonChain& chain,
                                            double span = two_pi_hz(2e3), int points = 9,
                                            int steps_per_segment = 2000) {
  TrajectoryReport r;
  r.nominal = integrate_trajectories(shape, chain, 0.0, steps_per_segment);
  for (int i = 0; i < points; ++i) {
    const double off = points > 1 ? -span + 2.0 * span * i / (points - 1) : 0.0;
    const TrajectoryCheck c = integrate_trajectories(shape, chain, off, steps_per_segment);
    r.robustness.push_back({off, c.achieved_chi, c.spin_motion_residual, c.residuals.maxCoeff()});
  }
  const double d = two_pi_hz(10.0);
  const double up = integrate_trajectories(shape, chain, d, steps_per_segment).achieved_chi;
  const double down = integrate_trajectories(shape, chain, -d, steps_per_segment).achieved_chi;
  r.dchi_doffset = (up - down) / (2.0 * d);
  return r;
}

}  // namespace ququart
