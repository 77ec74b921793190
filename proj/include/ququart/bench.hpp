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

// Benchmarks and small algorithms on the noisy simulator: randomized
// benchmarking, Bell-state parity fidelity, Bernstein-Vazirani and a
// two-qubit Grover search.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ququart/common.hpp"
#include "ququart/gates.hpp"
#include "ququart/noise.hpp"
#include "ququart/state.hpp"
#include "ququart/transpiler.hpp"

namespace ququart {

// ---------------------------------------------------------------------------
// Outcome distributions

using Distribution = std::map<BasisLabel, double>;

inline bool gate_noise_off(const NoiseParams& p) {
  return std::isinf(p.t1) && std::isinf(p.t2_01) && std::isinf(p.t2_mag) && p.crosstalk_ratio == 0.0 &&
         p.pulse_depolarizing == 0.0;
}

/// Outcome frequencies of a native circuit. shots = 0 selects the exact
/// distribution, which is only defined when the gate channels are off; the
/// readout confusion is then applied analytically.
inline Distribution outcome_distribution(const NativeCircuit& circuit, const NoiseParams& params,
                                         std::size_t shots, std::uint64_t seed) {
  Distribution dist;
  if (shots == 0) {
    params.validate();
    if (!gate_noise_off(params)) {
      throw Error(ErrorKind::validation, "exact evaluation (shots = 0) needs every gate noise channel off");
    }
    const QuditRegister reg = ideal_state(circuit);
    const std::vector<double> probs =
        confuse_distribution(reg.populations(), reg.ions(), effective_confusion(params));
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) dist[reg.label_of(i)] = probs[i];
    }
    return dist;
  }
  for (const auto& [label, count] : run_shots(circuit, params, shots, seed)) {
    dist[label] = static_cast<double>(count) / static_cast<double>(shots);
  }
  return dist;
}

/// Probability that the decoded qubit bits satisfy `accept`.
template <class Accept>
double decoded_probability(const Distribution& dist, const TranspileMode& mode, int n_qubits, Accept accept) {
  double p = 0.0;
  for (const auto& [label, prob] : dist) {
    if (accept(decode_outcome(label, mode, n_qubits))) p += prob;
  }
  return p;
}

/// Seed for the k-th circuit of a benchmark run.
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t k) { return Rng::stream(master, k).next(); }

// ---------------------------------------------------------------------------
// Exponential fit A + B p^l

struct ExpFit {
  double a = 0.0;
  double b = 0.0;
  double p = 1.0;
  double a_err = 0.0;
  double b_err = 0.0;
  double p_err = 0.0;
  bool degenerate = false;  // p not identifiable (flat data)
  bool converged = true;
};

namespace detail {

struct LinearAB {
  double a = 0.0;
  double b = 0.0;
  double cost = 0.0;
};

/// Weighted least squares in (A, B) for fixed p.
inline LinearAB solve_ab(const std::vector<double>& l, const std::vector<double>& y, const std::vector<double>& w,
                         double p) {
  double s11 = 0, s1x = 0, sxx = 0, s1y = 0, sxy = 0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double x = std::pow(p, l[i]);
    s11 += w[i];
    s1x += w[i] * x;
    sxx += w[i] * x * x;
    s1y += w[i] * y[i];
    sxy += w[i] * x * y[i];
  }
  LinearAB r;
  const double det = s11 * sxx - s1x * s1x;
  if (std::abs(det) <= 1e-14 * std::max(1.0, s11 * sxx)) {
    // columns collinear (p near 1): all weight in A + B
    r.a = s1y / s11;
    r.b = 0.0;
  } else {
    r.a = (sxx * s1y - s1x * sxy) / det;
    r.b = (s11 * sxy - s1x * s1y) / det;
  }
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double res = y[i] - r.a - r.b * std::pow(p, l[i]);
    r.cost += w[i] * res * res;
  }
  return r;
}

}  // namespace detail

/// Weighted least-squares fit of A + B p^l with p in (0, 1]. p is located by
/// variable projection (grid, then golden section) and polished with
/// Gauss-Newton; standard errors come from the covariance scaled by the
/// reduced chi-square.
inline ExpFit fit_exponential(const std::vector<double>& lengths, const std::vector<double>& survivals,
                              std::vector<double> weights = {}) {
  if (lengths.size() != survivals.size()) throw Error(ErrorKind::shape, "lengths and survivals differ in size");
  if (weights.empty()) weights.assign(lengths.size(), 1.0);
  if (weights.size() != lengths.size()) throw Error(ErrorKind::shape, "weights differ in size");
  std::vector<double> distinct = lengths;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw Error(ErrorKind::fit, "fit needs at least 3 distinct lengths");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::fit, "weights must be positive and finite");
  }
  const auto& l = lengths;
  const auto& y = survivals;
  const auto& w = weights;

  ExpFit fit;
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*ymax - *ymin <= 1e-12) {
    fit.a = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    fit.b = 0.0;
    fit.p = 1.0;
    fit.degenerate = true;
    return fit;
  }

  // p = 1 - 10^x on a log grid, plus a linear grid over (0, 1)
  std::vector<double> grid;
  for (int k = 0; k <= 400; ++k) grid.push_back(1.0 - std::pow(10.0, -8.0 + 8.0 * k / 400.0));
  for (int k = 1; k < 100; ++k) grid.push_back(k / 100.0);
  std::sort(grid.begin(), grid.end());
  std::size_t best = 0;
  double best_cost = detail::solve_ab(l, y, w, grid[0]).cost;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double c = detail::solve_ab(l, y, w, grid[i]).cost;
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  double lo = best > 0 ? grid[best - 1] : grid[0] * 0.5;
  double hi = best + 1 < grid.size() ? grid[best + 1] : 1.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = detail::solve_ab(l, y, w, x1).cost;
  double f2 = detail::solve_ab(l, y, w, x2).cost;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = detail::solve_ab(l, y, w, x1).cost;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = detail::solve_ab(l, y, w, x2).cost;
    }
  }
  double p = 0.5 * (lo + hi);
  detail::LinearAB ab = detail::solve_ab(l, y, w, p);
  double a = ab.a;
  double b = ab.b;

  const std::size_t n = l.size();
  auto normal_matrix = [&](double pa, double pb, double pp, Eigen::Matrix3d& jtj, Eigen::Vector3d& jtr) {
    jtj.setZero();
    jtr.setZero();
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::pow(pp, l[i]);
      const Eigen::Vector3d j(1.0, x, l[i] == 0.0 ? 0.0 : pb * l[i] * std::pow(pp, l[i] - 1.0));
      const double r = y[i] - pa - pb * x;
      jtj += w[i] * j * j.transpose();
      jtr += w[i] * r * j;
      cost += w[i] * r * r;
    }
    return cost;
  };

  // Gauss-Newton polish with step halving, p kept inside (0, 1]
  Eigen::Matrix3d jtj;
  Eigen::Vector3d jtr;
  double cost = normal_matrix(a, b, p, jtj, jtr);
  for (int it = 0; it < 50; ++it) {
    Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
    if (!lu.isInvertible()) break;
    Eigen::Vector3d step = lu.solve(jtr);
    double scale = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      const double np = std::min(1.0, p + scale * step(2));
      if (np > 0.0) {
        Eigen::Matrix3d jn;
        Eigen::Vector3d rn;
        const double nc = normal_matrix(a + scale * step(0), b + scale * step(1), np, jn, rn);
        if (nc <= cost) {
          a += scale * step(0);
          b += scale * step(1);
          p = np;
          cost = nc;
          jtj = jn;
          jtr = rn;
          improved = true;
          break;
        }
      }
      scale *= 0.5;
    }
    if (!improved || step.norm() < 1e-15) break;
  }

  fit.a = a;
  fit.b = b;
  fit.p = p;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
  if (!lu.isInvertible() || !std::isfinite(p)) {
    fit.converged = false;
    return fit;
  }
  const double dof = static_cast<double>(n) - 3.0;
  const double scale = dof > 0 ? cost / dof : 1.0;
  const Eigen::Matrix3d cov = lu.inverse() * scale;
  fit.a_err = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.b_err = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.p_err = std::sqrt(std::max(0.0, cov(2, 2)));
  return fit;
}

// ---------------------------------------------------------------------------
// Randomized benchmarking

/// The 24 single-qubit Cliffords, generated from H and S, identity first.
inline const std::vector<Matrix2>& clifford_group() {
  static const std::vector<Matrix2> group = [] {
    std::vector<Matrix2> g{Matrix2::Identity()};
    const std::array<Matrix2, 2> gens{qubit::h(), qubit::s()};
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (const Matrix2& gen : gens) {
        const Matrix2 c = gen * g[i];
        const bool known = std::any_of(g.begin(), g.end(), [&](const Matrix2& e) {
          return phase_invariant_distance(e, c) < 1e-9;
        });
        if (!known) g.push_back(c);
      }
    }
    return g;
  }();
  return group;
}

/// Index of the Clifford equal to m up to a global phase.
inline std::size_t clifford_index(const Matrix2& m) {
  const auto& g = clifford_group();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (phase_invariant_distance(g[i], m) < 1e-9) return i;
  }
  throw Error(ErrorKind::validation, "matrix is not a Clifford");
}

struct RBConfig {
  int ion = 0;
  int level = 1;  // transition 0 <-> level
  std::vector<int> lengths;
  int samples = 10;
  std::size_t shots = 300;
  /// Synthetic depolarizing error: a uniformly random Pauli on {0, level}
  /// after each Clifford with this probability.
  double depolarizing = 0.0;
  /// Extra global phase appended to every Clifford as virtual phases.
  double extra_virtual_phase = 0.0;

  static std::vector<int> default_lengths() {
    std::vector<int> l;
    for (int k = 2; k <= 100; k += 2) l.push_back(k);
    return l;
  }
};

struct RBResult {
  std::vector<int> lengths;
  std::vector<double> survival;
  std::vector<double> survival_err;
  ExpFit fit;
  bool fit_failed = false;
  double fidelity = 1.0;
  double fidelity_err = 0.0;
};

/// Native ops for Clifford c on the {0, level} pair of `ion`.
inline std::vector<NativeOp> clifford_to_native(std::size_t c, int ion, int level, const GateTiming& timing,
                                                double extra_phase = 0.0) {
  const U3Angles a = u3_angles(clifford_group().at(c));
  std::vector<NativeOp> ops = u3_to_native(a.theta, a.phi, a.lambda, ion, level, timing);
  if (extra_phase != 0.0) {
    for (int k = 0; k < kLevels; ++k) ops.push_back(NativeOp::virtual_phase(ion, k, extra_phase));
  }
  return ops;
}

inline RBResult rb_run(const RBConfig& cfg, const NoiseParams& params, std::uint64_t seed) {
  params.validate();
  check_rotation_level(cfg.level);
  if (cfg.lengths.empty()) throw Error(ErrorKind::validation, "RB needs at least one length");
  if (cfg.samples < 1) throw Error(ErrorKind::validation, "RB needs at least one sample per length");
  if (cfg.shots < 1) throw Error(ErrorKind::validation, "RB needs at least one shot");
  if (cfg.ion < 0) throw Error(ErrorKind::index, "ion index must be >= 0");
  if (!(cfg.depolarizing >= 0.0 && cfg.depolarizing <= 1.0)) {
    throw Error(ErrorKind::validation, "depolarizing probability must lie in [0, 1]");
  }
  for (int l : cfg.lengths) {
    if (l < 0) throw Error(ErrorKind::validation, "RB lengths must be >= 0");
  }
  const int n_ions = cfg.ion + 1;
  const GateTiming timing = params.timing();
  const auto& group = clifford_group();
  const std::size_t n_cliff = group.size();

  std::vector<NativeCircuit> blocks(n_cliff, NativeCircuit(n_ions));
  std::vector<Unitary> block_u;
  for (std::size_t c = 0; c < n_cliff; ++c) {
    blocks[c].ops = clifford_to_native(c, cfg.ion, cfg.level, timing, cfg.extra_virtual_phase);
    Matrix u = Matrix::Identity(kLevels, kLevels);
    for (const NativeOp& op : blocks[c].ops) u = native_matrix(op) * u;
    block_u.push_back(Unitary::checked(u));
  }
  const bool fast = params.ideal();

  RBResult res;
  res.lengths = cfg.lengths;
  std::uint64_t circuit_index = 0;
  for (int length : cfg.lengths) {
    std::vector<double> per_sample;
    for (int s = 0; s < cfg.samples; ++s) {
      Rng seq_rng = Rng::stream(seed, circuit_index);
      const std::uint64_t shot_seed = sub_seed(seed, circuit_index + (1ULL << 40));
      ++circuit_index;
      std::vector<std::size_t> seq;
      Matrix2 total = Matrix2::Identity();
      for (int k = 0; k < length; ++k) {
        const std::size_t c = seq_rng.below(n_cliff);
        seq.push_back(c);
        total = group[c] * total;
      }
      seq.push_back(clifford_index(total.adjoint()));

      std::size_t survived = 0;
      for (std::size_t shot = 0; shot < cfg.shots; ++shot) {
        Trajectory t(n_ions, params, Rng::stream(shot_seed, shot));
        for (std::size_t c : seq) {
          if (fast) {
            t.reg.apply_single(cfg.ion, block_u[c]);
          } else {
            evolve_trajectory(t, blocks[c], params);
          }
          if (cfg.depolarizing > 0.0 && t.rng.uniform() < cfg.depolarizing) {
            t.reg.apply_single(cfg.ion, pair_pauli(cfg.level, static_cast<int>(t.rng.below(4))));
          }
        }
        const BasisLabel out = fast ? sample_once(t.reg, t.rng) : read_trajectory(t, params);
        survived += out.digits[cfg.ion] == 0 ? 1 : 0;
      }
      per_sample.push_back(static_cast<double>(survived) / static_cast<double>(cfg.shots));
    }
    const double mean = std::accumulate(per_sample.begin(), per_sample.end(), 0.0) / per_sample.size();
    double var = 0.0;
    for (double v : per_sample) var += (v - mean) * (v - mean);
    const double sem = per_sample.size() > 1 ? std::sqrt(var / (per_sample.size() - 1) / per_sample.size()) : 0.0;
    res.survival.push_back(mean);
    res.survival_err.push_back(sem);
  }

  std::vector<double> l(res.lengths.begin(), res.lengths.end());
  std::vector<double> w;
  const double total_shots = static_cast<double>(cfg.shots) * cfg.samples;
  for (std::size_t i = 0; i < l.size(); ++i) {
    // binomial floor keeps weights finite when every sample agrees
    const double s = res.survival[i];
    const double floor = (s * (1.0 - s) + 1.0 / total_shots) / total_shots;
    w.push_back(1.0 / std::max(res.survival_err[i] * res.survival_err[i], floor));
  }
  try {
    res.fit = fit_exponential(l, res.survival, w);
    res.fit_failed = !res.fit.converged;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::fit) throw;
    res.fit_failed = true;
  }
  if (!res.fit_failed) {
    res.fidelity = res.fit.p + (1.0 - res.fit.p) / 2.0;
    res.fidelity_err = res.fit.p_err / 2.0;
  } else {
    res.fidelity = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

// ---------------------------------------------------------------------------
// Bell-state parity benchmark

struct ParityConfig {
  int ion_a = 0;
  int ion_b = 1;
  int n_ions = 2;
  double chi = kPi / 4.0;
  int phi_points = 16;
  std::size_t shots = 1000;  // 0 selects exact evaluation
};

struct ParityResult {
  double a = 0.0;  // P(00) + P(11) after the entangling gate
  double a_err = 0.0;
  double b = 0.0;  // parity contrast at frequency 2
  double b_err = 0.0;
  double fidelity = 0.0;
  double fidelity_err = 0.0;
  std::vector<double> phi;
  std::vector<double> parity;
  double offset = 0.0;     // constant term of the parity fit
  double harmonics = 0.0;  // residual rms of the parity after the fit
};

/// Native circuit preparing the Bell state with one MS gate on (a, b).
inline NativeCircuit bell_circuit(const ParityConfig& cfg, const GateTiming& timing,
                                  const std::optional<IonGroups>& groups = std::nullopt) {
  NativeCircuit c(cfg.n_ions);
  if (groups) c.groups = *groups;
  if (c.groups.same(cfg.ion_a, cfg.ion_b)) {
    throw Error(ErrorKind::unsupported, "parity benchmark needs ions from different groups");
  }
  for (const NativeOp& op : zz_wrap_same_group(NativeOp::ms(cfg.ion_a, cfg.ion_b, cfg.chi, timing), c.groups, timing)) {
    c.ops.push_back(op);
  }
  for (const NativeOp& op : spectator_phase_compensation(cfg.chi, cfg.ion_a, cfg.ion_b)) c.ops.push_back(op);
  return c;
}

inline ParityResult parity_benchmark(const ParityConfig& cfg, const NoiseParams& params, std::uint64_t seed) {
  params.validate();
  if (cfg.phi_points < 8) throw Error(ErrorKind::validation, "phase scan needs at least 8 points");
  if (cfg.ion_a < 0 || cfg.ion_b < 0 || cfg.ion_a >= cfg.n_ions || cfg.ion_b >= cfg.n_ions) {
    throw Error(ErrorKind::index, "parity ions out of range");
  }
  if (cfg.ion_a == cfg.ion_b) throw Error(ErrorKind::index, "parity benchmark needs two distinct ions");
  const GateTiming timing = params.timing();
  const NativeCircuit bell = bell_circuit(cfg, timing);
  auto bit = [](int level) { return level == 0 ? 0 : 1; };
  auto even_odd = [&](const Distribution& dist) {
    double even = 0.0;
    double odd = 0.0;
    for (const auto& [label, p] : dist) {
      const int x = bit(label.digits[cfg.ion_a]) ^ bit(label.digits[cfg.ion_b]);
      (x == 0 ? even : odd) += p;
    }
    return std::pair{even, odd};
  };

  ParityResult r;
  const auto [even, odd] = even_odd(outcome_distribution(bell, params, cfg.shots, sub_seed(seed, 0)));
  r.a = even;
  const double n = static_cast<double>(cfg.shots);
  r.a_err = cfg.shots ? std::sqrt(std::max(0.0, r.a * (1.0 - r.a)) / n) : 0.0;

  const int m = cfg.phi_points;
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd y(m);
  Eigen::VectorXd w(m);
  for (int k = 0; k < m; ++k) {
    const double phi = 2.0 * kPi * k / m;
    NativeCircuit c = bell;
    for (int ion : {cfg.ion_a, cfg.ion_b}) {
      NativeOp op = NativeOp::rotation(ion, 1, kPi / 2.0, phi, timing);
      op.beams = {c.groups.of(ion), c.groups.of(ion)};
      c.ops.push_back(op);
    }
    const auto [pe, po] = even_odd(outcome_distribution(c, params, cfg.shots, sub_seed(seed, k + 1)));
    const double parity = pe - po;
    r.phi.push_back(phi);
    r.parity.push_back(parity);
    design(k, 0) = 1.0;
    design(k, 1) = std::cos(2.0 * phi);
    design(k, 2) = std::sin(2.0 * phi);
    y(k) = parity;
    w(k) = cfg.shots ? n / (1.0 - parity * parity + 1.0 / n) : 1.0;
  }
  const Eigen::MatrixXd wd = w.asDiagonal() * design;
  const Eigen::Matrix3d normal = design.transpose() * wd;
  const Eigen::Vector3d coef = normal.ldlt().solve(wd.transpose() * y);
  r.offset = coef(0);
  const double ca = coef(1);
  const double cb = coef(2);
  r.b = std::hypot(ca, cb);
  const Eigen::VectorXd resid = y - design * coef;
  r.harmonics = std::sqrt(resid.squaredNorm() / m);
  if (cfg.shots) {
    const double chi2 = resid.dot(w.asDiagonal() * resid);
    const double scale = std::max(1.0, chi2 / (m - 3));
    const Eigen::Matrix3d cov = normal.inverse() * scale;
    if (r.b > 0.0) {
      const double var_b = (ca * ca * cov(1, 1) + cb * cb * cov(2, 2) + 2.0 * ca * cb * cov(1, 2)) / (r.b * r.b);
      r.b_err = std::sqrt(std::max(0.0, var_b));
    }
  }
  r.fidelity = r.a / 2.0 + r.b / 2.0;
  r.fidelity_err = 0.5 * std::hypot(r.a_err, r.b_err);
  return r;
}

// ---------------------------------------------------------------------------
// Bernstein-Vazirani and Grover

enum class Regime { qubit, ququart };

inline std::string_view regime_name(Regime r) { return r == Regime::qubit ? "qubit" : "ququart"; }

/// BV over n data qubits plus one ancilla (the last qubit).
inline QubitCircuit bv_circuit(int n_data, std::uint64_t secret) {
  if (n_data < 1 || n_data > 20) throw Error(ErrorKind::validation, "BV needs 1..20 data qubits");
  if (secret >> n_data) throw Error(ErrorKind::validation, "secret does not fit in the data qubits");
  const int n = n_data + 1;
  const int anc = n_data;
  QubitCircuit c(n);
  c.x(anc);
  for (int q = 0; q < n; ++q) c.h(q);
  c.barrier();
  for (int q = 0; q < n_data; ++q) {
    // data qubit q holds bit (n_data-1-q) of the secret, most significant first
    if ((secret >> (n_data - 1 - q)) & 1) c.cx(q, anc);
  }
  c.barrier();
  for (int q = 0; q < n; ++q) c.h(q);
  return c;
}

inline TranspileMode regime_mode(Regime regime, int n_qubits) {
  if (regime == Regime::qubit) return QubitRegime{};
  return QuquartRegime::consecutive(n_qubits);
}

struct AlgoResult {
  double success = 0.0;
  double success_err = 0.0;
  std::size_t ms_gates = 0;
  std::size_t native_ops = 0;
};

inline AlgoResult finish_algo(const QubitCircuit& qc, Regime regime, const NoiseParams& params, std::size_t shots,
                              std::uint64_t seed, const std::vector<int>& expected) {
  const TranspileMode mode = regime_mode(regime, qc.n_qubits);
  TranspileOptions opt;
  opt.timing = params.timing();
  const NativeCircuit native = transpile(qc, mode, opt);
  const Distribution dist = outcome_distribution(native, params, shots, seed);
  AlgoResult r;
  r.success = decoded_probability(dist, mode, qc.n_qubits, [&](const std::vector<int>& bits) {
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (expected[i] >= 0 && bits[i] != expected[i]) return false;
    }
    return true;
  });
  r.success_err = shots ? std::sqrt(r.success * (1.0 - r.success) / static_cast<double>(shots)) : 0.0;
  r.ms_gates = native.count(OpKind::ms);
  r.native_ops = native.ops.size();
  return r;
}

/// Success = fraction of shots whose data qubits read the secret. In the
/// ququart regime the data qubit and the ancilla share ion 0, so only one
/// data qubit is supported.
inline AlgoResult bv_run(int n_data, std::uint64_t secret, Regime regime, const NoiseParams& params,
                         std::size_t shots, std::uint64_t seed) {
  params.validate();
  if (regime == Regime::ququart && n_data != 1) {
    throw Error(ErrorKind::unsupported, "ququart BV stores the data qubit and the ancilla on one ion; n_data must be 1");
  }
  const QubitCircuit qc = bv_circuit(n_data, secret);
  std::vector<int> expected(n_data + 1, -1);
  for (int q = 0; q < n_data; ++q) expected[q] = static_cast<int>((secret >> (n_data - 1 - q)) & 1);
  return finish_algo(qc, regime, params, shots, seed, expected);
}

/// One Grover iteration on two qubits marking |s>, s in 0..3 (qubit 0 is the
/// high bit). Oracle and diffusion each contain a single CZ.
inline QubitCircuit grover_circuit(int secret) {
  if (secret < 0 || secret > 3) throw Error(ErrorKind::validation, "Grover secret must be 0..3");
  const int s0 = (secret >> 1) & 1;
  const int s1 = secret & 1;
  QubitCircuit c(2);
  c.h(0).h(1).barrier();
  if (!s0) c.x(0);
  if (!s1) c.x(1);
  c.cz(0, 1);
  if (!s0) c.x(0);
  if (!s1) c.x(1);
  c.barrier();
  c.h(0).h(1).x(0).x(1).cz(0, 1).x(0).x(1).h(0).h(1);
  return c;
}

inline AlgoResult grover_run(int secret, const NoiseParams& params, std::size_t shots, std::uint64_t seed) {
  params.validate();
  const QubitCircuit qc = grover_circuit(secret);
  return finish_algo(qc, Regime::qubit, params, shots, seed, {(secret >> 1) & 1, secret & 1});
}

}  // namespace ququart
