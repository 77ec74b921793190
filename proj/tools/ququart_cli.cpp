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

// ququart command-line front end. Every report is line-oriented key=value
// text that starts with the fully resolved configuration.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ququart/ququart.hpp"

namespace {

using namespace ququart;

constexpr const char* kCalibrationEnv = "QUQUART_CALIBRATION";

/// Options shared by every command.
struct Common {
  std::uint64_t seed = 1;
  std::size_t shots = 0;
  std::string noise;
  std::string out;
};

void add_common(CLI::App* app, Common& c, std::size_t default_shots, const std::string& shots_help) {
  c.shots = default_shots;
  app->add_option("--seed", c.seed, "master seed")->capture_default_str();
  app->add_option("--shots", c.shots, shots_help)->capture_default_str();
  app->add_option("--noise", c.noise,
                  std::string("calibration file, 'default' or 'off' (default: $") + kCalibrationEnv +
                      " if set, else 'default')");
  app->add_option("--out", c.out, "write the full report to this path instead of stdout");
}

struct ResolvedNoise {
  NoiseParams params;
  std::string source;
};

ResolvedNoise resolve_noise(const std::string& flag) {
  std::string choice = flag;
  if (choice.empty()) {
    const char* env = std::getenv(kCalibrationEnv);
    choice = env && *env ? env : "default";
  }
  if (choice == "off") return {NoiseParams::off(), "off"};
  if (choice == "default") return {default_noise_params(), "default"};
  return {parse_calibration_file(choice), choice};
}

std::array<int, 2> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::parse, "expected two comma-separated indices, got '" + text + "'");
  return {parse_int(text.substr(0, comma)), parse_int(text.substr(comma + 1))};
}

Regime parse_regime(const std::string& s) {
  if (s == "qubit") return Regime::qubit;
  if (s == "ququart") return Regime::ququart;
  throw Error(ErrorKind::validation, "regime must be 'qubit' or 'ququart'");
}

/// Report header: command, seed, shots and the resolved noise model.
Report header(const std::string& command, const Common& c, const ResolvedNoise& noise) {
  Report r;
  r.add("command", command);
  r.add("config.seed", std::to_string(c.seed));
  r.add("config.shots", c.shots);
  add_noise_config(r, noise.params, noise.source);
  return r;
}

void emit(const Report& full, const Report& summary, const Common& c) {
  if (c.out.empty()) {
    std::cout << full.str();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write '" + c.out + "'");
  f << full.str();
  if (!f) throw Error(ErrorKind::io, "write to '" + c.out + "' failed");
  std::cout << summary.str();
  std::cout << "report.path=" << c.out << "\n";
}

void add_chain_config(Report& r, const IonChain& chain, const std::string& source) {
  r.add("chain.source", source);
  r.add("chain.ions", chain.n_ions);
  r.add("chain.freq_x_hz", chain.omega_x / (2.0 * kPi));
  r.add("chain.freq_y_hz", chain.omega_y / (2.0 * kPi));
  r.add("chain.freq_z_hz", chain.omega_z / (2.0 * kPi));
  r.add("chain.mass_kg", chain.mass);
}

IonChain resolve_chain(const std::string& path, std::optional<int> ions) {
  IonChain chain = path.empty() ? IonChain{} : parse_chain_file(path);
  if (ions) chain.n_ions = *ions;
  chain.validate();
  return chain;
}

// ---------------------------------------------------------------------------
// Commands

struct RunArgs {
  Common common;
  std::string circuit;
  std::string regime = "qubit";
};

void cmd_run(const RunArgs& a) {
  const ResolvedNoise noise = resolve_noise(a.common.noise);
  const ParsedCircuit parsed = parse_circuit_file(a.circuit);
  Report r = header("run", a.common, noise);
  r.add("config.circuit", a.circuit);
  NativeCircuit native;
  std::optional<TranspileMode> mode;
  int n_qubits = 0;
  if (const auto* qc = std::get_if<QubitCircuit>(&parsed)) {
    r.add("config.circuit_kind", "qubit");
    r.add("config.regime", a.regime);
    mode = regime_mode(parse_regime(a.regime), qc->n_qubits);
    TranspileOptions opt;
    opt.timing = noise.params.timing();
    native = transpile(*qc, *mode, opt);
    n_qubits = qc->n_qubits;
    r.add("circuit.qubits", n_qubits);
  } else {
    r.add("config.circuit_kind", "native");
    r.add("config.regime", "native");
    native = std::get<NativeCircuit>(parsed);
    validate_native(native);
  }
  r.add("circuit.ions", native.n_ions);
  r.add("circuit.native_ops", native.ops.size());
  r.add("circuit.ms_gates", native.count(OpKind::ms));
  Report summary;
  if (native.n_ions == 0) {
    r.add("result.empty_circuit", true);
    summary.add("result.empty_circuit", true);
    emit(r, summary, a.common);
    return;
  }
  std::map<std::string, double> decoded;
  if (a.common.shots == 0) {
    const Distribution dist = outcome_distribution(native, noise.params, 0, a.common.seed);
    r.add("result.mode", "exact");
    for (const auto& [label, p] : dist) {
      if (p <= 0.0) continue;
      r.add("probability." + label.str(), p);
      if (mode) {
        std::string bits;
        for (int b : decode_outcome(label, *mode, n_qubits)) bits.push_back(static_cast<char>('0' + b));
        decoded[bits] += p;
      }
    }
    for (const auto& [bits, p] : decoded) r.add("decoded_probability." + bits, p);
  } else {
    const Histogram hist = run_shots(native, noise.params, a.common.shots, a.common.seed);
    r.add("result.mode", "sampled");
    std::string top;
    std::size_t top_count = 0;
    for (const auto& [label, n] : hist) {
      r.add("counts." + label.str(), n);
      if (n > top_count) {
        top_count = n;
        top = label.str();
      }
      if (mode) {
        std::string bits;
        for (int b : decode_outcome(label, *mode, n_qubits)) bits.push_back(static_cast<char>('0' + b));
        decoded[bits] += static_cast<double>(n);
      }
    }
    for (const auto& [bits, n] : decoded) r.add("decoded_counts." + bits, static_cast<std::size_t>(n));
    r.add("result.most_frequent", top);
    r.add("result.most_frequent_counts", top_count);
    summary.add("result.most_frequent", top);
    summary.add("result.most_frequent_counts", top_count);
  }
  emit(r, summary, a.common);
}

struct RbArgs {
  Common common;
  int ion = 0;
  int level = 1;
  std::string lengths;
  int samples = 10;
  double depolarizing = 0.0;
};

void cmd_bench_rb(const RbArgs& a) {
  const ResolvedNoise noise = resolve_noise(a.common.noise);
  RBConfig cfg;
  cfg.ion = a.ion;
  cfg.level = a.level;
  cfg.samples = a.samples;
  cfg.shots = a.common.shots;
  cfg.depolarizing = a.depolarizing;
  if (a.lengths.empty()) {
    cfg.lengths = RBConfig::default_lengths();
  } else {
    std::stringstream ss(a.lengths);
    for (std::string tok; std::getline(ss, tok, ',');) cfg.lengths.push_back(parse_int(tok));
  }
  const RBResult res = rb_run(cfg, noise.params, a.common.seed);
  Report r = header("bench rb", a.common, noise);
  r.add("config.ion", cfg.ion);
  r.add("config.level", cfg.level);
  r.add("config.samples", cfg.samples);
  r.add("config.depolarizing", cfg.depolarizing);
  r.add("config.lengths", Report::list(cfg.lengths));
  for (std::size_t i = 0; i < res.lengths.size(); ++i) {
    const std::string l = std::to_string(res.lengths[i]);
    r.add("survival.l" + l, res.survival[i]);
    r.add("survival_err.l" + l, res.survival_err[i]);
  }
  Report summary;
  for (Report* out : {&r, &summary}) {
    out->add("fit.a", res.fit.a);
    out->add("fit.b", res.fit.b);
    out->add("fit.p", res.fit.p);
    out->add("fit.p_err", res.fit.p_err);
    out->add("fit.degenerate", res.fit.degenerate);
    out->add("fit.failed", res.fit_failed);
    out->add("result.fidelity", res.fidelity);
    out->add("result.fidelity_err", res.fidelity_err);
  }
  emit(r, summary, a.common);
}

struct ParityArgs {
  Common common;
  std::string ions = "0,1";
  int n_ions = 2;
  double chi = kPi / 4.0;
  int phi_points = 16;
};

void cmd_bench_parity(const ParityArgs& a) {
  const ResolvedNoise noise = resolve_noise(a.common.noise);
  ParityConfig cfg;
  const auto ions = parse_pair(a.ions);
  cfg.ion_a = ions[0];
  cfg.ion_b = ions[1];
  cfg.n_ions = a.n_ions;
  cfg.chi = a.chi;
  cfg.phi_points = a.phi_points;
  cfg.shots = a.common.shots;
  const ParityResult res = parity_benchmark(cfg, noise.params, a.common.seed);
  Report r = header("bench parity", a.common, noise);
  r.add("config.ions", a.ions);
  r.add("config.n_ions", cfg.n_ions);
  r.add("config.chi_rad", cfg.chi);
  r.add("config.phi_points", cfg.phi_points);
  for (std::size_t i = 0; i < res.phi.size(); ++i) {
    r.add("scan." + std::to_string(i) + ".phi_rad", res.phi[i]);
    r.add("scan." + std::to_string(i) + ".parity", res.parity[i]);
  }
  r.add("fit.offset", res.offset);
  r.add("fit.harmonics_rms", res.harmonics);
  Report summary;
  for (Report* out : {&r, &summary}) {
    out->add("result.population_a", res.a);
    out->add("result.population_a_err", res.a_err);
    out->add("result.contrast_b", res.b);
    out->add("result.contrast_b_err", res.b_err);
    out->add("result.fidelity", res.fidelity);
    out->add("result.fidelity_err", res.fidelity_err);
  }
  emit(r, summary, a.common);
}

void add_algo_result(Report& r, Report& summary, const AlgoResult& res) {
  r.add("circuit.native_ops", res.native_ops);
  r.add("circuit.ms_gates", res.ms_gates);
  for (Report* out : {&r, &summary}) {
    out->add("result.success", res.success);
    out->add("result.success_err", res.success_err);
  }
}

struct BvArgs {
  Common common;
  std::string secret = "1";
  std::string regime = "qubit";
};

void cmd_algo_bv(const BvArgs& a) {
  const ResolvedNoise noise = resolve_noise(a.common.noise);
  if (a.secret.empty() || a.secret.size() > 20 || a.secret.find_first_not_of("01") != std::string::npos) {
    throw Error(ErrorKind::validation, "secret must be a bit string of length 1..20");
  }
  const std::uint64_t secret = std::stoull(a.secret, nullptr, 2);
  const Regime regime = parse_regime(a.regime);
  const AlgoResult res =
      bv_run(static_cast<int>(a.secret.size()), secret, regime, noise.params, a.common.shots, a.common.seed);
  Report r = header("algo bv", a.common, noise);
  r.add("config.secret", a.secret);
  r.add("config.regime", a.regime);
  Report summary;
  add_algo_result(r, summary, res);
  emit(r, summary, a.common);
}

struct GroverArgs {
  Common common;
  std::string secret = "11";
};

void cmd_algo_grover(const GroverArgs& a) {
  const ResolvedNoise noise = resolve_noise(a.common.noise);
  if (a.secret.size() != 2 || a.secret.find_first_not_of("01") != std::string::npos) {
    throw Error(ErrorKind::validation, "Grover secret must be a 2-bit string");
  }
  const int secret = std::stoi(a.secret, nullptr, 2);
  const AlgoResult res = grover_run(secret, noise.params, a.common.shots, a.common.seed);
  Report r = header("algo grover", a.common, noise);
  r.add("config.secret", a.secret);
  r.add("config.regime", "qubit");
  Report summary;
  add_algo_result(r, summary, res);
  emit(r, summary, a.common);
}

struct ModesArgs {
  Common common;
  std::string chain;
  std::optional<int> ions;
  std::string axis = "all";
};

void cmd_chain_modes(const ModesArgs& a) {
  const ResolvedNoise noise = resolve_noise(a.common.noise);
  const IonChain chain = resolve_chain(a.chain, a.ions);
  std::vector<Axis> axes;
  if (a.axis == "all") {
    axes = {Axis::x, Axis::y, Axis::z};
  } else if (a.axis == "x" || a.axis == "y" || a.axis == "z") {
    axes = {a.axis == "x" ? Axis::x : (a.axis == "y" ? Axis::y : Axis::z)};
  } else {
    throw Error(ErrorKind::validation, "axis must be x, y, z or all");
  }
  Report r = header("chain modes", a.common, noise);
  add_chain_config(r, chain, a.chain.empty() ? "default" : a.chain);
  r.add("config.axis", a.axis);
  const double ell = chain.length_scale();
  const std::vector<double> u = equilibrium_positions(chain.n_ions);
  r.add("chain.length_scale_m", ell);
  std::vector<double> pos_um;
  double gap = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    pos_um.push_back(u[i] * ell * 1e6);
    if (i > 0) gap = i == 1 ? u[1] - u[0] : std::min(gap, u[i] - u[i - 1]);
  }
  r.add("chain.positions_um", Report::list(pos_um));
  Report summary;
  if (u.size() > 1) {
    r.add("chain.min_spacing_um", gap * ell * 1e6);
    summary.add("chain.min_spacing_um", gap * ell * 1e6);
  }
  for (Axis axis : axes) {
    const ModeStructure m = normal_modes(chain, axis);
    const std::string p = "modes." + std::string(axis_name(axis));
    std::vector<double> f_hz;
    std::vector<double> eta;
    for (Eigen::Index k = 0; k < m.frequencies.size(); ++k) {
      f_hz.push_back(m.frequencies(k) / (2.0 * kPi));
      eta.push_back(lamb_dicke(m.frequencies(k), chain.mass));
    }
    r.add(p + ".freq_hz", Report::list(f_hz));
    r.add(p + ".lamb_dicke", Report::list(eta));
    for (Eigen::Index k = 0; k < m.vectors.cols(); ++k) {
      std::vector<double> v(m.vectors.col(k).data(), m.vectors.col(k).data() + m.vectors.rows());
      r.add(p + ".vector." + std::to_string(k), Report::list(v));
    }
    summary.add(p + ".freq_hz", Report::list(f_hz));
  }
  emit(r, summary, a.common);
}

struct PulseArgs {
  Common common;
  std::string chain;
  std::optional<int> ions_count;
  std::string ions = "0,1";
  double duration_us = 800.0;
  double chi = kPi / 4.0;
  std::optional<double> detuning_hz;
  int segments = 0;
  double max_amplitude_hz = 500e3;
  int steps = 2000;
};

void cmd_chain_pulse(const PulseArgs& a) {
  const ResolvedNoise noise = resolve_noise(a.common.noise);
  const IonChain chain = resolve_chain(a.chain, a.ions_count);
  const auto ions = parse_pair(a.ions);
  const double mu = a.detuning_hz ? two_pi_hz(*a.detuning_hz) : default_detuning(chain);
  PulseShapeOptions opt;
  opt.n_segments = a.segments;
  opt.max_amplitude = two_pi_hz(a.max_amplitude_hz);
  const double tau = a.duration_us * 1e-6;
  const PulseShape shape = solve_pulse_shape(chain, ions, tau, mu, a.chi, opt);
  const TrajectoryReport check = verify_trajectories(shape, chain, two_pi_hz(2e3), 9, a.steps);
  Report r = header("chain pulse-shape", a.common, noise);
  add_chain_config(r, chain, a.chain.empty() ? "default" : a.chain);
  r.add("config.ions", a.ions);
  r.add("config.duration_s", tau);
  r.add("config.chi_rad", a.chi);
  r.add("config.detuning_hz", mu / (2.0 * kPi));
  r.add("config.segments", shape.n_segments);
  r.add("config.max_amplitude_hz", a.max_amplitude_hz);
  r.add("config.steps_per_segment", a.steps);
  std::vector<double> amp_hz;
  for (Eigen::Index s = 0; s < shape.amplitudes.size(); ++s) amp_hz.push_back(shape.amplitudes(s) / (2.0 * kPi));
  r.add("pulse.amplitudes_hz", Report::list(amp_hz));
  r.add("pulse.solver_residuals", Report::list(shape.closure_residuals));
  r.add("pulse.solver_chi_rad", shape.achieved_chi);
  r.add("check.residuals", Report::list(check.nominal.residuals));
  r.add("check.spin_motion_residual", check.nominal.spin_motion_residual);
  r.add("check.dchi_doffset_rad_per_hz", check.dchi_doffset * 2.0 * kPi);
  for (std::size_t i = 0; i < check.robustness.size(); ++i) {
    const RobustnessPoint& p = check.robustness[i];
    const std::string k = "robustness." + std::to_string(i);
    r.add(k + ".offset_hz", p.offset / (2.0 * kPi));
    r.add(k + ".chi_rad", p.achieved_chi);
    r.add(k + ".spin_motion_residual", p.spin_motion_residual);
    r.add(k + ".max_residual", p.max_residual);
  }
  Report summary;
  for (Report* out : {&r, &summary}) {
    out->add("result.segments", shape.n_segments);
    out->add("result.max_amplitude_hz", shape.amplitudes.cwiseAbs().maxCoeff() / (2.0 * kPi));
    out->add("result.max_residual", check.nominal.residuals.maxCoeff());
    out->add("result.chi_rad", check.nominal.achieved_chi);
  }
  emit(r, summary, a.common);
}

struct IqaeArgs {
  Common common;
  std::string hamiltonian;
  std::string init;
  int order = 1;
  double eps = 1e-10;
};

void cmd_iqae_solve(const IqaeArgs& a) {
  const ResolvedNoise noise = resolve_noise(a.common.noise);
  const PauliSum h = parse_hamiltonian_file(a.hamiltonian);
  const std::string init_label = a.init.empty() ? std::string(static_cast<std::size_t>(h.n_qubits), '0') : a.init;
  const IqaeInit init = IqaeInit::basis(init_label);
  IqaeBackend backend = ExactBackend{};
  if (a.common.shots > 0) backend = SampledBackend{a.common.shots, a.common.seed, noise.params};
  const IqaeResult res = iqae_ground_energy(h, init, a.order, backend, a.eps);
  Report r = header("iqae solve", a.common, noise);
  r.add("config.hamiltonian", a.hamiltonian);
  r.add("config.init", init.str());
  r.add("config.order", a.order);
  r.add("config.eps_cut", a.eps);
  r.add("config.backend", std::string(a.common.shots > 0 ? "sampled" : "exact"));
  r.add("hamiltonian.qubits", h.n_qubits);
  r.add("hamiltonian.terms", h.terms.size());
  std::string words;
  for (const std::string& w : res.basis.words) words += (words.empty() ? "" : ",") + w;
  r.add("basis.words", words);
  r.add("basis.closed", res.basis.closed);
  r.add("solve.e_spectrum", Report::list(res.solve.e_spectrum));
  r.add("solve.kept", res.solve.kept);
  r.add("solve.evaluations", res.evaluations);
  Report summary;
  for (Report* out : {&r, &summary}) {
    out->add("basis.size", res.basis.size());
    out->add("result.energy", res.energy);
  }
  if (h.n_qubits <= 12) {
    const double exact = exact_ground_energy(h);
    r.add("reference.exact_energy", exact);
    summary.add("reference.exact_energy", exact);
  }
  emit(r, summary, a.common);
}

void print_error(const std::string& category, const std::string& message) {
  std::cerr << "error.category=" << category << "\n" << "error.message=" << message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ququart: trapped-ion ququart emulator"};
  app.require_subcommand(1);

  std::function<void()> action;

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "simulate a circuit file and print the outcome histogram");
  add_common(run_cmd, run.common, 1000, "shots; 0 gives exact probabilities");
  run_cmd->add_option("circuit", run.circuit, "circuit file")->required();
  run_cmd->add_option("--regime", run.regime, "qubit or ququart (qubit circuits only)")->capture_default_str();
  run_cmd->callback([&] { action = [&] { cmd_run(run); }; });

  auto* bench = app.add_subcommand("bench", "benchmarks");
  bench->require_subcommand(1);
  RbArgs rb;
  auto* rb_cmd = bench->add_subcommand("rb", "single-qudit randomized benchmarking");
  add_common(rb_cmd, rb.common, 300, "shots per random sequence");
  rb_cmd->add_option("--ion", rb.ion, "ion index")->capture_default_str();
  rb_cmd->add_option("--level", rb.level, "upper level j of the {0, j} pair")->capture_default_str();
  rb_cmd->add_option("--lengths", rb.lengths, "comma-separated sequence lengths (default 2,4,...,100)");
  rb_cmd->add_option("--samples", rb.samples, "random sequences per length")->capture_default_str();
  rb_cmd->add_option("--depolarizing", rb.depolarizing, "synthetic Pauli error per Clifford")->capture_default_str();
  rb_cmd->callback([&] { action = [&] { cmd_bench_rb(rb); }; });

  ParityArgs parity;
  auto* parity_cmd = bench->add_subcommand("parity", "Bell-state parity benchmark");
  add_common(parity_cmd, parity.common, 1000, "shots per circuit; 0 gives exact evaluation");
  parity_cmd->add_option("--ions", parity.ions, "ion pair a,b")->capture_default_str();
  parity_cmd->add_option("--n-ions", parity.n_ions, "ions in the register")->capture_default_str();
  parity_cmd->add_option("--chi", parity.chi, "MS angle in rad")->capture_default_str();
  parity_cmd->add_option("--phi-points", parity.phi_points, "analysis phases")->capture_default_str();
  parity_cmd->callback([&] { action = [&] { cmd_bench_parity(parity); }; });

  auto* algo = app.add_subcommand("algo", "algorithms");
  algo->require_subcommand(1);
  BvArgs bv;
  auto* bv_cmd = algo->add_subcommand("bv", "Bernstein-Vazirani");
  add_common(bv_cmd, bv.common, 10000, "shots; 0 gives exact evaluation");
  bv_cmd->add_option("--secret", bv.secret, "secret bit string")->capture_default_str();
  bv_cmd->add_option("--regime", bv.regime, "qubit or ququart")->capture_default_str();
  bv_cmd->callback([&] { action = [&] { cmd_algo_bv(bv); }; });

  GroverArgs grover;
  auto* grover_cmd = algo->add_subcommand("grover", "two-qubit Grover search, one iteration");
  add_common(grover_cmd, grover.common, 10000, "shots; 0 gives exact evaluation");
  grover_cmd->add_option("--secret", grover.secret, "marked 2-bit string")->capture_default_str();
  grover_cmd->callback([&] { action = [&] { cmd_algo_grover(grover); }; });

  auto* chain = app.add_subcommand("chain", "ion-chain dynamics");
  chain->require_subcommand(1);
  ModesArgs modes;
  auto* modes_cmd = chain->add_subcommand("modes", "equilibrium positions and normal modes");
  add_common(modes_cmd, modes.common, 0, "unused");
  modes_cmd->add_option("--chain", modes.chain, "chain file (default: 8 ions at the built-in trap)");
  modes_cmd->add_option("--ions", modes.ions, "override the ion count");
  modes_cmd->add_option("--axis", modes.axis, "x, y, z or all")->capture_default_str();
  modes_cmd->callback([&] { action = [&] { cmd_chain_modes(modes); }; });

  PulseArgs pulse;
  auto* pulse_cmd = chain->add_subcommand("pulse-shape", "segmented MS amplitude that closes all radial-x modes");
  add_common(pulse_cmd, pulse.common, 0, "unused");
  pulse_cmd->add_option("--chain", pulse.chain, "chain file (default: 8 ions at the built-in trap)");
  pulse_cmd->add_option("--n-ions", pulse.ions_count, "override the ion count");
  pulse_cmd->add_option("--ions", pulse.ions, "ion pair a,b")->capture_default_str();
  pulse_cmd->add_option("--duration-us", pulse.duration_us, "gate duration in us")->capture_default_str();
  pulse_cmd->add_option("--chi", pulse.chi, "target MS angle in rad")->capture_default_str();
  pulse_cmd->add_option("--detuning-hz", pulse.detuning_hz, "drive frequency (default: top x mode + 10 kHz)");
  pulse_cmd->add_option("--segments", pulse.segments, "segment count (0: 2N+1)")->capture_default_str();
  pulse_cmd->add_option("--max-amplitude-hz", pulse.max_amplitude_hz, "amplitude cap")->capture_default_str();
  pulse_cmd->add_option("--steps", pulse.steps, "RK4 steps per segment for the check")->capture_default_str();
  pulse_cmd->callback([&] { action = [&] { cmd_chain_pulse(pulse); }; });

  auto* iqae = app.add_subcommand("iqae", "iterative quantum assisted eigensolver");
  iqae->require_subcommand(1);
  IqaeArgs solve;
  auto* solve_cmd = iqae->add_subcommand("solve", "ground energy in the Krylov subspace");
  add_common(solve_cmd, solve.common, 0, "shots per expectation value; 0 gives the exact backend");
  solve_cmd->add_option("hamiltonian", solve.hamiltonian, "Hamiltonian file")->required();
  solve_cmd->add_option("--init", solve.init, "initial basis state bits (default all zero)");
  solve_cmd->add_option("--order", solve.order, "Krylov order k")->capture_default_str();
  solve_cmd->add_option("--eps", solve.eps, "relative eigenvalue cut for E")->capture_default_str();
  solve_cmd->callback([&] { action = [&] { cmd_iqae_solve(solve); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }
  try {
    action();
  } catch (const Error& e) {
    print_error(std::string(e.category()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
