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

// Text formats: circuits, calibrations, chains, Hamiltonians, and the
// line-oriented key=value report.
//
// Circuit file, one op per line, '#' starts a comment:
//   ions 2                                 (or: qubits 2)
//   rphi ion=0 j=1 theta=pi/2 phi=0
//   rz ion=0 j=2 theta=0.3
//   ms ions=0,1 chi=pi/4
//   u3 q=0 theta=1 phi=0 lambda=0
//   h q=0 | x q=0 | z q=0
//   cx control=0 target=1 | cz qubits=0,1 | xx qubits=0,1 chi=0.3
//   barrier
// Native and qubit ops cannot be mixed in one file.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "ququart/chain.hpp"
#include "ququart/common.hpp"
#include "ququart/gates.hpp"
#include "ququart/noise.hpp"
#include "ququart/pauli.hpp"
#include "ququart/transpiler.hpp"

namespace ququart {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string strip_comment(std::string_view line) {
  const auto h = line.find('#');
  return trim(h == std::string_view::npos ? line : line.substr(0, h));
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

inline std::string at_line(int line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

}  // namespace detail

/// Parses a real number, also accepting "inf" and multiples of pi such as
/// "pi", "-pi/2", "3*pi/4", "0.5pi".
inline double parse_real(std::string_view text) {
  std::string s = detail::trim(text);
  if (s.empty()) throw Error(ErrorKind::parse, "empty number");
  if (s == "inf" || s == "+inf") return kInf;
  const auto pi_pos = s.find("pi");
  if (pi_pos != std::string::npos) {
    std::string head = s.substr(0, pi_pos);
    std::string tail = s.substr(pi_pos + 2);
    double factor = 1.0;
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (head == "-") {
      factor = -1.0;
    } else if (!head.empty() && head != "+") {
      factor = parse_real(head);
    }
    double den = 1.0;
    if (!tail.empty()) {
      if (tail[0] != '/') throw Error(ErrorKind::parse, "malformed number '" + s + "'");
      den = parse_real(tail.substr(1));
      if (den == 0.0) throw Error(ErrorKind::parse, "division by zero in '" + s + "'");
    }
    return factor * kPi / den;
  }
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw Error(ErrorKind::parse, "malformed number '" + s + "'");
  return v;
}

inline int parse_int(std::string_view text) {
  const std::string s = detail::trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::parse, "malformed integer '" + s + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Circuits

using ParsedCircuit = std::variant<QubitCircuit, NativeCircuit>;

namespace detail {

/// key=value arguments of one op line; every key must be consumed.
class OpArgs {
 public:
  OpArgs(const std::vector<std::string>& tokens, int line) : line_(line) {
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorKind::parse, at_line(line, "expected key=value, got '" + tokens[i] + "'"));
      }
      const std::string key = tokens[i].substr(0, eq);
      if (!args_.emplace(key, tokens[i].substr(eq + 1)).second) {
        throw Error(ErrorKind::parse, at_line(line, "duplicate argument '" + key + "'"));
      }
    }
  }

  /// Prefixes errors from f with the line number.
  template <class F>
  auto wrap(F f) {
    try {
      return f();
    } catch (const Error& e) {
      throw Error(e.kind(), at_line(line_, e.what()));
    }
  }

  std::string take(const std::string& key) {
    auto it = args_.find(key);
    if (it == args_.end()) throw Error(ErrorKind::parse, at_line(line_, "missing argument '" + key + "'"));
    std::string v = it->second;
    args_.erase(it);
    return v;
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (fallback && !args_.count(key)) return *fallback;
    return wrap([&] { return parse_real(take(key)); });
  }

  int integer(const std::string& key) {
    return wrap([&] { return parse_int(take(key)); });
  }

  std::array<int, 2> pair(const std::string& key) {
    const std::string v = take(key);
    const auto comma = v.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::parse, at_line(line_, "'" + key + "' needs two comma-separated indices"));
    }
    return wrap([&] { return std::array<int, 2>{parse_int(v.substr(0, comma)), parse_int(v.substr(comma + 1))}; });
  }

  void finish() const {
    if (!args_.empty()) {
      throw Error(ErrorKind::parse, at_line(line_, "unknown argument '" + args_.begin()->first + "'"));
    }
  }

 private:
  int line_;
  std::map<std::string, std::string> args_;
};

}  // namespace detail

inline ParsedCircuit parse_circuit_text(const std::string& text) {
  const std::set<std::string> native_ops{"rphi", "rz", "ms"};
  const std::set<std::string> qubit_ops{"u3", "h", "x", "z", "cx", "cz", "xx", "barrier"};
  std::optional<bool> native;
  std::optional<int> declared;
  int max_index = -1;
  std::vector<NativeOp> nops;
  QubitCircuit qc;
  std::vector<std::pair<int, std::array<int, 2>>> index_uses;  // line, indices
  const auto lines = detail::lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    const std::string body = detail::strip_comment(lines[i]);
    if (body.empty()) continue;
    const auto tokens = detail::split_ws(body);
    const std::string& name = tokens[0];
    if (name == "ions" || name == "qubits") {
      if (tokens.size() != 2) throw Error(ErrorKind::parse, detail::at_line(line, "expected '" + name + " N'"));
      if (declared) throw Error(ErrorKind::parse, detail::at_line(line, "register size declared twice"));
      try {
        declared = parse_int(tokens[1]);
      } catch (const Error& e) {
        throw Error(ErrorKind::parse, detail::at_line(line, e.what()));
      }
      if (*declared < 1) throw Error(ErrorKind::validation, detail::at_line(line, "register size must be >= 1"));
      const bool is_native = name == "ions";
      if (native && *native != is_native) {
        throw Error(ErrorKind::parse, detail::at_line(line, "header does not match the ops in this file"));
      }
      native = is_native;
      continue;
    }
    const bool is_native = native_ops.count(name) > 0;
    if (!is_native && !qubit_ops.count(name)) {
      throw Error(ErrorKind::parse, detail::at_line(line, "unknown gate '" + name + "'"));
    }
    if (native && *native != is_native) {
      throw Error(ErrorKind::parse, detail::at_line(line, "native and qubit ops cannot be mixed"));
    }
    native = is_native;
    detail::OpArgs args(tokens, line);
    std::array<int, 2> idx{-1, -1};
    auto level_checked = [&](auto make) {
      try {
        return make();
      } catch (const Error& e) {
        throw Error(e.kind(), detail::at_line(line, e.what()));
      }
    };
    if (name == "rphi") {
      idx[0] = args.integer("ion");
      const int j = args.integer("j");
      const double theta = args.real("theta");
      const double phi = args.real("phi", 0.0);
      level_checked([&] {
        check_rotation_level(j);
        return 0;
      });
      nops.push_back(NativeOp::rotation(idx[0], j, theta, phi));
    } else if (name == "rz") {
      idx[0] = args.integer("ion");
      const int j = args.integer("j");
      const double theta = args.real("theta");
      if (j < 0 || j >= kLevels) throw Error(ErrorKind::level, detail::at_line(line, "virtual phase level must be 0..3"));
      nops.push_back(NativeOp::virtual_phase(idx[0], j, theta));
    } else if (name == "ms") {
      idx = args.pair("ions");
      NativeOp op = NativeOp::ms(idx[0], idx[1], args.real("chi"));
      op.phi = args.real("phi", 0.0);
      op.phi_b = args.real("phi_b", 0.0);
      nops.push_back(op);
    } else if (name == "u3") {
      idx[0] = args.integer("q");
      const double theta = args.real("theta");
      const double phi = args.real("phi");
      const double lambda = args.real("lambda");
      qc.u3(idx[0], theta, phi, lambda);
    } else if (name == "h" || name == "x" || name == "z") {
      idx[0] = args.integer("q");
      if (name == "h") qc.h(idx[0]);
      if (name == "x") qc.x(idx[0]);
      if (name == "z") qc.z(idx[0]);
    } else if (name == "cx") {
      idx = {args.integer("control"), args.integer("target")};
      qc.cx(idx[0], idx[1]);
    } else if (name == "cz") {
      idx = args.pair("qubits");
      qc.cz(idx[0], idx[1]);
    } else if (name == "xx") {
      idx = args.pair("qubits");
      qc.xx(idx[0], idx[1], args.real("chi"));
    } else if (name == "barrier") {
      qc.barrier();
    }
    args.finish();
    if (name == "barrier") continue;
    const bool two = name == "ms" || name == "cx" || name == "cz" || name == "xx";
    if (idx[0] < 0 || (two && idx[1] < 0)) throw Error(ErrorKind::index, detail::at_line(line, "negative index"));
    if (two && idx[0] == idx[1]) {
      throw Error(ErrorKind::index, detail::at_line(line, "two-qudit gate on equal indices " + std::to_string(idx[0])));
    }
    max_index = std::max({max_index, idx[0], idx[1]});
    index_uses.push_back({line, idx});
  }
  const int size = declared ? *declared : max_index + 1;
  for (const auto& [line, idx] : index_uses) {
    for (int k : idx) {
      if (k >= size) {
        throw Error(ErrorKind::index, detail::at_line(line, "index " + std::to_string(k) + " out of range for " +
                                                                std::to_string(size) + (native.value_or(true) ? " ions" : " qubits")));
      }
    }
  }
  if (native.value_or(true)) {
    NativeCircuit c(std::max(size, 0));
    for (NativeOp& op : nops) {
      // each ion is driven by its own group's beam
      op.beams[0] = c.groups.of(op.ions[0]);
      if (op.kind == OpKind::ms) op.beams[1] = c.groups.of(op.ions[1]);
    }
    c.ops = std::move(nops);
    return c;
  }
  qc.n_qubits = size;
  return qc;
}

inline ParsedCircuit parse_circuit_file(const std::string& path) { return parse_circuit_text(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// key = value files

/// Ordered key = value pairs with their line numbers.
struct KeyValueFile {
  std::vector<std::tuple<std::string, std::string, int>> entries;

  static KeyValueFile parse(const std::string& text) {
    KeyValueFile f;
    std::set<std::string> seen;
    const auto lines = detail::lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const int line = static_cast<int>(i) + 1;
      const std::string body = detail::strip_comment(lines[i]);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::parse, detail::at_line(line, "expected 'key = value'"));
      const std::string key = detail::trim(body.substr(0, eq));
      const std::string value = detail::trim(body.substr(eq + 1));
      if (key.empty() || value.empty()) throw Error(ErrorKind::parse, detail::at_line(line, "expected 'key = value'"));
      if (!seen.insert(key).second) throw Error(ErrorKind::parse, detail::at_line(line, "duplicate key '" + key + "'"));
      f.entries.emplace_back(key, value, line);
    }
    return f;
  }
};

inline DephasingModel parse_dephasing(const std::string& v) {
  if (v == "markovian") return DephasingModel::markovian;
  if (v == "quasi_static") return DephasingModel::quasi_static;
  throw Error(ErrorKind::parse, "dephasing model must be 'markovian' or 'quasi_static', got '" + v + "'");
}

/// Calibration file: NoiseParams fields by name (seconds, dimensionless),
/// dephasing_01 / dephasing_mag models, and optionally all four rows
/// confusion.0 .. confusion.3 of the readout matrix. Unset fields keep the
/// defaults.
inline NoiseParams parse_calibration_text(const std::string& text) {
  NoiseParams p = default_noise_params();
  const std::map<std::string, double NoiseParams::*> reals{
      {"t1", &NoiseParams::t1},
      {"t2_01", &NoiseParams::t2_01},
      {"t2_mag", &NoiseParams::t2_mag},
      {"crosstalk_ratio", &NoiseParams::crosstalk_ratio},
      {"pi_pulse_duration", &NoiseParams::pi_pulse_duration},
      {"ms_duration", &NoiseParams::ms_duration},
      {"readout_stage_duration", &NoiseParams::readout_stage_duration},
      {"pulse_depolarizing", &NoiseParams::pulse_depolarizing},
  };
  Matrix confusion = Matrix::Zero(kLevels, kLevels);
  int rows = 0;
  for (const auto& [key, value, line] : KeyValueFile::parse(text).entries) {
    try {
      if (auto it = reals.find(key); it != reals.end()) {
        p.*(it->second) = parse_real(value);
      } else if (key == "dephasing_01") {
        p.dephasing_01 = parse_dephasing(value);
      } else if (key == "dephasing_mag") {
        p.dephasing_mag = parse_dephasing(value);
      } else if (key.rfind("confusion.", 0) == 0) {
        const int r = parse_int(key.substr(10));
        if (r < 0 || r >= kLevels) throw Error(ErrorKind::parse, "confusion row must be 0..3");
        const auto cells = detail::split_ws(value);
        if (cells.size() != kLevels) throw Error(ErrorKind::parse, "confusion row needs 4 entries");
        for (int c = 0; c < kLevels; ++c) confusion(r, c) = parse_real(cells[c]);
        ++rows;
      } else {
        throw Error(ErrorKind::parse, "unknown calibration key '" + key + "'");
      }
    } catch (const Error& e) {
      throw Error(e.kind(), detail::at_line(line, e.what()));
    }
  }
  if (rows != 0 && rows != kLevels) throw Error(ErrorKind::parse, "confusion matrix needs all four rows");
  if (rows == kLevels) p.spam_confusion = confusion;
  p.validate();
  return p;
}

inline NoiseParams parse_calibration_file(const std::string& path) {
  try {
    return parse_calibration_text(detail::read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

/// Chain file keys: ions, freq_x_hz, freq_y_hz, freq_z_hz, mass_number.
inline IonChain parse_chain_text(const std::string& text) {
  IonChain c;
  for (const auto& [key, value, line] : KeyValueFile::parse(text).entries) {
    try {
      if (key == "ions") {
        c.n_ions = parse_int(value);
      } else if (key == "freq_x_hz") {
        c.omega_x = two_pi_hz(parse_real(value));
      } else if (key == "freq_y_hz") {
        c.omega_y = two_pi_hz(parse_real(value));
      } else if (key == "freq_z_hz") {
        c.omega_z = two_pi_hz(parse_real(value));
      } else if (key == "mass_number") {
        c.mass = parse_real(value) * phys::kAtomicMass;
      } else {
        throw Error(ErrorKind::parse, "unknown chain key '" + key + "'");
      }
    } catch (const Error& e) {
      throw Error(e.kind(), detail::at_line(line, e.what()));
    }
  }
  c.validate();
  return c;
}

inline IonChain parse_chain_file(const std::string& path) { return parse_chain_text(detail::read_file(path)); }

/// Hamiltonian file: one term per line, "<coef> <WORD>" where coef is a
/// real number or "(re,im)".
inline PauliSum parse_hamiltonian_text(const std::string& text) {
  std::vector<PauliTerm> terms;
  const auto lines = detail::lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    const std::string body = detail::strip_comment(lines[i]);
    if (body.empty()) continue;
    try {
      const auto tokens = detail::split_ws(body);
      if (tokens.size() != 2) throw Error(ErrorKind::parse, "expected '<coefficient> <Pauli word>'");
      Complex coef;
      const std::string& c = tokens[0];
      if (c.front() == '(') {
        const auto comma = c.find(',');
        if (c.back() != ')' || comma == std::string::npos) throw Error(ErrorKind::parse, "complex coefficient must be (re,im)");
        coef = {parse_real(c.substr(1, comma - 1)), parse_real(c.substr(comma + 1, c.size() - comma - 2))};
      } else {
        coef = parse_real(c);
      }
      PauliString::parse(tokens[1]);
      terms.push_back({coef, tokens[1]});
    } catch (const Error& e) {
      throw Error(e.kind(), detail::at_line(line, e.what()));
    }
  }
  if (terms.empty()) throw Error(ErrorKind::parse, "Hamiltonian file has no terms");
  try {
    return PauliSum::build(terms);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("Hamiltonian: ") + e.what());
  }
}

inline PauliSum parse_hamiltonian_file(const std::string& path) {
  return parse_hamiltonian_text(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// Reports

/// Line-oriented key=value report. Units are part of the key (suffixes such
/// as _s, _hz, _rad). Numbers use a fixed shortest-round-trip format so the
/// same inputs always give the same bytes.
class Report {
 public:
  void add(const std::string& key, const std::string& value) { lines_.push_back(key + "=" + value); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, std::string_view value) { add(key, std::string(value)); }
  void add(const std::string& key, double value) { add(key, number(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  static std::string number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return fmt::format("{}", v);
  }

  template <class Range>
  static std::string list(const Range& values) {
    std::string s;
    for (const auto& v : values) {
      if (!s.empty()) s += ",";
      s += number(static_cast<double>(v));
    }
    return s;
  }

  std::string str() const {
    std::string s;
    for (const std::string& l : lines_) s += l + "\n";
    return s;
  }

 private:
  std::vector<std::string> lines_;
};

/// Adds the resolved noise configuration under prefix "noise.".
inline void add_noise_config(Report& r, const NoiseParams& p, const std::string& source) {
  r.add("noise.source", source);
  r.add("noise.t1_s", p.t1);
  r.add("noise.t2_01_s", p.t2_01);
  r.add("noise.t2_mag_s", p.t2_mag);
  r.add("noise.dephasing_01", dephasing_name(p.dephasing_01));
  r.add("noise.dephasing_mag", dephasing_name(p.dephasing_mag));
  r.add("noise.crosstalk_ratio", p.crosstalk_ratio);
  r.add("noise.pulse_depolarizing", p.pulse_depolarizing);
  r.add("noise.pi_pulse_duration_s", p.pi_pulse_duration);
  r.add("noise.ms_duration_s", p.ms_duration);
  r.add("noise.readout_stage_duration_s", p.readout_stage_duration);
  r.add("noise.readout_model", std::string(p.spam_confusion ? "confusion_matrix" : "staged_shelving"));
  const Matrix c = effective_confusion(p);
  for (int row = 0; row < kLevels; ++row) {
    std::vector<double> v;
    for (int col = 0; col < kLevels; ++col) v.push_back(c(row, col).real());
    r.add("noise.confusion." + std::to_string(row), Report::list(v));
  }
}

}  // namespace ququart
