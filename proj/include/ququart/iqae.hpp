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

// Iterative quantum assisted eigensolver. The ansatz space is spanned by
// W_n |x> for Pauli words W_n from products of Hamiltonian terms; the
// ground energy estimate is the smallest lambda of D a = lambda E a with
//   E_nm = <x| W_n W_m |x>,  D_nm = sum_i beta_i <x| W_n U_i W_m |x>.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ququart/bench.hpp"
#include "ququart/common.hpp"
#include "ququart/noise.hpp"
#include "ququart/pauli.hpp"
#include "ququart/transpiler.hpp"

namespace ququart {

struct KrylovBasis {
  int order = 0;
  std::vector<std::string> words;  // identity first
  bool closed = false;             // one more order would add nothing

  std::size_t size() const { return words.size(); }
};

/// Breadth-first products of Hamiltonian words up to order k, phase
/// stripped and deduplicated in first-seen order.
inline KrylovBasis krylov_basis(const PauliSum& h, int k_order) {
  if (k_order < 0) throw Error(ErrorKind::validation, "Krylov order must be >= 0");
  KrylovBasis b;
  b.order = k_order;
  std::set<std::string> seen;
  const std::string id(static_cast<std::size_t>(h.n_qubits), 'I');
  b.words.push_back(id);
  seen.insert(id);
  std::vector<std::string> frontier{id};
  auto expand = [&](const std::vector<std::string>& from, bool record) {
    std::vector<std::string> fresh;
    for (const std::string& w : from) {
      for (const PauliTerm& t : h.terms) {
        const PauliString p = pauli_mul(PauliString{0, t.word}, PauliString{0, w});
        if (seen.count(p.word)) continue;
        if (!record) return std::vector<std::string>{p.word};
        seen.insert(p.word);
        fresh.push_back(p.word);
        b.words.push_back(p.word);
      }
    }
    return fresh;
  };
  for (int order = 1; order <= k_order; ++order) {
    frontier = expand(frontier, true);
    if (frontier.empty()) {
      b.closed = true;
      return b;
    }
  }
  b.closed = expand(frontier, false).empty();
  return b;
}

/// Initial state: a computational basis state, optionally followed by a
/// native state-preparation circuit on qubit levels {0, 1}.
struct IqaeInit {
  std::vector<int> bits;
  std::optional<NativeCircuit> prep;

  static IqaeInit basis(std::string_view label) {
    IqaeInit init;
    for (char c : label) {
      if (c != '0' && c != '1') throw Error(ErrorKind::parse, "initial state must be a bit string");
      init.bits.push_back(c - '0');
    }
    if (init.bits.empty()) throw Error(ErrorKind::parse, "empty initial state");
    return init;
  }

  std::string str() const {
    std::string s;
    for (int b : bits) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  /// Full native circuit: bit flips then the optional preparation.
  NativeCircuit circuit(const GateTiming& timing = {}) const {
    NativeCircuit c(static_cast<int>(bits.size()));
    for (int q = 0; q < static_cast<int>(bits.size()); ++q) {
      if (bits[q]) c.ops.push_back(NativeOp::rotation(q, 1, kPi, 0.0, timing));
    }
    if (prep) {
      if (prep->n_ions != c.n_ions) throw Error(ErrorKind::shape, "state preparation acts on a different ion count");
      c.ops.insert(c.ops.end(), prep->ops.begin(), prep->ops.end());
    }
    return c;
  }
};

struct ExactBackend {};

struct SampledBackend {
  std::size_t shots = 10000;
  std::uint64_t seed = 1;
  NoiseParams noise = NoiseParams::off();
};

using IqaeBackend = std::variant<ExactBackend, SampledBackend>;

/// Expectation values <psi| W |psi> of unphased words, cached per word.
class WordEvaluator {
 public:
  WordEvaluator(const IqaeInit& init, IqaeBackend backend) : init_(init), backend_(std::move(backend)) {
    if (auto* s = std::get_if<SampledBackend>(&backend_)) {
      if (s->shots < 1) throw Error(ErrorKind::validation, "sampled backend needs at least one shot");
      s->noise.validate();
    }
    if (init_.prep && std::holds_alternative<ExactBackend>(backend_)) {
      state_.emplace(ideal_state(init_.circuit()));
    }
  }

  Complex operator()(const std::string& word) {
    if (auto it = cache_.find(word); it != cache_.end()) return it->second;
    const Complex v = evaluate(word);
    cache_.emplace(word, v);
    return v;
  }

  std::size_t evaluations() const { return cache_.size(); }

 private:
  Complex evaluate(const std::string& word) {
    if (word.find_first_not_of('I') == std::string::npos) return 1.0;
    if (std::holds_alternative<ExactBackend>(backend_)) {
      if (!state_) return basis_expectation(PauliString{0, word}, init_.bits);
      QuditRegister rotated = *state_;
      for (std::size_t q = 0; q < word.size(); ++q) {
        if (word[q] == 'I') continue;
        const Matrix2 p = pauli_letter_matrix(word[q]);
        rotated.apply_single(static_cast<int>(q), embed_pair(p, 1));
      }
      return state_->overlap(rotated);
    }
    const SampledBackend& s = std::get<SampledBackend>(backend_);
    NativeCircuit c = init_.circuit(s.noise.timing());
    for (std::size_t q = 0; q < word.size(); ++q) {
      Matrix2 rot = Matrix2::Identity();
      if (word[q] == 'X') rot = qubit::h();
      if (word[q] == 'Y') rot = qubit::h() * qubit::s().adjoint();
      if (word[q] == 'X' || word[q] == 'Y') {
        const U3Angles a = u3_angles(rot);
        for (const NativeOp& op : u3_to_native(a.theta, a.phi, a.lambda, static_cast<int>(q), 1, s.noise.timing())) {
          c.ops.push_back(op);
        }
      }
    }
    const Histogram hist = run_shots(c, s.noise, s.shots, sub_seed(s.seed, counter_++));
    double sum = 0.0;
    for (const auto& [label, count] : hist) {
      int parity = 0;
      for (std::size_t q = 0; q < word.size(); ++q) {
        if (word[q] != 'I' && label.digits[q] != 0) parity ^= 1;
      }
      sum += (parity ? -1.0 : 1.0) * static_cast<double>(count);
    }
    return sum / static_cast<double>(s.shots);
  }

  IqaeInit init_;
  IqaeBackend backend_;
  std::optional<QuditRegister> state_;
  std::map<std::string, Complex> cache_;
  std::uint64_t counter_ = 0;
};

struct OverlapMatrices {
  Matrix d;
  Matrix e;
};

inline OverlapMatrices overlaps(const PauliSum& h, const KrylovBasis& basis, WordEvaluator& eval) {
  const Eigen::Index l = static_cast<Eigen::Index>(basis.size());
  OverlapMatrices m{Matrix::Zero(l, l), Matrix::Zero(l, l)};
  std::vector<PauliString> words;
  for (const std::string& w : basis.words) {
    if (static_cast<int>(w.size()) != h.n_qubits) throw Error(ErrorKind::shape, "basis word length differs from H");
    words.push_back(PauliString{0, w});
  }
  for (Eigen::Index n = 0; n < l; ++n) {
    for (Eigen::Index k = 0; k < l; ++k) {
      const PauliString nm = pauli_mul(words[n], words[k]);
      m.e(n, k) = nm.phase_value() * eval(nm.word);
      Complex acc = 0.0;
      for (const PauliTerm& t : h.terms) {
        const PauliString p = pauli_mul(pauli_mul(words[n], PauliString{0, t.word}), words[k]);
        acc += t.coef * p.phase_value() * eval(p.word);
      }
      m.d(n, k) = acc;
    }
  }
  return m;
}

inline OverlapMatrices overlaps(const PauliSum& h, const KrylovBasis& basis, const IqaeInit& init,
                                const IqaeBackend& backend = ExactBackend{}) {
  WordEvaluator eval(init, backend);
  return overlaps(h, basis, eval);
}

struct GenEigResult {
  double lambda = 0.0;
  Vector alpha;
  int kept = 0;  // dimension of the retained E eigenspace
  Eigen::VectorXd e_spectrum;
};

/// Smallest lambda of D a = lambda E a on the span of E's eigenvectors with
/// eigenvalue above eps_cut times the largest; alpha^dag E alpha = 1.
inline GenEigResult solve_gen_eig(const OverlapMatrices& m, double eps_cut = 1e-10) {
  if (m.e.rows() < 1 || m.e.rows() != m.e.cols() || m.d.rows() != m.e.rows() || m.d.cols() != m.e.cols()) {
    throw Error(ErrorKind::shape, "overlap matrices must be square, nonempty and of equal size");
  }
  const Matrix e = (m.e + m.e.adjoint()) / 2.0;
  const Matrix d = (m.d + m.d.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(e);
  GenEigResult r;
  r.e_spectrum = es.eigenvalues();
  const double top = r.e_spectrum.maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorKind::degeneracy, "overlap matrix E is numerically zero; empty subspace");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < r.e_spectrum.size(); ++i) {
    if (r.e_spectrum(i) > eps_cut * top) keep.push_back(i);
  }
  const Eigen::Index l = e.rows();
  const Eigen::Index kdim = static_cast<Eigen::Index>(keep.size());
  Matrix t(l, kdim);
  for (Eigen::Index j = 0; j < kdim; ++j) {
    t.col(j) = es.eigenvectors().col(keep[j]) / std::sqrt(r.e_spectrum(keep[j]));
  }
  Matrix reduced = t.adjoint() * d * t;
  reduced = (reduced + reduced.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> rs(reduced);
  r.lambda = rs.eigenvalues()(0);
  r.alpha = t * rs.eigenvectors().col(0);
  r.kept = static_cast<int>(kdim);
  return r;
}

struct IqaeResult {
  double energy = 0.0;
  KrylovBasis basis;
  GenEigResult solve;
  std::size_t evaluations = 0;  // distinct expectation values measured
};

inline IqaeResult iqae_ground_energy(const PauliSum& h, const IqaeInit& init, int k_order,
                                     const IqaeBackend& backend = ExactBackend{}, double eps_cut = 1e-10) {
  if (static_cast<int>(init.bits.size()) != h.n_qubits) {
    throw Error(ErrorKind::shape, "initial state has " + std::to_string(init.bits.size()) +
                                      " qubits but the Hamiltonian acts on " + std::to_string(h.n_qubits));
  }
  IqaeResult r;
  r.basis = krylov_basis(h, k_order);
  WordEvaluator eval(init, backend);
  const OverlapMatrices m = overlaps(h, r.basis, eval);
  r.solve = solve_gen_eig(m, eps_cut);
  r.energy = r.solve.lambda;
  r.evaluations = eval.evaluations();
  return r;
}

/// Ground energy of H by dense diagonalization.
inline double exact_ground_energy(const PauliSum& h) {
  const Matrix m = pauli_sum_matrix(h);
  Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0);
  return es.eigenvalues()(0);
}

}  // namespace ququart
