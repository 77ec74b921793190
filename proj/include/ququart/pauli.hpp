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

// Pauli strings and sums. Letter q of a word acts on qubit q, and qubit 0
// is the most significant bit of a basis label.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "ququart/common.hpp"

namespace ququart {

/// phase * word, with phase = i^k.
struct PauliString {
  int phase = 0;  // k in 0..3
  std::string word;

  static PauliString parse(std::string_view text) {
    PauliString p;
    p.word = std::string(text);
    if (p.word.empty()) throw Error(ErrorKind::parse, "empty Pauli word");
    for (char c : p.word) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw Error(ErrorKind::parse, "Pauli word '" + p.word + "' contains a letter other than I, X, Y, Z");
      }
    }
    return p;
  }

  static PauliString identity(int n) { return PauliString{0, std::string(static_cast<std::size_t>(n), 'I')}; }

  Complex phase_value() const {
    static constexpr std::array<Complex, 4> units{Complex{1, 0}, Complex{0, 1}, Complex{-1, 0}, Complex{0, -1}};
    return units[static_cast<std::size_t>(phase & 3)];
  }

  std::size_t size() const { return word.size(); }

  bool operator==(const PauliString&) const = default;

  std::string str() const {
    static constexpr std::array<const char*, 4> prefix{"", "i", "-", "-i"};
    return std::string(prefix[static_cast<std::size_t>(phase & 3)]) + word;
  }
};

/// Single-letter product a * b = i^k c.
inline std::pair<int, char> pauli_letter_mul(char a, char b) {
  if (a == 'I') return {0, b};
  if (b == 'I') return {0, a};
  if (a == b) return {0, 'I'};
  // cyclic X -> Y -> Z gives +i, anticyclic gives -i
  auto idx = [](char c) { return c == 'X' ? 0 : (c == 'Y' ? 1 : 2); };
  const int ia = idx(a);
  const int ib = idx(b);
  const char c = "XYZ"[3 - ia - ib];
  return {(ib - ia + 3) % 3 == 1 ? 1 : 3, c};
}

inline PauliString pauli_mul(const PauliString& p, const PauliString& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::shape, "Pauli strings of different length: " + p.word + " and " + q.word);
  }
  PauliString r;
  r.phase = p.phase + q.phase;
  r.word.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto [k, c] = pauli_letter_mul(p.word[i], q.word[i]);
    r.phase += k;
    r.word[i] = c;
  }
  r.phase &= 3;
  return r;
}

struct PauliTerm {
  Complex coef;
  std::string word;
};

/// sum_i beta_i U_i with distinct words and nonzero coefficients.
struct PauliSum {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  /// Merges repeated words (first appearance keeps its position) and drops
  /// zero coefficients.
  static PauliSum build(const std::vector<PauliTerm>& raw) {
    if (raw.empty()) throw Error(ErrorKind::validation, "Pauli sum needs at least one term");
    PauliSum s;
    s.n_qubits = static_cast<int>(raw.front().word.size());
    std::map<std::string, std::size_t> where;
    for (const PauliTerm& t : raw) {
      PauliString::parse(t.word);
      if (static_cast<int>(t.word.size()) != s.n_qubits) {
        throw Error(ErrorKind::shape, "Pauli words in one sum must have equal length");
      }
      auto it = where.find(t.word);
      if (it == where.end()) {
        where.emplace(t.word, s.terms.size());
        s.terms.push_back(t);
      } else {
        s.terms[it->second].coef += t.coef;
      }
    }
    std::erase_if(s.terms, [](const PauliTerm& t) { return t.coef == Complex{0.0}; });
    if (s.terms.empty()) throw Error(ErrorKind::validation, "Pauli sum has only zero coefficients");
    return s;
  }

  bool hermitian(double tol = 0.0) const {
    return std::all_of(terms.begin(), terms.end(), [&](const PauliTerm& t) { return std::abs(t.coef.imag()) <= tol; });
  }
};

inline Matrix pauli_letter_matrix(char c) {
  Matrix m = Matrix::Zero(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -kI, kI, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw Error(ErrorKind::parse, std::string("unknown Pauli letter ") + c);
  }
  return m;
}

/// Dense 2^n x 2^n matrix of phase * word.
inline Matrix pauli_matrix(const PauliString& p) {
  Matrix m = Matrix::Identity(1, 1);
  for (char c : p.word) {
    const Matrix l = pauli_letter_matrix(c);
    Matrix next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = m(i, j) * l;
    }
    m = std::move(next);
  }
  return p.phase_value() * m;
}

inline Matrix pauli_sum_matrix(const PauliSum& h) {
  if (h.n_qubits > 12) throw Error(ErrorKind::capacity, "dense Pauli sum limited to 12 qubits");
  const Eigen::Index dim = Eigen::Index{1} << h.n_qubits;
  Matrix m = Matrix::Zero(dim, dim);
  for (const PauliTerm& t : h.terms) m += t.coef * pauli_matrix(PauliString{0, t.word});
  return m;
}

/// <x| word |x> for a computational basis state given as bits.
inline Complex basis_expectation(const PauliString& p, const std::vector<int>& bits) {
  if (bits.size() != p.size()) throw Error(ErrorKind::shape, "basis state and Pauli word differ in length");
  double sign = 1.0;
  for (std::size_t q = 0; q < p.size(); ++q) {
    const char c = p.word[q];
    if (c == 'X' || c == 'Y') return 0.0;
    if (c == 'Z' && bits[q] == 1) sign = -sign;
  }
  return p.phase_value() * sign;
}

}  // namespace ququart
