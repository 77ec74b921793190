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

// Dense state vector of a register of qudits.
//
// Basis ordering: ion 0 is the most significant digit of the basis index,
// i.e. index = sum_k digit_k * d^(n-1-k). Two-ion matrices act on the
// d*d block with the first ion as the high digit.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ququart/common.hpp"

namespace ququart {

/// Per-ion level indices of one computational basis state.
struct BasisLabel {
  std::vector<int> digits;

  auto operator<=>(const BasisLabel&) const = default;

  std::size_t size() const { return digits.size(); }

  std::string str() const {
    std::string s;
    s.reserve(digits.size());
    for (int d : digits) s.push_back(static_cast<char>('0' + d));
    return s;
  }

  /// Parses a digit string such as "0131".
  static BasisLabel parse(std::string_view text, int levels) {
    BasisLabel label;
    for (char c : text) {
      int digit = c - '0';
      if (digit < 0 || digit >= levels) {
        throw Error(ErrorKind::parse, "basis label '" + std::string(text) +
                                          "' has a digit outside 0.." +
                                          std::to_string(levels - 1));
      }
      label.digits.push_back(digit);
    }
    if (label.digits.empty()) throw Error(ErrorKind::parse, "empty basis label");
    return label;
  }
};

using Histogram = std::map<BasisLabel, std::size_t>;

/// A square matrix that passed the unitarity check once, at construction.
/// Application code takes this type so inner loops stay check-free.
class Unitary {
 public:
  static Unitary checked(Matrix m, double tol = 1e-10) {
    if (!is_unitary(m, tol)) {
      throw Error(ErrorKind::validation, "matrix is not unitary within tolerance");
    }
    return Unitary(std::move(m));
  }

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  explicit Unitary(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

struct RegisterLimits {
  std::size_t max_amplitudes = std::size_t{1} << 26;
};

class QuditRegister {
 public:
  QuditRegister(int ions, int levels = kLevels, RegisterLimits limits = {})
      : ions_(ions), levels_(levels) {
    if (ions < 1) throw Error(ErrorKind::validation, "register needs at least one ion");
    if (levels < 2) throw Error(ErrorKind::validation, "qudits need at least two levels");
    std::size_t size = 1;
    for (int k = 0; k < ions; ++k) {
      if (size > limits.max_amplitudes / static_cast<std::size_t>(levels)) {
        throw Error(ErrorKind::capacity,
                    "register of " + std::to_string(ions) + " ions with " +
                        std::to_string(levels) + " levels exceeds the amplitude budget of " +
                        std::to_string(limits.max_amplitudes));
      }
      size *= static_cast<std::size_t>(levels);
    }
    amps_.assign(size, Complex{0.0});
    amps_[0] = 1.0;
    strides_.resize(ions);
    std::size_t stride = 1;
    for (int k = ions - 1; k >= 0; --k) {
      strides_[k] = stride;
      stride *= static_cast<std::size_t>(levels);
    }
  }

  int ions() const { return ions_; }
  int levels() const { return levels_; }
  std::size_t size() const { return amps_.size(); }

  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes_mut() { return amps_; }

  std::size_t stride(int ion) const { return strides_[ion]; }

  int digit(std::size_t index, int ion) const {
    return static_cast<int>((index / strides_[ion]) % static_cast<std::size_t>(levels_));
  }

  std::size_t index_of(const BasisLabel& label) const {
    check_label(label);
    std::size_t index = 0;
    for (int k = 0; k < ions_; ++k) index += static_cast<std::size_t>(label.digits[k]) * strides_[k];
    return index;
  }

  BasisLabel label_of(std::size_t index) const {
    BasisLabel label;
    label.digits.resize(ions_);
    for (int k = 0; k < ions_; ++k) label.digits[k] = digit(index, k);
    return label;
  }

  Complex amplitude(const BasisLabel& label) const { return amps_[index_of(label)]; }

  void set_basis_state(const BasisLabel& label) {
    std::size_t index = index_of(label);
    std::fill(amps_.begin(), amps_.end(), Complex{0.0});
    amps_[index] = 1.0;
  }

  /// Replaces the amplitudes; the vector is normalized.
  void set_amplitudes(std::span<const Complex> amps) {
    if (amps.size() != amps_.size()) {
      throw Error(ErrorKind::shape, "amplitude vector has the wrong length");
    }
    std::copy(amps.begin(), amps.end(), amps_.begin());
    normalize();
  }

  void apply_single(int ion, const Unitary& u) {
    check_ion(ion);
    if (u.dim() != levels_) throw Error(ErrorKind::shape, "single-ion matrix must be d x d");
    const Matrix& m = u.matrix();
    const std::size_t d = static_cast<std::size_t>(levels_);
    const std::size_t stride = strides_[ion];
    const std::size_t block = stride * d;
    std::vector<Complex> in(d);
    for (std::size_t hi = 0; hi < amps_.size(); hi += block) {
      for (std::size_t lo = 0; lo < stride; ++lo) {
        const std::size_t base = hi + lo;
        for (std::size_t c = 0; c < d; ++c) in[c] = amps_[base + c * stride];
        for (std::size_t r = 0; r < d; ++r) {
          Complex acc{0.0};
          for (std::size_t c = 0; c < d; ++c) acc += m(r, c) * in[c];
          amps_[base + r * stride] = acc;
        }
      }
    }
  }

  void apply_single(int ion, const Matrix& u) { apply_single(ion, Unitary::checked(u)); }

  void apply_pair(int ion_a, int ion_b, const Unitary& u) {
    check_ion(ion_a);
    check_ion(ion_b);
    if (ion_a == ion_b) throw Error(ErrorKind::index, "two-ion gate needs distinct ions");
    const std::size_t d = static_cast<std::size_t>(levels_);
    if (u.dim() != static_cast<Eigen::Index>(d * d)) {
      throw Error(ErrorKind::shape, "two-ion matrix must be d^2 x d^2");
    }
    const Matrix& m = u.matrix();
    const std::size_t sa = strides_[ion_a];
    const std::size_t sb = strides_[ion_b];
    std::vector<std::size_t> offsets(d * d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) offsets[i * d + j] = i * sa + j * sb;
    }
    std::vector<Complex> in(d * d);
    for (std::size_t base = 0; base < amps_.size(); ++base) {
      if (digit(base, ion_a) != 0 || digit(base, ion_b) != 0) continue;
      for (std::size_t c = 0; c < d * d; ++c) in[c] = amps_[base + offsets[c]];
      for (std::size_t r = 0; r < d * d; ++r) {
        Complex acc{0.0};
        for (std::size_t c = 0; c < d * d; ++c) acc += m(r, c) * in[c];
        amps_[base + offsets[r]] = acc;
      }
    }
  }

  void apply_pair(int ion_a, int ion_b, const Matrix& u) {
    apply_pair(ion_a, ion_b, Unitary::checked(u));
  }

  /// Multiplies every amplitude whose digit on `ion` is k by phases[k].
  void apply_diagonal(int ion, std::span<const Complex> phases) {
    check_ion(ion);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] *= phases[digit(i, ion)];
  }

  std::vector<double> populations() const {
    std::vector<double> p(amps_.size());
    std::transform(amps_.begin(), amps_.end(), p.begin(), [](Complex a) { return std::norm(a); });
    return p;
  }

  /// Marginal level populations of one ion.
  std::vector<double> ion_populations(int ion) const {
    check_ion(ion);
    std::vector<double> p(levels_, 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) p[digit(i, ion)] += std::norm(amps_[i]);
    return p;
  }

  double norm() const {
    double s = 0.0;
    for (Complex a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  void normalize() {
    double n = norm();
    if (n <= 0.0) throw Error(ErrorKind::validation, "cannot normalize a zero state");
    for (Complex& a : amps_) a /= n;
  }

  /// <this|other>
  Complex overlap(const QuditRegister& other) const {
    if (other.ions_ != ions_ || other.levels_ != levels_) {
      throw Error(ErrorKind::shape, "overlap between registers of different shape");
    }
    Complex s{0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
    return s;
  }

  /// Multinomial draw of `shots` computational-basis outcomes.
  Histogram sample(std::size_t shots, std::uint64_t seed) const {
    if (shots < 1) throw Error(ErrorKind::validation, "shots must be at least 1");
    std::vector<double> cumulative(amps_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      acc += std::norm(amps_[i]);
      cumulative[i] = acc;
    }
    std::vector<std::size_t> counts(amps_.size(), 0);
    Rng rng(seed);
    for (std::size_t s = 0; s < shots; ++s) {
      double r = rng.uniform() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
      std::size_t index = std::min<std::size_t>(it - cumulative.begin(), amps_.size() - 1);
      // skip zero-probability entries at the tail of a flat cumulative run
      while (index > 0 && std::norm(amps_[index]) == 0.0) --index;
      ++counts[index];
    }
    Histogram hist;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] > 0) hist.emplace(label_of(i), counts[i]);
    }
    return hist;
  }

 private:
  void check_ion(int ion) const {
    if (ion < 0 || ion >= ions_) {
      throw Error(ErrorKind::index, "ion index " + std::to_string(ion) + " out of range for " +
                                        std::to_string(ions_) + " ions");
    }
  }

  void check_label(const BasisLabel& label) const {
    if (static_cast<int>(label.digits.size()) != ions_) {
      throw Error(ErrorKind::shape, "basis label length does not match the ion count");
    }
    for (int d : label.digits) {
      if (d < 0 || d >= levels_) throw Error(ErrorKind::level, "basis label digit out of range");
    }
  }

  int ions_;
  int levels_;
  std::vector<Complex> amps_;
  std::vector<std::size_t> strides_;
};

}  // namespace ququart
