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

#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ququart {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Levels per ion used by the native gate set.
inline constexpr int kLevels = 4;

enum class ErrorKind {
  validation,
  index,
  capacity,
  level,
  shape,
  parse,
  degeneracy,
  power,
  convergence,
  instability,
  fit,
  io,
  unsupported,
};

constexpr std::string_view category_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::index: return "index";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::level: return "level";
    case ErrorKind::shape: return "shape";
    case ErrorKind::parse: return "parse";
    case ErrorKind::degeneracy: return "degeneracy";
    case ErrorKind::power: return "power";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::instability: return "instability";
    case ErrorKind::fit: return "fit";
    case ErrorKind::io: return "io";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view category() const noexcept { return category_name(kind_); }

 private:
  ErrorKind kind_;
};

/// Deterministic random stream. Streams derived from (master seed, index)
/// are independent of the order in which they are consumed, so shots may
/// run on any thread without changing results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(mix(mix(master) ^ (index + 0x9e3779b97f4a7c15ULL)));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(engine_); }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Operator 2-norm distance between a and b after removing the best global
/// phase of b relative to a.
inline double phase_invariant_distance(const Matrix& a, const Matrix& b) {
  Complex inner = (a.adjoint() * b).trace();
  Complex phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : Complex{1.0};
  Matrix diff = a * phase - b;
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

inline bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  Matrix id = Matrix::Identity(m.rows(), m.cols());
  return (m.adjoint() * m - id).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace ququart
