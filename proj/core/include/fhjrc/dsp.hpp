// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace fhjrc {

using cd = std::complex<double>;

namespace dsp {

enum class Direction { forward, inverse };

// FFTW plan of fixed size and direction. Execution is thread-safe; plan
// construction is serialized internally. Inverse transforms are unnormalized.
class Fft {
 public:
  Fft(int size, Direction direction);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return size_; }
  // in and out may alias; both must hold size() elements.
  void execute(std::span<const cd> in, std::span<cd> out) const;
  void execute_in_place(std::span<cd> data) const { execute(data, data); }

 private:
  struct Plan;
  int size_ = 0;
  std::unique_ptr<Plan> plan_;
};

/// sum_{n=0}^{n_points-1} exp(j*2*pi*x*n/n_points): the DFT response at a bin
/// offset x (in bins) from a unit tone.
cd dirichlet(double x, int n_points);

/// Wraps a phase to (-pi, pi].
double wrap_phase(double phase);

/// Solves A x = b for a small dense complex system (Gaussian elimination with
/// partial pivoting). Row-major A of size n*n. Throws DomainError when singular.
std::vector<cd> solve(std::vector<cd> a, std::vector<cd> b);

/// Deterministic sub-seed derivation (splitmix64 over the combined words).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Adds circular complex Gaussian noise of total variance `variance`.
void add_noise(std::span<cd> samples, double variance, std::mt19937_64& rng);

/// Complex circular Gaussian draws with unit variance.
std::vector<cd> unit_noise(std::size_t n, std::uint64_t seed);

}  // namespace dsp
}  // namespace fhjrc
