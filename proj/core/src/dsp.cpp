// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fhjrc/dsp.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <utility>

#include "fhjrc/config.hpp"
#include "fhjrc/errors.hpp"

namespace fhjrc::dsp {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Plan {
  fftw_plan handle = nullptr;   // out of place
  fftw_plan in_place = nullptr;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    if (handle) fftw_destroy_plan(handle);
    if (in_place) fftw_destroy_plan(in_place);
  }
};

Fft::Fft(int size, Direction direction) : size_(size), plan_(std::make_unique<Plan>()) {
  if (size <= 0) throw DomainError("fft size must be positive");
  std::vector<cd> scratch_in(size), scratch_out(size);
  const int sign = direction == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
  std::lock_guard lock(planner_mutex());
  plan_->handle = fftw_plan_dft_1d(size, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_->in_place = fftw_plan_dft_1d(size, in, in, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_->handle || !plan_->in_place) throw DomainError("fft planning failed");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::execute(std::span<const cd> in, std::span<cd> out) const {
  if (static_cast<int>(in.size()) != size_ || static_cast<int>(out.size()) != size_)
    throw InputError("fft buffer size mismatch");
  // FFTW's new-array execute must match the plan's in-place-ness; the
  // out-of-place complex transform leaves its input untouched.
  fftw_execute_dft(in.data() == out.data() ? plan_->in_place : plan_->handle, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

cd dirichlet(double x, int n_points) {
  const double half = kPi * x / n_points;
  const double den = std::sin(half);
  const cd rotation = std::polar(1.0, half * (n_points - 1));
  if (std::abs(den) < 1e-12) {
    // Limit at x = q*n_points.
    return rotation * (n_points * std::cos(kPi * x) / std::cos(half));
  }
  return rotation * (std::sin(kPi * x) / den);
}

double wrap_phase(double phase) {
  double r = std::remainder(phase, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

std::vector<cd> solve(std::vector<cd> a, std::vector<cd> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw InputError("solve: matrix/vector size mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) < 1e-300) throw DomainError("solve: singular system");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const cd f = a[r * n + col] / a[col * n + col];
      if (f == cd{}) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<cd> x(n);
  for (std::size_t i = n; i-- > 0;) {
    cd acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i * n + c] * x[c];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = splitmix(base);
  h = splitmix(h ^ a);
  h = splitmix(h ^ b);
  h = splitmix(h ^ c);
  return h;
}

void add_noise(std::span<cd> samples, double variance, std::mt19937_64& rng) {
  if (variance <= 0) return;
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (auto& s : samples) {
    const double re = normal(rng);
    const double im = normal(rng);
    s += cd(re, im);
  }
}

std::vector<cd> unit_noise(std::size_t n, std::uint64_t seed) {
  std::vector<cd> out(n);
  std::mt19937_64 rng(seed);
  add_noise(out, 1.0, rng);
  return out;
}

}  // namespace fhjrc::dsp
