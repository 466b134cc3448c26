// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "fhjrc/commrx.hpp"
#include "fhjrc/config.hpp"
#include "fhjrc/fhwave.hpp"
#include "fhjrc/impair.hpp"

namespace testing {

using cd = std::complex<double>;

// Direct O(N^2) DFT, independent of the FFT wrapper.
inline std::vector<cd> naive_dft(const std::vector<cd>& x) {
  const std::size_t n = x.size();
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{};
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * fhjrc::kPi * static_cast<double>((k * t) % n) / static_cast<double>(n));
    out[k] = acc;
  }
  return out;
}

struct Frame {
  fhjrc::fhwave::HopPlan plan;
  fhjrc::fhwave::PskGrid psk;
  fhjrc::fhwave::IqFrame iq;
};

inline Frame make_frame(const fhjrc::RadarConfig& cfg, fhjrc::fhwave::PlanMode mode, int prts, int psk_bits,
                        std::uint64_t seed) {
  using namespace fhjrc;
  std::size_t fhcs = 0, slots = 0;
  for (int i = 0; i < prts; ++i) {
    fhcs += fhwave::fhcs_bits_per_prt(i, cfg, mode);
    slots += fhwave::psk_slots_per_prt(i, cfg, mode);
  }
  const auto a = fhwave::random_bits(fhcs, seed * 3 + 1);
  const auto b = fhwave::random_bits(slots * psk_bits, seed * 3 + 2);
  fhwave::BitSource sa(a), sb(b);
  Frame f;
  f.plan = fhwave::plan_hops(cfg, mode, prts, sa, seed * 3 + 3);
  f.psk = fhwave::assign_psk(f.plan, psk_bits, sb);
  f.iq = fhwave::synthesize(f.plan, f.psk, cfg);
  return f;
}

}  // namespace testing
