// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Hardware-error model between an unsynchronized radar transmitter and a
// communication receiver: accumulating sampling-timing offset, carrier
// frequency offset, frequency-dependent front-end gains and AWGN.

#include <cstdint>
#include <optional>
#include <vector>

#include "fhjrc/config.hpp"
#include "fhjrc/dsp.hpp"
#include "fhjrc/fhwave.hpp"

namespace fhjrc::impair {

/// Complex front-end response per transmit antenna, sampled at the K
/// sub-band frequencies: response(m, k) = channel[m] * gain[m][k].
struct FrontEndProfile {
  std::vector<cd> channel;            // per antenna scalar
  std::vector<std::vector<cd>> gain;  // [antenna][sub-band]

  cd response(int antenna, int sub_band) const { return channel[antenna] * gain[antenna][sub_band]; }
  int antennas() const { return static_cast<int>(gain.size()); }
};

FrontEndProfile flat_front_end(const RadarConfig& cfg);

/// Smooth random ripple over the band: log-magnitude within +-magnitude_db
/// and phase within +-phase_rad (each curve reaches its bound at one
/// sub-band). Channel scalars get a uniform random phase when requested.
FrontEndProfile rippled_front_end(const RadarConfig& cfg, double magnitude_db, double phase_rad,
                                  std::uint64_t seed, bool random_channel_phase = true);

struct ImpairmentSpec {
  double initial_sto = 0.0;     // seconds
  double sampling_step = 0.0;   // per-sample timing drift, seconds
  double cfo = 0.0;             // rad/s
  double noise_variance = 0.0;  // per complex sample
  FrontEndProfile front_end;    // empty => flat
  // Optional profile taking over from PRT `switch_prt` onwards.
  std::optional<FrontEndProfile> later_front_end;
  int switch_prt = 0;

  const FrontEndProfile* profile_for(int prt) const;
};

double sto_from_rho(double rho, double sample_rate);
double rho_from_sto(double sampling_step, double sample_rate);
/// Spec with both offsets driven by one clock error rho: the sampling step
/// from rho and CFO = 2*pi*f_c*rho.
ImpairmentSpec from_clock(double rho, double initial_sto, const RadarConfig& cfg);

double accumulated_sto(int prt, int hop, const ImpairmentSpec& spec, const RadarConfig& cfg);

/// T*sinc(dw*T/2)*exp(j*dw*T/2), the continuous-time hop window response.
cd window_gain(double cfo, double duration);

/// Largest |rho| whose CFO stays inside the unambiguous pilot estimator range.
double max_unambiguous_rho(const RadarConfig& cfg);

/// Throws ConfigError when the spec is outside the supported ranges.
void validate(const ImpairmentSpec& spec, const RadarConfig& cfg);

/// Received single-stream samples for `frame` through the model. Each hop of
/// each antenna is re-synthesized as a tone whose complex amplitude is read
/// from the frame at the plan's bin. Noise covers every sample.
std::vector<cd> apply(const fhwave::IqFrame& frame, const fhwave::HopPlan& plan, const ImpairmentSpec& spec,
                      const RadarConfig& cfg, std::uint64_t seed);

/// Noise-free hop-DFT value at the bin of `sub_band` contributed by antenna
/// `antenna` transmitting complex amplitude `amplitude` in (prt, hop).
cd expected_coefficient(cd amplitude, int sub_band, int prt, int hop, int antenna, const ImpairmentSpec& spec,
                        const RadarConfig& cfg);

}  // namespace fhjrc::impair
