// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace fhjrc {

// Propagation speed used for every range/delay conversion.
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Static waveform and clock parameters of the FH-MIMO radar.
///
/// Defaults reproduce the experimental configuration: 20 sub-bands over
/// 20 MHz, 1 us hops, 5 hops per pulse, 40 us PRT sampled at 40 MHz,
/// 128 PRTs per CPI at a 5.5 GHz carrier.
struct RadarConfig {
  int sub_bands = 20;          // K
  int tx_antennas = 2;         // M
  int hops = 5;                // H
  double hop_duration = 1e-6;  // T (s)
  double prt = 40e-6;          // T_p (s)
  double bandwidth = 20e6;     // B (Hz)
  double sample_rate = 40e6;   // f_s (Hz)
  double carrier = 5.5e9;      // f_c (Hz)
  int prts_per_cpi = 128;      // N_c

  /// Throws ConfigError when any waveform constraint is violated.
  void validate() const;

  int samples_per_hop() const;  // N_h
  int samples_per_prt() const;  // N_p
  int active_samples() const { return hops * samples_per_hop(); }

  /// Sub-band index carrying zero baseband frequency, ceil(K/2).
  int zero_index() const;
  double subband_spacing() const { return bandwidth / sub_bands; }
  /// Baseband frequency (Hz) of sub-band k; throws DomainError outside [0, K).
  double subband_frequency(int k) const;
  double subband_omega(int k) const { return kTwoPi * subband_frequency(k); }
  /// DFT bin of sub-band k in an N_h-point hop transform.
  int subband_bin(int k) const;
  /// Sub-band spacing measured in hop DFT bins, B*T/K.
  int bins_per_subband() const;

  double wavelength() const { return kSpeedOfLight / carrier; }
  double blind_zone() const { return kSpeedOfLight * hops * hop_duration / 2.0; }
  double range_bin() const { return kSpeedOfLight / (2.0 * sample_rate); }
  double doppler_bin() const { return 1.0 / (prts_per_cpi * prt); }
  double velocity_bin() const { return wavelength() * doppler_bin() / 2.0; }
  double max_unambiguous_velocity() const { return wavelength() / (4.0 * prt); }
};

/// Default waveform: 20 sub-bands, 2 antennas, 5 hops of 1 us, 40 us PRT.
RadarConfig default_config();

/// Offset (in sub-bands, relative to the zero-frequency index) of the cycled
/// pilot transmitted in PRT `prt`. Cycles through 1..K-1 so that it never
/// coincides with the zero-frequency pilot.
int pilot_offset(int prt, const RadarConfig& cfg);
/// Number of PRTs needed to visit every pilot offset once.
int pilot_cycle_length(const RadarConfig& cfg);
/// Sub-band index of the cycled pilot in PRT `prt`.
int pilot_sub_band(int prt, const RadarConfig& cfg);

}  // namespace fhjrc
