// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Communication receiver: per-hop spectra, peak-to-antenna assignment,
// CFO/clock estimation from the zero-frequency pilots, pilot-ratio tables
// and joint FHCS + PSK demodulation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fhjrc/config.hpp"
#include "fhjrc/dsp.hpp"
#include "fhjrc/fhwave.hpp"
#include "fhjrc/impair.hpp"

namespace fhjrc::commrx {

/// N_h-point DFT of hop `hop` of PRT `prt` in a single received stream.
std::vector<cd> hop_spectrum(std::span<const cd> rx, int prt, int hop, const RadarConfig& cfg);

struct HopPeaks {
  std::vector<int> sub_bands;  // per antenna
  std::vector<bool> weak;      // per antenna: peak below the erasure floor
  bool fallback = false;       // top peaks formed an unusable codeword
  bool erased() const;
};

/// Pinned antennas take their known sub-bands; the largest remaining peaks
/// among the allowed sub-bands go to the free antennas in ascending order.
/// If that set is not a usable codeword the best usable one (largest summed
/// power) is chosen instead.
HopPeaks assign_peaks(std::span<const cd> spectrum, const fhwave::HopLayout& layout, const RadarConfig& cfg);

/// Per-antenna tone values with mutual spectral leakage removed. `bin_offset`
/// is the common fractional frequency offset in bins (CFO*T/2pi). Returns
/// amplitude * dirichlet(bin_offset), i.e. the value an isolated tone would
/// produce at its own bin.
std::vector<cd> extract_tones(std::span<const cd> spectrum, std::span<const int> sub_bands, double bin_offset,
                              const RadarConfig& cfg);

struct SyncEstimate {
  double cfo = 0.0;            // rad/s
  double rho = 0.0;            // clock offset
  double sampling_step = 0.0;  // s
  std::vector<double> pair_phases;  // raw per-pair pilot phase steps, all antennas
  bool ambiguous = false;
};

/// `zero_pilots[i][m]` is the zero-frequency pilot value of antenna m in PRT i.
/// Consecutive PRT pairs with both values present (nonzero) contribute.
SyncEstimate estimate_cfo(const std::vector<std::vector<cd>>& zero_pilots, const RadarConfig& cfg);
/// Fills rho and sampling_step from the CFO.
void estimate_clock(SyncEstimate& sync, const RadarConfig& cfg);

/// Phase bookkeeping factor between a pilot ratio observed at (prt_a, hop_a)
/// and a payload or pilot at (prt_b, hop_b), both at sub-band `sub_band`.
cd correction_factor(int prt_a, int hop_a, int prt_b, int hop_b, int sub_band, const SyncEstimate& sync,
                     const RadarConfig& cfg);
/// Deterministic part of the pilot ratio of antenna m observed in PRT `prt`
/// with the cycled pilot at `sub_band` (STO and CFO terms, no gains).
cd pilot_ratio_factor(int prt, int antenna, int sub_band, const SyncEstimate& sync, const RadarConfig& cfg);

/// Observed pilot ratios d = (cycled pilot) / (zero-frequency pilot) per
/// antenna and sub-band, with the PRT each was measured in.
class PilotRatioTable {
 public:
  struct Entry {
    int prt = 0;
    cd ratio;
  };
  PilotRatioTable() = default;
  PilotRatioTable(int antennas, int sub_bands);

  void add(int antenna, int sub_band, int prt, cd ratio);
  const std::vector<Entry>& entries(int antenna, int sub_band) const;
  /// Entry closest in PRT to `prt`, preferring entries inside [group_begin, group_end).
  const Entry* nearest(int antenna, int sub_band, int prt, int group_begin, int group_end) const;
  bool complete(int zero_index) const;

 private:
  int antennas_ = 0;
  int sub_bands_ = 0;
  std::vector<std::vector<Entry>> cells_;
};

/// Pilot values of every PRT of a DFRC frame.
struct PilotObservations {
  std::vector<std::vector<cd>> zero;    // [prt][antenna], hop h = m
  std::vector<std::vector<cd>> cycled;  // [prt][antenna], hop h = m + 1
  std::vector<std::vector<bool>> erased;
};

PilotRatioTable build_pilot_ratios(const PilotObservations& pilots, const RadarConfig& cfg);

enum class Method {
  flat_gain,  // frequency-independent gain plus a fitted timing offset
  proposed,   // nearest pilot ratio at the same sub-band
  averaged,   // pilot ratios at equal sub-band averaged across the frame
};
const char* to_string(Method method);
Method method_from_string(const std::string& name);

struct RxOptions {
  fhwave::PlanMode mode = fhwave::PlanMode::dfrc;
  int bits_per_symbol = 3;
  Method method = Method::proposed;
  int group_length = 0;  // PRTs per pilot group; 0 => K-1 (one pilot cycle)
  /// Genie channel: when set, references come from the true model instead of
  /// the pilots (no synchronization needed).
  std::optional<impair::ImpairmentSpec> known_channel;
};

struct SymbolEstimate {
  int prt = 0;
  int hop = 0;
  int antenna = 0;
  int sub_band = 0;
  int pilot_offset = 0;  // (sub_band - zero index) mod K
  double phase = 0.0;    // estimated phase, wrapped
  double residual = 0.0; // phase minus the decided constellation point
  int symbol = 0;        // decided constellation index
  bool erased = false;
};

struct HopDecision {
  int prt = 0;
  int hop = 0;
  std::uint64_t rank = 0;
  int bits = 0;
  bool erased = false;
};

struct ErrorCounts {
  std::size_t fhcs_bits = 0;
  double fhcs_bit_errors = 0;  // erasures count half
  std::size_t psk_symbols = 0;
  std::size_t psk_symbol_errors = 0;
  std::size_t psk_bits = 0;
  double psk_bit_errors = 0;
  std::size_t erased_symbols = 0;
  std::size_t erased_hops = 0;

  double fhcs_ber() const { return fhcs_bits ? fhcs_bit_errors / fhcs_bits : 0.0; }
  double psk_ber() const { return psk_bits ? psk_bit_errors / psk_bits : 0.0; }
  double ser() const { return psk_symbols ? static_cast<double>(psk_symbol_errors) / psk_symbols : 0.0; }
  double ber() const {
    const std::size_t n = fhcs_bits + psk_bits;
    return n ? (fhcs_bit_errors + psk_bit_errors) / n : 0.0;
  }
};

struct DemodReport {
  std::vector<HopDecision> hops;
  std::vector<SymbolEstimate> symbols;
  std::vector<std::uint8_t> fhcs_bits;
  std::vector<std::uint8_t> psk_bits;
  SyncEstimate sync;
  int bits_per_symbol = 0;
  std::optional<ErrorCounts> errors;  // set by score()
};

/// Full receiver over `prts` PRTs of a single received stream.
DemodReport demodulate(std::span<const cd> rx, int prts, const RadarConfig& cfg, const RxOptions& options);

/// Compares a report against the transmitted plan and PSK grid.
void score(DemodReport& report, const fhwave::HopPlan& plan, const fhwave::PskGrid& psk, const RadarConfig& cfg);

}  // namespace fhjrc::commrx
