// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// FH-MIMO transmit waveform generation: hop plans, FHCS and PSK payload
// embedding, pilot pinning and per-antenna IQ synthesis.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fhjrc/config.hpp"
#include "fhjrc/dsp.hpp"

namespace fhjrc::fhwave {

enum class PlanMode {
  traditional,  // random distinct sub-bands per hop, random antenna order, no payload
  payload,      // every slot carries FHCS + PSK, no pilots
  dfrc,         // payload plus zero-frequency (h = m) and cycled (h = m + 1) pilots
};

const char* to_string(PlanMode mode);
PlanMode plan_mode_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// Combinatorics

std::uint64_t binomial(int n, int k);
/// floor(log2(C(n, k))); 0 when C(n, k) <= 1.
int codeword_bits(int n, int k);
/// k-subset of {0..n-1} at position `rank` in lexicographic order.
std::vector<int> unrank_combination(std::uint64_t rank, int n, int k);
/// Inverse of unrank_combination; `subset` must be strictly ascending.
std::uint64_t rank_combination(std::span<const int> subset, int n);

struct FhcsCodebook {
  int sub_bands = 0;
  int antennas = 0;
  std::vector<std::vector<int>> entries;  // all C(K, M) subsets, lexicographic
  std::uint64_t usable = 0;               // 2^bits leading entries carry data
  int bits = 0;
};

/// Enumerates every M-subset of the K sub-bands. Throws DomainError when M > K.
FhcsCodebook build_fhcs_codebook(int sub_bands, int antennas);
FhcsCodebook build_fhcs_codebook(const RadarConfig& cfg);

// ---------------------------------------------------------------------------
// Payload bits

/// Sequential reader over a 0/1 bit vector. Multi-bit fields are MSB-first.
class BitSource {
 public:
  explicit BitSource(std::span<const std::uint8_t> bits) : bits_(bits) {}
  std::uint64_t take(int count);  // throws InputError when exhausted
  std::size_t remaining() const { return bits_.size() - pos_; }
  std::size_t consumed() const { return pos_; }

 private:
  std::span<const std::uint8_t> bits_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> random_bits(std::size_t count, std::uint64_t seed);
void append_bits(std::vector<std::uint8_t>& out, std::uint64_t value, int count);

// ---------------------------------------------------------------------------
// Hop plan

struct HopSlot {
  int sub_band = 0;
  bool pinned = false;
};

class HopPlan {
 public:
  HopPlan() = default;
  HopPlan(int prts, int hops, int antennas, PlanMode mode);

  int prts() const { return prts_; }
  int hops() const { return hops_; }
  int antennas() const { return antennas_; }
  PlanMode mode() const { return mode_; }

  HopSlot& at(int prt, int hop, int antenna) { return slots_[index(prt, hop, antenna)]; }
  const HopSlot& at(int prt, int hop, int antenna) const { return slots_[index(prt, hop, antenna)]; }

 private:
  std::size_t index(int prt, int hop, int antenna) const;
  int prts_ = 0;
  int hops_ = 0;
  int antennas_ = 0;
  PlanMode mode_ = PlanMode::payload;
  std::vector<HopSlot> slots_;
};

/// Which antennas of a hop are pinned by the pilot design and which sub-bands
/// remain for the FHCS payload. Shared by the transmitter and the receiver.
struct HopLayout {
  std::vector<int> pinned_antennas;
  std::vector<int> pinned_sub_bands;  // parallel to pinned_antennas
  std::vector<int> free_antennas;     // ascending
  std::vector<int> allowed_sub_bands; // ascending, excludes pinned sub-bands
  int bits = 0;                       // FHCS bits carried by the free antennas
  std::uint64_t usable = 0;           // usable codewords (2^bits, or 0 if no free antenna)
};

/// Pilot sub-band pinned at (prt, hop, antenna) for the DFRC design, if any.
std::optional<int> pinned_sub_band(int prt, int hop, int antenna, const RadarConfig& cfg);
HopLayout hop_layout(int prt, int hop, const RadarConfig& cfg, PlanMode mode);

/// Builds a plan for `prts` PRTs. Payload and DFRC modes consume FHCS bits
/// (codeword rank MSB-first) from `fhcs_bits`; traditional mode draws random
/// sub-bands from `seed` and ignores the bit source.
HopPlan plan_hops(const RadarConfig& cfg, PlanMode mode, int prts, BitSource& fhcs_bits,
                  std::uint64_t seed);

/// Codeword rank carried by the free antennas of one hop (ascending payload
/// sub-bands ranked within the hop's allowed set).
std::uint64_t payload_rank(const HopPlan& plan, int prt, int hop, const RadarConfig& cfg);
/// Recovers the FHCS bitstream embedded in a plan.
std::vector<std::uint8_t> extract_fhcs_bits(const HopPlan& plan, const RadarConfig& cfg);

/// FHCS bits carried per PRT by the given mode (sums hop_layout over a PRT).
int fhcs_bits_per_prt(int prt, const RadarConfig& cfg, PlanMode mode);
/// Number of PSK-carrying (non-pinned) slots per PRT.
int psk_slots_per_prt(int prt, const RadarConfig& cfg, PlanMode mode);

// ---------------------------------------------------------------------------
// PSK

int gray_encode(int value);
int gray_decode(int code);
/// Phase of constellation point `index` of a 2^bits_per_symbol PSK.
double psk_phase(int index, int bits_per_symbol);
/// Nearest constellation index to `phase`.
int nearest_psk_index(double phase, int bits_per_symbol);

class PskGrid {
 public:
  PskGrid() = default;
  PskGrid(int prts, int hops, int antennas, int bits_per_symbol);

  int bits_per_symbol() const { return bits_; }
  int prts() const { return prts_; }
  int hops() const { return hops_; }
  int antennas() const { return antennas_; }

  /// Constellation index (Gray-coded position on the circle).
  int symbol(int prt, int hop, int antenna) const { return symbols_[index(prt, hop, antenna)]; }
  void set_symbol(int prt, int hop, int antenna, int value) { symbols_[index(prt, hop, antenna)] = value; }
  double phase(int prt, int hop, int antenna) const;

 private:
  std::size_t index(int prt, int hop, int antenna) const;
  int prts_ = 0;
  int hops_ = 0;
  int antennas_ = 0;
  int bits_ = 0;
  std::vector<int> symbols_;
};

/// Fills every non-pinned slot with a PSK symbol (bits_per_symbol bits each,
/// Gray mapped). bits_per_symbol == 0 yields an all-zero-phase grid.
PskGrid assign_psk(const HopPlan& plan, int bits_per_symbol, BitSource& bits);

// ---------------------------------------------------------------------------
// IQ synthesis

struct IqFrame {
  double sample_rate = 0;
  int prt_length = 0;
  std::vector<std::vector<cd>> channels;

  std::size_t samples() const { return channels.empty() ? 0 : channels.front().size(); }
  int prts() const { return prt_length ? static_cast<int>(samples() / prt_length) : 0; }
};

/// Transmit pulse (H*N_h samples) of one antenna in one PRT.
std::vector<cd> pulse(const HopPlan& plan, const PskGrid& psk, int prt, int antenna,
                      const RadarConfig& cfg);

/// Per-antenna baseband frames: hops are rectangular tones, [H*T, T_p) is zero.
IqFrame synthesize(const HopPlan& plan, const PskGrid& psk, const RadarConfig& cfg);

}  // namespace fhjrc::fhwave
