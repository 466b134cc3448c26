// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fhjrc/fhwave.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fhjrc/errors.hpp"

namespace fhjrc::fhwave {

const char* to_string(PlanMode mode) {
  switch (mode) {
    case PlanMode::traditional: return "traditional";
    case PlanMode::payload: return "payload";
    case PlanMode::dfrc: return "dfrc";
  }
  return "?";
}

PlanMode plan_mode_from_string(const std::string& name) {
  if (name == "traditional") return PlanMode::traditional;
  if (name == "payload") return PlanMode::payload;
  if (name == "dfrc") return PlanMode::dfrc;
  throw ConfigError("unknown plan mode '" + name + "'");
}

// ---------------------------------------------------------------------------

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

int codeword_bits(int n, int k) {
  const std::uint64_t c = binomial(n, k);
  if (c <= 1) return 0;
  int bits = 0;
  while ((std::uint64_t{1} << (bits + 1)) <= c) ++bits;
  return bits;
}

std::vector<int> unrank_combination(std::uint64_t rank, int n, int k) {
  if (rank >= binomial(n, k)) throw DomainError("combination rank out of range");
  std::vector<int> out;
  out.reserve(k);
  int candidate = 0;
  for (int pos = 0; pos < k; ++pos) {
    for (;; ++candidate) {
      const std::uint64_t below = binomial(n - candidate - 1, k - pos - 1);
      if (rank < below) break;
      rank -= below;
    }
    out.push_back(candidate++);
  }
  return out;
}

std::uint64_t rank_combination(std::span<const int> subset, int n) {
  const int k = static_cast<int>(subset.size());
  std::uint64_t rank = 0;
  int candidate = 0;
  for (int pos = 0; pos < k; ++pos) {
    if (subset[pos] < candidate || subset[pos] >= n) throw DomainError("subset not ascending within range");
    for (; candidate < subset[pos]; ++candidate) rank += binomial(n - candidate - 1, k - pos - 1);
    ++candidate;
  }
  return rank;
}

FhcsCodebook build_fhcs_codebook(int sub_bands, int antennas) {
  if (antennas > sub_bands || antennas < 0) throw DomainError("FHCS needs 0 <= M <= K");
  FhcsCodebook book;
  book.sub_bands = sub_bands;
  book.antennas = antennas;
  const std::uint64_t total = binomial(sub_bands, antennas);
  book.entries.reserve(total);
  for (std::uint64_t r = 0; r < total; ++r) book.entries.push_back(unrank_combination(r, sub_bands, antennas));
  book.bits = codeword_bits(sub_bands, antennas);
  book.usable = std::uint64_t{1} << book.bits;
  return book;
}

FhcsCodebook build_fhcs_codebook(const RadarConfig& cfg) {
  return build_fhcs_codebook(cfg.sub_bands, cfg.tx_antennas);
}

// ---------------------------------------------------------------------------

std::uint64_t BitSource::take(int count) {
  if (count < 0 || static_cast<std::size_t>(count) > remaining()) {
    std::ostringstream os;
    os << "payload bits exhausted: need " << count << ", have " << remaining();
    throw InputError(os.str());
  }
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | (bits_[pos_++] & 1u);
  return v;
}

std::vector<std::uint8_t> random_bits(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> out(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng();
    out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
  }
  return out;
}

void append_bits(std::vector<std::uint8_t>& out, std::uint64_t value, int count) {
  for (int b = count - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((value >> b) & 1u));
}

// ---------------------------------------------------------------------------

HopPlan::HopPlan(int prts, int hops, int antennas, PlanMode mode)
    : prts_(prts), hops_(hops), antennas_(antennas), mode_(mode),
      slots_(static_cast<std::size_t>(prts) * hops * antennas) {}

std::size_t HopPlan::index(int prt, int hop, int antenna) const {
  return (static_cast<std::size_t>(prt) * hops_ + hop) * antennas_ + antenna;
}

std::optional<int> pinned_sub_band(int prt, int hop, int antenna, const RadarConfig& cfg) {
  if (hop == antenna) return cfg.zero_index();
  if (hop == antenna + 1) return pilot_sub_band(prt, cfg);
  return std::nullopt;
}

HopLayout hop_layout(int prt, int hop, const RadarConfig& cfg, PlanMode mode) {
  HopLayout layout;
  for (int m = 0; m < cfg.tx_antennas; ++m) {
    std::optional<int> pin;
    if (mode == PlanMode::dfrc) pin = pinned_sub_band(prt, hop, m, cfg);
    if (pin) {
      layout.pinned_antennas.push_back(m);
      layout.pinned_sub_bands.push_back(*pin);
    } else {
      layout.free_antennas.push_back(m);
    }
  }
  for (int k = 0; k < cfg.sub_bands; ++k)
    if (std::find(layout.pinned_sub_bands.begin(), layout.pinned_sub_bands.end(), k) ==
        layout.pinned_sub_bands.end())
      layout.allowed_sub_bands.push_back(k);
  if (layout.allowed_sub_bands.size() + layout.pinned_sub_bands.size() != static_cast<std::size_t>(cfg.sub_bands))
    throw ConfigError("pilot layout pins two antennas to the same sub-band");
  const int n_free = static_cast<int>(layout.free_antennas.size());
  const int n_allowed = static_cast<int>(layout.allowed_sub_bands.size());
  if (n_allowed < n_free) throw ConfigError("not enough sub-bands left for the payload antennas");
  if (n_free > 0 && mode != PlanMode::traditional) {
    layout.bits = codeword_bits(n_allowed, n_free);
    layout.usable = std::uint64_t{1} << layout.bits;
  }
  return layout;
}

HopPlan plan_hops(const RadarConfig& cfg, PlanMode mode, int prts, BitSource& fhcs_bits,
                  std::uint64_t seed) {
  cfg.validate();
  if (prts < 1) throw InputError("plan needs at least one PRT");
  HopPlan plan(prts, cfg.hops, cfg.tx_antennas, mode);
  std::mt19937_64 rng(seed);
  std::vector<int> pool(cfg.sub_bands);

  for (int i = 0; i < prts; ++i) {
    for (int h = 0; h < cfg.hops; ++h) {
      if (mode == PlanMode::traditional) {
        std::iota(pool.begin(), pool.end(), 0);
        std::shuffle(pool.begin(), pool.end(), rng);
        for (int m = 0; m < cfg.tx_antennas; ++m) plan.at(i, h, m) = {pool[m], false};
        continue;
      }
      const HopLayout layout = hop_layout(i, h, cfg, mode);
      for (std::size_t p = 0; p < layout.pinned_antennas.size(); ++p)
        plan.at(i, h, layout.pinned_antennas[p]) = {layout.pinned_sub_bands[p], true};
      if (layout.free_antennas.empty()) continue;
      const std::uint64_t rank = fhcs_bits.take(layout.bits);
      const auto subset = unrank_combination(rank, static_cast<int>(layout.allowed_sub_bands.size()),
                                             static_cast<int>(layout.free_antennas.size()));
      for (std::size_t j = 0; j < subset.size(); ++j)
        plan.at(i, h, layout.free_antennas[j]) = {layout.allowed_sub_bands[subset[j]], false};
    }
  }
  return plan;
}

std::uint64_t payload_rank(const HopPlan& plan, int prt, int hop, const RadarConfig& cfg) {
  const HopLayout layout = hop_layout(prt, hop, cfg, plan.mode());
  std::vector<int> positions;
  for (int m : layout.free_antennas) {
    const int k = plan.at(prt, hop, m).sub_band;
    const auto it = std::lower_bound(layout.allowed_sub_bands.begin(), layout.allowed_sub_bands.end(), k);
    if (it == layout.allowed_sub_bands.end() || *it != k) throw DomainError("payload sub-band collides with a pilot");
    positions.push_back(static_cast<int>(it - layout.allowed_sub_bands.begin()));
  }
  std::sort(positions.begin(), positions.end());
  return rank_combination(positions, static_cast<int>(layout.allowed_sub_bands.size()));
}

std::vector<std::uint8_t> extract_fhcs_bits(const HopPlan& plan, const RadarConfig& cfg) {
  std::vector<std::uint8_t> out;
  if (plan.mode() == PlanMode::traditional) return out;
  for (int i = 0; i < plan.prts(); ++i)
    for (int h = 0; h < plan.hops(); ++h) {
      const HopLayout layout = hop_layout(i, h, cfg, plan.mode());
      if (layout.free_antennas.empty()) continue;
      append_bits(out, payload_rank(plan, i, h, cfg), layout.bits);
    }
  return out;
}

int fhcs_bits_per_prt(int prt, const RadarConfig& cfg, PlanMode mode) {
  int bits = 0;
  for (int h = 0; h < cfg.hops; ++h) bits += hop_layout(prt, h, cfg, mode).bits;
  return bits;
}

int psk_slots_per_prt(int prt, const RadarConfig& cfg, PlanMode mode) {
  if (mode == PlanMode::traditional) return 0;
  int slots = 0;
  for (int h = 0; h < cfg.hops; ++h) slots += static_cast<int>(hop_layout(prt, h, cfg, mode).free_antennas.size());
  return slots;
}

// ---------------------------------------------------------------------------

int gray_encode(int value) { return value ^ (value >> 1); }

int gray_decode(int code) {
  int v = code;
  for (int shift = 1; shift < 32; shift <<= 1) v ^= v >> shift;
  return v;
}

double psk_phase(int index, int bits_per_symbol) {
  if (bits_per_symbol <= 0) return 0.0;
  return kTwoPi * index / static_cast<double>(1 << bits_per_symbol);
}

int nearest_psk_index(double phase, int bits_per_symbol) {
  if (bits_per_symbol <= 0) return 0;
  const int order = 1 << bits_per_symbol;
  const long q = std::lround(phase * order / kTwoPi);
  return static_cast<int>(((q % order) + order) % order);
}

PskGrid::PskGrid(int prts, int hops, int antennas, int bits_per_symbol)
    : prts_(prts), hops_(hops), antennas_(antennas), bits_(bits_per_symbol),
      symbols_(static_cast<std::size_t>(prts) * hops * antennas, 0) {}

std::size_t PskGrid::index(int prt, int hop, int antenna) const {
  return (static_cast<std::size_t>(prt) * hops_ + hop) * antennas_ + antenna;
}

double PskGrid::phase(int prt, int hop, int antenna) const {
  return psk_phase(symbol(prt, hop, antenna), bits_);
}

PskGrid assign_psk(const HopPlan& plan, int bits_per_symbol, BitSource& bits) {
  if (bits_per_symbol < 0 || bits_per_symbol > 16) throw DomainError("PSK bits per symbol must be in [0, 16]");
  PskGrid grid(plan.prts(), plan.hops(), plan.antennas(), bits_per_symbol);
  if (bits_per_symbol == 0 || plan.mode() == PlanMode::traditional) return grid;
  for (int i = 0; i < plan.prts(); ++i)
    for (int h = 0; h < plan.hops(); ++h)
      for (int m = 0; m < plan.antennas(); ++m)
        if (!plan.at(i, h, m).pinned)
          grid.set_symbol(i, h, m, gray_encode(static_cast<int>(bits.take(bits_per_symbol))));
  return grid;
}

// ---------------------------------------------------------------------------

std::vector<cd> pulse(const HopPlan& plan, const PskGrid& psk, int prt, int antenna, const RadarConfig& cfg) {
  const int nh = cfg.samples_per_hop();
  std::vector<cd> out(static_cast<std::size_t>(cfg.hops) * nh);
  for (int h = 0; h < cfg.hops; ++h) {
    const int bin = cfg.subband_bin(plan.at(prt, h, antenna).sub_band);
    const double phi = psk.phase(prt, h, antenna);
    for (int n = 0; n < nh; ++n) {
      // Reduce bin*n modulo N_h so every hop is an exact integer-cycle tone.
      const int cycle = static_cast<int>((static_cast<long>(bin) * n) % nh);
      out[static_cast<std::size_t>(h) * nh + n] = std::polar(1.0, phi + kTwoPi * cycle / nh);
    }
  }
  return out;
}

IqFrame synthesize(const HopPlan& plan, const PskGrid& psk, const RadarConfig& cfg) {
  cfg.validate();
  if (plan.hops() != cfg.hops || plan.antennas() != cfg.tx_antennas || psk.prts() != plan.prts() ||
      psk.hops() != plan.hops() || psk.antennas() != plan.antennas())
    throw InputError("plan/PSK dimensions disagree with the radar config");
  const int np = cfg.samples_per_prt();
  IqFrame frame;
  frame.sample_rate = cfg.sample_rate;
  frame.prt_length = np;
  frame.channels.assign(cfg.tx_antennas, std::vector<cd>(static_cast<std::size_t>(plan.prts()) * np));
  for (int m = 0; m < cfg.tx_antennas; ++m)
    for (int i = 0; i < plan.prts(); ++i) {
      const auto p = pulse(plan, psk, i, m, cfg);
      std::copy(p.begin(), p.end(), frame.channels[m].begin() + static_cast<std::ptrdiff_t>(i) * np);
    }
  return frame;
}

}  // namespace fhjrc::fhwave
