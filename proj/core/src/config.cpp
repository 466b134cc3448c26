// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fhjrc/config.hpp"

#include <cmath>
#include <sstream>

#include "fhjrc/errors.hpp"

namespace fhjrc {

const char* to_string(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::input: return "input";
    case ErrorCategory::format: return "format";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

namespace {

bool is_positive_integer(double x) {
  const double r = std::round(x);
  return r >= 1.0 && std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x));
}

[[noreturn]] void fail(const std::string& what) { throw ConfigError("radar config: " + what); }

}  // namespace

RadarConfig default_config() { return RadarConfig{}; }

void RadarConfig::validate() const {
  if (sub_bands < 2) fail("sub_bands must be >= 2");
  if (tx_antennas < 1) fail("tx_antennas must be >= 1");
  if (tx_antennas > sub_bands) fail("tx_antennas must not exceed sub_bands");
  if (hops < tx_antennas + 1) fail("hops must be >= tx_antennas + 1 for the pilot layout");
  if (!(hop_duration > 0) || !(prt > 0) || !(bandwidth > 0) || !(sample_rate > 0) || !(carrier > 0))
    fail("durations, rates and carrier must be positive");
  if (prts_per_cpi < 2) fail("prts_per_cpi must be >= 2");
  if (bandwidth > sample_rate * (1.0 + 1e-12)) fail("bandwidth must not exceed the sample rate");
  if (!is_positive_integer(sample_rate * hop_duration)) fail("f_s*T must be a positive integer");
  if (!is_positive_integer(sample_rate * prt)) fail("f_s*T_p must be a positive integer");
  if (!is_positive_integer(bandwidth * hop_duration / sub_bands)) fail("B*T/K must be a positive integer");
  if (!is_positive_integer(bandwidth * prt / sub_bands))
    fail("B*T_p/K must be a positive integer (tones must be phase-continuous across PRTs)");
  if (hops * samples_per_hop() > samples_per_prt()) fail("H*T must not exceed T_p");
}

int RadarConfig::samples_per_hop() const {
  return static_cast<int>(std::lround(sample_rate * hop_duration));
}

int RadarConfig::samples_per_prt() const { return static_cast<int>(std::lround(sample_rate * prt)); }

int RadarConfig::zero_index() const { return (sub_bands + 1) / 2; }

double RadarConfig::subband_frequency(int k) const {
  if (k < 0 || k >= sub_bands) {
    std::ostringstream os;
    os << "sub-band index " << k << " outside [0, " << sub_bands << ")";
    throw DomainError(os.str());
  }
  const int lowest = -((sub_bands + 1) / 2);  // floor(-K/2)
  return static_cast<double>(lowest + k) * bandwidth / sub_bands;
}

int RadarConfig::bins_per_subband() const {
  return static_cast<int>(std::lround(bandwidth * hop_duration / sub_bands));
}

int RadarConfig::subband_bin(int k) const {
  const int n = samples_per_hop();
  const long cycles = std::lround(subband_frequency(k) * hop_duration);
  return static_cast<int>(((cycles % n) + n) % n);
}

int pilot_cycle_length(const RadarConfig& cfg) { return cfg.sub_bands - 1; }

int pilot_offset(int prt, const RadarConfig& cfg) {
  const int cycle = pilot_cycle_length(cfg);
  return 1 + ((prt % cycle) + cycle) % cycle;
}

int pilot_sub_band(int prt, const RadarConfig& cfg) {
  return (cfg.zero_index() + pilot_offset(prt, cfg)) % cfg.sub_bands;
}

}  // namespace fhjrc
