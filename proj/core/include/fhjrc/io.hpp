// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// File formats: IQ frames, plan dumps, range-Doppler cubes and CSV reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fhjrc/bench.hpp"
#include "fhjrc/commrx.hpp"
#include "fhjrc/fhwave.hpp"
#include "fhjrc/radarrx.hpp"

namespace fhjrc::io {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex(std::uint64_t value);

// IQ file: text header lines
//   FHIQ 1 / sample_rate <Hz> / antennas <M> / prt_length <N_p> / samples <n> / end
// followed by little-endian float32 (re, im) pairs, antenna-major.
void write_iq(const std::filesystem::path& path, const fhwave::IqFrame& frame);
fhwave::IqFrame read_iq(const std::filesystem::path& path);

/// One record per (prt, hop, antenna): sub-band, frequency, pinned flag, PSK index.
void write_plan(const std::filesystem::path& path, const fhwave::HopPlan& plan, const fhwave::PskGrid& psk,
                const RadarConfig& cfg);

// RDM file: text header (FHRDM 1, channels, range_bins, doppler_bins,
// first_range_bin, range_bin_m, doppler_bin_hz, end) then float32 pairs in
// (channel, range, Doppler) order.
void write_rdm(const std::filesystem::path& path, const radarrx::RangeDopplerMap& rdm, const RadarConfig& cfg);

/// CSV with a leading `# config_hash=` comment and a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view config_hash, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

std::string num(double value);
std::string num(std::int64_t value);
inline std::string num(int value) { return num(static_cast<std::int64_t>(value)); }
inline std::string num(std::size_t value) { return num(static_cast<std::int64_t>(value)); }

void write_demod_symbols(const std::filesystem::path& path, const commrx::DemodReport& report, std::string_view hash);
void write_demod_summary(const std::filesystem::path& path, const commrx::DemodReport& report, std::string_view hash);
void write_detections(const std::filesystem::path& path, const radarrx::CfarResult& cfar, std::string_view hash);
void write_ber(const std::filesystem::path& path, std::span<const bench::BerPoint> points, std::string_view hash);
void write_radar(const std::filesystem::path& path, const bench::RadarSweepReport& report, std::string_view hash);
void write_methods(const std::filesystem::path& path, std::span<const bench::MethodPoint> points, std::string_view hash);
/// Long-format curve data: curve, x, y, low, high.
void write_ber_plot(const std::filesystem::path& path, std::span<const bench::BerPoint> points, std::string_view hash);

}  // namespace fhjrc::io
