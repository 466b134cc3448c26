// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Sectioned run configuration for the command-line tool. Every key has a
// default (the experimental configuration); unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fhjrc/bench.hpp"
#include "fhjrc/config.hpp"
#include "fhjrc/radarrx.hpp"

namespace fhjrc::cli {

struct ArraySection {
  int rx = 12;
  double tx_spacing = 6.0;
  double rx_spacing = 0.5;
  double phase_error_rad = 0.0;  // per-element uniform phase error bound
  double gain_error_db = 0.0;    // per-element uniform gain error bound
};

struct ImpairSection {
  double initial_sto = 0.0;  // s
  double rho = 0.0;
  double ripple_db = 0.0;
  double ripple_rad = 0.0;
  std::optional<double> snr_db;  // unset => noiseless
};

struct CommSection {
  std::string mode = "dfrc";
  int psk_bits = 3;
  std::string method = "proposed";
  int group_length = 0;
  int prts = 128;
  bool known_channel = false;
};

struct TargetEntry {
  double range = 0.0;
  double velocity = 0.0;
  double azimuth = 0.0;
};

struct SceneSection {
  bench::SceneSpec random;
  std::vector<TargetEntry> targets;  // explicit list overrides the random scene
  std::optional<TargetEntry> anchor;  // calibration target (velocity ignored)
  double snr_db = 0.0;
  std::string waveform = "dfrc";
  radarrx::CfarOptions cfar;
  radarrx::AngleGrid grid;
};

struct SweepSection {
  std::string kind = "all";  // ber | radar | methods | all
  double snr_first = -10.0;
  double snr_last = 20.0;
  double snr_step = 2.0;
  std::vector<double> radar_snr{-40.0, -37.0, -34.0, -31.0, -28.0};
  std::vector<double> hop_durations{0.5e-6, 1e-6};
  std::vector<int> psk_bits{3, 4};
  int frames = 20;
  int prts_per_frame = 100;
  int trials = 30;
  int method_trials = 20;
  double method_snr = 20.0;
  double ripple_db = 1.0;
  double ripple_rad = 0.2;
  int threads = 1;
};

struct RunConfig {
  RadarConfig radar;
  ArraySection array;
  ImpairSection impair;
  CommSection comm;
  SceneSection scene;
  SweepSection sweep;
  std::uint64_t seed = 1;

  /// Throws ConfigError on any invalid value.
  void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
/// FNV-1a of the canonical (sorted-key, compact) JSON form.
std::string config_hash(const RunConfig& c);

radarrx::ArrayModel make_array(const RunConfig& c);

}  // namespace fhjrc::cli
