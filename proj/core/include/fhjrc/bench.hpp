// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Monte-Carlo experiments: BER versus SNR, radar RMSE versus SNR for the
// traditional and DFRC waveforms, demodulation method comparison and data
// rate accounting.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "fhjrc/commrx.hpp"
#include "fhjrc/config.hpp"
#include "fhjrc/radarrx.hpp"

namespace fhjrc::bench {

/// Runs fn(0..count-1) on up to `threads` workers; results come back in
/// index order, so the outcome never depends on scheduling.
template <class Fn>
auto parallel_map(std::size_t count, int threads, Fn fn) -> std::vector<std::invoke_result_t<Fn, std::size_t>> {
  using Result = std::invoke_result_t<Fn, std::size_t>;
  std::vector<Result> out(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, threads > 0 ? threads : 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mutex);
        if (next >= count || error) return;
        i = next++;
      }
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for `errors` out of `trials` (errors may be fractional).
Interval wilson(double errors, double trials, double z = 1.96);

struct RateReport {
  double nominal = 0.0;    // bit/s, every slot carries FHCS + PSK
  double effective = 0.0;  // bit/s, pinned pilot slots removed
};

RateReport data_rate(int psk_bits, const RadarConfig& cfg);

/// Config for a different hop duration: same band, PRT and antennas, with K
/// reduced to the largest count that keeps the integer-cycle constraints.
RadarConfig config_for_hop_duration(const RadarConfig& base, double hop_duration);

// ---------------------------------------------------------------------------

struct BerSweepSpec {
  RadarConfig base;
  std::vector<double> snr_db;
  std::vector<int> psk_bits{3, 4};
  std::vector<double> hop_durations{0.5e-6, 1e-6};
  int frames = 20;           // per point
  int prts_per_frame = 100;
  double rho_fraction = 0.5;  // clock offset drawn up to this share of the unambiguous limit
  std::uint64_t seed = 1;
  int threads = 1;
};

std::vector<double> snr_grid(double first, double last, double step);

struct BerPoint {
  double hop_duration = 0.0;
  int sub_bands = 0;
  int bits_per_symbol = 0;
  double snr_db = 0.0;
  commrx::ErrorCounts counts;
  Interval fhcs_ci;
  Interval psk_ci;
};

/// Known-channel BER of FHCS and PSK on payload-only plans. Every
/// modulation sees the same payload seeds, channel draws and noise seeds.
std::vector<BerPoint> run_ber_sweep(const BerSweepSpec& spec);

// ---------------------------------------------------------------------------

struct SceneSpec {
  int targets = 10;
  double min_range = 750.0;
  double max_range = 4185.0;
  double max_speed = 170.0;
  double max_azimuth = 4.0;
};

std::vector<radarrx::Target> random_scene(const SceneSpec& spec, std::uint64_t seed);

struct Gate {
  double range_bins = 3.0;
  double doppler_bins = 2.0;
  double azimuth_deg = 2.0;
};

struct TargetError {
  int target = 0;
  double range = 0.0;
  double velocity = 0.0;
  double azimuth = 0.0;
};

struct Association {
  std::vector<TargetError> matched;
  std::size_t misses = 0;
  std::size_t false_alarms = 0;
};

/// Greedy nearest-neighbour matching of detections to truth inside the gate.
Association associate(std::span<const radarrx::Detection> detections, std::span<const radarrx::Target> truth,
                      const Gate& gate, const RadarConfig& cfg);

struct RadarSweepSpec {
  RadarConfig cfg;
  radarrx::ArrayModel array;
  SceneSpec scene;
  Gate gate;
  radarrx::CfarOptions cfar;
  radarrx::AngleGrid grid;
  std::vector<double> snr_db;
  int trials = 30;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct RadarPoint {
  double snr_db = 0.0;
  fhwave::PlanMode mode = fhwave::PlanMode::traditional;
  std::size_t truths = 0;
  std::size_t associated = 0;
  std::size_t false_alarms = 0;
  double rmse_range = 0.0;
  double rmse_velocity = 0.0;
  double rmse_azimuth = 0.0;
};

/// Paired difference (DFRC minus traditional) of mean squared errors over
/// targets associated under both waveforms, with its standard error.
struct PairedDifference {
  double mean = 0.0;
  double standard_error = 0.0;
};

struct PairedPoint {
  double snr_db = 0.0;
  std::size_t pairs = 0;
  PairedDifference range, velocity, azimuth;
};

struct RadarSweepReport {
  std::vector<RadarPoint> points;  // per SNR: traditional then DFRC
  std::vector<PairedPoint> paired;
};

struct Floors {
  double range = 0.0;
  double velocity = 0.0;
  double azimuth = 0.0;
};
/// Uniform-quantization RMSE floors: bin width / sqrt(12).
Floors quantization_floors(const RadarConfig& cfg, const radarrx::AngleGrid& grid);

RadarSweepReport run_radar_sweep(const RadarSweepSpec& spec);

// ---------------------------------------------------------------------------

struct MethodSpec {
  RadarConfig cfg;
  double snr_db = 20.0;
  std::vector<int> psk_bits{4, 3};
  double ripple_db = 1.0;
  double ripple_rad = 0.2;
  double rho_fraction = 0.8;  // |rho| drawn up to this share of the unambiguous limit
  int trials = 20;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct MethodPoint {
  int bits_per_symbol = 0;
  commrx::Method method = commrx::Method::proposed;
  commrx::ErrorCounts counts;
  double mean_abs_residual = 0.0;
  Interval ser_ci;
};

/// Demodulates identical received frames with each method.
std::vector<MethodPoint> run_method_comparison(const MethodSpec& spec);

}  // namespace fhjrc::bench
