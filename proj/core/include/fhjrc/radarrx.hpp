// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Radar side of the FH-MIMO waveform: echo synthesis for a virtual array,
// matched filtering, moving-target detection, CA-CFAR, anchor calibration
// and grid angle estimation.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fhjrc/config.hpp"
#include "fhjrc/dsp.hpp"
#include "fhjrc/fhwave.hpp"

namespace fhjrc::radarrx {

struct Target {
  double range = 0.0;         // m
  double velocity = 0.0;      // m/s, positive approaching
  double azimuth = 0.0;       // deg
  cd reflectivity{1.0, 0.0};

  double delay() const { return 2.0 * range / kSpeedOfLight; }
  double doppler(const RadarConfig& cfg) const { return 2.0 * velocity / cfg.wavelength(); }
};

/// Uniform linear transmit and receive arrays with optional per-element
/// complex errors. Virtual channel p = n*M + m for receiver n, transmitter m.
struct ArrayModel {
  int tx = 2;
  int rx = 12;
  double tx_spacing = 6.0;  // wavelengths
  double rx_spacing = 0.5;  // wavelengths
  std::vector<cd> tx_error;  // empty => ideal
  std::vector<cd> rx_error;

  int channels() const { return tx * rx; }
  void validate() const;
  cd tx_steering(int m, double azimuth_deg) const;
  cd rx_steering(int n, double azimuth_deg) const;
  /// Virtual steering vector; with_errors applies e_r (x) e_t.
  std::vector<cd> steering(double azimuth_deg, bool with_errors) const;
};

ArrayModel default_array(const RadarConfig& cfg);

struct EchoFrames {
  std::vector<std::vector<cd>> channels;  // [receiver][prt * N_p + t]
  std::vector<std::string> warnings;
};

/// Noise-free echoes of `scene` (delays rounded to the sample grid,
/// stop-and-hop Doppler), with the transmit window [0, H*N_h) of every PRT
/// zeroed. Targets inside the blind zone or beyond the PRT are skipped with
/// a warning.
EchoFrames synthesize_echo(const fhwave::IqFrame& tx, std::span<const Target> scene, const ArrayModel& array,
                           const RadarConfig& cfg);

/// Adds noise of `variance` per sample outside the transmit window. The same
/// seed yields the same noise pattern scaled by sqrt(variance).
void add_receiver_noise(EchoFrames& frames, double variance, std::uint64_t seed, const RadarConfig& cfg);

/// Full linear cross-correlation sum_u x[t+u]*conj(ref[u]) for lags
/// t = -(ref.size()-1) .. x.size()-1, returned in that order.
std::vector<cd> correlate(std::span<const cd> x, std::span<const cd> ref);

/// Complex cube indexed (channel p, range bin t, Doppler bin f).
class RangeDopplerMap {
 public:
  RangeDopplerMap() = default;
  RangeDopplerMap(int channels, int first_range_bin, int range_bins, int doppler_bins);

  int channels() const { return channels_; }
  int first_range_bin() const { return first_range_; }
  int range_bins() const { return range_bins_; }
  int doppler_bins() const { return doppler_bins_; }

  cd& at(int p, int t, int f) { return data_[index(p, t, f)]; }
  const cd& at(int p, int t, int f) const { return data_[index(p, t, f)]; }
  /// Contiguous slow-time (or Doppler) series of one channel and range bin.
  std::span<cd> series(int p, int t) { return {data_.data() + index(p, t, 0), static_cast<std::size_t>(doppler_bins_)}; }
  std::span<const cd> data() const { return data_; }

 private:
  std::size_t index(int p, int t, int f) const {
    return (static_cast<std::size_t>(p) * range_bins_ + (t - first_range_)) * doppler_bins_ + f;
  }
  int channels_ = 0;
  int first_range_ = 0;
  int range_bins_ = 0;
  int doppler_bins_ = 0;
  std::vector<cd> data_;
};

/// Correlates each receiver stream with each transmit pulse per PRT. Output
/// holds slow-time series (Doppler axis not yet transformed) for range bins
/// [H*N_h, N_p).
RangeDopplerMap matched_filter(const EchoFrames& rx, const fhwave::IqFrame& tx, const ArrayModel& array,
                               const RadarConfig& cfg);

/// In-place slow-time DFT turning matched-filter output into the RDM.
void mtd(RangeDopplerMap& cube);

struct CfarOptions {
  int guard = 2;
  int training = 8;
  double false_alarm_rate = 1e-4;
};

struct Detection {
  int doppler_bin = 0;  // 0..N_c-1
  int range_bin = 0;    // absolute sample lag
  double statistic = 0.0;
  double threshold = 0.0;
  std::vector<cd> snapshot;  // length P
  double range = 0.0;
  double velocity = 0.0;
  double azimuth = 0.0;
};

struct CfarResult {
  std::vector<Detection> detections;  // clustered local maxima
  std::size_t cells = 0;
  std::size_t exceedances = 0;        // cells above threshold before clustering
};

/// Sum over channels of |RDM| laid out [t - first][f].
std::vector<double> detection_statistic(const RangeDopplerMap& rdm);

/// Threshold multiplier on the training-cell mean for a sum of `channels`
/// Rayleigh magnitudes with `training` cells (Gamma moment match).
double cfar_scale(int channels, int training, double false_alarm_rate);

/// Cell-averaging CFAR over the (Doppler, range) map; Doppler wraps, range
/// windows are truncated at the edges.
CfarResult cfar_detect(const RangeDopplerMap& rdm, const CfarOptions& options);

/// Calibration vector from an anchor snapshot at a known azimuth.
/// Throws DomainError when any channel is weaker than min_magnitude.
std::vector<cd> calibrate(std::span<const cd> snapshot, double anchor_azimuth_deg, const ArrayModel& array,
                          double min_magnitude = 1e-12);

struct AngleGrid {
  double min_deg = -30.0;
  double max_deg = 30.0;
  int points = 61;

  double step() const { return points > 1 ? (max_deg - min_deg) / (points - 1) : 0.0; }
  double at(int l) const { return min_deg + l * step(); }
};

/// Grid maximizer of |a(theta)^H (c .* z)|^2; `calibration` may be empty.
double estimate_angle(std::span<const cd> snapshot, const ArrayModel& array, const AngleGrid& grid,
                      std::span<const cd> calibration = {});

/// Fills range, velocity and azimuth of a detection.
void estimate_params(Detection& detection, const ArrayModel& array, const AngleGrid& grid, const RadarConfig& cfg,
                     std::span<const cd> calibration = {});

struct RadarOptions {
  CfarOptions cfar;
  AngleGrid grid;
  std::vector<cd> calibration;
};

struct RadarResult {
  RangeDopplerMap rdm;
  CfarResult cfar;
};

/// Matched filter, MTD, CFAR and parameter estimation.
RadarResult process(const EchoFrames& rx, const fhwave::IqFrame& tx, const ArrayModel& array, const RadarConfig& cfg,
                    const RadarOptions& options);

}  // namespace fhjrc::radarrx
