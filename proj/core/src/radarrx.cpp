// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fhjrc/radarrx.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "fhjrc/errors.hpp"

namespace fhjrc::radarrx {

namespace {

double sin_deg(double deg) { return std::sin(deg * kPi / 180.0); }

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void ArrayModel::validate() const {
  if (tx < 1 || rx < 1) throw ConfigError("array: element counts must be positive");
  if (!tx_error.empty() && static_cast<int>(tx_error.size()) != tx) throw ConfigError("array: tx error length");
  if (!rx_error.empty() && static_cast<int>(rx_error.size()) != rx) throw ConfigError("array: rx error length");
  for (cd e : tx_error)
    if (std::abs(e) == 0) throw ConfigError("array: error entries must be nonzero");
  for (cd e : rx_error)
    if (std::abs(e) == 0) throw ConfigError("array: error entries must be nonzero");
}

cd ArrayModel::tx_steering(int m, double azimuth_deg) const {
  return std::polar(1.0, kTwoPi * m * tx_spacing * sin_deg(azimuth_deg));
}

cd ArrayModel::rx_steering(int n, double azimuth_deg) const {
  return std::polar(1.0, kTwoPi * n * rx_spacing * sin_deg(azimuth_deg));
}

std::vector<cd> ArrayModel::steering(double azimuth_deg, bool with_errors) const {
  std::vector<cd> a(static_cast<std::size_t>(channels()));
  for (int n = 0; n < rx; ++n)
    for (int m = 0; m < tx; ++m) {
      cd v = rx_steering(n, azimuth_deg) * tx_steering(m, azimuth_deg);
      if (with_errors) {
        if (!rx_error.empty()) v *= rx_error[n];
        if (!tx_error.empty()) v *= tx_error[m];
      }
      a[static_cast<std::size_t>(n) * tx + m] = v;
    }
  return a;
}

ArrayModel default_array(const RadarConfig& cfg) {
  ArrayModel a;
  a.tx = cfg.tx_antennas;
  return a;
}

// ---------------------------------------------------------------------------

EchoFrames synthesize_echo(const fhwave::IqFrame& tx, std::span<const Target> scene, const ArrayModel& array,
                           const RadarConfig& cfg) {
  array.validate();
  const int np = cfg.samples_per_prt();
  const int active = cfg.active_samples();
  if (static_cast<int>(tx.channels.size()) != array.tx || tx.prt_length != np)
    throw InputError("echo: transmit frame does not match the array/config");
  const int prts = tx.prts();
  EchoFrames out;
  out.channels.assign(array.rx, std::vector<cd>(tx.samples()));

  std::vector<cd> combined(active);
  for (std::size_t q = 0; q < scene.size(); ++q) {
    const Target& target = scene[q];
    const long delay = std::lround(target.delay() * cfg.sample_rate);
    if (delay < active || delay >= np) {
      std::ostringstream os;
      os << "target " << q << " at " << target.range << " m is outside the observable window; skipped";
      out.warnings.push_back(os.str());
      continue;
    }
    const double fd = target.doppler(cfg);
    std::vector<cd> tx_gain(array.tx), rx_gain(array.rx);
    for (int m = 0; m < array.tx; ++m)
      tx_gain[m] = array.tx_steering(m, target.azimuth) * (array.tx_error.empty() ? cd{1.0} : array.tx_error[m]);
    for (int n = 0; n < array.rx; ++n)
      rx_gain[n] = array.rx_steering(n, target.azimuth) * (array.rx_error.empty() ? cd{1.0} : array.rx_error[n]);
    const int length = static_cast<int>(std::min<long>(active, np - delay));
    for (int i = 0; i < prts; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) * np;
      const cd doppler = target.reflectivity * std::polar(1.0, kTwoPi * fd * i * cfg.prt);
      for (int u = 0; u < length; ++u) {
        cd v{};
        for (int m = 0; m < array.tx; ++m) v += tx_gain[m] * tx.channels[m][base + u];
        combined[u] = v * doppler;
      }
      for (int n = 0; n < array.rx; ++n) {
        auto* y = out.channels[n].data() + base + delay;
        for (int u = 0; u < length; ++u) y[u] += rx_gain[n] * combined[u];
      }
    }
  }
  return out;
}

void add_receiver_noise(EchoFrames& frames, double variance, std::uint64_t seed, const RadarConfig& cfg) {
  if (variance <= 0) return;
  const int np = cfg.samples_per_prt();
  const int active = cfg.active_samples();
  std::mt19937_64 rng(seed);
  for (auto& ch : frames.channels)
    for (std::size_t base = 0; base + np <= ch.size(); base += np)
      dsp::add_noise(std::span<cd>(ch).subspan(base + active, np - active), variance, rng);
}

std::vector<cd> correlate(std::span<const cd> x, std::span<const cd> ref) {
  if (x.empty() || ref.empty()) return {};
  const int nx = static_cast<int>(x.size());
  const int nr = static_cast<int>(ref.size());
  const int n = next_pow2(nx + nr - 1);
  dsp::Fft fwd(n, dsp::Direction::forward), inv(n, dsp::Direction::inverse);
  std::vector<cd> a(n), b(n);
  std::copy(x.begin(), x.end(), a.begin());
  std::copy(ref.begin(), ref.end(), b.begin());
  fwd.execute_in_place(a);
  fwd.execute_in_place(b);
  for (int k = 0; k < n; ++k) a[k] *= std::conj(b[k]) / static_cast<double>(n);
  inv.execute_in_place(a);
  std::vector<cd> out(nx + nr - 1);
  for (int t = -(nr - 1); t < nx; ++t) out[t + nr - 1] = a[(t + n) % n];
  return out;
}

// ---------------------------------------------------------------------------

RangeDopplerMap::RangeDopplerMap(int channels, int first_range_bin, int range_bins, int doppler_bins)
    : channels_(channels), first_range_(first_range_bin), range_bins_(range_bins), doppler_bins_(doppler_bins),
      data_(static_cast<std::size_t>(channels) * range_bins * doppler_bins) {}

RangeDopplerMap matched_filter(const EchoFrames& rx, const fhwave::IqFrame& tx, const ArrayModel& array,
                               const RadarConfig& cfg) {
  const int np = cfg.samples_per_prt();
  const int active = cfg.active_samples();
  if (static_cast<int>(rx.channels.size()) != array.rx || static_cast<int>(tx.channels.size()) != array.tx)
    throw InputError("matched filter: channel counts disagree with the array");
  const int prts = tx.prts();
  for (const auto& ch : rx.channels)
    if (ch.size() != tx.samples()) throw InputError("matched filter: receive/transmit lengths differ");
  const int n = next_pow2(np + active - 1);
  dsp::Fft fwd(n, dsp::Direction::forward), inv(n, dsp::Direction::inverse);
  RangeDopplerMap cube(array.channels(), active, np - active, prts);

  std::vector<std::vector<cd>> refs(array.tx, std::vector<cd>(n));
  std::vector<cd> y(n), prod(n);
  for (int i = 0; i < prts; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * np;
    for (int m = 0; m < array.tx; ++m) {
      std::fill(refs[m].begin(), refs[m].end(), cd{});
      std::copy_n(tx.channels[m].begin() + static_cast<std::ptrdiff_t>(base), active, refs[m].begin());
      fwd.execute_in_place(refs[m]);
    }
    for (int r = 0; r < array.rx; ++r) {
      std::fill(y.begin(), y.end(), cd{});
      std::copy_n(rx.channels[r].begin() + static_cast<std::ptrdiff_t>(base), np, y.begin());
      fwd.execute_in_place(y);
      for (int m = 0; m < array.tx; ++m) {
        for (int k = 0; k < n; ++k) prod[k] = y[k] * std::conj(refs[m][k]);
        inv.execute_in_place(prod);
        const int p = r * array.tx + m;
        for (int t = active; t < np; ++t) cube.at(p, t, i) = prod[t] / static_cast<double>(n);
      }
    }
  }
  return cube;
}

void mtd(RangeDopplerMap& cube) {
  dsp::Fft fft(cube.doppler_bins(), dsp::Direction::forward);
  const int first = cube.first_range_bin();
  for (int p = 0; p < cube.channels(); ++p)
    for (int t = first; t < first + cube.range_bins(); ++t) fft.execute_in_place(cube.series(p, t));
}

// ---------------------------------------------------------------------------

std::vector<double> detection_statistic(const RangeDopplerMap& rdm) {
  const int nt = rdm.range_bins();
  const int nf = rdm.doppler_bins();
  std::vector<double> stat(static_cast<std::size_t>(nt) * nf, 0.0);
  const auto data = rdm.data();
  for (int p = 0; p < rdm.channels(); ++p) {
    const cd* src = data.data() + static_cast<std::size_t>(p) * nt * nf;
    for (std::size_t c = 0; c < stat.size(); ++c) stat[c] += std::abs(src[c]);
  }
  return stat;
}

double cfar_scale(int channels, int training, double false_alarm_rate) {
  if (channels < 1 || training < 1) throw DomainError("cfar: channels and training cells must be positive");
  if (!(false_alarm_rate > 0 && false_alarm_rate < 1)) throw DomainError("cfar: false-alarm rate must be in (0, 1)");
  // Sum of P Rayleigh magnitudes matched to Gamma(shape, scale); the
  // cell-under-test over (cell + training sum) is then Beta(shape, N*shape).
  const double shape = channels * (kPi / 4.0) / (1.0 - kPi / 4.0);
  const double r = boost::math::ibetac_inv(shape, training * shape, false_alarm_rate);
  return training * r / (1.0 - r);
}

CfarResult cfar_detect(const RangeDopplerMap& rdm, const CfarOptions& options) {
  if (options.guard < 0 || options.training < 1) throw ConfigError("cfar: guard >= 0 and training >= 1 required");
  const int nt = rdm.range_bins();
  const int nf = rdm.doppler_bins();
  const int g = options.guard;
  const int w = options.guard + options.training;
  if (nf < 2 * w + 1) throw ConfigError("cfar: Doppler axis shorter than the CFAR window");
  const auto stat = detection_statistic(rdm);

  // Integral image over range x (Doppler extended by w on both sides).
  const int fe = nf + 2 * w;
  std::vector<double> integral(static_cast<std::size_t>(nt + 1) * (fe + 1), 0.0);
  auto I = [&](int t, int f) -> double& { return integral[static_cast<std::size_t>(t) * (fe + 1) + f]; };
  for (int t = 0; t < nt; ++t)
    for (int f = 0; f < fe; ++f) {
      const int src = ((f - w) % nf + nf) % nf;
      I(t + 1, f + 1) = stat[static_cast<std::size_t>(t) * nf + src] + I(t, f + 1) + I(t + 1, f) - I(t, f);
    }
  auto box = [&](int t0, int t1, int f0, int f1) {  // inclusive range rows, extended Doppler cols
    return I(t1 + 1, f1 + 1) - I(t0, f1 + 1) - I(t1 + 1, f0) + I(t0, f0);
  };

  std::map<int, double> scale_cache;
  CfarResult result;
  result.cells = stat.size();
  std::vector<double> threshold(stat.size(), 0.0);
  std::vector<bool> above(stat.size(), false);
  for (int t = 0; t < nt; ++t) {
    const int o0 = std::max(0, t - w), o1 = std::min(nt - 1, t + w);
    const int i0 = std::max(0, t - g), i1 = std::min(nt - 1, t + g);
    const int count = (o1 - o0 + 1) * (2 * w + 1) - (i1 - i0 + 1) * (2 * g + 1);
    auto [it, fresh] = scale_cache.try_emplace(count, 0.0);
    if (fresh) it->second = cfar_scale(rdm.channels(), count, options.false_alarm_rate);
    const double alpha = it->second;
    for (int f = 0; f < nf; ++f) {
      const int fc = f + w;
      const double sum = box(o0, o1, fc - w, fc + w) - box(i0, i1, fc - g, fc + g);
      const std::size_t c = static_cast<std::size_t>(t) * nf + f;
      threshold[c] = alpha * sum / count;
      if (stat[c] > threshold[c]) {
        above[c] = true;
        ++result.exceedances;
      }
    }
  }

  for (int t = 0; t < nt; ++t)
    for (int f = 0; f < nf; ++f) {
      const std::size_t c = static_cast<std::size_t>(t) * nf + f;
      if (!above[c]) continue;
      bool peak = true;
      for (int dt = -1; dt <= 1 && peak; ++dt)
        for (int df = -1; df <= 1; ++df) {
          if (dt == 0 && df == 0) continue;
          const int tt = t + dt;
          if (tt < 0 || tt >= nt) continue;
          const int ff = ((f + df) % nf + nf) % nf;
          const double other = stat[static_cast<std::size_t>(tt) * nf + ff];
          // Ties go to the earlier cell so a plateau yields one detection.
          if (other > stat[c] || (other == stat[c] && (tt < t || (tt == t && ff < f)))) {
            peak = false;
            break;
          }
        }
      if (!peak) continue;
      Detection d;
      d.doppler_bin = f;
      d.range_bin = t + rdm.first_range_bin();
      d.statistic = stat[c];
      d.threshold = threshold[c];
      d.snapshot.resize(rdm.channels());
      for (int p = 0; p < rdm.channels(); ++p) d.snapshot[p] = rdm.at(p, d.range_bin, f);
      result.detections.push_back(std::move(d));
    }
  return result;
}

// ---------------------------------------------------------------------------

std::vector<cd> calibrate(std::span<const cd> snapshot, double anchor_azimuth_deg, const ArrayModel& array,
                          double min_magnitude) {
  if (static_cast<int>(snapshot.size()) != array.channels())
    throw InputError("calibration: snapshot length differs from the channel count");
  for (cd z : snapshot)
    if (!(std::abs(z) > min_magnitude)) throw DomainError("calibration: anchor channel too weak");
  const auto ideal = array.steering(anchor_azimuth_deg, false);
  std::vector<cd> c(snapshot.size());
  for (std::size_t p = 0; p < snapshot.size(); ++p) c[p] = (snapshot[0] / snapshot[p]) * (ideal[p] / ideal[0]);
  return c;
}

double estimate_angle(std::span<const cd> snapshot, const ArrayModel& array, const AngleGrid& grid,
                      std::span<const cd> calibration) {
  if (static_cast<int>(snapshot.size()) != array.channels())
    throw InputError("angle: snapshot length differs from the channel count");
  if (!calibration.empty() && calibration.size() != snapshot.size())
    throw InputError("angle: calibration length differs from the channel count");
  if (grid.points < 1) throw ConfigError("angle grid needs at least one point");
  std::vector<cd> z(snapshot.begin(), snapshot.end());
  if (!calibration.empty())
    for (std::size_t p = 0; p < z.size(); ++p) z[p] *= calibration[p];
  double best = -1.0, best_angle = grid.at(0);
  for (int l = 0; l < grid.points; ++l) {
    const double theta = grid.at(l);
    const auto a = array.steering(theta, false);
    cd acc{};
    for (std::size_t p = 0; p < z.size(); ++p) acc += std::conj(a[p]) * z[p];
    const double power = std::norm(acc);
    if (power > best) {
      best = power;
      best_angle = theta;
    }
  }
  return best_angle;
}

void estimate_params(Detection& detection, const ArrayModel& array, const AngleGrid& grid, const RadarConfig& cfg,
                     std::span<const cd> calibration) {
  const int nf = cfg.prts_per_cpi;
  const int signed_bin = detection.doppler_bin < nf / 2 ? detection.doppler_bin : detection.doppler_bin - nf;
  detection.range = kSpeedOfLight * detection.range_bin / (2.0 * cfg.sample_rate);
  detection.velocity = cfg.wavelength() * signed_bin * cfg.doppler_bin() / 2.0;
  detection.azimuth = estimate_angle(detection.snapshot, array, grid, calibration);
}

RadarResult process(const EchoFrames& rx, const fhwave::IqFrame& tx, const ArrayModel& array, const RadarConfig& cfg,
                    const RadarOptions& options) {
  if (tx.prts() != cfg.prts_per_cpi) throw InputError("radar processing expects one full CPI");
  RadarResult result;
  result.rdm = matched_filter(rx, tx, array, cfg);
  mtd(result.rdm);
  result.cfar = cfar_detect(result.rdm, options.cfar);
  for (auto& d : result.cfar.detections) estimate_params(d, array, options.grid, cfg, options.calibration);
  return result;
}

}  // namespace fhjrc::radarrx
