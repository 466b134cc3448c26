// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fhjrc/impair.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fhjrc/errors.hpp"

namespace fhjrc::impair {

FrontEndProfile flat_front_end(const RadarConfig& cfg) {
  FrontEndProfile p;
  p.channel.assign(cfg.tx_antennas, cd{1.0, 0.0});
  p.gain.assign(cfg.tx_antennas, std::vector<cd>(cfg.sub_bands, cd{1.0, 0.0}));
  return p;
}

namespace {

// Smooth zero-mean curve over [-1, 1] from Legendre degrees 2..4, scaled so
// that its largest magnitude over the sub-band grid equals `peak`.
std::vector<double> ripple_curve(int points, double peak, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double c2 = normal(rng), c3 = normal(rng), c4 = normal(rng);
  std::vector<double> curve(points);
  double largest = 0.0;
  for (int k = 0; k < points; ++k) {
    const double x = points > 1 ? 2.0 * k / (points - 1) - 1.0 : 0.0;
    curve[k] = c2 * std::legendre(2, x) + c3 * std::legendre(3, x) + c4 * std::legendre(4, x);
    largest = std::max(largest, std::abs(curve[k]));
  }
  const double scale = largest > 0 ? peak / largest : 0.0;
  for (auto& v : curve) v *= scale;
  return curve;
}

}  // namespace

FrontEndProfile rippled_front_end(const RadarConfig& cfg, double magnitude_db, double phase_rad, std::uint64_t seed,
                                  bool random_channel_phase) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-kPi, kPi);
  FrontEndProfile p;
  for (int m = 0; m < cfg.tx_antennas; ++m) {
    p.channel.push_back(random_channel_phase ? std::polar(1.0, uniform(rng)) : cd{1.0, 0.0});
    const auto mag = ripple_curve(cfg.sub_bands, magnitude_db, rng);
    const auto phase = ripple_curve(cfg.sub_bands, phase_rad, rng);
    std::vector<cd> g(cfg.sub_bands);
    for (int k = 0; k < cfg.sub_bands; ++k) g[k] = std::polar(std::pow(10.0, mag[k] / 20.0), phase[k]);
    p.gain.push_back(std::move(g));
  }
  return p;
}

const FrontEndProfile* ImpairmentSpec::profile_for(int prt) const {
  if (later_front_end && prt >= switch_prt) return &*later_front_end;
  return front_end.gain.empty() ? nullptr : &front_end;
}

double sto_from_rho(double rho, double sample_rate) { return -rho / (sample_rate * (1.0 - rho)); }

double rho_from_sto(double sampling_step, double sample_rate) {
  // Inverse of sto_from_rho: d = -rho/(fs(1-rho)) => rho = d*fs/(d*fs - 1).
  const double x = sampling_step * sample_rate;
  return x / (x - 1.0);
}

ImpairmentSpec from_clock(double rho, double initial_sto, const RadarConfig& cfg) {
  ImpairmentSpec s;
  s.initial_sto = initial_sto;
  s.sampling_step = sto_from_rho(rho, cfg.sample_rate);
  s.cfo = kTwoPi * cfg.carrier * rho;
  return s;
}

double accumulated_sto(int prt, int hop, const ImpairmentSpec& spec, const RadarConfig& cfg) {
  const double samples = static_cast<double>(prt) * cfg.samples_per_prt() + static_cast<double>(hop) * cfg.samples_per_hop();
  return spec.initial_sto + samples * spec.sampling_step;
}

cd window_gain(double cfo, double duration) {
  const double half = cfo * duration / 2.0;
  const double sinc = std::abs(half) < 1e-12 ? 1.0 : std::sin(half) / half;
  return duration * sinc * std::polar(1.0, half);
}

double max_unambiguous_rho(const RadarConfig& cfg) { return 1.0 / (2.0 * cfg.carrier * cfg.prt); }

void validate(const ImpairmentSpec& spec, const RadarConfig& cfg) {
  if (!(std::abs(spec.cfo) * cfg.prt < kPi)) throw ConfigError("impairment: |cfo|*T_p must be below pi");
  if (!(std::abs(rho_from_sto(spec.sampling_step, cfg.sample_rate)) < 1e-3))
    throw ConfigError("impairment: clock offset must be below 1e-3");
  if (!(spec.noise_variance >= 0)) throw ConfigError("impairment: noise variance must be non-negative");
  auto check = [&](const FrontEndProfile& p) {
    if (p.gain.empty()) return;
    if (p.antennas() != cfg.tx_antennas || static_cast<int>(p.channel.size()) != cfg.tx_antennas)
      throw ConfigError("impairment: front-end profile antenna count mismatch");
    for (int m = 0; m < cfg.tx_antennas; ++m) {
      if (static_cast<int>(p.gain[m].size()) != cfg.sub_bands)
        throw ConfigError("impairment: front-end profile sub-band count mismatch");
      for (int k = 0; k < cfg.sub_bands; ++k)
        if (!(std::abs(p.response(m, k)) > 0)) throw ConfigError("impairment: front-end gain must be nonzero");
    }
  };
  check(spec.front_end);
  if (spec.later_front_end) check(*spec.later_front_end);
}

namespace {

// Exact tone phase shared by apply() and expected_coefficient():
// omega_k*dt_ih + cfo*(i*T_p + h*T + dt_ih).
cd hop_rotation(int sub_band, int prt, int hop, const ImpairmentSpec& spec, const RadarConfig& cfg) {
  const double dt = accumulated_sto(prt, hop, spec, cfg);
  const double start = prt * cfg.prt + hop * cfg.hop_duration;
  return std::polar(1.0, cfg.subband_omega(sub_band) * dt + spec.cfo * (start + dt));
}

cd front_end_response(int antenna, int sub_band, int prt, const ImpairmentSpec& spec) {
  const FrontEndProfile* p = spec.profile_for(prt);
  return p ? p->response(antenna, sub_band) : cd{1.0, 0.0};
}

}  // namespace

std::vector<cd> apply(const fhwave::IqFrame& frame, const fhwave::HopPlan& plan, const ImpairmentSpec& spec,
                      const RadarConfig& cfg, std::uint64_t seed) {
  validate(spec, cfg);
  const int nh = cfg.samples_per_hop();
  const int np = cfg.samples_per_prt();
  if (static_cast<int>(frame.channels.size()) != cfg.tx_antennas || frame.prt_length != np)
    throw InputError("impairment: frame layout disagrees with the radar config");
  if (frame.samples() % np != 0) throw InputError("impairment: frame is not a whole number of PRTs");
  const int prts = frame.prts();
  if (plan.prts() < prts || plan.hops() != cfg.hops || plan.antennas() != cfg.tx_antennas)
    throw InputError("impairment: plan does not cover the frame");

  std::vector<cd> out(frame.samples());
  // CFO progression within a hop, shared by every hop.
  std::vector<cd> drift(nh);
  for (int n = 0; n < nh; ++n) drift[n] = std::polar(1.0, spec.cfo * n / cfg.sample_rate);

  for (int i = 0; i < prts; ++i)
    for (int h = 0; h < cfg.hops; ++h) {
      const std::size_t base = static_cast<std::size_t>(i) * np + static_cast<std::size_t>(h) * nh;
      for (int m = 0; m < cfg.tx_antennas; ++m) {
        const int k = plan.at(i, h, m).sub_band;
        const int bin = cfg.subband_bin(k);
        const auto& x = frame.channels[m];
        cd amplitude{};
        for (int n = 0; n < nh; ++n) {
          const int cycle = static_cast<int>((static_cast<long>(bin) * n) % nh);
          amplitude += x[base + n] * std::polar(1.0, -kTwoPi * cycle / nh);
        }
        amplitude /= static_cast<double>(nh);
        if (amplitude == cd{}) continue;
        const cd scale = amplitude * front_end_response(m, k, i, spec) * hop_rotation(k, i, h, spec, cfg);
        for (int n = 0; n < nh; ++n) {
          const int cycle = static_cast<int>((static_cast<long>(bin) * n) % nh);
          out[base + n] += scale * std::polar(1.0, kTwoPi * cycle / nh) * drift[n];
        }
      }
    }

  std::mt19937_64 rng(seed);
  dsp::add_noise(out, spec.noise_variance, rng);
  return out;
}

cd expected_coefficient(cd amplitude, int sub_band, int prt, int hop, int antenna, const ImpairmentSpec& spec,
                        const RadarConfig& cfg) {
  const int nh = cfg.samples_per_hop();
  const double offset = spec.cfo * cfg.hop_duration / kTwoPi;  // in hop-DFT bins
  return amplitude * front_end_response(antenna, sub_band, prt, spec) * hop_rotation(sub_band, prt, hop, spec, cfg) *
         dsp::dirichlet(offset, nh);
}

}  // namespace fhjrc::impair
