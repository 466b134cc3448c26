// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fhjrc/bench.hpp"

#include <array>
#include <cmath>
#include <random>

#include "fhjrc/errors.hpp"
#include "fhjrc/impair.hpp"

namespace fhjrc::bench {

Interval wilson(double errors, double trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double p = errors / trials;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / trials;
  const double centre = (p + z2 / (2.0 * trials)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

RateReport data_rate(int psk_bits, const RadarConfig& cfg) {
  if (psk_bits < 0) throw DomainError("PSK bits per symbol must be non-negative");
  cfg.validate();
  RateReport r;
  const double per_prt_nominal = static_cast<double>(cfg.hops) * fhwave::codeword_bits(cfg.sub_bands, cfg.tx_antennas) +
                                 static_cast<double>(psk_bits) * cfg.tx_antennas * cfg.hops;
  r.nominal = per_prt_nominal / cfg.prt;
  // The pilot layout repeats with the pilot cycle; average over one cycle.
  const int cycle = pilot_cycle_length(cfg);
  double bits = 0.0;
  for (int i = 0; i < cycle; ++i)
    bits += fhwave::fhcs_bits_per_prt(i, cfg, fhwave::PlanMode::dfrc) +
            static_cast<double>(psk_bits) * fhwave::psk_slots_per_prt(i, cfg, fhwave::PlanMode::dfrc);
  r.effective = bits / cycle / cfg.prt;
  return r;
}

RadarConfig config_for_hop_duration(const RadarConfig& base, double hop_duration) {
  RadarConfig cfg = base;
  cfg.hop_duration = hop_duration;
  for (int k = base.sub_bands; k >= std::max(2, base.tx_antennas); --k) {
    cfg.sub_bands = k;
    try {
      cfg.validate();
      return cfg;
    } catch (const ConfigError&) {
    }
  }
  throw ConfigError("no sub-band count satisfies the waveform constraints for this hop duration");
}

std::vector<double> snr_grid(double first, double last, double step) {
  if (!(step > 0)) throw ConfigError("SNR grid step must be positive");
  std::vector<double> grid;
  const int n = static_cast<int>(std::floor((last - first) / step + 1e-9));
  for (int i = 0; i <= n; ++i) grid.push_back(first + i * step);
  return grid;
}

namespace {

void accumulate(commrx::ErrorCounts& a, const commrx::ErrorCounts& b) {
  a.fhcs_bits += b.fhcs_bits;
  a.fhcs_bit_errors += b.fhcs_bit_errors;
  a.psk_symbols += b.psk_symbols;
  a.psk_symbol_errors += b.psk_symbol_errors;
  a.psk_bits += b.psk_bits;
  a.psk_bit_errors += b.psk_bit_errors;
  a.erased_symbols += b.erased_symbols;
  a.erased_hops += b.erased_hops;
}

struct Payload {
  fhwave::HopPlan plan;
  fhwave::PskGrid psk;
  fhwave::IqFrame frame;
};

Payload make_payload(const RadarConfig& cfg, fhwave::PlanMode mode, int prts, int psk_bits, std::uint64_t seed) {
  Payload p;
  std::size_t fhcs_count = 0, slots = 0;
  for (int i = 0; i < prts; ++i) {
    fhcs_count += static_cast<std::size_t>(fhwave::fhcs_bits_per_prt(i, cfg, mode));
    slots += static_cast<std::size_t>(fhwave::psk_slots_per_prt(i, cfg, mode));
  }
  const auto fhcs = fhwave::random_bits(fhcs_count, dsp::mix_seed(seed, 1));
  const auto psk = fhwave::random_bits(slots * psk_bits, dsp::mix_seed(seed, 2));
  fhwave::BitSource fhcs_src(fhcs), psk_src(psk);
  p.plan = fhwave::plan_hops(cfg, mode, prts, fhcs_src, dsp::mix_seed(seed, 3));
  p.psk = fhwave::assign_psk(p.plan, psk_bits, psk_src);
  p.frame = fhwave::synthesize(p.plan, p.psk, cfg);
  return p;
}

impair::ImpairmentSpec random_impairment(const RadarConfig& cfg, double rho_fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double rho = rho_fraction * impair::max_unambiguous_rho(cfg) * unit(rng);
  const double dt0 = 0.5 / cfg.sample_rate * unit(rng);
  return impair::from_clock(rho, dt0, cfg);
}

double noise_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

}  // namespace

std::vector<BerPoint> run_ber_sweep(const BerSweepSpec& spec) {
  if (spec.frames < 1 || spec.prts_per_frame < 1) throw ConfigError("BER sweep needs frames >= 1 and PRTs >= 1");
  std::vector<RadarConfig> configs;
  for (double t : spec.hop_durations) configs.push_back(config_for_hop_duration(spec.base, t));
  const std::size_t n_snr = spec.snr_db.size();
  const std::size_t n_mod = spec.psk_bits.size();

  // One unit of work = one frame of one hop configuration, all SNRs and
  // modulations (common random numbers across both).
  const std::size_t units = configs.size() * static_cast<std::size_t>(spec.frames);
  auto results = parallel_map(units, spec.threads, [&](std::size_t u) {
    const std::size_t c = u / spec.frames;
    const std::size_t f = u % spec.frames;
    const RadarConfig& cfg = configs[c];
    std::vector<commrx::ErrorCounts> counts(n_snr * n_mod);
    const std::uint64_t frame_seed = dsp::mix_seed(spec.seed, c, f);
    auto spec_base = random_impairment(cfg, spec.rho_fraction, dsp::mix_seed(frame_seed, 10));
    spec_base.front_end = impair::rippled_front_end(cfg, 0.0, 0.0, dsp::mix_seed(frame_seed, 11), true);
    for (std::size_t j = 0; j < n_mod; ++j) {
      const Payload p = make_payload(cfg, fhwave::PlanMode::payload, spec.prts_per_frame, spec.psk_bits[j],
                                     dsp::mix_seed(frame_seed, 20));
      for (std::size_t s = 0; s < n_snr; ++s) {
        auto imp = spec_base;
        imp.noise_variance = noise_variance(spec.snr_db[s]);
        const auto rx = impair::apply(p.frame, p.plan, imp, cfg, dsp::mix_seed(frame_seed, 30, s));
        commrx::RxOptions opt;
        opt.mode = fhwave::PlanMode::payload;
        opt.bits_per_symbol = spec.psk_bits[j];
        opt.known_channel = imp;
        auto report = commrx::demodulate(rx, spec.prts_per_frame, cfg, opt);
        commrx::score(report, p.plan, p.psk, cfg);
        counts[s * n_mod + j] = *report.errors;
      }
    }
    return counts;
  });

  std::vector<BerPoint> points;
  for (std::size_t c = 0; c < configs.size(); ++c)
    for (std::size_t j = 0; j < n_mod; ++j)
      for (std::size_t s = 0; s < n_snr; ++s) {
        BerPoint pt;
        pt.hop_duration = configs[c].hop_duration;
        pt.sub_bands = configs[c].sub_bands;
        pt.bits_per_symbol = spec.psk_bits[j];
        pt.snr_db = spec.snr_db[s];
        for (int f = 0; f < spec.frames; ++f) accumulate(pt.counts, results[c * spec.frames + f][s * n_mod + j]);
        pt.fhcs_ci = wilson(pt.counts.fhcs_bit_errors, static_cast<double>(pt.counts.fhcs_bits));
        pt.psk_ci = wilson(pt.counts.psk_bit_errors, static_cast<double>(pt.counts.psk_bits));
        points.push_back(pt);
      }
  return points;
}

// ---------------------------------------------------------------------------

std::vector<radarrx::Target> random_scene(const SceneSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> range(spec.min_range, spec.max_range);
  std::uniform_real_distribution<double> speed(-spec.max_speed, spec.max_speed);
  std::uniform_real_distribution<double> azimuth(-spec.max_azimuth, spec.max_azimuth);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::vector<radarrx::Target> scene(spec.targets);
  for (auto& t : scene) {
    t.range = range(rng);
    t.velocity = speed(rng);
    t.azimuth = azimuth(rng);
    t.reflectivity = std::polar(1.0, phase(rng));
  }
  return scene;
}

Association associate(std::span<const radarrx::Detection> detections, std::span<const radarrx::Target> truth,
                      const Gate& gate, const RadarConfig& cfg) {
  struct Candidate {
    double cost;
    std::size_t truth, det;
  };
  const double nc = cfg.prts_per_cpi;
  std::vector<Candidate> candidates;
  for (std::size_t q = 0; q < truth.size(); ++q) {
    const double t_bin = truth[q].delay() * cfg.sample_rate;
    const double f_bin = truth[q].doppler(cfg) * nc * cfg.prt;
    for (std::size_t d = 0; d < detections.size(); ++d) {
      const auto& det = detections[d];
      const double dt = std::abs(det.range_bin - t_bin);
      double df = std::fmod(std::abs(det.doppler_bin - f_bin), nc);
      df = std::min(df, nc - df);
      const double da = std::abs(det.azimuth - truth[q].azimuth);
      if (dt > gate.range_bins || df > gate.doppler_bins || da > gate.azimuth_deg) continue;
      const double cost = std::pow(dt / gate.range_bins, 2) + std::pow(df / gate.doppler_bins, 2) +
                          std::pow(da / gate.azimuth_deg, 2);
      candidates.push_back({cost, q, d});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
  std::vector<bool> truth_used(truth.size(), false), det_used(detections.size(), false);
  Association a;
  for (const auto& c : candidates) {
    if (truth_used[c.truth] || det_used[c.det]) continue;
    truth_used[c.truth] = det_used[c.det] = true;
    const auto& det = detections[c.det];
    a.matched.push_back({static_cast<int>(c.truth), det.range - truth[c.truth].range,
                         det.velocity - truth[c.truth].velocity, det.azimuth - truth[c.truth].azimuth});
  }
  std::sort(a.matched.begin(), a.matched.end(), [](const TargetError& x, const TargetError& y) { return x.target < y.target; });
  a.misses = truth.size() - a.matched.size();
  a.false_alarms = detections.size() - a.matched.size();
  return a;
}

Floors quantization_floors(const RadarConfig& cfg, const radarrx::AngleGrid& grid) {
  const double s = std::sqrt(12.0);
  return {cfg.range_bin() / s, cfg.velocity_bin() / s, grid.step() / s};
}

RadarSweepReport run_radar_sweep(const RadarSweepSpec& spec) {
  spec.cfg.validate();
  spec.array.validate();
  if (spec.trials < 1) throw ConfigError("radar sweep needs at least one trial");
  if (spec.array.tx != spec.cfg.tx_antennas) throw ConfigError("array transmit count must equal the antenna count");
  const std::size_t n_snr = spec.snr_db.size();
  const RadarConfig& cfg = spec.cfg;
  const std::array<fhwave::PlanMode, 2> modes{fhwave::PlanMode::traditional, fhwave::PlanMode::dfrc};

  // Per trial: [snr][mode] associations.
  auto results = parallel_map(static_cast<std::size_t>(spec.trials), spec.threads, [&](std::size_t trial) {
    const std::uint64_t seed = dsp::mix_seed(spec.seed, trial);
    const auto scene = random_scene(spec.scene, dsp::mix_seed(seed, 1));
    std::vector<Association> out(n_snr * modes.size());
    radarrx::RadarOptions options;
    options.cfar = spec.cfar;
    options.grid = spec.grid;
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      const Payload p = make_payload(cfg, modes[mi], cfg.prts_per_cpi, 3, dsp::mix_seed(seed, 2, mi));
      const auto clean = radarrx::synthesize_echo(p.frame, scene, spec.array, cfg);
      for (std::size_t s = 0; s < n_snr; ++s) {
        auto rx = clean;
        radarrx::add_receiver_noise(rx, noise_variance(spec.snr_db[s]), dsp::mix_seed(seed, 3), cfg);
        const auto result = radarrx::process(rx, p.frame, spec.array, cfg, options);
        out[s * modes.size() + mi] = associate(result.cfar.detections, scene, spec.gate, cfg);
      }
    }
    return out;
  });

  RadarSweepReport report;
  for (std::size_t s = 0; s < n_snr; ++s) {
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      RadarPoint pt;
      pt.snr_db = spec.snr_db[s];
      pt.mode = modes[mi];
      double sr = 0, sv = 0, sa = 0;
      for (const auto& trial : results) {
        const auto& a = trial[s * modes.size() + mi];
        pt.truths += a.matched.size() + a.misses;
        pt.associated += a.matched.size();
        pt.false_alarms += a.false_alarms;
        for (const auto& e : a.matched) {
          sr += e.range * e.range;
          sv += e.velocity * e.velocity;
          sa += e.azimuth * e.azimuth;
        }
      }
      if (pt.associated) {
        pt.rmse_range = std::sqrt(sr / pt.associated);
        pt.rmse_velocity = std::sqrt(sv / pt.associated);
        pt.rmse_azimuth = std::sqrt(sa / pt.associated);
      }
      report.points.push_back(pt);
    }

    PairedPoint pp;
    pp.snr_db = spec.snr_db[s];
    std::vector<std::array<double, 3>> diffs;
    for (const auto& trial : results) {
      const auto& t = trial[s * modes.size() + 0].matched;
      const auto& d = trial[s * modes.size() + 1].matched;
      for (const auto& et : t)
        for (const auto& ed : d)
          if (ed.target == et.target)
            diffs.push_back({ed.range * ed.range - et.range * et.range,
                             ed.velocity * ed.velocity - et.velocity * et.velocity,
                             ed.azimuth * ed.azimuth - et.azimuth * et.azimuth});
    }
    pp.pairs = diffs.size();
    auto summarize = [&](int which) {
      PairedDifference out;
      if (diffs.empty()) return out;
      double mean = 0;
      for (const auto& d : diffs) mean += d[which];
      mean /= diffs.size();
      double var = 0;
      for (const auto& d : diffs) var += (d[which] - mean) * (d[which] - mean);
      var = diffs.size() > 1 ? var / (diffs.size() - 1) : 0.0;
      out.mean = mean;
      out.standard_error = std::sqrt(var / diffs.size());
      return out;
    };
    pp.range = summarize(0);
    pp.velocity = summarize(1);
    pp.azimuth = summarize(2);
    report.paired.push_back(pp);
  }
  return report;
}

// ---------------------------------------------------------------------------

std::vector<MethodPoint> run_method_comparison(const MethodSpec& spec) {
  spec.cfg.validate();
  if (spec.trials < 1) throw ConfigError("method comparison needs at least one trial");
  const std::array<commrx::Method, 3> methods{commrx::Method::flat_gain, commrx::Method::proposed,
                                              commrx::Method::averaged};
  const std::size_t n_mod = spec.psk_bits.size();
  struct Cell {
    commrx::ErrorCounts counts;
    double residual = 0.0;
  };
  const RadarConfig& cfg = spec.cfg;
  auto results = parallel_map(static_cast<std::size_t>(spec.trials), spec.threads, [&](std::size_t trial) {
    const std::uint64_t seed = dsp::mix_seed(spec.seed, trial);
    auto imp = random_impairment(cfg, spec.rho_fraction, dsp::mix_seed(seed, 1));
    imp.front_end = impair::rippled_front_end(cfg, spec.ripple_db, spec.ripple_rad, dsp::mix_seed(seed, 2), true);
    imp.noise_variance = noise_variance(spec.snr_db);
    std::vector<Cell> cells(n_mod * methods.size());
    for (std::size_t j = 0; j < n_mod; ++j) {
      const Payload p = make_payload(cfg, fhwave::PlanMode::dfrc, cfg.prts_per_cpi, spec.psk_bits[j],
                                     dsp::mix_seed(seed, 3));
      const auto rx = impair::apply(p.frame, p.plan, imp, cfg, dsp::mix_seed(seed, 4));
      for (std::size_t k = 0; k < methods.size(); ++k) {
        commrx::RxOptions opt;
        opt.mode = fhwave::PlanMode::dfrc;
        opt.bits_per_symbol = spec.psk_bits[j];
        opt.method = methods[k];
        auto report = commrx::demodulate(rx, cfg.prts_per_cpi, cfg, opt);
        commrx::score(report, p.plan, p.psk, cfg);
        Cell& c = cells[j * methods.size() + k];
        c.counts = *report.errors;
        for (const auto& s : report.symbols) c.residual += std::abs(s.residual);
      }
    }
    return cells;
  });

  std::vector<MethodPoint> points;
  for (std::size_t j = 0; j < n_mod; ++j)
    for (std::size_t k = 0; k < methods.size(); ++k) {
      MethodPoint pt;
      pt.bits_per_symbol = spec.psk_bits[j];
      pt.method = methods[k];
      double residual = 0.0;
      for (const auto& trial : results) {
        accumulate(pt.counts, trial[j * methods.size() + k].counts);
        residual += trial[j * methods.size() + k].residual;
      }
      pt.mean_abs_residual = pt.counts.psk_symbols ? residual / pt.counts.psk_symbols : 0.0;
      pt.ser_ci = wilson(static_cast<double>(pt.counts.psk_symbol_errors), static_cast<double>(pt.counts.psk_symbols));
      points.push_back(pt);
    }
  return points;
}

}  // namespace fhjrc::bench
