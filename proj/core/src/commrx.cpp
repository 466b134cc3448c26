// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fhjrc/commrx.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "fhjrc/errors.hpp"

namespace fhjrc::commrx {

std::vector<cd> hop_spectrum(std::span<const cd> rx, int prt, int hop, const RadarConfig& cfg) {
  const int nh = cfg.samples_per_hop();
  const std::size_t begin = static_cast<std::size_t>(prt) * cfg.samples_per_prt() + static_cast<std::size_t>(hop) * nh;
  if (prt < 0 || hop < 0 || hop >= cfg.hops || begin + nh > rx.size())
    throw InputError("hop outside the received stream");
  thread_local std::vector<dsp::Fft> plans;
  auto it = std::find_if(plans.begin(), plans.end(), [&](const dsp::Fft& f) { return f.size() == nh; });
  if (it == plans.end()) {
    plans.emplace_back(nh, dsp::Direction::forward);
    it = plans.end() - 1;
  }
  std::vector<cd> out(nh);
  it->execute(rx.subspan(begin, nh), out);
  return out;
}

bool HopPeaks::erased() const { return std::find(weak.begin(), weak.end(), true) != weak.end(); }

namespace {

double median_magnitude(std::span<const cd> spectrum) {
  std::vector<double> mags(spectrum.size());
  std::transform(spectrum.begin(), spectrum.end(), mags.begin(), [](cd v) { return std::abs(v); });
  const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  return *mid;
}

}  // namespace

HopPeaks assign_peaks(std::span<const cd> spectrum, const fhwave::HopLayout& layout, const RadarConfig& cfg) {
  const int antennas = static_cast<int>(layout.pinned_antennas.size() + layout.free_antennas.size());
  HopPeaks peaks;
  peaks.sub_bands.assign(antennas, 0);
  peaks.weak.assign(antennas, false);
  const double floor = 3.0 * median_magnitude(spectrum);
  auto magnitude = [&](int k) { return std::abs(spectrum[cfg.subband_bin(k)]); };

  for (std::size_t p = 0; p < layout.pinned_antennas.size(); ++p) {
    const int m = layout.pinned_antennas[p];
    peaks.sub_bands[m] = layout.pinned_sub_bands[p];
    peaks.weak[m] = magnitude(peaks.sub_bands[m]) < floor;
  }
  const int n_free = static_cast<int>(layout.free_antennas.size());
  if (n_free == 0) return peaks;

  const auto& allowed = layout.allowed_sub_bands;
  const int n_allowed = static_cast<int>(allowed.size());
  std::vector<int> order(n_allowed);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + n_free, order.end(),
                    [&](int a, int b) { return magnitude(allowed[a]) > magnitude(allowed[b]); });
  std::vector<int> chosen(order.begin(), order.begin() + n_free);
  std::sort(chosen.begin(), chosen.end());

  if (fhwave::rank_combination(chosen, n_allowed) >= layout.usable) {
    peaks.fallback = true;
    double best = -1.0;
    for (std::uint64_t r = 0; r < layout.usable; ++r) {
      const auto subset = fhwave::unrank_combination(r, n_allowed, n_free);
      double power = 0.0;
      for (int pos : subset) power += std::norm(spectrum[cfg.subband_bin(allowed[pos])]);
      if (power > best) {
        best = power;
        chosen = subset;
      }
    }
  }
  for (int j = 0; j < n_free; ++j) {
    const int m = layout.free_antennas[j];
    peaks.sub_bands[m] = allowed[chosen[j]];
    peaks.weak[m] = magnitude(peaks.sub_bands[m]) < floor;
  }
  return peaks;
}

std::vector<cd> extract_tones(std::span<const cd> spectrum, std::span<const int> sub_bands, double bin_offset,
                              const RadarConfig& cfg) {
  const int nh = cfg.samples_per_hop();
  const std::size_t n = sub_bands.size();
  std::vector<int> bins(n);
  for (std::size_t j = 0; j < n; ++j) bins[j] = cfg.subband_bin(sub_bands[j]);
  std::vector<cd> g(n * n), rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    rhs[j] = spectrum[bins[j]];
    for (std::size_t m = 0; m < n; ++m) g[j * n + m] = dsp::dirichlet(bins[m] + bin_offset - bins[j], nh);
  }
  auto amplitude = dsp::solve(std::move(g), std::move(rhs));
  const cd own = dsp::dirichlet(bin_offset, nh);
  for (auto& a : amplitude) a *= own;
  return amplitude;
}

SyncEstimate estimate_cfo(const std::vector<std::vector<cd>>& zero_pilots, const RadarConfig& cfg) {
  SyncEstimate sync;
  cd acc{};
  for (std::size_t i = 0; i + 1 < zero_pilots.size(); ++i) {
    const auto& a = zero_pilots[i];
    const auto& b = zero_pilots[i + 1];
    for (std::size_t m = 0; m < std::min(a.size(), b.size()); ++m) {
      if (a[m] == cd{} || b[m] == cd{}) continue;
      const double phase = std::arg(b[m] * std::conj(a[m]));
      sync.pair_phases.push_back(phase);
      if (std::abs(phase) > 0.9 * kPi) sync.ambiguous = true;
      acc += std::polar(1.0, phase);
    }
  }
  if (sync.pair_phases.empty()) throw InputError("CFO estimation needs two consecutive PRTs with pilots");
  sync.cfo = std::arg(acc) / cfg.prt;
  estimate_clock(sync, cfg);
  return sync;
}

void estimate_clock(SyncEstimate& sync, const RadarConfig& cfg) {
  sync.rho = sync.cfo / (kTwoPi * cfg.carrier);
  sync.sampling_step = impair::sto_from_rho(sync.rho, cfg.sample_rate);
}

cd correction_factor(int prt_a, int hop_a, int prt_b, int hop_b, int sub_band, const SyncEstimate& sync,
                     const RadarConfig& cfg) {
  const double samples = static_cast<double>(prt_b - prt_a) * cfg.samples_per_prt() +
                         static_cast<double>(hop_b - hop_a) * cfg.samples_per_hop();
  const double hops = hop_b - hop_a;
  return std::polar(1.0, cfg.subband_omega(sub_band) * samples * sync.sampling_step +
                             sync.cfo * hops * cfg.hop_duration +
                             sync.cfo * hops * cfg.samples_per_hop() * sync.sampling_step);
}

cd pilot_ratio_factor(int prt, int antenna, int sub_band, const SyncEstimate& sync, const RadarConfig& cfg) {
  const double samples = static_cast<double>(prt) * cfg.samples_per_prt() +
                         static_cast<double>(antenna + 1) * cfg.samples_per_hop();
  return std::polar(1.0, cfg.subband_omega(sub_band) * samples * sync.sampling_step + sync.cfo * cfg.hop_duration +
                             sync.cfo * cfg.samples_per_hop() * sync.sampling_step);
}

// ---------------------------------------------------------------------------

PilotRatioTable::PilotRatioTable(int antennas, int sub_bands)
    : antennas_(antennas), sub_bands_(sub_bands), cells_(static_cast<std::size_t>(antennas) * sub_bands) {}

void PilotRatioTable::add(int antenna, int sub_band, int prt, cd ratio) {
  cells_[static_cast<std::size_t>(antenna) * sub_bands_ + sub_band].push_back({prt, ratio});
}

const std::vector<PilotRatioTable::Entry>& PilotRatioTable::entries(int antenna, int sub_band) const {
  return cells_[static_cast<std::size_t>(antenna) * sub_bands_ + sub_band];
}

const PilotRatioTable::Entry* PilotRatioTable::nearest(int antenna, int sub_band, int prt, int group_begin,
                                                       int group_end) const {
  const Entry* best = nullptr;
  auto better = [&](const Entry& e) {
    if (!best) return true;
    const bool in_e = e.prt >= group_begin && e.prt < group_end;
    const bool in_b = best->prt >= group_begin && best->prt < group_end;
    if (in_e != in_b) return in_e;
    return std::abs(e.prt - prt) < std::abs(best->prt - prt);
  };
  for (const auto& e : entries(antenna, sub_band))
    if (better(e)) best = &e;
  return best;
}

bool PilotRatioTable::complete(int zero_index) const {
  for (int m = 0; m < antennas_; ++m)
    for (int k = 0; k < sub_bands_; ++k)
      if (k != zero_index && entries(m, k).empty()) return false;
  return true;
}

PilotRatioTable build_pilot_ratios(const PilotObservations& pilots, const RadarConfig& cfg) {
  PilotRatioTable table(cfg.tx_antennas, cfg.sub_bands);
  for (std::size_t i = 0; i < pilots.zero.size(); ++i) {
    const int k = pilot_sub_band(static_cast<int>(i), cfg);
    for (int m = 0; m < cfg.tx_antennas; ++m) {
      if (!pilots.erased.empty() && pilots.erased[i][m]) continue;
      const cd z = pilots.zero[i][m];
      if (z == cd{}) continue;
      table.add(m, k, static_cast<int>(i), pilots.cycled[i][m] / z);
    }
  }
  return table;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::flat_gain: return "flat_gain";
    case Method::proposed: return "proposed";
    case Method::averaged: return "averaged";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "flat_gain") return Method::flat_gain;
  if (name == "proposed") return Method::proposed;
  if (name == "averaged") return Method::averaged;
  throw ConfigError("unknown demodulation method '" + name + "'");
}

// ---------------------------------------------------------------------------

namespace {

// Timing offset maximizing the phase coherence of gain-free pilot ratios
// against exp(j*omega_k*tau).
double fit_flat_delay(const PilotRatioTable& table, int antenna, const SyncEstimate& sync, const RadarConfig& cfg) {
  std::vector<std::pair<double, cd>> samples;
  for (int k = 0; k < cfg.sub_bands; ++k)
    for (const auto& e : table.entries(antenna, k)) {
      const cd x = e.ratio / pilot_ratio_factor(e.prt, antenna, k, sync, cfg);
      if (std::abs(x) > 0) samples.emplace_back(cfg.subband_omega(k), x / std::abs(x));
    }
  if (samples.empty()) return 0.0;
  auto score = [&](double tau) {
    double s = 0.0;
    for (const auto& [w, x] : samples) s += std::real(x * std::polar(1.0, -w * tau));
    return s;
  };
  const double period = 1.0 / cfg.subband_spacing();
  const int grid = 2000;
  const double step = period / grid;
  double best_tau = 0.0, best = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid; ++g) {
    const double tau = -period / 2 + g * step;
    const double s = score(tau);
    if (s > best) {
      best = s;
      best_tau = tau;
    }
  }
  // Golden-section refinement inside the winning grid cell.
  double lo = best_tau - step, hi = best_tau + step;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double a = hi - ratio * (hi - lo), b = lo + ratio * (hi - lo);
    if (score(a) > score(b)) hi = b; else lo = a;
  }
  return 0.5 * (lo + hi);
}

int popcount(std::uint64_t v) { return std::popcount(v); }

}  // namespace

DemodReport demodulate(std::span<const cd> rx, int prts, const RadarConfig& cfg, const RxOptions& options) {
  cfg.validate();
  using fhwave::PlanMode;
  if (options.mode == PlanMode::traditional) throw ConfigError("traditional plans carry no payload");
  if (options.bits_per_symbol < 0 || options.bits_per_symbol > 16)
    throw ConfigError("bits per symbol must be in [0, 16]");
  if (prts < 1 || rx.size() < static_cast<std::size_t>(prts) * cfg.samples_per_prt())
    throw InputError("received stream shorter than the requested PRTs");
  const bool known = options.known_channel.has_value();
  if (!known && options.mode != PlanMode::dfrc) throw ConfigError("payload-only plans need a known channel");
  const int group = options.group_length > 0 ? options.group_length : pilot_cycle_length(cfg);
  const int antennas = cfg.tx_antennas;
  const int k0 = cfg.zero_index();

  std::vector<std::vector<std::vector<cd>>> spectra(prts, std::vector<std::vector<cd>>(cfg.hops));
  std::vector<std::vector<HopPeaks>> peaks(prts, std::vector<HopPeaks>(cfg.hops));
  std::vector<std::vector<fhwave::HopLayout>> layouts(prts, std::vector<fhwave::HopLayout>(cfg.hops));
  for (int i = 0; i < prts; ++i)
    for (int h = 0; h < cfg.hops; ++h) {
      spectra[i][h] = hop_spectrum(rx, i, h, cfg);
      layouts[i][h] = fhwave::hop_layout(i, h, cfg, options.mode);
      peaks[i][h] = assign_peaks(spectra[i][h], layouts[i][h], cfg);
    }

  std::vector<std::vector<std::vector<cd>>> tones(prts, std::vector<std::vector<cd>>(cfg.hops));
  auto extract_all = [&](double offset) {
    for (int i = 0; i < prts; ++i)
      for (int h = 0; h < cfg.hops; ++h) tones[i][h] = extract_tones(spectra[i][h], peaks[i][h].sub_bands, offset, cfg);
  };
  auto zero_pilots = [&] {
    std::vector<std::vector<cd>> z(prts, std::vector<cd>(antennas));
    for (int i = 0; i < prts; ++i)
      for (int m = 0; m < antennas; ++m)
        if (!peaks[i][m].weak[m]) z[i][m] = tones[i][m][m];
    return z;
  };

  DemodReport report;
  report.bits_per_symbol = options.bits_per_symbol;
  if (known) {
    const auto& spec = *options.known_channel;
    report.sync.cfo = spec.cfo;
    report.sync.sampling_step = spec.sampling_step;
    report.sync.rho = impair::rho_from_sto(spec.sampling_step, cfg.sample_rate);
    extract_all(spec.cfo * cfg.hop_duration / kTwoPi);
  } else {
    extract_all(0.0);
    report.sync = estimate_cfo(zero_pilots(), cfg);
    extract_all(report.sync.cfo * cfg.hop_duration / kTwoPi);
    report.sync = estimate_cfo(zero_pilots(), cfg);
  }
  const SyncEstimate& sync = report.sync;

  // Pilot-ratio table and the per-method references.
  PilotRatioTable table;
  std::vector<std::vector<std::optional<cd>>> averaged;  // [m][k], referred to PRT 0
  std::vector<double> flat_delay(antennas, 0.0);
  if (!known) {
    PilotObservations pilots;
    pilots.zero = zero_pilots();
    pilots.cycled.assign(prts, std::vector<cd>(antennas));
    pilots.erased.assign(prts, std::vector<bool>(antennas, false));
    for (int i = 0; i < prts; ++i)
      for (int m = 0; m < antennas; ++m) {
        pilots.cycled[i][m] = tones[i][m + 1][m];
        pilots.erased[i][m] = peaks[i][m].weak[m] || peaks[i][m + 1].weak[m];
      }
    table = build_pilot_ratios(pilots, cfg);
    if (options.method == Method::averaged) {
      averaged.assign(antennas, std::vector<std::optional<cd>>(cfg.sub_bands));
      for (int m = 0; m < antennas; ++m)
        for (int k = 0; k < cfg.sub_bands; ++k) {
          const auto& entries = table.entries(m, k);
          if (entries.empty()) continue;
          cd acc{};
          for (const auto& e : entries) acc += e.ratio * correction_factor(e.prt, m + 1, 0, m + 1, k, sync, cfg);
          averaged[m][k] = acc / static_cast<double>(entries.size());
        }
    }
    if (options.method == Method::flat_gain)
      for (int m = 0; m < antennas; ++m) flat_delay[m] = fit_flat_delay(table, m, sync, cfg);
  }

  const int x = options.bits_per_symbol;
  for (int i = 0; i < prts; ++i) {
    const int group_begin = (i / group) * group;
    const int group_end = std::min(group_begin + group, prts);
    for (int h = 0; h < cfg.hops; ++h) {
      const auto& layout = layouts[i][h];
      const auto& hp = peaks[i][h];
      if (layout.free_antennas.empty()) continue;

      std::vector<int> positions;
      bool hop_erased = false;
      for (int m : layout.free_antennas) {
        const auto it = std::lower_bound(layout.allowed_sub_bands.begin(), layout.allowed_sub_bands.end(), hp.sub_bands[m]);
        positions.push_back(static_cast<int>(it - layout.allowed_sub_bands.begin()));
        hop_erased = hop_erased || hp.weak[m];
      }
      HopDecision decision{i, h, fhwave::rank_combination(positions, static_cast<int>(layout.allowed_sub_bands.size())),
                           layout.bits, hop_erased};
      fhwave::append_bits(report.fhcs_bits, decision.rank, decision.bits);
      report.hops.push_back(decision);

      for (int m : layout.free_antennas) {
        SymbolEstimate s;
        s.prt = i;
        s.hop = h;
        s.antenna = m;
        s.sub_band = hp.sub_bands[m];
        s.pilot_offset = ((s.sub_band - k0) % cfg.sub_bands + cfg.sub_bands) % cfg.sub_bands;
        s.erased = hp.weak[m];
        const int k = s.sub_band;
        const cd value = tones[i][h][m];
        std::optional<cd> reference;
        if (known) {
          reference = impair::expected_coefficient(cd{1.0, 0.0}, k, i, h, m, *options.known_channel, cfg);
        } else {
          const cd zero = tones[i][m][m];
          if (peaks[i][m].weak[m]) s.erased = true;
          if (k == k0) {
            reference = zero * correction_factor(i, m, i, h, k, sync, cfg);
          } else if (options.method == Method::proposed) {
            if (const auto* e = table.nearest(m, k, i, group_begin, group_end))
              reference = e->ratio * correction_factor(e->prt, m + 1, i, h, k, sync, cfg) * zero;
          } else if (options.method == Method::averaged) {
            if (averaged[m][k]) reference = *averaged[m][k] * correction_factor(0, m + 1, i, h, k, sync, cfg) * zero;
          } else {
            const cd d = std::polar(1.0, cfg.subband_omega(k) * flat_delay[m]) * pilot_ratio_factor(i, m, k, sync, cfg);
            reference = d * correction_factor(i, m + 1, i, h, k, sync, cfg) * zero;
          }
        }
        if (!reference || std::abs(*reference) == 0.0) {
          s.erased = true;
          reference = cd{1.0, 0.0};
        }
        s.phase = std::arg(value / *reference);
        s.symbol = fhwave::nearest_psk_index(s.phase, x);
        s.residual = dsp::wrap_phase(s.phase - fhwave::psk_phase(s.symbol, x));
        fhwave::append_bits(report.psk_bits, static_cast<std::uint64_t>(fhwave::gray_decode(s.symbol)), x);
        report.symbols.push_back(s);
      }
    }
  }
  return report;
}

void score(DemodReport& report, const fhwave::HopPlan& plan, const fhwave::PskGrid& psk, const RadarConfig& cfg) {
  ErrorCounts c;
  for (const auto& d : report.hops) {
    const std::uint64_t truth = fhwave::payload_rank(plan, d.prt, d.hop, cfg);
    c.fhcs_bits += d.bits;
    if (d.erased) {
      c.fhcs_bit_errors += d.bits / 2.0;
      ++c.erased_hops;
    } else {
      c.fhcs_bit_errors += popcount(d.rank ^ truth);
    }
  }
  const int x = report.bits_per_symbol;
  for (const auto& s : report.symbols) {
    const int truth = psk.symbol(s.prt, s.hop, s.antenna);
    ++c.psk_symbols;
    c.psk_bits += x;
    if (s.erased) {
      ++c.erased_symbols;
      ++c.psk_symbol_errors;
      c.psk_bit_errors += x / 2.0;
      continue;
    }
    if (s.symbol != truth) {
      ++c.psk_symbol_errors;
      c.psk_bit_errors += popcount(static_cast<std::uint64_t>(fhwave::gray_decode(s.symbol) ^ fhwave::gray_decode(truth)));
    }
  }
  report.errors = c;
}

}  // namespace fhjrc::commrx
