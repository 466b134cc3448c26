// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "fhjrc/bench.hpp"
#include "fhjrc/commrx.hpp"
#include "fhjrc/fhwave.hpp"
#include "fhjrc/impair.hpp"
#include "fhjrc/radarrx.hpp"

using namespace fhjrc;

namespace {

struct Scene {
  RadarConfig cfg;
  radarrx::ArrayModel array;
  fhwave::IqFrame tx;
  radarrx::EchoFrames rx;
  fhwave::HopPlan plan;
  fhwave::PskGrid psk;
};

const Scene& scene() {
  static const Scene s = [] {
    Scene s;
    s.array = radarrx::default_array(s.cfg);
    const int prts = s.cfg.prts_per_cpi;
    std::size_t fhcs = 0, slots = 0;
    for (int i = 0; i < prts; ++i) {
      fhcs += fhwave::fhcs_bits_per_prt(i, s.cfg, fhwave::PlanMode::dfrc);
      slots += fhwave::psk_slots_per_prt(i, s.cfg, fhwave::PlanMode::dfrc);
    }
    const auto a = fhwave::random_bits(fhcs, 1);
    const auto b = fhwave::random_bits(slots * 3, 2);
    fhwave::BitSource sa(a), sb(b);
    s.plan = fhwave::plan_hops(s.cfg, fhwave::PlanMode::dfrc, prts, sa, 3);
    s.psk = fhwave::assign_psk(s.plan, 3, sb);
    s.tx = fhwave::synthesize(s.plan, s.psk, s.cfg);
    const auto targets = bench::random_scene(bench::SceneSpec{}, 4);
    s.rx = radarrx::synthesize_echo(s.tx, targets, s.array, s.cfg);
    radarrx::add_receiver_noise(s.rx, 1e3, 5, s.cfg);
    return s;
  }();
  return s;
}

void hop_spectrum(benchmark::State& state) {
  const auto& s = scene();
  const auto& x = s.tx.channels[0];
  for (auto _ : state) benchmark::DoNotOptimize(commrx::hop_spectrum(x, 3, 2, s.cfg));
}
BENCHMARK(hop_spectrum);

void demodulate_cpi(benchmark::State& state) {
  const auto& s = scene();
  auto spec = impair::from_clock(1e-6, 0.0, s.cfg);
  spec.noise_variance = 0.1;
  const auto rx = impair::apply(s.tx, s.plan, spec, s.cfg, 6);
  commrx::RxOptions opt;
  for (auto _ : state) benchmark::DoNotOptimize(commrx::demodulate(rx, s.cfg.prts_per_cpi, s.cfg, opt));
}
BENCHMARK(demodulate_cpi)->Unit(benchmark::kMillisecond);

void matched_filter(benchmark::State& state) {
  const auto& s = scene();
  for (auto _ : state) benchmark::DoNotOptimize(radarrx::matched_filter(s.rx, s.tx, s.array, s.cfg));
}
BENCHMARK(matched_filter)->Unit(benchmark::kMillisecond);

void mtd(benchmark::State& state) {
  const auto& s = scene();
  const auto cube = radarrx::matched_filter(s.rx, s.tx, s.array, s.cfg);
  for (auto _ : state) {
    state.PauseTiming();
    auto copy = cube;
    state.ResumeTiming();
    radarrx::mtd(copy);
    benchmark::DoNotOptimize(copy);
  }
}
BENCHMARK(mtd)->Unit(benchmark::kMillisecond);

void cfar(benchmark::State& state) {
  const auto& s = scene();
  auto rdm = radarrx::matched_filter(s.rx, s.tx, s.array, s.cfg);
  radarrx::mtd(rdm);
  for (auto _ : state) benchmark::DoNotOptimize(radarrx::cfar_detect(rdm, radarrx::CfarOptions{}));
}
BENCHMARK(cfar)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
