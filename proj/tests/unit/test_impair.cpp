// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "fhjrc/commrx.hpp"
#include "fhjrc/errors.hpp"
#include "fhjrc/impair.hpp"
#include "helpers.hpp"

using namespace fhjrc;
using fhwave::PlanMode;
using testing::cd;

namespace {

std::vector<cd> hop_dft(const std::vector<cd>& rx, int prt, int hop, const RadarConfig& cfg) {
  const int nh = cfg.samples_per_hop();
  const auto start = rx.begin() + static_cast<std::ptrdiff_t>(prt) * cfg.samples_per_prt() + hop * nh;
  return testing::naive_dft(std::vector<cd>(start, start + nh));
}

// Continuous-time hop response T*sinc(dw*T/2)*exp(j*dw*T/2), written out here
// independently of the library.
cd hop_window(double dw, double t) {
  const double x = dw * t / 2;
  return t * (x == 0 ? 1.0 : std::sin(x) / x) * std::polar(1.0, x);
}

}  // namespace

TEST_CASE("clock offset conversions") {
  const double step = impair::sto_from_rho(1e-5, 40e6);
  CHECK(step == doctest::Approx(-2.500025e-13).epsilon(1e-9));
  CHECK(impair::rho_from_sto(step, 40e6) == doctest::Approx(1e-5).epsilon(1e-12));
  const RadarConfig cfg;
  impair::ImpairmentSpec s;
  s.sampling_step = -2.5e-13;
  CHECK(impair::accumulated_sto(1, 0, s, cfg) == doctest::Approx(-4.0e-10).epsilon(1e-12));
  const auto clock = impair::from_clock(1e-6, 3e-9, cfg);
  CHECK(clock.cfo == doctest::Approx(2 * kPi * 5.5e3));
  CHECK(clock.initial_sto == 3e-9);
  CHECK(impair::max_unambiguous_rho(cfg) == doctest::Approx(1.0 / (2 * 5.5e9 * 40e-6)));
}

TEST_CASE("hop window response") {
  const double t = 1e-6;
  const double dw = kPi / t;  // dw*T/2 = pi/2
  CHECK(std::abs(impair::window_gain(dw, t)) == doctest::Approx(2 * t / kPi));
  CHECK(impair::window_gain(0.0, t) == cd{t, 0.0});
}

TEST_CASE("drift over one PRT is negligible against the PRT") {
  const RadarConfig cfg;
  for (double rho : {1e-7, 1e-6, 1e-5, 9.999e-5}) {
    const double ratio = std::abs(cfg.samples_per_prt() * impair::sto_from_rho(rho, cfg.sample_rate)) / cfg.prt;
    CHECK(ratio == doctest::Approx(rho / (1 - rho)).epsilon(1e-9));
    CHECK(ratio < 1e-4);
  }
}

TEST_CASE("impairment model is linear in the transmitted frame") {
  const RadarConfig cfg;
  const auto f = testing::make_frame(cfg, PlanMode::dfrc, 6, 3, 4);
  auto spec = impair::from_clock(1.3e-6, 4e-9, cfg);
  spec.front_end = impair::rippled_front_end(cfg, 1.0, 0.2, 8);
  const cd a{0.7, -1.9};
  auto scaled = f.iq;
  for (auto& ch : scaled.channels)
    for (auto& v : ch) v *= a;
  const auto y1 = impair::apply(f.iq, f.plan, spec, cfg, 1);
  const auto y2 = impair::apply(scaled, f.plan, spec, cfg, 1);
  double worst = 0;
  for (std::size_t n = 0; n < y1.size(); ++n) worst = std::max(worst, std::abs(y2[n] - a * y1[n]));
  CHECK(worst < 1e-12);
}

TEST_CASE("identity impairment reproduces the summed transmit antennas") {
  const RadarConfig cfg;
  const auto f = testing::make_frame(cfg, PlanMode::dfrc, 3, 4, 2);
  const auto y = impair::apply(f.iq, f.plan, impair::ImpairmentSpec{}, cfg, 1);
  double worst = 0;
  for (std::size_t n = 0; n < y.size(); ++n)
    worst = std::max(worst, std::abs(y[n] - f.iq.channels[0][n] - f.iq.channels[1][n]));
  CHECK(worst < 1e-12);
}

TEST_CASE("single-antenna hop spectrum follows the closed-form pilot model") {
  // Only antenna 0 transmits; with no initial offset the closed form needs
  // no small-angle step, so the sampled receiver must agree with it to the
  // discretisation of the hop window across the whole valid CFO range.
  const RadarConfig cfg;
  const double t = cfg.hop_duration;
  const int nh = cfg.samples_per_hop();
  const double rho_max = impair::max_unambiguous_rho(cfg);
  auto f = testing::make_frame(cfg, PlanMode::dfrc, 24, 3, 6);
  std::fill(f.iq.channels[1].begin(), f.iq.channels[1].end(), cd{});
  for (double share : {-0.99, -0.5, 0.1, 0.7, 0.99}) {
    auto spec = impair::from_clock(share * rho_max, 0.0, cfg);
    spec.front_end = impair::rippled_front_end(cfg, 1.0, 0.2, 3);
    REQUIRE(std::abs(spec.cfo) * t <= 0.1);
    const auto y = impair::apply(f.iq, f.plan, spec, cfg, 0);
    double worst = 0;
    for (int i : {0, 5, 23})
      for (int h = 0; h < cfg.hops; ++h) {
        const int k = f.plan.at(i, h, 0).sub_band;
        const cd measured = hop_dft(y, i, h, cfg)[cfg.subband_bin(k)] * (t / nh);
        const double samples = static_cast<double>(i) * cfg.samples_per_prt() + h * nh;
        const double w = 2 * kPi * cfg.subband_frequency(k);
        const cd model = hop_window(spec.cfo, t) * spec.front_end.response(0, k) *
                         std::polar(1.0, f.psk.phase(i, h, 0)) *
                         std::polar(1.0, w * samples * spec.sampling_step) *
                         std::polar(1.0, spec.cfo * (i * cfg.prt + h * t)) *
                         std::polar(1.0, spec.cfo * samples * spec.sampling_step);
        worst = std::max(worst, std::abs(measured - model) / std::abs(model));
      }
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("hop spectrum magnitude shrinks by the window response") {
  const RadarConfig cfg;
  auto f = testing::make_frame(cfg, PlanMode::payload, 1, 0, 1);
  std::fill(f.iq.channels[1].begin(), f.iq.channels[1].end(), cd{});
  for (double rho : {5e-7, 2e-6}) {
    const auto spec = impair::from_clock(rho, 0.0, cfg);
    const auto y = impair::apply(f.iq, f.plan, spec, cfg, 0);
    const int k = f.plan.at(0, 2, 0).sub_band;
    const double measured = std::abs(hop_dft(y, 0, 2, cfg)[cfg.subband_bin(k)]) / cfg.samples_per_hop();
    const double expected = std::abs(hop_window(spec.cfo, cfg.hop_duration)) / cfg.hop_duration;
    CHECK(measured == doctest::Approx(expected).epsilon(1e-4));
  }
}

TEST_CASE("expected coefficient equals the isolated received tone") {
  const RadarConfig cfg;
  auto f = testing::make_frame(cfg, PlanMode::dfrc, 4, 4, 7);
  std::fill(f.iq.channels[0].begin(), f.iq.channels[0].end(), cd{});
  auto spec = impair::from_clock(-1.7e-6, -7e-9, cfg);
  spec.front_end = impair::rippled_front_end(cfg, 1.0, 0.2, 11);
  const auto y = impair::apply(f.iq, f.plan, spec, cfg, 0);
  for (int i = 0; i < 4; ++i)
    for (int h = 0; h < cfg.hops; ++h) {
      const int k = f.plan.at(i, h, 1).sub_band;
      const cd got = hop_dft(y, i, h, cfg)[cfg.subband_bin(k)];
      const cd want =
          impair::expected_coefficient(std::polar(1.0, f.psk.phase(i, h, 1)), k, i, h, 1, spec, cfg);
      CHECK(std::abs(got - want) < 1e-9 * std::abs(want));
    }
}

TEST_CASE("initial offset cancels from every pilot ratio the receiver uses") {
  // Closed form with exp(j*dw*dt0) dropped versus the exact model: the
  // dropped term is common to both pilots of a ratio.
  const RadarConfig cfg;
  const double rho_max = impair::max_unambiguous_rho(cfg);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0, worst_absolute = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto spec = impair::from_clock(0.99 * rho_max * u(rng), 0.5 / cfg.sample_rate * u(rng), cfg);
    auto approx = spec;
    approx.initial_sto = 0.0;
    const int i = trial % 100, k = pilot_sub_band(i, cfg), k0 = cfg.zero_index();
    for (int m = 0; m < 2; ++m) {
      // omega_k * dt0 is kept; only the CFO product is approximated.
      const cd keep = std::polar(1.0, cfg.subband_omega(k) * spec.initial_sto);
      const cd exact_ratio = impair::expected_coefficient(1.0, k, i, m + 1, m, spec, cfg) /
                             impair::expected_coefficient(1.0, k0, i, m, m, spec, cfg);
      const cd approx_ratio = keep * impair::expected_coefficient(1.0, k, i, m + 1, m, approx, cfg) /
                              impair::expected_coefficient(1.0, k0, i, m, m, approx, cfg);
      worst = std::max(worst, std::abs(std::arg(exact_ratio / approx_ratio)));
      const cd exact_step = impair::expected_coefficient(1.0, k0, i + 1, m, m, spec, cfg) /
                            impair::expected_coefficient(1.0, k0, i, m, m, spec, cfg);
      const cd approx_step = impair::expected_coefficient(1.0, k0, i + 1, m, m, approx, cfg) /
                             impair::expected_coefficient(1.0, k0, i, m, m, approx, cfg);
      worst = std::max(worst, std::abs(std::arg(exact_step / approx_step)));
      const cd exact_zero = impair::expected_coefficient(1.0, k0, i, m, m, spec, cfg);
      const cd approx_zero = impair::expected_coefficient(1.0, k0, i, m, m, approx, cfg);
      worst_absolute = std::max(worst_absolute, std::abs(std::arg(exact_zero / approx_zero)));
    }
  }
  CHECK(worst < 1e-6);
  // The absolute pilot phase carries the dropped term, bounded by |dw|*|dt0|.
  CHECK(worst_absolute <= kTwoPi * 5.5e9 * 0.99 * rho_max * 0.5 / 40e6 + 1e-12);
}

TEST_CASE("rippled front end respects its bounds") {
  const RadarConfig cfg;
  const auto p = impair::rippled_front_end(cfg, 1.0, 0.2, 42, false);
  REQUIRE(p.antennas() == 2);
  for (int m = 0; m < 2; ++m) {
    double max_db = 0, max_rad = 0;
    for (int k = 0; k < cfg.sub_bands; ++k) {
      max_db = std::max(max_db, std::abs(20 * std::log10(std::abs(p.gain[m][k]))));
      max_rad = std::max(max_rad, std::abs(std::arg(p.gain[m][k])));
    }
    CHECK(max_db == doctest::Approx(1.0));
    CHECK(max_rad == doctest::Approx(0.2));
    CHECK(p.channel[m] == cd{1.0, 0.0});
  }
  const auto flat = impair::flat_front_end(cfg);
  CHECK(flat.response(1, 5) == cd{1.0, 0.0});
}

TEST_CASE("noise variance and seeding") {
  const RadarConfig cfg;
  const auto f = testing::make_frame(cfg, PlanMode::dfrc, 8, 3, 2);
  impair::ImpairmentSpec spec;
  spec.noise_variance = 0.25;
  const auto a = impair::apply(f.iq, f.plan, spec, cfg, 9);
  const auto b = impair::apply(f.iq, f.plan, spec, cfg, 9);
  CHECK(a == b);
  // Outside the transmit window only noise remains.
  double power = 0;
  std::size_t count = 0;
  for (int i = 0; i < 8; ++i)
    for (int n = 200; n < 1600; ++n, ++count) power += std::norm(a[i * 1600 + n]);
  CHECK(power / count == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("impairment validation and input errors") {
  const RadarConfig cfg;
  const auto f = testing::make_frame(cfg, PlanMode::dfrc, 2, 3, 2);
  auto bad = impair::from_clock(1.01 * impair::max_unambiguous_rho(cfg), 0, cfg);
  CHECK_THROWS_AS(impair::validate(bad, cfg), ConfigError);
  impair::ImpairmentSpec noisy;
  noisy.noise_variance = -1;
  CHECK_THROWS_AS(impair::validate(noisy, cfg), ConfigError);
  impair::ImpairmentSpec wrong_profile;
  wrong_profile.front_end.gain.assign(3, std::vector<cd>(20, 1.0));
  wrong_profile.front_end.channel.assign(3, 1.0);
  CHECK_THROWS_AS(impair::validate(wrong_profile, cfg), ConfigError);
  auto truncated = f.iq;
  truncated.channels.pop_back();
  CHECK_THROWS_AS(impair::apply(truncated, f.plan, {}, cfg, 0), InputError);
  const auto short_plan = testing::make_frame(cfg, PlanMode::dfrc, 1, 3, 2).plan;
  CHECK_THROWS_AS(impair::apply(f.iq, short_plan, {}, cfg, 0), InputError);
}

TEST_CASE("front-end profile switch takes effect at the chosen PRT") {
  const RadarConfig cfg;
  impair::ImpairmentSpec spec;
  spec.front_end = impair::rippled_front_end(cfg, 1.0, 0.2, 1);
  spec.later_front_end = impair::rippled_front_end(cfg, 1.0, 0.2, 2);
  spec.switch_prt = 10;
  CHECK(spec.profile_for(9) == &spec.front_end);
  CHECK(spec.profile_for(10) == &*spec.later_front_end);
}
