// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   fhjrc_acceptance <cli-binary> <unit-test-binary>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fhjrc/bench.hpp"
#include "fhjrc/commrx.hpp"
#include "fhjrc/config.hpp"
#include "fhjrc/fhwave.hpp"
#include "fhjrc/impair.hpp"
#include "fhjrc/radarrx.hpp"

using namespace fhjrc;
using fhwave::PlanMode;
namespace fs = std::filesystem;

namespace {

std::string cli_path;
std::string unit_path;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

struct Frame {
  fhwave::HopPlan plan;
  fhwave::PskGrid psk;
  fhwave::IqFrame iq;
};

Frame make_frame(const RadarConfig& cfg, PlanMode mode, int prts, int psk_bits, std::uint64_t seed) {
  std::size_t fhcs = 0, slots = 0;
  for (int i = 0; i < prts; ++i) {
    fhcs += fhwave::fhcs_bits_per_prt(i, cfg, mode);
    slots += fhwave::psk_slots_per_prt(i, cfg, mode);
  }
  const auto a = fhwave::random_bits(fhcs, dsp::mix_seed(seed, 1));
  const auto b = fhwave::random_bits(slots * psk_bits, dsp::mix_seed(seed, 2));
  fhwave::BitSource sa(a), sb(b);
  Frame f;
  f.plan = fhwave::plan_hops(cfg, mode, prts, sa, dsp::mix_seed(seed, 3));
  f.psk = fhwave::assign_psk(f.plan, psk_bits, sb);
  f.iq = fhwave::synthesize(f.plan, f.psk, cfg);
  return f;
}

commrx::DemodReport receive(const Frame& f, const impair::ImpairmentSpec& spec, const RadarConfig& cfg,
                            std::uint64_t seed) {
  const auto rx = impair::apply(f.iq, f.plan, spec, cfg, seed);
  commrx::RxOptions opt;
  opt.mode = PlanMode::dfrc;
  opt.bits_per_symbol = f.psk.bits_per_symbol();
  auto report = commrx::demodulate(rx, f.plan.prts(), cfg, opt);
  commrx::score(report, f.plan, f.psk, cfg);
  return report;
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool near_rel(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

// ---------------------------------------------------------------------------

Verdict parameters() {
  Verdict v;
  const RadarConfig cfg;
  v.require(cfg.samples_per_prt() == 1600, "N_p");
  v.require(cfg.samples_per_hop() == 40, "N_h");
  v.require(cfg.subband_frequency(0) == -10e6, "lowest sub-band");
  v.require(cfg.subband_frequency(cfg.sub_bands - 1) == 9e6, "highest sub-band");
  for (int k = 1; k < cfg.sub_bands; ++k)
    v.require(cfg.subband_frequency(k) - cfg.subband_frequency(k - 1) == 1e6, "1 MHz spacing");
  v.require(near_rel(cfg.blind_zone(), 750.0, 1e-12), "blind zone");
  v.require(radarrx::default_array(cfg).channels() == 24, "virtual channels");
  v.detail << " N_p=" << cfg.samples_per_prt() << " N_h=" << cfg.samples_per_hop() << " sub-bands "
           << cfg.subband_frequency(0) / 1e6 << ".." << cfg.subband_frequency(cfg.sub_bands - 1) / 1e6
           << " MHz blind zone " << cfg.blind_zone() << " m channels " << radarrx::default_array(cfg).channels();
  return v;
}

Verdict data_rates() {
  Verdict v;
  const RadarConfig cfg;
  const double want[] = {1.125e6, 1.375e6, 1.625e6, 1.875e6};
  for (int x = 1; x <= 4; ++x) {
    const double r = bench::data_rate(x, cfg).nominal;
    v.require(near_rel(r, want[x - 1], 1e-12), "x=" + std::to_string(x));
    v.detail << " " << r / 1e6;
  }
  v.detail << " Mbps";
  return v;
}

Verdict identity_channel() {
  Verdict v;
  const RadarConfig cfg;
  const impair::ImpairmentSpec identity;
  std::size_t hops = 0;
  double fhcs_errors = 0;
  for (int bits : {3, 4}) {
    std::size_t symbols = 0;
    double errors = 0;
    for (int frame = 0; frame < 20; ++frame) {
      const auto f = make_frame(cfg, PlanMode::dfrc, 1000, bits, dsp::mix_seed(1000 + bits, frame));
      const auto r = receive(f, identity, cfg, 0);
      symbols += r.errors->psk_symbols;
      errors += r.errors->psk_bit_errors;
      fhcs_errors += r.errors->fhcs_bit_errors;
      hops += r.hops.size();
    }
    v.require(symbols >= 100000, std::to_string(1 << bits) + "PSK symbol count");
    v.require(errors == 0, std::to_string(1 << bits) + "PSK errors");
    v.detail << " " << (1 << bits) << "PSK " << symbols << " symbols " << errors << " bit errors;";
  }
  v.require(hops >= 100000, "FHCS hop count");
  v.require(fhcs_errors == 0, "FHCS errors");
  v.detail << " FHCS " << hops << " hops " << fhcs_errors << " bit errors";
  return v;
}

Verdict estimator_accuracy() {
  Verdict v;
  const RadarConfig cfg;
  const double rho_max = impair::max_unambiguous_rho(cfg);
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst_cfo = 0, worst_rho = 0, worst_step = 0;
  for (int draw = 0; draw < 100; ++draw) {
    const double rho = 0.95 * rho_max * unit(rng);
    const double dt0 = 0.5 / cfg.sample_rate * unit(rng);
    auto spec = impair::from_clock(rho, dt0, cfg);
    spec.front_end = impair::rippled_front_end(cfg, 1.0, 0.2, dsp::mix_seed(77, draw));
    const auto f = make_frame(cfg, PlanMode::dfrc, 32, 3, dsp::mix_seed(88, draw));
    const auto r = receive(f, spec, cfg, 0);
    worst_cfo = std::max(worst_cfo, std::abs(r.sync.cfo - spec.cfo) / std::abs(spec.cfo));
    worst_rho = std::max(worst_rho, std::abs(r.sync.rho - rho) / std::abs(rho));
    worst_step = std::max(worst_step, std::abs(r.sync.sampling_step - spec.sampling_step) / std::abs(spec.sampling_step));
  }
  v.require(worst_cfo <= 1e-4, "CFO");
  v.require(worst_rho <= 1e-4, "clock offset");
  v.require(worst_step <= 1e-2, "sampling step");
  v.detail << " worst relative errors over 100 draws: CFO " << worst_cfo << " rho " << worst_rho << " step "
           << worst_step;
  return v;
}

Verdict ber_shape() {
  Verdict v;
  bench::BerSweepSpec spec;
  spec.snr_db = bench::snr_grid(-10, 20, 2);
  spec.psk_bits = {3, 4};
  spec.hop_durations = {0.5e-6, 1e-6};
  spec.frames = 20;
  spec.prts_per_frame = 50;
  spec.seed = 2024;
  const auto points = bench::run_ber_sweep(spec);
  const std::size_t n_snr = spec.snr_db.size();
  auto at = [&](std::size_t hop, std::size_t mod, std::size_t s) -> const bench::BerPoint& {
    return points[(hop * spec.psk_bits.size() + mod) * n_snr + s];
  };

  std::size_t fewest = SIZE_MAX;
  for (const auto& p : points) fewest = std::min(fewest, p.counts.psk_symbols);
  v.require(fewest >= 10000, "symbols per point");
  v.detail << " min symbols/point " << fewest << ";";

  // (a) FHCS never worse than PSK.
  int fails_a = 0;
  std::ostringstream a_detail;
  for (const auto& p : points)
    if (p.counts.fhcs_ber() > p.counts.psk_ber()) {
      ++fails_a;
      a_detail << " " << p.hop_duration * 1e6 << "us/" << (1 << p.bits_per_symbol) << "PSK@" << p.snr_db << "dB "
               << p.counts.fhcs_ber() << ">" << p.counts.psk_ber();
    }
  v.require(fails_a == 0, "(a) FHCS BER above PSK BER at " + std::to_string(fails_a) + " points:" + a_detail.str());

  // (b) longer hops strictly better wherever the BER is in the resolvable range.
  int checked_b = 0, fails_b = 0;
  std::ostringstream b_detail;
  auto resolvable = [](double ber) { return ber >= 1e-4 && ber <= 0.3; };
  for (std::size_t j = 0; j < spec.psk_bits.size(); ++j)
    for (std::size_t s = 0; s < n_snr; ++s) {
      const auto& shorter = at(0, j, s);
      const auto& longer = at(1, j, s);
      const std::pair<double, double> curves[] = {{shorter.counts.fhcs_ber(), longer.counts.fhcs_ber()},
                                                  {shorter.counts.psk_ber(), longer.counts.psk_ber()}};
      for (const auto& [b_short, b_long] : curves) {
        if (!resolvable(b_short) && !resolvable(b_long)) continue;
        ++checked_b;
        if (!(b_long < b_short)) {
          ++fails_b;
          b_detail << " " << (1 << spec.psk_bits[j]) << "PSK@" << spec.snr_db[s] << "dB " << b_long << ">=" << b_short;
        }
      }
    }
  v.require(fails_b == 0, "(b) hop doubling not better at " + std::to_string(fails_b) + " points:" + b_detail.str());
  v.detail << " (b) checked " << checked_b << " pairs;";

  // (c) FHCS curves from the two modulation runs agree within their intervals.
  int fails_c = 0;
  for (std::size_t h = 0; h < spec.hop_durations.size(); ++h)
    for (std::size_t s = 0; s < n_snr; ++s) {
      const auto& x = at(h, 0, s);
      const auto& y = at(h, 1, s);
      if (x.fhcs_ci.high < y.fhcs_ci.low || y.fhcs_ci.high < x.fhcs_ci.low) ++fails_c;
    }
  v.require(fails_c == 0, "(c) FHCS curves disagree at " + std::to_string(fails_c) + " points");

  v.detail << " 1us 8PSK FHCS/PSK BER at -10,0,10 dB:";
  for (double snr : {-10.0, 0.0, 10.0}) {
    const auto s = static_cast<std::size_t>((snr + 10) / 2);
    v.detail << " " << at(1, 0, s).counts.fhcs_ber() << "/" << at(1, 0, s).counts.psk_ber();
  }
  return v;
}

Verdict method_contrast() {
  Verdict v;
  bench::MethodSpec spec;
  spec.snr_db = 20.0;
  spec.psk_bits = {4};
  spec.ripple_db = 1.0;
  spec.ripple_rad = 0.2;
  spec.trials = 20;
  spec.seed = 606;
  const auto points = bench::run_method_comparison(spec);
  double flat = 0, proposed = 0, averaged = 0;
  for (const auto& p : points) {
    if (p.method == commrx::Method::flat_gain) flat = p.counts.ser();
    if (p.method == commrx::Method::proposed) proposed = p.counts.ser();
    if (p.method == commrx::Method::averaged) averaged = p.counts.ser();
  }
  v.require(flat > 0 && flat >= 5 * proposed, "flat-gain SER not 5x the proposed SER");
  v.require(averaged <= proposed, "averaging raised the SER");
  v.detail << " 16PSK SER flat " << flat << " proposed " << proposed << " averaged " << averaged << " over "
           << points.front().counts.psk_symbols << " symbols";
  return v;
}

Verdict waveform_equivalence() {
  Verdict v;
  bench::RadarSweepSpec spec;
  spec.cfg = RadarConfig{};
  spec.array = radarrx::default_array(spec.cfg);
  spec.scene.targets = 10;
  spec.trials = 30;
  spec.snr_db = {-40, -37, -34, -31, -28};
  spec.seed = 4;
  const auto report = bench::run_radar_sweep(spec);
  const auto floors = bench::quantization_floors(spec.cfg, spec.grid);

  for (const auto& pp : report.paired) {
    for (const auto* d : {&pp.range, &pp.velocity, &pp.azimuth})
      if (std::abs(d->mean) > 2 * d->standard_error)
        v.require(false, "paired difference beyond 2 SE at " + std::to_string(pp.snr_db) + " dB");
  }
  for (auto mode : {PlanMode::traditional, PlanMode::dfrc}) {
    std::vector<bench::RadarPoint> curve;
    for (const auto& p : report.points)
      if (p.mode == mode) curve.push_back(p);
    const std::string name = fhwave::to_string(mode);
    auto check = [&](const char* what, auto get, double floor) {
      for (std::size_t s = 0; s + 1 < curve.size(); ++s) {
        const double a = get(curve[s]), b = get(curve[s + 1]);
        const bool at_floor = std::abs(a / floor - 1) <= 0.2 && std::abs(b / floor - 1) <= 0.2;
        if (!(b <= a) && !at_floor) v.require(false, name + " " + what + " RMSE rises");
      }
      const double last = get(curve.back());
      if (std::abs(last / floor - 1) > 0.2) v.require(false, name + " " + what + " RMSE off the floor");
    };
    check("range", [](const bench::RadarPoint& p) { return p.rmse_range; }, floors.range);
    check("velocity", [](const bench::RadarPoint& p) { return p.rmse_velocity; }, floors.velocity);
    check("azimuth", [](const bench::RadarPoint& p) { return p.rmse_azimuth; }, floors.azimuth);
  }
  v.detail << " floors " << floors.range << " m " << floors.velocity << " m/s " << floors.azimuth << " deg;";
  for (const auto& p : report.points)
    v.detail << " " << fhwave::to_string(p.mode) << "@" << p.snr_db << "dB " << p.associated << "/" << p.truths << " "
             << p.rmse_range << "/" << p.rmse_velocity << "/" << p.rmse_azimuth << ";";
  for (const auto& pp : report.paired)
    v.detail << " diff@" << pp.snr_db << " range " << pp.range.mean << "+-" << pp.range.standard_error << " vel "
             << pp.velocity.mean << "+-" << pp.velocity.standard_error << " az " << pp.azimuth.mean << "+-"
             << pp.azimuth.standard_error << ";";
  return v;
}

Verdict property_suites() {
  Verdict v;
  const std::string cases =
      "hop tones are orthogonal across antennas*,"
      "FHCS bits survive plan generation and extraction*,"
      "pilot ratio holds across PRTs for a fixed front end and breaks when it changes,"
      "averaging more pilot pairs lowers the CFO estimate variance,"
      "CFAR false-alarm rate matches nominal on noise-only maps,"
      "linear correlation against brute force*,"
      "matched filter energy on a single clean echo";
  const std::string cmd = "\"" + unit_path + "\" --test-case=\"" + cases + "\" --no-intro --minimal 1>&2";
  const int code = shell(cmd);
  v.require(code == 0, "unit property cases exit code " + std::to_string(code));
  v.detail << " orthogonality, FHCS round trip, pilot-ratio equality/inequality, CFO averaging variance, CFAR false "
              "alarms, correlation energy";
  return v;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "fhjrc_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path sweep_cfg = root / "sweep.json";
  std::ofstream(sweep_cfg) << R"({"sweep": {"kind": "all", "snr_first": 0, "snr_last": 4, "snr_step": 4,
    "frames": 2, "prts_per_frame": 20, "radar_snr": [-30], "trials": 1, "method_trials": 1, "threads": 2},
    "scene": {"random_targets": 3}})";
  const std::vector<std::string> commands = {
      "txgen --seed 7",
      "comm --seed 7 --snr 10",
      "radar --seed 7 --snr -30",
      "sweep --seed 7 --config \"" + sweep_cfg.string() + "\"",
  };
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = root / (std::to_string(c) + "_" + std::to_string(rep));
      const std::string cmd = "\"" + cli_path + "\" " + commands[c] + " --out \"" + out.string() + "\" >\"" +
                              (root / "log.txt").string() + "\" 2>&1";
      const int code = shell(cmd);
      v.require(code == 0, commands[c] + " exit " + std::to_string(code));
      dirs.push_back(out);
    }
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      ++files;
      const auto other = dirs[1] / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other))
        v.require(false, commands[c] + " differs in " + entry.path().filename().string());
    }
    v.require(files > 1, commands[c] + " wrote no outputs");
    v.detail << " " << commands[c].substr(0, commands[c].find(' ')) << ":" << files << " files";
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: fhjrc_acceptance <cli-binary> <unit-test-binary>\n";
    return 2;
  }
  cli_path = argv[1];
  unit_path = argv[2];
  std::cout << std::setprecision(4);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"parameter fidelity", parameters},
      {"nominal data rates", data_rates},
      {"identity channel is error free", identity_channel},
      {"noiseless estimator accuracy", estimator_accuracy},
      {"BER curve shape", ber_shape},
      {"front-end ripple method contrast", method_contrast},
      {"waveform equivalence for sensing", waveform_equivalence},
      {"property suites", property_suites},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " exception: " << e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " (" << std::fixed
              << std::setprecision(1) << seconds << " s)" << std::defaultfloat << std::setprecision(4) << ":"
              << v.detail.str() << std::endl;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/" << criteria.size() << "\n";
  return failures ? 1 : 0;
}
