// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

// fhjrc: waveform generation, communication demodulation, radar processing
// and Monte-Carlo sweeps for frequency-hopping MIMO radar-communications.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fhjrc/bench.hpp"
#include "fhjrc/commrx.hpp"
#include "fhjrc/errors.hpp"
#include "fhjrc/fhwave.hpp"
#include "fhjrc/impair.hpp"
#include "fhjrc/io.hpp"
#include "fhjrc/radarrx.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace fhjrc;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<double> snr;
  std::string modulation;
  std::optional<int> trials;
  std::string payload;  // txgen
  std::string input;    // comm
};

int parse_modulation(const std::string& name) {
  if (name == "fhcs") return 0;
  if (name == "bpsk") return 1;
  if (name == "qpsk") return 2;
  if (name == "8psk") return 3;
  if (name == "16psk") return 4;
  try {
    std::size_t used = 0;
    const int bits = std::stoi(name, &used);
    if (used == name.size() && bits >= 0 && bits <= 16) return bits;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("unknown modulation '" + name + "' (fhcs, bpsk, qpsk, 8psk, 16psk or a bit count)");
}

cli::RunConfig effective_config(const Overrides& o, const std::string& command) {
  cli::RunConfig c = o.config.empty() ? cli::parse_config(nlohmann::json::object()) : cli::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.snr) {
    c.impair.snr_db = *o.snr;
    c.scene.snr_db = *o.snr;
    if (command == "sweep") {
      c.sweep.snr_first = c.sweep.snr_last = *o.snr;
      c.sweep.method_snr = *o.snr;
    }
  }
  if (!o.modulation.empty()) {
    const int bits = parse_modulation(o.modulation);
    c.comm.psk_bits = bits;
    if (command == "sweep") {
      if (bits < 1) throw ConfigError("sweeps need a PSK modulation");
      c.sweep.psk_bits = {bits};
    }
  }
  if (o.trials) {
    c.sweep.trials = *o.trials;
    c.sweep.method_trials = *o.trials;
  }
  c.validate();
  return c;
}

fs::path prepare_output(const Overrides& o, const cli::RunConfig& c) {
  const fs::path out(o.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());
  std::ofstream cfg(out / "config.json");
  cfg << cli::to_json(c).dump(2) << "\n";
  if (!cfg) throw IoError("cannot write " + (out / "config.json").string());
  return out;
}

std::vector<std::uint8_t> read_bits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open payload '" + path + "'");
  std::vector<std::uint8_t> bits;
  char ch;
  while (in.get(ch)) {
    if (ch == '0' || ch == '1') bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    else if (!std::isspace(static_cast<unsigned char>(ch))) throw FormatError("payload file may only contain 0, 1 and whitespace");
  }
  return bits;
}

struct Transmission {
  fhwave::HopPlan plan;
  fhwave::PskGrid psk;
  fhwave::IqFrame frame;
  std::vector<std::uint8_t> bits;  // FHCS bits then PSK bits, as consumed
};

Transmission transmit(const RadarConfig& cfg, fhwave::PlanMode mode, int prts, int psk_bits, std::uint64_t seed,
                      const std::vector<std::uint8_t>* payload) {
  std::size_t fhcs_count = 0, slots = 0;
  for (int i = 0; i < prts; ++i) {
    fhcs_count += fhwave::fhcs_bits_per_prt(i, cfg, mode);
    slots += fhwave::psk_slots_per_prt(i, cfg, mode);
  }
  const std::size_t need = fhcs_count + slots * psk_bits;
  std::vector<std::uint8_t> bits = payload ? *payload : fhwave::random_bits(need, dsp::mix_seed(seed, 0xb175));
  if (bits.size() < need)
    throw InputError("payload has " + std::to_string(bits.size()) + " bits, the frame needs " + std::to_string(need));
  bits.resize(need);
  Transmission t;
  fhwave::BitSource fhcs(std::span<const std::uint8_t>(bits).first(fhcs_count));
  fhwave::BitSource psk(std::span<const std::uint8_t>(bits).subspan(fhcs_count));
  t.plan = fhwave::plan_hops(cfg, mode, prts, fhcs, dsp::mix_seed(seed, 0x91a2));
  t.psk = fhwave::assign_psk(t.plan, psk_bits, psk);
  t.frame = fhwave::synthesize(t.plan, t.psk, cfg);
  t.bits = std::move(bits);
  return t;
}

void write_bits(const fs::path& path, const std::vector<std::uint8_t>& bits) {
  std::ofstream out(path);
  for (std::size_t i = 0; i < bits.size(); ++i) out << static_cast<char>('0' + bits[i]) << ((i + 1) % 64 ? "" : "\n");
  out << "\n";
  if (!out) throw IoError("cannot write " + path.string());
}

impair::ImpairmentSpec impairment(const cli::RunConfig& c) {
  auto spec = impair::from_clock(c.impair.rho, c.impair.initial_sto, c.radar);
  if (c.impair.ripple_db > 0 || c.impair.ripple_rad > 0)
    spec.front_end = impair::rippled_front_end(c.radar, c.impair.ripple_db, c.impair.ripple_rad,
                                               dsp::mix_seed(c.seed, 0xfe), true);
  if (c.impair.snr_db) spec.noise_variance = std::pow(10.0, -*c.impair.snr_db / 10.0);
  return spec;
}

// ---------------------------------------------------------------------------

void cmd_txgen(const Overrides& o) {
  const auto c = effective_config(o, "txgen");
  const fs::path out = prepare_output(o, c);
  std::optional<std::vector<std::uint8_t>> payload;
  if (!o.payload.empty()) payload = read_bits(o.payload);
  const auto mode = fhwave::plan_mode_from_string(c.comm.mode);
  const auto t = transmit(c.radar, mode, c.comm.prts, c.comm.psk_bits, c.seed, payload ? &*payload : nullptr);
  io::write_iq(out / "tx.iq", t.frame);
  io::write_plan(out / "plan.txt", t.plan, t.psk, c.radar);
  write_bits(out / "payload.txt", t.bits);
  std::cout << "wrote " << t.frame.channels.size() << " antennas x " << t.frame.samples() << " samples to "
            << (out / "tx.iq").string() << "\n";
}

void cmd_comm(const Overrides& o) {
  const auto c = effective_config(o, "comm");
  const fs::path out = prepare_output(o, c);
  const std::string hash = cli::config_hash(c);
  commrx::RxOptions opt;
  opt.mode = fhwave::plan_mode_from_string(c.comm.mode);
  opt.bits_per_symbol = c.comm.psk_bits;
  opt.method = commrx::method_from_string(c.comm.method);
  opt.group_length = c.comm.group_length;

  commrx::DemodReport report;
  if (!o.input.empty()) {
    if (c.comm.known_channel) throw ConfigError("known_channel needs a simulated channel, not an input file");
    const auto rx = io::read_iq(o.input);
    if (rx.channels.size() != 1) throw FormatError("received IQ file must hold a single stream");
    if (rx.prt_length != c.radar.samples_per_prt()) throw FormatError("IQ prt_length disagrees with the radar config");
    report = commrx::demodulate(rx.channels[0], rx.prts(), c.radar, opt);
  } else {
    const auto t = transmit(c.radar, opt.mode, c.comm.prts, c.comm.psk_bits, c.seed, nullptr);
    const auto spec = impairment(c);
    fhwave::IqFrame rx;
    rx.sample_rate = c.radar.sample_rate;
    rx.prt_length = c.radar.samples_per_prt();
    rx.channels.push_back(impair::apply(t.frame, t.plan, spec, c.radar, dsp::mix_seed(c.seed, 0x5eed)));
    io::write_iq(out / "rx.iq", rx);
    if (c.comm.known_channel) opt.known_channel = spec;
    report = commrx::demodulate(rx.channels[0], c.comm.prts, c.radar, opt);
    commrx::score(report, t.plan, t.psk, c.radar);
  }
  io::write_demod_symbols(out / "demod.csv", report, hash);
  io::write_demod_summary(out / "demod_summary.csv", report, hash);
  if (report.sync.ambiguous) std::cerr << "warning: pilot phase steps near pi, CFO estimate may be aliased\n";
  std::cout << "symbols " << report.symbols.size();
  if (report.errors) std::cout << " ber " << report.errors->ber() << " ser " << report.errors->ser();
  std::cout << " cfo_rad_s " << report.sync.cfo << "\n";
}

std::vector<radarrx::Target> scene_targets(const cli::RunConfig& c) {
  if (c.scene.targets.empty()) return bench::random_scene(c.scene.random, dsp::mix_seed(c.seed, 0x5ce));
  std::vector<radarrx::Target> scene;
  for (const auto& t : c.scene.targets) scene.push_back({t.range, t.velocity, t.azimuth, {1.0, 0.0}});
  return scene;
}

void cmd_radar(const Overrides& o) {
  const auto c = effective_config(o, "radar");
  const fs::path out = prepare_output(o, c);
  const std::string hash = cli::config_hash(c);
  const auto array = cli::make_array(c);
  const auto mode = fhwave::plan_mode_from_string(c.scene.waveform);
  const auto t = transmit(c.radar, mode, c.radar.prts_per_cpi, 3, c.seed, nullptr);
  const double variance = std::pow(10.0, -c.scene.snr_db / 10.0);

  radarrx::RadarOptions options;
  options.cfar = c.scene.cfar;
  options.grid = c.scene.grid;
  if (c.scene.anchor) {
    const radarrx::Target anchor{c.scene.anchor->range, 0.0, c.scene.anchor->azimuth, {1.0, 0.0}};
    auto rx = radarrx::synthesize_echo(t.frame, std::span(&anchor, 1), array, c.radar);
    radarrx::add_receiver_noise(rx, variance, dsp::mix_seed(c.seed, 0xa2c), c.radar);
    const auto result = radarrx::process(rx, t.frame, array, c.radar, options);
    if (result.cfar.detections.empty()) throw DomainError("calibration anchor was not detected");
    const auto best = std::max_element(result.cfar.detections.begin(), result.cfar.detections.end(),
                                       [](const auto& a, const auto& b) { return a.statistic < b.statistic; });
    options.calibration = radarrx::calibrate(best->snapshot, anchor.azimuth, array);
  }

  const auto scene = scene_targets(c);
  auto rx = radarrx::synthesize_echo(t.frame, scene, array, c.radar);
  for (const auto& w : rx.warnings) std::cerr << "warning: " << w << "\n";
  radarrx::add_receiver_noise(rx, variance, dsp::mix_seed(c.seed, 0x401e), c.radar);
  const auto result = radarrx::process(rx, t.frame, array, c.radar, options);
  io::write_detections(out / "detections.csv", result.cfar, hash);
  io::write_rdm(out / "rdm.bin", result.rdm, c.radar);

  const auto assoc = bench::associate(result.cfar.detections, scene, bench::Gate{}, c.radar);
  io::CsvWriter truth(out / "truth.csv", hash, {"target", "range_m", "velocity_m_s", "azimuth_deg", "detected"});
  std::vector<bool> found(scene.size(), false);
  for (const auto& m : assoc.matched) found[m.target] = true;
  for (std::size_t q = 0; q < scene.size(); ++q)
    truth.row({io::num(q), io::num(scene[q].range), io::num(scene[q].velocity), io::num(scene[q].azimuth),
               io::num(found[q] ? 1 : 0)});
  truth.close();
  const double rate = scene.empty() ? 0.0 : static_cast<double>(assoc.matched.size()) / scene.size();
  io::CsvWriter summary(out / "radar_summary.csv", hash,
                        {"targets", "detections", "associated", "false_alarms", "detection_rate", "cfar_exceedances"});
  summary.row({io::num(scene.size()), io::num(result.cfar.detections.size()), io::num(assoc.matched.size()),
               io::num(assoc.false_alarms), io::num(rate), io::num(result.cfar.exceedances)});
  summary.close();
  std::cout << "detections " << result.cfar.detections.size() << " detection_rate " << rate << "\n";
}

void cmd_sweep(const Overrides& o) {
  const auto c = effective_config(o, "sweep");
  const fs::path out = prepare_output(o, c);
  const std::string hash = cli::config_hash(c);
  const auto& s = c.sweep;

  io::CsvWriter rates(out / "rates.csv", hash, {"psk_bits", "nominal_bps", "effective_bps"});
  for (int x = 0; x <= 4; ++x) {
    const auto r = bench::data_rate(x, c.radar);
    rates.row({io::num(x), io::num(r.nominal), io::num(r.effective)});
  }
  rates.close();

  if (s.kind == "ber" || s.kind == "all") {
    bench::BerSweepSpec spec;
    spec.base = c.radar;
    spec.snr_db = bench::snr_grid(s.snr_first, s.snr_last, s.snr_step);
    spec.psk_bits = s.psk_bits;
    spec.hop_durations = s.hop_durations;
    spec.frames = s.frames;
    spec.prts_per_frame = s.prts_per_frame;
    spec.seed = c.seed;
    spec.threads = s.threads;
    const auto points = bench::run_ber_sweep(spec);
    io::write_ber(out / "ber.csv", points, hash);
    io::write_ber_plot(out / "ber_plot.csv", points, hash);
  }
  if (s.kind == "radar" || s.kind == "all") {
    bench::RadarSweepSpec spec;
    spec.cfg = c.radar;
    spec.array = cli::make_array(c);
    spec.scene = c.scene.random;
    spec.cfar = c.scene.cfar;
    spec.grid = c.scene.grid;
    spec.snr_db = s.radar_snr;
    spec.trials = s.trials;
    spec.seed = c.seed;
    spec.threads = s.threads;
    io::write_radar(out / "radar.csv", bench::run_radar_sweep(spec), hash);
  }
  if (s.kind == "methods" || s.kind == "all") {
    bench::MethodSpec spec;
    spec.cfg = c.radar;
    spec.snr_db = s.method_snr;
    spec.psk_bits = s.psk_bits;
    spec.ripple_db = s.ripple_db;
    spec.ripple_rad = s.ripple_rad;
    spec.trials = s.method_trials;
    spec.seed = c.seed;
    spec.threads = s.threads;
    io::write_methods(out / "methods.csv", bench::run_method_comparison(spec), hash);
  }
  std::cout << "sweep '" << s.kind << "' written to " << out.string() << "\n";
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::domain: return 3;
    case ErrorCategory::input: return 4;
    case ErrorCategory::format: return 5;
    case ErrorCategory::io: return 6;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-hopping MIMO radar-communications simulator"};
  app.require_subcommand(1);
  Overrides o;
  std::uint64_t seed = 0;
  double snr = 0;
  int trials = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Seed for all randomness");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--snr", snr, "SNR override in dB");
    sub->add_option("--modulation", o.modulation, "fhcs, bpsk, qpsk, 8psk, 16psk or PSK bit count");
    sub->add_option("--trials", trials, "Monte-Carlo trial override");
  };
  auto* txgen = app.add_subcommand("txgen", "Generate transmit frames and the ground-truth plan");
  add_common(txgen);
  txgen->add_option("--payload", o.payload, "Text file of 0/1 payload bits (FHCS first, then PSK)");
  auto* comm = app.add_subcommand("comm", "Run the communication receiver end to end");
  add_common(comm);
  comm->add_option("--input", o.input, "Received single-stream IQ file instead of a simulated channel");
  auto* radar = app.add_subcommand("radar", "Run the radar chain on a target scene");
  add_common(radar);
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo BER, radar RMSE and method sweeps");
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* active = app.get_subcommands().front();
  if (active->count("--seed")) o.seed = seed;
  if (active->count("--snr")) o.snr = snr;
  if (active->count("--trials")) o.trials = trials;

  try {
    if (active == txgen) cmd_txgen(o);
    else if (active == comm) cmd_comm(o);
    else if (active == radar) cmd_radar(o);
    else cmd_sweep(o);
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
