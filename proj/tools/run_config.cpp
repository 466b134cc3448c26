// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "fhjrc/commrx.hpp"
#include "fhjrc/errors.hpp"
#include "fhjrc/fhwave.hpp"
#include "fhjrc/impair.hpp"
#include "fhjrc/io.hpp"

namespace fhjrc::cli {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects any key nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + name_ + "." + key + "' has the wrong type");
    }
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    T v{};
    get(key, v);
    out = v;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + name_ + (name_.empty() ? "" : ".") + key + "'");
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

TargetEntry parse_target(const json& j, const std::string& name) {
  Section s(j, name);
  TargetEntry t;
  s.get("range", t.range);
  s.get("velocity", t.velocity);
  s.get("azimuth", t.azimuth);
  s.finish();
  return t;
}

json target_json(const TargetEntry& t) { return {{"range", t.range}, {"velocity", t.velocity}, {"azimuth", t.azimuth}}; }

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section top(j, "");
  top.get("seed", c.seed);

  if (const json* r = top.child("radar")) {
    Section s(*r, "radar");
    s.get("sub_bands", c.radar.sub_bands);
    s.get("tx_antennas", c.radar.tx_antennas);
    s.get("hops", c.radar.hops);
    s.get("hop_duration", c.radar.hop_duration);
    s.get("prt", c.radar.prt);
    s.get("bandwidth", c.radar.bandwidth);
    s.get("sample_rate", c.radar.sample_rate);
    s.get("carrier", c.radar.carrier);
    s.get("prts_per_cpi", c.radar.prts_per_cpi);
    s.finish();
  }
  if (const json* a = top.child("array")) {
    Section s(*a, "array");
    s.get("rx", c.array.rx);
    s.get("tx_spacing", c.array.tx_spacing);
    s.get("rx_spacing", c.array.rx_spacing);
    s.get("phase_error_rad", c.array.phase_error_rad);
    s.get("gain_error_db", c.array.gain_error_db);
    s.finish();
  }
  if (const json* a = top.child("impair")) {
    Section s(*a, "impair");
    s.get("initial_sto", c.impair.initial_sto);
    s.get("rho", c.impair.rho);
    s.get("ripple_db", c.impair.ripple_db);
    s.get("ripple_rad", c.impair.ripple_rad);
    s.get("snr_db", c.impair.snr_db);
    s.finish();
  }
  if (const json* a = top.child("comm")) {
    Section s(*a, "comm");
    s.get("mode", c.comm.mode);
    s.get("psk_bits", c.comm.psk_bits);
    s.get("method", c.comm.method);
    s.get("group_length", c.comm.group_length);
    s.get("prts", c.comm.prts);
    s.get("known_channel", c.comm.known_channel);
    s.finish();
  }
  if (const json* a = top.child("scene")) {
    Section s(*a, "scene");
    s.get("random_targets", c.scene.random.targets);
    s.get("min_range", c.scene.random.min_range);
    s.get("max_range", c.scene.random.max_range);
    s.get("max_speed", c.scene.random.max_speed);
    s.get("max_azimuth", c.scene.random.max_azimuth);
    s.get("snr_db", c.scene.snr_db);
    s.get("waveform", c.scene.waveform);
    s.get("cfar_guard", c.scene.cfar.guard);
    s.get("cfar_training", c.scene.cfar.training);
    s.get("false_alarm_rate", c.scene.cfar.false_alarm_rate);
    s.get("angle_min", c.scene.grid.min_deg);
    s.get("angle_max", c.scene.grid.max_deg);
    s.get("angle_points", c.scene.grid.points);
    if (const json* list = s.child("targets")) {
      if (!list->is_array()) throw ConfigError("scene.targets must be an array");
      for (const auto& t : *list) c.scene.targets.push_back(parse_target(t, "scene.targets[]"));
    }
    if (const json* anchor = s.child("anchor"); anchor && !anchor->is_null())
      c.scene.anchor = parse_target(*anchor, "scene.anchor");
    s.finish();
  }
  if (const json* a = top.child("sweep")) {
    Section s(*a, "sweep");
    s.get("kind", c.sweep.kind);
    s.get("snr_first", c.sweep.snr_first);
    s.get("snr_last", c.sweep.snr_last);
    s.get("snr_step", c.sweep.snr_step);
    s.get("radar_snr", c.sweep.radar_snr);
    s.get("hop_durations", c.sweep.hop_durations);
    s.get("psk_bits", c.sweep.psk_bits);
    s.get("frames", c.sweep.frames);
    s.get("prts_per_frame", c.sweep.prts_per_frame);
    s.get("trials", c.sweep.trials);
    s.get("method_trials", c.sweep.method_trials);
    s.get("method_snr", c.sweep.method_snr);
    s.get("ripple_db", c.sweep.ripple_db);
    s.get("ripple_rad", c.sweep.ripple_rad);
    s.get("threads", c.sweep.threads);
    s.finish();
  }
  top.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  const auto& r = c.radar;
  j["radar"] = {{"sub_bands", r.sub_bands},     {"tx_antennas", r.tx_antennas}, {"hops", r.hops},
                {"hop_duration", r.hop_duration}, {"prt", r.prt},                 {"bandwidth", r.bandwidth},
                {"sample_rate", r.sample_rate},   {"carrier", r.carrier},         {"prts_per_cpi", r.prts_per_cpi}};
  j["array"] = {{"rx", c.array.rx},
                {"tx_spacing", c.array.tx_spacing},
                {"rx_spacing", c.array.rx_spacing},
                {"phase_error_rad", c.array.phase_error_rad},
                {"gain_error_db", c.array.gain_error_db}};
  j["impair"] = {{"initial_sto", c.impair.initial_sto},
                 {"rho", c.impair.rho},
                 {"ripple_db", c.impair.ripple_db},
                 {"ripple_rad", c.impair.ripple_rad},
                 {"snr_db", c.impair.snr_db ? json(*c.impair.snr_db) : json(nullptr)}};
  j["comm"] = {{"mode", c.comm.mode},     {"psk_bits", c.comm.psk_bits}, {"method", c.comm.method},
               {"group_length", c.comm.group_length}, {"prts", c.comm.prts}, {"known_channel", c.comm.known_channel}};
  json targets = json::array();
  for (const auto& t : c.scene.targets) targets.push_back(target_json(t));
  j["scene"] = {{"random_targets", c.scene.random.targets},
                {"min_range", c.scene.random.min_range},
                {"max_range", c.scene.random.max_range},
                {"max_speed", c.scene.random.max_speed},
                {"max_azimuth", c.scene.random.max_azimuth},
                {"snr_db", c.scene.snr_db},
                {"waveform", c.scene.waveform},
                {"cfar_guard", c.scene.cfar.guard},
                {"cfar_training", c.scene.cfar.training},
                {"false_alarm_rate", c.scene.cfar.false_alarm_rate},
                {"angle_min", c.scene.grid.min_deg},
                {"angle_max", c.scene.grid.max_deg},
                {"angle_points", c.scene.grid.points},
                {"targets", targets},
                {"anchor", c.scene.anchor ? target_json(*c.scene.anchor) : json(nullptr)}};
  const auto& s = c.sweep;
  j["sweep"] = {{"kind", s.kind},
                {"snr_first", s.snr_first},
                {"snr_last", s.snr_last},
                {"snr_step", s.snr_step},
                {"radar_snr", s.radar_snr},
                {"hop_durations", s.hop_durations},
                {"psk_bits", s.psk_bits},
                {"frames", s.frames},
                {"prts_per_frame", s.prts_per_frame},
                {"trials", s.trials},
                {"method_trials", s.method_trials},
                {"method_snr", s.method_snr},
                {"ripple_db", s.ripple_db},
                {"ripple_rad", s.ripple_rad},
                {"threads", s.threads}};
  return j;
}

std::string config_hash(const RunConfig& c) { return io::hex(io::fnv1a(to_json(c).dump())); }

void RunConfig::validate() const {
  radar.validate();
  make_array(*this).validate();
  if (array.tx_spacing <= 0 || array.rx_spacing <= 0) throw ConfigError("array spacings must be positive");
  if (array.phase_error_rad < 0 || array.gain_error_db < 0) throw ConfigError("array error bounds must be non-negative");
  if (std::abs(impair.rho) >= impair::max_unambiguous_rho(radar))
    throw ConfigError("impair.rho exceeds the unambiguous CFO range");
  if (impair.ripple_db < 0 || impair.ripple_rad < 0) throw ConfigError("ripple bounds must be non-negative");
  fhwave::plan_mode_from_string(comm.mode);
  if (comm.mode == "traditional") throw ConfigError("comm.mode must be 'dfrc' or 'payload'");
  if (comm.mode == "payload" && !comm.known_channel) throw ConfigError("comm.mode 'payload' requires known_channel");
  commrx::method_from_string(comm.method);
  if (comm.psk_bits < 0 || comm.psk_bits > 16) throw ConfigError("comm.psk_bits must be in [0, 16]");
  if (comm.prts < 2) throw ConfigError("comm.prts must be >= 2");
  if (comm.group_length < 0) throw ConfigError("comm.group_length must be >= 0");
  fhwave::plan_mode_from_string(scene.waveform);
  if (scene.random.targets < 0) throw ConfigError("scene.random_targets must be >= 0");
  if (!(scene.random.min_range < scene.random.max_range)) throw ConfigError("scene range bounds are inverted");
  if (std::abs(scene.random.max_speed) >= radar.max_unambiguous_velocity())
    throw ConfigError("scene.max_speed exceeds the unambiguous velocity");
  if (scene.cfar.guard < 0 || scene.cfar.training < 1) throw ConfigError("CFAR guard >= 0 and training >= 1 required");
  if (!(scene.cfar.false_alarm_rate > 0 && scene.cfar.false_alarm_rate < 1))
    throw ConfigError("false_alarm_rate must be in (0, 1)");
  if (scene.grid.points < 1 || !(scene.grid.min_deg <= scene.grid.max_deg)) throw ConfigError("invalid angle grid");
  for (const auto& t : scene.targets)
    if (std::abs(t.velocity) >= radar.max_unambiguous_velocity()) throw ConfigError("target velocity is ambiguous");
  if (sweep.kind != "ber" && sweep.kind != "radar" && sweep.kind != "methods" && sweep.kind != "all")
    throw ConfigError("sweep.kind must be ber, radar, methods or all");
  if (!(sweep.snr_step > 0) || sweep.snr_last < sweep.snr_first) throw ConfigError("invalid sweep SNR grid");
  if (sweep.frames < 1 || sweep.prts_per_frame < 1 || sweep.trials < 1 || sweep.method_trials < 1 || sweep.threads < 1)
    throw ConfigError("sweep counts must be positive");
  for (int b : sweep.psk_bits)
    if (b < 1 || b > 16) throw ConfigError("sweep.psk_bits entries must be in [1, 16]");
  for (double t : sweep.hop_durations) bench::config_for_hop_duration(radar, t);
}

radarrx::ArrayModel make_array(const RunConfig& c) {
  radarrx::ArrayModel a;
  a.tx = c.radar.tx_antennas;
  a.rx = c.array.rx;
  a.tx_spacing = c.array.tx_spacing;
  a.rx_spacing = c.array.rx_spacing;
  if (c.array.phase_error_rad > 0 || c.array.gain_error_db > 0) {
    std::mt19937_64 rng(dsp::mix_seed(c.seed, 0xa77a));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto draw = [&] {
      return std::polar(std::pow(10.0, c.array.gain_error_db * u(rng) / 20.0), c.array.phase_error_rad * u(rng));
    };
    for (int m = 0; m < a.tx; ++m) a.tx_error.push_back(draw());
    for (int n = 0; n < a.rx; ++n) a.rx_error.push_back(draw());
  }
  return a;
}

}  // namespace fhjrc::cli
