// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include "fhjrc/io.hpp"

#include <bit>
#include <cstdio>
#include <map>
#include <sstream>

#include "fhjrc/errors.hpp"

namespace fhjrc::io {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string num(std::int64_t value) { return std::to_string(value); }

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void put_float(std::ostream& out, double v) {
  const std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
  const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                         static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
  out.write(bytes, 4);
}

float get_float(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace

void write_iq(const std::filesystem::path& path, const fhwave::IqFrame& frame) {
  auto out = open_out(path, true);
  out << "FHIQ 1\n"
      << "sample_rate " << num(frame.sample_rate) << "\n"
      << "antennas " << frame.channels.size() << "\n"
      << "prt_length " << frame.prt_length << "\n"
      << "samples " << frame.samples() << "\n"
      << "end\n";
  for (const auto& ch : frame.channels)
    for (cd v : ch) {
      put_float(out, v.real());
      put_float(out, v.imag());
    }
  finish(out, path);
}

fhwave::IqFrame read_iq(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "FHIQ 1") throw FormatError("not an FHIQ 1 file: " + path.string());
  std::map<std::string, std::string> fields;
  for (;;) {
    if (!std::getline(in, line)) throw FormatError("IQ header not terminated by 'end'");
    if (line == "end") break;
    std::istringstream ls(line);
    std::string key, value, extra;
    if (!(ls >> key >> value) || (ls >> extra)) throw FormatError("malformed IQ header line '" + line + "'");
    fields[key] = value;
  }
  auto field = [&](const char* key) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw FormatError(std::string("IQ header missing '") + key + "'");
    return it->second;
  };
  fhwave::IqFrame frame;
  std::size_t antennas = 0, samples = 0;
  try {
    frame.sample_rate = std::stod(field("sample_rate"));
    antennas = std::stoul(field("antennas"));
    frame.prt_length = std::stoi(field("prt_length"));
    samples = std::stoul(field("samples"));
  } catch (const std::logic_error&) {
    throw FormatError("non-numeric IQ header value");
  }
  if (!(frame.sample_rate > 0) || antennas == 0 || frame.prt_length <= 0)
    throw FormatError("IQ header values out of range");
  const std::size_t bytes = antennas * samples * 8;
  std::vector<unsigned char> payload(bytes);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) throw FormatError("IQ payload shorter than the header states");
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after the IQ payload");
  frame.channels.assign(antennas, std::vector<cd>(samples));
  const unsigned char* p = payload.data();
  for (auto& ch : frame.channels)
    for (auto& v : ch) {
      v = cd(get_float(p), get_float(p + 4));
      p += 8;
    }
  return frame;
}

void write_plan(const std::filesystem::path& path, const fhwave::HopPlan& plan, const fhwave::PskGrid& psk,
                const RadarConfig& cfg) {
  auto out = open_out(path, false);
  out << "# plan mode=" << fhwave::to_string(plan.mode()) << " prts=" << plan.prts() << " hops=" << plan.hops()
      << " antennas=" << plan.antennas() << " psk_bits=" << psk.bits_per_symbol() << "\n";
  out << "prt hop antenna sub_band frequency_hz pinned psk_index\n";
  for (int i = 0; i < plan.prts(); ++i)
    for (int h = 0; h < plan.hops(); ++h)
      for (int m = 0; m < plan.antennas(); ++m) {
        const auto& slot = plan.at(i, h, m);
        out << i << ' ' << h << ' ' << m << ' ' << slot.sub_band << ' ' << num(cfg.subband_frequency(slot.sub_band))
            << ' ' << (slot.pinned ? 1 : 0) << ' ' << psk.symbol(i, h, m) << '\n';
      }
  finish(out, path);
}

void write_rdm(const std::filesystem::path& path, const radarrx::RangeDopplerMap& rdm, const RadarConfig& cfg) {
  auto out = open_out(path, true);
  out << "FHRDM 1\n"
      << "channels " << rdm.channels() << "\n"
      << "range_bins " << rdm.range_bins() << "\n"
      << "doppler_bins " << rdm.doppler_bins() << "\n"
      << "first_range_bin " << rdm.first_range_bin() << "\n"
      << "range_bin_m " << num(cfg.range_bin()) << "\n"
      << "doppler_bin_hz " << num(1.0 / (rdm.doppler_bins() * cfg.prt)) << "\n"
      << "end\n";
  for (cd v : rdm.data()) {
    put_float(out, v.real());
    put_float(out, v.imag());
  }
  finish(out, path);
}

// ---------------------------------------------------------------------------

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view config_hash,
                     const std::vector<std::string>& header)
    : path_(path), out_(open_out(path, false)), columns_(header.size()) {
  out_ << "# config_hash=" << config_hash << "\n";
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InputError("CSV row width differs from the header");
  for (std::size_t c = 0; c < cells.size(); ++c) out_ << (c ? "," : "") << cells[c];
  out_ << '\n';
}

void CsvWriter::close() {
  finish(out_, path_);
  out_.close();
}

void write_demod_symbols(const std::filesystem::path& path, const commrx::DemodReport& report, std::string_view hash) {
  CsvWriter csv(path, hash, {"prt", "hop", "antenna", "sub_band", "pilot_offset", "phase", "residual", "symbol", "erased"});
  for (const auto& s : report.symbols)
    csv.row({num(s.prt), num(s.hop), num(s.antenna), num(s.sub_band), num(s.pilot_offset), num(s.phase),
             num(s.residual), num(s.symbol), num(s.erased ? 1 : 0)});
  csv.close();
}

void write_demod_summary(const std::filesystem::path& path, const commrx::DemodReport& report, std::string_view hash) {
  CsvWriter csv(path, hash,
                {"symbols", "fhcs_bits", "psk_bits", "ber", "fhcs_ber", "psk_ber", "ser", "erased_symbols", "cfo_rad_s",
                 "rho", "sampling_step_s", "cfo_ambiguous"});
  const auto& s = report.sync;
  if (report.errors) {
    const auto& e = *report.errors;
    csv.row({num(report.symbols.size()), num(report.fhcs_bits.size()), num(report.psk_bits.size()), num(e.ber()),
             num(e.fhcs_ber()), num(e.psk_ber()), num(e.ser()), num(e.erased_symbols), num(s.cfo), num(s.rho),
             num(s.sampling_step), num(s.ambiguous ? 1 : 0)});
  } else {
    csv.row({num(report.symbols.size()), num(report.fhcs_bits.size()), num(report.psk_bits.size()), "", "", "", "",
             "", num(s.cfo), num(s.rho), num(s.sampling_step), num(s.ambiguous ? 1 : 0)});
  }
  csv.close();
}

void write_detections(const std::filesystem::path& path, const radarrx::CfarResult& cfar, std::string_view hash) {
  CsvWriter csv(path, hash,
                {"doppler_bin", "range_bin", "range_m", "velocity_m_s", "azimuth_deg", "statistic", "threshold"});
  for (const auto& d : cfar.detections)
    csv.row({num(d.doppler_bin), num(d.range_bin), num(d.range), num(d.velocity), num(d.azimuth), num(d.statistic),
             num(d.threshold)});
  csv.close();
}

void write_ber(const std::filesystem::path& path, std::span<const bench::BerPoint> points, std::string_view hash) {
  CsvWriter csv(path, hash,
                {"hop_duration_s", "sub_bands", "psk_bits", "snr_db", "fhcs_bits", "fhcs_ber", "fhcs_ci_low",
                 "fhcs_ci_high", "psk_bits_total", "psk_ber", "psk_ci_low", "psk_ci_high", "ser", "erased_symbols"});
  for (const auto& p : points)
    csv.row({num(p.hop_duration), num(p.sub_bands), num(p.bits_per_symbol), num(p.snr_db), num(p.counts.fhcs_bits),
             num(p.counts.fhcs_ber()), num(p.fhcs_ci.low), num(p.fhcs_ci.high), num(p.counts.psk_bits),
             num(p.counts.psk_ber()), num(p.psk_ci.low), num(p.psk_ci.high), num(p.counts.ser()),
             num(p.counts.erased_symbols)});
  csv.close();
}

void write_ber_plot(const std::filesystem::path& path, std::span<const bench::BerPoint> points, std::string_view hash) {
  CsvWriter csv(path, hash, {"curve", "x", "y", "low", "high"});
  for (const auto& p : points) {
    const std::string tag = "T=" + num(p.hop_duration) + ",psk=" + num(p.bits_per_symbol);
    csv.row({"\"fhcs " + tag + "\"", num(p.snr_db), num(p.counts.fhcs_ber()), num(p.fhcs_ci.low), num(p.fhcs_ci.high)});
    csv.row({"\"psk " + tag + "\"", num(p.snr_db), num(p.counts.psk_ber()), num(p.psk_ci.low), num(p.psk_ci.high)});
  }
  csv.close();
}

void write_radar(const std::filesystem::path& path, const bench::RadarSweepReport& report, std::string_view hash) {
  CsvWriter csv(path, hash,
                {"snr_db", "waveform", "truths", "associated", "false_alarms", "rmse_range_m", "rmse_velocity_m_s",
                 "rmse_azimuth_deg", "paired_pairs", "paired_range_diff", "paired_range_se", "paired_velocity_diff",
                 "paired_velocity_se", "paired_azimuth_diff", "paired_azimuth_se"});
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const auto& p = report.points[i];
    const auto& q = report.paired[i / 2];
    csv.row({num(p.snr_db), fhwave::to_string(p.mode), num(p.truths), num(p.associated), num(p.false_alarms),
             num(p.rmse_range), num(p.rmse_velocity), num(p.rmse_azimuth), num(q.pairs), num(q.range.mean),
             num(q.range.standard_error), num(q.velocity.mean), num(q.velocity.standard_error), num(q.azimuth.mean),
             num(q.azimuth.standard_error)});
  }
  csv.close();
}

void write_methods(const std::filesystem::path& path, std::span<const bench::MethodPoint> points, std::string_view hash) {
  CsvWriter csv(path, hash, {"psk_bits", "method", "symbols", "symbol_errors", "ser", "ser_ci_low", "ser_ci_high",
                             "mean_abs_residual_rad", "erased_symbols"});
  for (const auto& p : points)
    csv.row({num(p.bits_per_symbol), commrx::to_string(p.method), num(p.counts.psk_symbols),
             num(p.counts.psk_symbol_errors), num(p.counts.ser()), num(p.ser_ci.low), num(p.ser_ci.high),
             num(p.mean_abs_residual), num(p.counts.erased_symbols)});
  csv.close();
}

}  // namespace fhjrc::io
