// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fhjrc/errors.hpp"
#include "fhjrc/io.hpp"
#include "helpers.hpp"

using namespace fhjrc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fhjrc_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  out << data;
}

}  // namespace

TEST_CASE("IQ files round-trip at float precision") {
  RadarConfig cfg;
  const auto f = testing::make_frame(cfg, fhwave::PlanMode::dfrc, 3, 3, 4);
  const auto path = scratch("frame.iq");
  io::write_iq(path, f.iq);
  const auto back = io::read_iq(path);
  CHECK(back.sample_rate == f.iq.sample_rate);
  CHECK(back.prt_length == f.iq.prt_length);
  REQUIRE(back.channels.size() == f.iq.channels.size());
  for (std::size_t m = 0; m < back.channels.size(); ++m) {
    REQUIRE(back.channels[m].size() == f.iq.channels[m].size());
    for (std::size_t n = 0; n < back.channels[m].size(); ++n) {
      CHECK(back.channels[m][n].real() == static_cast<float>(f.iq.channels[m][n].real()));
      CHECK(back.channels[m][n].imag() == static_cast<float>(f.iq.channels[m][n].imag()));
    }
  }
  // Header plus 8 bytes per complex sample.
  const std::string raw = slurp(path);
  const auto header_end = raw.find("end\n") + 4;
  CHECK(raw.size() - header_end == 8 * f.iq.samples() * f.iq.channels.size());
}

TEST_CASE("malformed IQ files") {
  RadarConfig cfg;
  const auto f = testing::make_frame(cfg, fhwave::PlanMode::payload, 1, 1, 2);
  const auto good = scratch("good.iq");
  io::write_iq(good, f.iq);
  const std::string raw = slurp(good);
  const auto bad = scratch("bad.iq");

  spit(bad, "FHIQ 2\n" + raw.substr(raw.find('\n') + 1));
  CHECK_THROWS_AS(io::read_iq(bad), FormatError);

  spit(bad, raw.substr(0, raw.find("end\n")));
  CHECK_THROWS_AS(io::read_iq(bad), FormatError);

  spit(bad, raw + "xx");
  CHECK_THROWS_AS(io::read_iq(bad), FormatError);

  spit(bad, raw.substr(0, raw.size() - 3));
  CHECK_THROWS_AS(io::read_iq(bad), FormatError);

  spit(bad, "FHIQ 1\nsample_rate abc\nantennas 1\nprt_length 1600\nsamples 0\nend\n");
  CHECK_THROWS_AS(io::read_iq(bad), FormatError);

  CHECK_THROWS_AS(io::read_iq(scratch("does_not_exist.iq")), IoError);
}

TEST_CASE("CSV writer") {
  const auto path = scratch("table.csv");
  {
    io::CsvWriter w(path, "abc123", {"x", "y"});
    w.row({io::num(1), io::num(0.5)});
    CHECK_THROWS_AS(w.row({"1"}), InputError);
    w.close();
  }
  std::istringstream lines(slurp(path));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "# config_hash=abc123");
  std::getline(lines, line);
  CHECK(line == "x,y");
  std::getline(lines, line);
  CHECK(line == "1,0.5");
  CHECK_THROWS_AS(io::CsvWriter(fs::path("/nonexistent_dir_fhjrc/x.csv"), "h", {"a"}), IoError);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(io::fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(io::fnv1a("foobar") == 0x85944171f73967e8ull);
  CHECK(io::hex(0xabcull).size() == 16u);
}
