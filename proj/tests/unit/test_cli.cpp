// Copyright 2026 The fhjrc Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifdef FHJRC_CLI_PATH

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "fhjrc_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

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

Outcome run(const std::string& args) {
  const fs::path out = workdir() / "stdout.txt";
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = std::string("\"") + FHJRC_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

std::string dir(const std::string& name) { return "\"" + (workdir() / name).string() + "\""; }

}  // namespace

TEST_CASE("CLI exit codes by error category") {
  const auto cfg = workdir() / "unknown_key.json";
  spit(cfg, R"({"radar": {"sub_bandz": 20}})");
  auto o = run("comm --config \"" + cfg.string() + "\" --out " + dir("e2"));
  CHECK(o.code == 2);
  CHECK(o.err.find("sub_bandz") != std::string::npos);

  CHECK(run("comm --modulation 64qam --out " + dir("e2b")).code == 2);

  const auto anchor = workdir() / "anchor.json";
  spit(anchor, R"({"scene": {"snr_db": -80, "false_alarm_rate": 1e-12, "targets": [{"range": 1500}], "anchor": {"range": 2000, "azimuth": 0}}})");
  CHECK(run("radar --config \"" + anchor.string() + "\" --out " + dir("e3")).code == 3);

  const auto short_payload = workdir() / "short.txt";
  spit(short_payload, "0101\n");
  CHECK(run("txgen --payload \"" + short_payload.string() + "\" --out " + dir("e4")).code == 4);

  const auto bad_payload = workdir() / "bad.txt";
  spit(bad_payload, "01x1\n");
  CHECK(run("txgen --payload \"" + bad_payload.string() + "\" --out " + dir("e5")).code == 5);

  const auto not_iq = workdir() / "not.iq";
  spit(not_iq, "hello\n");
  CHECK(run("comm --input \"" + not_iq.string() + "\" --out " + dir("e5b")).code == 5);

  CHECK(run("comm --input \"" + (workdir() / "missing.iq").string() + "\" --out " + dir("e6")).code == 6);
}

TEST_CASE("txgen writes the frame, plan and payload") {
  const auto o = run("txgen --seed 3 --out " + dir("tx"));
  REQUIRE(o.code == 0);
  const fs::path d = workdir() / "tx";
  CHECK(fs::exists(d / "tx.iq"));
  CHECK(fs::exists(d / "plan.txt"));
  CHECK(fs::exists(d / "payload.txt"));
  CHECK(fs::exists(d / "config.json"));
  const std::string raw = slurp(d / "tx.iq");
  const auto header_end = raw.find("end\n") + 4;
  std::istringstream h(raw.substr(0, header_end));
  std::string line, key;
  std::size_t antennas = 0, samples = 0;
  while (std::getline(h, line)) {
    std::istringstream ls(line);
    ls >> key;
    if (key == "antennas") ls >> antennas;
    if (key == "samples") ls >> samples;
  }
  CHECK(antennas == 2u);
  CHECK(samples % 1600 == 0);
  CHECK(raw.size() - header_end == 8 * antennas * samples);
}

TEST_CASE("comm over an ideal channel decodes without error") {
  const auto o = run("comm --seed 5 --out " + dir("comm"));
  REQUIRE(o.code == 0);
  CHECK(o.out.find(" ber 0 ") != std::string::npos);
  CHECK(o.out.find(" ser 0 ") != std::string::npos);
  CHECK(fs::exists(workdir() / "comm" / "demod.csv"));
  CHECK(fs::exists(workdir() / "comm" / "demod_summary.csv"));
}

TEST_CASE("radar warns about targets in the blind zone") {
  const auto cfg = workdir() / "blind.json";
  spit(cfg, R"({"scene": {"snr_db": -20, "targets": [{"range": 60}, {"range": 2000}]}})");
  const auto o = run("radar --config \"" + cfg.string() + "\" --out " + dir("blind"));
  REQUIRE(o.code == 0);
  CHECK(o.err.find("warning") != std::string::npos);
  CHECK(o.out.find("detections") != std::string::npos);
}

TEST_CASE("reruns with the same seed are byte-identical") {
  REQUIRE(run("txgen --seed 11 --out " + dir("r1")).code == 0);
  REQUIRE(run("txgen --seed 11 --out " + dir("r2")).code == 0);
  CHECK(slurp(workdir() / "r1" / "tx.iq") == slurp(workdir() / "r2" / "tx.iq"));
  CHECK(slurp(workdir() / "r1" / "plan.txt") == slurp(workdir() / "r2" / "plan.txt"));
  REQUIRE(run("txgen --seed 12 --out " + dir("r3")).code == 0);
  CHECK(slurp(workdir() / "r1" / "tx.iq") != slurp(workdir() / "r3" / "tx.iq"));

  REQUIRE(run("comm --seed 4 --snr 5 --out " + dir("c1")).code == 0);
  REQUIRE(run("comm --seed 4 --snr 5 --out " + dir("c2")).code == 0);
  CHECK(slurp(workdir() / "c1" / "demod.csv") == slurp(workdir() / "c2" / "demod.csv"));
  CHECK(slurp(workdir() / "c1" / "rx.iq") == slurp(workdir() / "c2" / "rx.iq"));
}

#endif
