/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// stdout only; stderr is folded in when `merge` is set.
Run run(const std::string& args, bool merge = false) {
  const std::string cmd = std::string(ORBITPOOL_CLI_PATH) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t fields(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

// Smoothed noise written as an 8-bit binary PGM.
void write_texture(const fs::path& path, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<double> raw(static_cast<std::size_t>(n) * n);
  for (double& x : raw) x = (rng() >> 8) * (1.0 / 16777216.0);
  std::ofstream out(path, std::ios::binary);
  out << "P5\n" << n << ' ' << n << "\n255\n";
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      double s = 0.0;
      for (int dv = -2; dv <= 2; ++dv)
        for (int du = -2; du <= 2; ++du)
          s += raw[static_cast<std::size_t>(std::clamp(v + dv, 0, n - 1)) * n + std::clamp(u + du, 0, n - 1)];
      out.put(static_cast<char>(std::lround(255.0 * s / 25.0)));
    }
}

struct Workspace {
  fs::path dir = fs::temp_directory_path() / "orbitpool_cli_test";
  Workspace() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string at(const char* name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("help and version") {
  CHECK(run("--version").status == 0);
  const Run h = run("--help");
  CHECK(h.status == 0);
  for (const char* sub : {"describe", "synth", "match", "eval", "soa"})
    CHECK(h.out.find(sub) != std::string::npos);
}

TEST_CASE("describe writes one row per keypoint") {
  Workspace w;
  write_texture(w.dir / "x.pgm", 64, 1);
  const Run r = run("describe " + w.at("x.pgm") + " --kind dsp-sift --grid");
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() >= 2);
  CHECK(ls[0] == "# cells=4,bins=8,metric=euclidean");
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(fields(ls[i]) == 133);

  const Run sc = run("describe " + w.at("x.pgm") + " --kind sc --grid --stride 24 --size 5");
  REQUIRE(sc.status == 0);
  CHECK(fields(lines(sc.out)[1]) == 5 + 24 + 192);

  const Run f = run("describe " + w.at("x.pgm") + " --kind sift --dog --orient -o " + w.at("d.csv"));
  CHECK(f.status == 0);
  CHECK(fs::exists(w.dir / "d.csv"));
}

TEST_CASE("synth then eval produces the report") {
  Workspace w;
  REQUIRE(run("synth --out " + w.at("pairs") + " --count 2 --size 96 --scales 1.2 --seed 3").status == 0);
  CHECK(fs::exists(w.dir / "pairs" / "pair_0001" / "transformed.pgm"));
  const Run m = run("match --pair " + w.at("pairs/pair_0000") + " --kind sift --records " + w.at("rec.csv"));
  CHECK(m.status == 0);
  const Run e = run("eval --pairs " + w.at("pairs") + " --kinds sift,dsp-sift --out " +
                    w.at("report.csv") + " --summary " + w.at("summary.csv"));
  REQUIRE(e.status == 0);
  std::ifstream in(w.at("report.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header == "pair,kind,threshold,precision,recall");
  std::ifstream sum(w.at("summary.csv"));
  std::getline(sum, header);
  CHECK(header == "kind,map,flagged,precision,recall");
}

TEST_CASE("soa self-match picks the identity sample") {
  Workspace w;
  write_texture(w.dir / "t.pgm", 65, 2);
  const Run r = run("soa --template " + w.at("t.pgm") + " --query " + w.at("t.pgm") +
                    " --samples standard --save-template " + w.at("t.csv"));
  REQUIRE(r.status == 0);
  std::size_t argmax = 99, samples = 0;
  double value = 0.0;
  REQUIRE(std::sscanf(r.out.c_str(), "value=%lf argmax=%zu samples=%zu", &value, &argmax, &samples) == 3);
  CHECK(argmax == 1);
  CHECK(samples == 12);
  CHECK(value >= 0.99);
  CHECK(value <= 1.0 + 1e-12);

  const Run again = run("soa --template-file " + w.at("t.csv") + " --query " + w.at("t.pgm"));
  REQUIRE(again.status == 0);
  CHECK(lines(again.out)[0] == lines(r.out)[0]);
}

TEST_CASE("exit codes") {
  Workspace w;
  write_texture(w.dir / "x.pgm", 32, 3);
  CHECK(run("describe " + w.at("x.pgm") + " --bogus").status == 1);
  CHECK(run("describe " + w.at("x.pgm") + " --kind surf").status == 1);
  CHECK(run("describe " + w.at("x.pgm") + " --grid --dog").status == 1);
  CHECK(run("frobnicate").status == 1);
  CHECK(run("describe " + w.at("missing.pgm")).status == 2);
  CHECK(run("soa --template " + w.at("x.pgm") + " --template-file " + w.at("t.csv") +
            " --query " + w.at("x.pgm")).status == 1);
  // Validators reject a missing directory before the library runs.
  CHECK(run("eval --pairs " + w.at("nowhere")).status == 1);
  fs::create_directories(w.dir / "empty_pair");
  const Run e = run("match --pair " + w.at("empty_pair"), true);
  CHECK(e.status == 2);
  CHECK(e.out.find("pair.json") != std::string::npos);
}
