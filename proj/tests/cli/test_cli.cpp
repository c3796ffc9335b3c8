// Copyright 2026 The sbmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SBMLAB_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sbmlab_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const char* kSim = R"([plan]
d = 1
targets = 1:0.5
replicas = 100

[sim]
N = 20
seed = 1
)";

}  // namespace

TEST_CASE("simulate writes one record per replica and a stable digest") {
  const fs::path dir = workdir("sim");
  write(dir / "plan.ini", kSim);
  const Run a = run("simulate --config " + (dir / "plan.ini").string() + " --out " + (dir / "a").string());
  REQUIRE_MESSAGE(a.code == 0, a.output);
  const auto rec = lines(dir / "a" / "records.csv");
  REQUIRE(rec.size() == 102);  // digest line, header, 100 rows
  CHECK(rec[0].rfind("# digest=", 0) == 0);
  CHECK(fs::exists(dir / "a" / "manifest.json"));
  CHECK(fs::exists(dir / "a" / "estimates.csv"));

  const Run b = run("simulate --config " + (dir / "plan.ini").string() + " --out " + (dir / "b").string());
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "a" / "records.csv") == slurp(dir / "b" / "records.csv"));

  const Run c = run("simulate --config " + (dir / "plan.ini").string() + " --seed 2 --out " + (dir / "c").string());
  REQUIRE(c.code == 0);
  const auto rc = lines(dir / "c" / "records.csv");
  CHECK(rc[0].substr(0, 25) == rec[0].substr(0, 25));

  const Run rep = run("report " + (dir / "a").string() + " " + (dir / "c").string() + " --out " + (dir / "r").string());
  CHECK_MESSAGE(rep.code == 0, rep.output);
  CHECK(fs::exists(dir / "r" / "report.md"));

  const Run dup = run("report " + (dir / "a").string() + " " + (dir / "b").string() + " --out " + (dir / "r2").string());
  CHECK(dup.code == 2);
}

TEST_CASE("report refuses mismatched digests") {
  const fs::path dir = workdir("mismatch");
  write(dir / "one.ini", kSim);
  std::string other = kSim;
  other.replace(other.find("N = 20"), 6, "N = 30");
  write(dir / "two.ini", other);
  REQUIRE(run("simulate --config " + (dir / "one.ini").string() + " --out " + (dir / "a").string()).code == 0);
  REQUIRE(run("simulate --config " + (dir / "two.ini").string() + " --seed 5 --out " + (dir / "b").string()).code == 0);
  const Run rep = run("report " + (dir / "a").string() + " " + (dir / "b").string() + " --out " + (dir / "r").string());
  CHECK(rep.code == 2);
  CHECK(rep.output.find((dir / "a").string()) != std::string::npos);
  CHECK(rep.output.find((dir / "b").string()) != std::string::npos);
}

TEST_CASE("missing seed is a configuration error naming the field") {
  const fs::path dir = workdir("noseed");
  std::string text = kSim;
  text.replace(text.find("seed = 1"), 8, "");
  write(dir / "plan.ini", text);
  const Run r = run("simulate --config " + (dir / "plan.ini").string() + " --out " + (dir / "o").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("seed") != std::string::npos);
}

TEST_CASE("zero radius gives only successes") {
  const fs::path dir = workdir("r0");
  std::string text = kSim;
  text.replace(text.find("1:0.5"), 5, "1:0");
  write(dir / "plan.ini", text);
  const Run r = run("simulate --config " + (dir / "plan.ini").string() + " --out " + (dir / "o").string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto rec = lines(dir / "o" / "records.csv");
  const auto header = rec[1];
  int col = 0, idx = -1;
  for (size_t pos = 0, next; ; pos = next + 1, ++col) {
    next = header.find(',', pos);
    if (header.substr(pos, next - pos) == "success") idx = col;
    if (next == std::string::npos) break;
  }
  REQUIRE(idx >= 0);
  for (size_t i = 2; i < rec.size(); ++i) {
    std::stringstream ss(rec[i]);
    std::string field;
    for (int k = 0; k <= idx; ++k) std::getline(ss, field, ',');
    CHECK(field == "1");
  }
}

TEST_CASE("unknown theorem and missing seed for verify") {
  CHECK(run("verify nonsense --seed 1").code == 2);
  CHECK(run("verify d1").code == 2);
  CHECK(run("simulate").code == 2);
}

TEST_CASE("solve runs the uniform self-test") {
  const fs::path dir = workdir("solve");
  write(dir / "pde.ini", "[pde]\nkind = profile\nd = 3\nr = 1\nt_final = 1\nh = 0.05\nmode = uniform\nRmax = 4\n");
  const Run r = run("solve --config " + (dir / "pde.ini").string() + " --out " + (dir / "o").string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(dir / "o" / "profiles.csv"));
  CHECK(fs::exists(dir / "o" / "summary.jsonl"));
}

TEST_CASE("solve of a finite ball writes mass series") {
  const fs::path dir = workdir("solve2");
  write(dir / "pde.ini", "[pde]\nkind = profile\nd = 2\nr = 1\nt_final = 1\nh = 0.02\nmode = layer\nt0 = 0.01\n");
  const Run r = run("solve --config " + (dir / "pde.ini").string() + " --out " + (dir / "o").string());
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto s = lines(dir / "o" / "series.csv");
  CHECK(s.size() >= 3);
}
