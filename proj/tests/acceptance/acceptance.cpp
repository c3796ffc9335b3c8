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

// Acceptance gate: one PASS/FAIL line per criterion. Tolerances live in
// sbm/recipes.hpp (namespace tol) and are not adjustable from here.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "sbm/errors.hpp"
#include "sbm/recipes.hpp"

namespace {

struct Criterion {
  int id;
  const char* recipe;
  const char* label;
};

constexpr Criterion kCriteria[] = {
    {1, "calibration", "CSBP calibration from a point mass"},
    {2, "d1", "d = 1 mass limit and empty-ball law"},
    {3, "d2", "d = 2 scaling identity and A2(r) / (pi r^2)"},
    {4, "d3", "d = 3 constant kappa and empty-ball probability"},
    {5, "moments", "first and second moments of the ball mass"},
    {6, "invariants", "exact invariants and reproducibility"},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  bool fast = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--fast") {
      fast = true;
    } else {
      wanted.push_back(std::atoi(a.c_str()));
    }
  }
  if (wanted.empty())
    for (const auto& c : kCriteria) wanted.push_back(c.id);

  sbm::RecipeOptions opt;
  opt.fast = fast;
  opt.log = &std::cerr;
  bool all = true;
  for (int id : wanted) {
    const Criterion* c = nullptr;
    for (const auto& k : kCriteria)
      if (k.id == id) c = &k;
    if (!c) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    bool pass = false;
    std::string note;
    try {
      const sbm::RecipeResult r = sbm::run_recipe(c->recipe, opt);
      sbm::print_recipe(std::cout, r);
      pass = r.pass();
      char buf[64];
      std::snprintf(buf, sizeof buf, " (%.1f s)", r.seconds);
      note = buf;
      for (const auto& ch : r.checks)
        if (!ch.pass && !ch.informational) note += " failed: " + ch.name + ";";
    } catch (const std::exception& e) {
      note = std::string(" error: ") + e.what();
    }
    std::cout << "CRITERION " << id << " [PRIMARY] " << (pass ? "PASS" : "FAIL") << "  " << c->label << note
              << std::endl;
    all = all && pass;
  }
  return all ? 0 : 1;
}
