// Copyright 2026 The layoutret Authors.
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

// Writes the deterministic synthetic benchmark used by the end-to-end tests.

#include <iostream>

#include "CLI11.hpp"
#include "layoutret/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic benchmark fixture"};
  std::string out_dir;
  layoutret::synthetic::Options options;
  app.add_option("out_dir", out_dir, "output directory")->required();
  app.add_option("--seed", options.seed)->capture_default_str();
  app.add_option("--pages", options.pages)->capture_default_str();
  app.add_option("--samples-per-page", options.samples_per_page)
      ->capture_default_str();
  app.add_option("--dim", options.dim)->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  try {
    layoutret::synthetic::WriteBenchmark(out_dir, options);
  } catch (const std::exception& e) {
    std::cerr << "make_synthetic: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
