// Copyright 2026 The mpt Authors
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

// mpt_fixture: writes the synthetic 2-person end-to-end fixture.
//
//   mpt_fixture <dir> [--seed N] [--frames F] [--width W] [--height H]

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mpt/error.hpp"
#include "mpt/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic pipeline fixture"};
  std::string dir;
  std::uint64_t seed = 7;
  int frames = 60, width = 256, height = 128;
  app.add_option("dir", dir, "output directory")->required();
  app.add_option("--seed", seed);
  app.add_option("--frames", frames);
  app.add_option("--width", width);
  app.add_option("--height", height);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    mpt::synthetic::write_fixture(dir, seed, frames, width, height);
  } catch (const mpt::Error& e) {
    std::cerr << "mpt_fixture: " << e.what() << "\n";
    return e.exit_code();
  }
  std::cout << dir << "/pipeline.json\n";
  return 0;
}
