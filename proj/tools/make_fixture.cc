// Copyright 2026 The Firescape Authors
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

// Writes a synthetic scenario bundle that `firescape run` can consume.

#include <iostream>

#include <CLI11.hpp>

#include "firescape/errors.h"
#include "firescape/scenario_io.h"
#include "firescape/synthetic.h"

int main(int argc, char** argv) {
  CLI::App app{"write a synthetic firescape scenario bundle"};
  std::string out_dir;
  firescape::SyntheticOptions opts;
  std::size_t sd_count = 10;
  std::size_t cd_count = 3;
  double duration = 600.0;
  double frame_interval = 2.0;
  app.add_option("-o,--out", out_dir, "output directory")->required();
  app.add_option("--seed", opts.seed, "rng seed");
  app.add_option("--grid-side", opts.grid_side, "road grid nodes per side")->check(CLI::Range(2, 1000));
  app.add_option("--grid-spacing", opts.grid_spacing_m, "road grid spacing in meters")->check(CLI::PositiveNumber);
  app.add_option("--fire-radius", opts.fire_radius_m, "fire radius in meters")->check(CLI::PositiveNumber);
  app.add_option("--safes", opts.safe_count, "safe locations (1-8)")->check(CLI::Range(1, 8));
  app.add_option("--sd-count", sd_count, "service drones")->check(CLI::PositiveNumber);
  app.add_option("--cd-count", cd_count, "coordinator drones")->check(CLI::PositiveNumber);
  app.add_option("--duration", duration, "surveillance duration in seconds")->check(CLI::NonNegativeNumber);
  app.add_option("--frame-interval", frame_interval, "seconds between frames")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    firescape::Scenario sc = firescape::make_synthetic_scenario(opts);
    sc.sd_count = sd_count;
    sc.cd_count = cd_count;
    sc.surveillance_duration_s = duration;
    sc.frame_interval_s = frame_interval;
    sc.validate();
    firescape::save_scenario(sc, out_dir);
  } catch (const firescape::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cout << out_dir << "/scenario.json\n";
  return 0;
}
