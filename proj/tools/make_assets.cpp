// Copyright 2026 The polarlens Authors
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

// Regenerates the bundled synthetic assets under data/.
//
//   make_assets <data-dir>

#include <filesystem>
#include <iostream>

#include "polarlens/ptf.hpp"
#include "polarlens/scene_sim.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);
  try {
    polarlens::save_tensor(polarlens::make_speckle_psf(32, 1, 7), dir / "speckle_psf_gray.ptf");
    polarlens::save_tensor(polarlens::make_speckle_psf(32, 3, 7), dir / "speckle_psf_rgb.ptf");
    polarlens::save_tensor(polarlens::make_smooth_scene(64, 64, 1, 3, 11), dir / "smooth_scene_gray3.ptf");
    polarlens::save_tensor(polarlens::make_smooth_scene(64, 64, 3, 4, 11), dir / "smooth_scene_color4.ptf");
  } catch (const std::exception& e) {
    std::cerr << "make_assets: " << e.what() << '\n';
    return 1;
  }
  std::cout << "assets written to " << dir.string() << '\n';
  return 0;
}
