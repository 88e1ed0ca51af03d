// Writes the synthetic benchmark fixtures: <out>/images/sceneNN.png and
// <out>/gt/sceneNN.seg.
//
//   dsr_make_scenes <out-dir> [count]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "dsr/dsr.hpp"
#include "scenes.hpp"

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: dsr_make_scenes <out-dir> [count]\n";
    return 2;
  }
  namespace fs = std::filesystem;
  const fs::path out = argv[1];
  const int count = argc == 3 ? std::stoi(argv[2]) : 8;
  try {
    fs::create_directories(out / "images");
    fs::create_directories(out / "gt");
    for (int i = 0; i < count; ++i) {
      const auto scene = dsr::testing::make_scene(std::uint64_t(i + 1));
      char name[32];
      std::snprintf(name, sizeof name, "scene%02d", i + 1);
      dsr::save_png(scene.image, (out / "images" / (std::string(name) + ".png")).string());
      std::ofstream seg(out / "gt" / (std::string(name) + ".seg"));
      dsr::write_seg(scene.truth, seg);
      std::cout << name << ": " << scene.truth.num_regions() << " regions\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
