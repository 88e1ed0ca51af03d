// dsr: superpixel segmentation (SLIC and density-driven SLIC) and the
// evaluation harness.
//
//   dsr segment --input img.png --superpixels 400 --method dsr --out labels.png
//   dsr bench --images imgs/ --gt gt/ --out report

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dsr/dsr.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

dsr::SignConvention parse_sign(const std::string& s) {
  return s == "literal" ? dsr::SignConvention::literal : dsr::SignConvention::inverted;
}

void write_seeds_csv(const dsr::SeedSet& seeds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw dsr::IoError("cannot write '" + path + "'");
  out << "x,y,order\n";
  for (std::size_t i = 0; i < seeds.seeds.size(); ++i)
    out << seeds.seeds[i].x << ',' << seeds.seeds[i].y << ',' << i << '\n';
}

// Marks each seed with a 3x3 red square.
void write_seed_overlay(const dsr::RasterImage& img, const dsr::SeedSet& seeds,
                        const std::string& path) {
  auto out = img;
  for (const auto& s : seeds.seeds)
    for (int y = std::max(s.y - 1, 0); y <= std::min(s.y + 1, img.height() - 1); ++y)
      for (int x = std::max(s.x - 1, 0); x <= std::min(s.x + 1, img.width() - 1); ++x)
        out.set_pixel(x, y, {255.0, 0.0, 0.0});
  dsr::save_png(out, path);
}

std::vector<int> parse_k_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument(item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superpixel segmentation with spectral-residual density guidance"};
  app.set_version_flag("--version", std::string(dsr::kVersion));
  app.require_subcommand(1);

  // Shared algorithm options.
  dsr::ClusteringParams params;
  dsr::SpectralParams spectral;
  std::string method = "slic";
  std::string sign = "inverted";
  auto add_algorithm_options = [&](CLI::App* cmd) {
    cmd->add_option("--compactness,-m", params.m, "Compactness m")->check(CLI::PositiveNumber);
    cmd->add_option("--sigma", spectral.sigma, "Saliency smoothing std (pixels)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tau", params.tau, "Seeding smoothing std (pixels)")->check(CLI::PositiveNumber);
    cmd->add_option("--density-sign", sign, "Density sign convention")
        ->check(CLI::IsMember({"literal", "inverted"}));
    cmd->add_option("--downsample", spectral.downsampleFactor, "Saliency downsample factor")
        ->check(CLI::IsMember({1, 2, 4}));
    cmd->add_option("--max-iters", params.maxIters, "Maximum Lloyd iterations")
        ->check(CLI::PositiveNumber);
  };

  auto* seg = app.add_subcommand("segment", "Segment one image into superpixels");
  std::string input, outLabels, overlay, seedsCsv, seedsOverlay, densityPng, saliencyPng;
  seg->add_option("--input,-i", input, "Input image (PNG/PPM)")->required();
  seg->add_option("--superpixels,-k", params.k, "Requested superpixel count")->required();
  seg->add_option("--method", method, "slic or dsr")->check(CLI::IsMember({"slic", "dsr"}));
  add_algorithm_options(seg);
  seg->add_option("--out", outLabels, "16-bit label map PNG");
  seg->add_option("--overlay", overlay, "Boundary overlay PNG");
  seg->add_option("--seeds", seedsCsv, "Seed list CSV (x,y,order)");
  seg->add_option("--seeds-overlay", seedsOverlay, "PNG with seeds marked");
  seg->add_option("--density", densityPng, "Density map as 8-bit PNG (dsr only)");
  seg->add_option("--saliency", saliencyPng, "Saliency map as 8-bit PNG (dsr only)");

  auto* bench = app.add_subcommand("bench", "Score methods over a dataset and k sweep");
  dsr::BenchConfig config;
  std::string imageDir, gtDir, outBase = "bench_report", kList = "100,200,300,400,500,600";
  std::vector<std::string> methods{"slic", "dsr"};
  bench->add_option("--images", imageDir, "Image directory")->required();
  bench->add_option("--gt", gtDir, "Ground-truth directory (.seg or 16-bit PNG)")->required();
  bench->add_option("--k", kList, "Comma-separated superpixel counts");
  bench->add_option("--methods", methods, "Methods to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"slic", "dsr"}));
  bench->add_option("--out", outBase, "Report base path (writes .csv and .json)");
  std::string ueThreshold = "region";
  bench->add_option("--ue-threshold", ueThreshold, "UE overlap threshold basis")
      ->check(CLI::IsMember({"region", "superpixel"}));
  bench->add_option("--jobs,-j", config.parallelism, "Worker threads (DSR_THREADS overrides)")
      ->check(CLI::PositiveNumber);
  add_algorithm_options(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  spectral.convention = parse_sign(sign);

  try {
    if (*seg) {
      params.method = dsr::parse_method(method);
      const auto img = dsr::load_image(input);
      const auto r = dsr::run_superpixels(img, params, spectral);
      const auto& s = r.segmentation;
      if (!outLabels.empty()) dsr::write_label_map(s.labels, outLabels);
      if (!overlay.empty()) dsr::render_overlay(img, s.labels, overlay);
      if (!seedsCsv.empty()) write_seeds_csv(s.seeds, seedsCsv);
      if (!seedsOverlay.empty()) write_seed_overlay(img, s.seeds, seedsOverlay);
      if (!densityPng.empty() && r.density) dsr::save_heatmap_png(r.density->values, densityPng);
      if (!saliencyPng.empty() && r.saliency) dsr::save_heatmap_png(r.saliency->values, saliencyPng);
      nlohmann::json line = {{"k_final", s.labels.num_labels()},
                             {"iterations", s.iterations},
                             {"runtime_s", r.runtimeSeconds}};
      std::cout << line.dump() << std::endl;
      return 0;
    }

    config.imageDir = imageDir;
    config.gtDir = gtDir;
    try {
      config.kValues = parse_k_list(kList);
    } catch (const std::exception&) {
      std::cerr << "--k: expected comma-separated integers, got '" << kList << "'\n";
      return kExitUsage;
    }
    config.methods.clear();
    for (const auto& m : methods) config.methods.push_back(dsr::parse_method(m));
    config.params = params;
    config.spectral = spectral;
    config.ueThreshold = dsr::parse_ue_threshold(ueThreshold);
    config.outPath = outBase;
    const auto report = dsr::run_bench(config);
    dsr::write_reports(report, outBase);
    std::cout << dsr::format_aggregate_table(report);
    for (const auto& [file, reason] : report.skippedImages)
      std::cerr << "skipped " << file << ": " << reason << '\n';
    return 0;
  } catch (const dsr::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
