#pragma once

// Benchmark harness: every (image, method, k) cell is segmented and scored
// against ground truth. Cells are independent; results are collected in a
// fixed (image, method, k) order so reports do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dsr/clustering.hpp"
#include "dsr/io.hpp"
#include "dsr/metrics.hpp"
#include "dsr/pipeline.hpp"
#include "dsr/spectral.hpp"

namespace dsr {

struct BenchConfig {
  std::filesystem::path imageDir;
  std::filesystem::path gtDir;
  std::vector<int> kValues{100, 200, 300, 400, 500, 600};
  std::vector<Method> methods{Method::slic, Method::dsr};
  ClusteringParams params;  // k and method are overridden per cell
  SpectralParams spectral;
  UeThreshold ueThreshold = UeThreshold::region;
  std::filesystem::path outPath;  // report base path; ".csv"/".json" appended
  int parallelism = 1;
};

struct BenchCell {
  std::string image;
  Method method = Method::slic;
  int k = 0;
  std::optional<SegmentationMetrics> metrics;
  std::string skipReason;
};

struct BenchAggregate {
  Method method = Method::slic;
  int k = 0;
  int images = 0;
  double meanUe = 0, meanBr = 0, meanBp = 0, meanKFinal = 0, meanRuntime = 0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchCell> cells;
  std::vector<std::pair<std::string, std::string>> skippedImages;  // (file, reason)
  std::vector<BenchAggregate> aggregates;
  std::optional<double> improvementRate;  // dsr vs slic on mean UE, percent
  std::string improvementNote;
};

struct ImagePair {
  std::string stem;
  std::filesystem::path image;
  std::filesystem::path groundTruth;
};

// Pairs `foo.{png,ppm,pgm}` in imageDir with `foo.seg` (preferred) or
// `foo.png` in gtDir. Unpaired images are reported in `skipped`.
inline std::vector<ImagePair> pair_dataset(const std::filesystem::path& imageDir,
                                           const std::filesystem::path& gtDir,
                                           std::vector<std::pair<std::string, std::string>>& skipped) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(imageDir)) throw IoError("image directory '" + imageDir.string() + "' not found");
  if (!fs::is_directory(gtDir)) throw IoError("ground-truth directory '" + gtDir.string() + "' not found");
  std::vector<fs::path> images;
  for (const auto& e : fs::directory_iterator(imageDir)) {
    const auto ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".png" || ext == ".ppm" || ext == ".pgm"))
      images.push_back(e.path());
  }
  std::sort(images.begin(), images.end());
  std::vector<ImagePair> pairs;
  for (const auto& img : images) {
    const auto stem = img.stem().string();
    std::optional<fs::path> gt;
    for (const char* ext : {".seg", ".png"}) {
      const auto candidate = gtDir / (stem + ext);
      if (fs::is_regular_file(candidate)) {
        gt = candidate;
        break;
      }
    }
    if (gt)
      pairs.push_back({stem, img, *gt});
    else
      skipped.emplace_back(img.filename().string(), "no ground truth '" + stem + ".seg' or '" +
                                                        stem + ".png' in " + gtDir.string());
  }
  return pairs;
}

inline int bench_parallelism(int requested) {
  if (const char* env = std::getenv("DSR_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1, requested);
}

inline BenchReport run_bench(const BenchConfig& config) {
  if (config.kValues.empty()) throw InvalidArgument("bench: no superpixel counts given");
  if (config.methods.empty()) throw InvalidArgument("bench: no methods given");
  BenchReport report;
  report.config = config;
  const auto pairs = pair_dataset(config.imageDir, config.gtDir, report.skippedImages);

  struct Loaded {
    std::string stem;
    RasterImage image;
    GroundTruth gt;
  };
  std::vector<Loaded> data;
  for (const auto& p : pairs) {
    try {
      Loaded l{p.stem, load_image(p.image), read_ground_truth(p.groundTruth)};
      if (l.gt.width() != l.image.width() || l.gt.height() != l.image.height()) {
        report.skippedImages.emplace_back(p.image.filename().string(),
                                          "ground truth size differs from image");
        continue;
      }
      data.push_back(std::move(l));
    } catch (const Error& e) {
      report.skippedImages.emplace_back(p.image.filename().string(), e.what());
    }
  }
  if (data.empty()) throw IoError("bench: no usable (image, ground truth) pairs");

  struct Job {
    std::size_t image;
    Method method;
    int k;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < data.size(); ++i)
    for (auto m : config.methods)
      for (int k : config.kValues) jobs.push_back({i, m, k});
  report.cells.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto& job = jobs[j];
      const auto& d = data[job.image];
      BenchCell cell{d.stem, job.method, job.k, std::nullopt, {}};
      const std::size_t n = d.image.size();
      if (job.k < 4 || std::size_t(job.k) * 4 > n) {
        cell.skipReason = "k outside [4, " + std::to_string(n / 4) + "]";
      } else {
        try {
          ClusteringParams params = config.params;
          params.k = job.k;
          params.method = job.method;
          const auto r = run_superpixels(d.image, params, config.spectral);
          auto m = evaluate(d.gt, r.segmentation.labels, 2.0, 0.05, config.ueThreshold);
          m.runtimeSeconds = r.runtimeSeconds;
          cell.metrics = m;
        } catch (const Error& e) {
          cell.skipReason = e.what();
        }
      }
      report.cells[j] = std::move(cell);
    }
  };
  const int threads = std::min<int>(bench_parallelism(config.parallelism), int(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto m : config.methods)
    for (int k : config.kValues) {
      BenchAggregate a{m, k};
      for (const auto& c : report.cells) {
        if (c.method != m || c.k != k || !c.metrics) continue;
        ++a.images;
        a.meanUe += c.metrics->undersegError;
        a.meanBr += c.metrics->boundaryRecall;
        a.meanBp += c.metrics->boundaryPrecision;
        a.meanKFinal += c.metrics->numSuperpixels;
        a.meanRuntime += c.metrics->runtimeSeconds;
      }
      if (a.images > 0) {
        const double n = a.images;
        a.meanUe /= n;
        a.meanBr /= n;
        a.meanBp /= n;
        a.meanKFinal /= n;
        a.meanRuntime /= n;
      }
      report.aggregates.push_back(a);
    }

  std::vector<double> ours, base;
  for (int k : config.kValues) {
    const BenchAggregate* s = nullptr;
    const BenchAggregate* d = nullptr;
    for (const auto& a : report.aggregates)
      if (a.k == k && a.images > 0) (a.method == Method::slic ? s : d) = &a;
    if (s && d) {
      base.push_back(s->meanUe);
      ours.push_back(d->meanUe);
    }
  }
  if (ours.empty()) {
    report.improvementNote = "requires both slic and dsr results";
  } else {
    try {
      report.improvementRate = improvement_rate(ours, base);
    } catch (const InvalidArgument& e) {
      report.improvementNote = e.what();
    }
  }
  return report;
}

namespace bench_detail {

inline std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace bench_detail

inline constexpr const char* kCsvHeader = "image,method,k,k_final,ue,br,bp,runtime_s";

// One row per scored cell. Metric columns are printed with round-trip
// precision; only runtime_s varies between runs.
inline std::string to_csv(const BenchReport& report) {
  using namespace bench_detail;
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& c : report.cells) {
    if (!c.metrics) continue;
    const auto& m = *c.metrics;
    out << c.image << ',' << to_string(c.method) << ',' << c.k << ',' << m.numSuperpixels << ','
        << fmt_exact(m.undersegError) << ',' << fmt_exact(m.boundaryRecall) << ','
        << fmt_exact(m.boundaryPrecision) << ',' << fmt_fixed(m.runtimeSeconds, 6) << '\n';
  }
  return out.str();
}

inline nlohmann::json to_json(const BenchReport& report) {
  using nlohmann::json;
  const auto& c = report.config;
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  json j;
  j["tool"] = "dsr";
  j["version"] = kVersion;
  j["config"] = {
      {"image_dir", c.imageDir.string()},
      {"gt_dir", c.gtDir.string()},
      {"k_values", c.kValues},
      {"methods", methods},
      {"compactness", c.params.m},
      {"max_iters", c.params.maxIters},
      {"convergence_tol", c.params.convergenceTol},
      {"tau", c.params.tau},
      {"sigma", c.spectral.sigma},
      {"box_size", c.spectral.boxSize},
      {"eps", c.spectral.eps},
      {"density_sign", c.spectral.convention == SignConvention::inverted ? "inverted" : "literal"},
      {"downsample", c.spectral.downsampleFactor},
      {"normalize_saliency", c.spectral.normalizeSaliency},
      {"density_clamp", c.spectral.clampExponent},
      {"ue_threshold", to_string(c.ueThreshold)},
      {"parallelism", c.parallelism},
  };
  json cells = json::array();
  json skipped = json::array();
  for (const auto& cell : report.cells) {
    if (cell.metrics) {
      const auto& m = *cell.metrics;
      cells.push_back({{"image", cell.image},
                       {"method", to_string(cell.method)},
                       {"k", cell.k},
                       {"k_final", m.numSuperpixels},
                       {"ue", m.undersegError},
                       {"br", m.boundaryRecall},
                       {"bp", m.boundaryPrecision},
                       {"runtime_s", m.runtimeSeconds}});
    } else {
      skipped.push_back({{"image", cell.image},
                         {"method", to_string(cell.method)},
                         {"k", cell.k},
                         {"reason", cell.skipReason}});
    }
  }
  for (const auto& [file, reason] : report.skippedImages)
    skipped.push_back({{"image", file}, {"reason", reason}});
  json aggregates = json::array();
  for (const auto& a : report.aggregates)
    aggregates.push_back({{"method", to_string(a.method)},
                          {"k", a.k},
                          {"images", a.images},
                          {"mean_ue", a.meanUe},
                          {"mean_br", a.meanBr},
                          {"mean_bp", a.meanBp},
                          {"mean_k_final", a.meanKFinal},
                          {"mean_runtime_s", a.meanRuntime}});
  j["cells"] = cells;
  j["skipped"] = skipped;
  j["aggregates"] = aggregates;
  if (report.improvementRate)
    j["ue_improvement_rate_percent"] = *report.improvementRate;
  else
    j["ue_improvement_rate_percent"] = nullptr;
  if (!report.improvementNote.empty()) j["ue_improvement_note"] = report.improvementNote;
  return j;
}

inline std::string format_aggregate_table(const BenchReport& report) {
  using bench_detail::fmt_fixed;
  std::ostringstream out;
  out << "method     k  images  k_final      UE      BR      BP  runtime_s\n";
  for (const auto& a : report.aggregates) {
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %5d %7d %8.1f %7.4f %7.4f %7.4f %10.4f\n",
                  to_string(a.method), a.k, a.images, a.meanKFinal, a.meanUe, a.meanBr, a.meanBp,
                  a.meanRuntime);
    out << line;
  }
  if (report.improvementRate)
    out << "UE improvement of dsr over slic (mean over k): "
        << fmt_fixed(*report.improvementRate, 2) << "%\n";
  return out.str();
}

inline void write_reports(const BenchReport& report, const std::filesystem::path& base) {
  auto withExt = [&](const char* ext) {
    auto p = base;
    p += ext;
    return p;
  };
  std::ofstream csv(withExt(".csv"));
  if (!csv) throw IoError("cannot write '" + withExt(".csv").string() + "'");
  csv << to_csv(report);
  std::ofstream js(withExt(".json"));
  if (!js) throw IoError("cannot write '" + withExt(".json").string() + "'");
  js << to_json(report).dump(2) << '\n';
}

}  // namespace dsr
