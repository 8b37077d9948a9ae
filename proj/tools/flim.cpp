/* Copyright 2026 The FLIM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// flim: train, detect, evaluate and serve FLIM models.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "flim/detection.hpp"
#include "flim/metrics.hpp"
#include "flim/model_io.hpp"
#include "flim/pipeline.hpp"
#include "flim/png_io.hpp"
#include "flim/project.hpp"
#include "flim/serialization.hpp"
#include "flim/service.hpp"
#include "flim/synthetic.hpp"
#include "flim/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

void print_diagnostics(const flim::ValidationError& e) {
  for (const flim::Diagnostic& d : e.diagnostics()) {
    std::cerr << d.file << ": " << flim::to_string(d.code) << ": " << d.message << "\n";
  }
}

int run_train(const fs::path& project_dir, const fs::path& arch_file, std::uint64_t seed, bool no_selection,
              fs::path out) {
  const flim::Project project = flim::load_project(project_dir);
  const flim::ArchConfig arch = flim::load_arch(arch_file);
  const flim::TrainingSet data = flim::load_training_set(project);
  if (data.images.empty()) {
    std::cerr << "error: no image in " << project_dir << " carries markers\n";
    return kRuntimeFailure;
  }
  flim::FlimModel model = flim::train_model(data, arch, seed, !no_selection);
  model.freeze();
  if (out.empty()) out = project.model_dir();
  flim::save_model(model, out);
  std::cout << "trained " << model.depth() << " layer(s) on " << data.images.size() << " image(s), "
            << flim::count_parameters(model, true) << " parameters -> " << out.string() << "\n";
  return 0;
}

int run_detect(const fs::path& model_dir, const fs::path& images_dir, const fs::path& out, int jobs) {
  const flim::FlimModel model = flim::load_model(model_dir);
  if (!fs::is_directory(images_dir)) {
    std::cerr << "error: " << images_dir << " is not a directory\n";
    return kRuntimeFailure;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(images_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::optional<flim::DetectionSet>> results(files.size());
  std::vector<std::string> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        results[i] = flim::detect_objects(flim::load_png(files[i]), model, files[i].stem().string());
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  flim::Json array = flim::Json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (results[i]) {
      array.push_back(*results[i]);
    } else {
      ++failed;
      std::cerr << "warning: " << files[i].string() << ": " << errors[i] << "\n";
    }
  }
  flim::write_json_file(out, array);
  return !files.empty() && failed == files.size() ? kRuntimeFailure : 0;
}

int run_eval(const fs::path& dets_file, const fs::path& gt_dir, const fs::path& out, const fs::path& curves) {
  if (!fs::is_directory(gt_dir)) {
    std::cerr << "error: ground truth directory " << gt_dir << " not found\n";
    return kRuntimeFailure;
  }
  const std::vector<flim::DetectionSet> dets = flim::read_json_file(dets_file).get<std::vector<flim::DetectionSet>>();
  std::vector<flim::GroundTruth> gts;
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    if (entry.path().extension() != ".json") continue;
    flim::GroundTruth gt = flim::read_json_file(entry.path()).get<flim::GroundTruth>();
    if (gt.image_id.empty()) gt.image_id = entry.path().stem().string();
    gts.push_back(std::move(gt));
  }
  std::sort(gts.begin(), gts.end(), [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  const flim::EvaluationReport report = flim::evaluate(dets, gts);
  flim::write_json_file(out, flim::metrics_to_json(report));
  if (!curves.empty()) {
    std::ofstream csv(curves);
    if (!csv) {
      std::cerr << "error: cannot write " << curves << "\n";
      return kRuntimeFailure;
    }
    csv << "tau,rank,recall,precision\n";
    csv.precision(17);
    for (const flim::PRCurve& curve : report.curves) {
      for (std::size_t r = 0; r < curve.points.size(); ++r) {
        csv << curve.threshold << ',' << r + 1 << ',' << curve.points[r].recall << ',' << curve.points[r].precision
            << '\n';
      }
    }
  }
  std::cout << flim::metrics_to_json(report).dump() << "\n";
  return 0;
}

int run_serve(const fs::path& project_dir, const std::string& host, int port, std::uint64_t seed) {
  flim::Service service({seed});
  if (!project_dir.empty()) {
    const std::string id = service.open_project(project_dir);
    std::cout << "project '" << id << "' loaded from " << project_dir.string() << "\n";
  }
  const int bound = service.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return kRuntimeFailure;
  }
  std::cout << "serving on http://" << host << ":" << bound << "/api/v1" << std::endl;
  return service.run() ? 0 : kRuntimeFailure;
}

int run_inspect(const fs::path& model_dir) {
  const flim::FlimModel model = flim::load_model(model_dir);
  flim::Json layers = flim::Json::array();
  for (const flim::Layer& layer : model.layers()) {
    layers.push_back({{"spec", layer.spec},
                      {"input_channels", layer.input_channels()},
                      {"candidates", layer.bank.size()},
                      {"selected", layer.selected.size()}});
  }
  const flim::Json info{{"heuristic", flim::to_string(model.heuristic())},
                        {"layers", layers},
                        {"parameters", flim::count_parameters(model, true)},
                        {"parameters_all", flim::count_parameters(model, false)}};
  std::cout << info.dump(2) << "\n";
  return 0;
}

int run_synth(const fs::path& out, int count, int marked, std::uint64_t seed) {
  const auto samples = flim::make_synthetic_dataset(count, seed);
  flim::write_synthetic_project(out, samples, marked);
  std::cout << "wrote " << count << " images (" << std::min(count, marked) << " marked) to " << out.string() << "\n";
  return 0;
}

int default_port() {
  if (const char* env = std::getenv("FLIM_PORT")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
    }
  }
  return 8765;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature learning from image markers: build, run and evaluate flyweight detectors"};
  app.set_version_flag("--version", flim::kVersion);
  app.require_subcommand(1);

  fs::path project_dir, arch_file, model_dir, images_dir, out, dets_file, gt_dir, curves;
  std::uint64_t seed = 0;
  bool no_selection = false;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int port = default_port();
  std::string host = "127.0.0.1";
  int count = 20;
  int marked = 5;

  auto* train = app.add_subcommand("train", "Build a model from a project's markers");
  train->add_option("--project", project_dir, "Project directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--arch", arch_file, "Architecture JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "Kernel estimation seed")->required();
  train->add_flag("--no-selection", no_selection, "Keep every estimated kernel");
  train->add_option("--out", out, "Model directory (default: <project>/model)");

  auto* detect = app.add_subcommand("detect", "Detect objects in a directory of PNG images");
  detect->add_option("--model", model_dir, "Model directory")->required()->check(CLI::ExistingDirectory);
  detect->add_option("--images", images_dir, "Image directory")->required();
  detect->add_option("--out", out, "Output JSON file")->required();
  detect->add_option("--jobs", jobs, "Parallel images")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Score detections against ground truth");
  eval->add_option("--dets", dets_file, "Detections JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", gt_dir, "Ground truth directory")->required();
  eval->add_option("--out", out, "Metrics JSON file")->required();
  eval->add_option("--curves", curves, "PR curve CSV file");

  auto* serve = app.add_subcommand("serve", "Run the builder service");
  serve->add_option("--project", project_dir, "Project directory to open")->check(CLI::ExistingDirectory);
  serve->add_option("--port", port, "Port (env FLIM_PORT, default 8765)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--seed", seed, "Kernel estimation seed");

  auto* inspect = app.add_subcommand("inspect", "Print a model's layers and parameter counts");
  inspect->add_option("--model", model_dir, "Model directory")->required()->check(CLI::ExistingDirectory);

  auto* synth = app.add_subcommand("synth", "Write the synthetic dark-ellipse project");
  synth->add_option("--out", out, "Project directory")->required();
  synth->add_option("--count", count, "Images")->check(CLI::PositiveNumber);
  synth->add_option("--marked", marked, "Images carrying markers")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*train) return run_train(project_dir, arch_file, seed, no_selection, out);
    if (*detect) return run_detect(model_dir, images_dir, out, jobs);
    if (*eval) return run_eval(dets_file, gt_dir, out, curves);
    if (*serve) return run_serve(project_dir, host, port, seed);
    if (*inspect) return run_inspect(model_dir);
    if (*synth) return run_synth(out, count, marked, seed);
  } catch (const flim::ValidationError& e) {
    std::cerr << "error: invalid project\n";
    print_diagnostics(e);
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}
