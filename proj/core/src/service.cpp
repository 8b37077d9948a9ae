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
#include "flim/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <condition_variable>
#include <list>
#include <map>
#include <mutex>
#include <thread>

#include "flim/decoder.hpp"
#include "flim/detection.hpp"
#include "flim/encoder.hpp"
#include "flim/model_io.hpp"
#include "flim/pipeline.hpp"
#include "flim/png_io.hpp"
#include "flim/project.hpp"
#include "flim/serialization.hpp"
#include "flim/version.hpp"

namespace fs = std::filesystem;
using httplib::Request;
using httplib::Response;

namespace flim {
namespace {

constexpr int kThumbnailSide = 128;
constexpr std::size_t kActivationCacheSize = 16;

struct HttpError : std::runtime_error {
  HttpError(int status, const std::string& message) : std::runtime_error(message), status(status) {}
  int status;
};

struct ProjectState {
  Project project;
  FlimModel model;
  std::vector<LayerSpec> invalidated;  // layers dropped by the last marker edit
  bool dirty = false;                  // markers changed since layer 1 was built
  std::uint64_t revision = 0;
};

using Snapshot = std::shared_ptr<const ProjectState>;

struct Session {
  std::string id;
  std::mutex writer;

  Snapshot snapshot() const {
    std::lock_guard lock(state_mutex_);
    return state_;
  }
  void publish(std::shared_ptr<ProjectState> next) {
    std::lock_guard lock(state_mutex_);
    next->revision = state_ ? state_->revision + 1 : 0;
    state_ = std::move(next);
  }

 private:
  mutable std::mutex state_mutex_;
  Snapshot state_;
};

struct Job {
  std::string id;
  std::string project;
  std::string status = "queued";
  Json result;
  std::string error;
  int error_status = 0;
};

Json job_json(const Job& job) {
  Json j{{"id", job.id}, {"project", job.project}, {"status", job.status}};
  if (job.status == "succeeded") j["result"] = job.result;
  if (job.status == "failed") j["error"] = {{"status", job.error_status}, {"message", job.error}};
  return j;
}

void send_json(Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(Response& res, int status, const std::string& message, Json diagnostics = nullptr) {
  Json body{{"error", message}};
  if (!diagnostics.is_null()) body["diagnostics"] = std::move(diagnostics);
  send_json(res, status, body);
}

Json diagnostics_json(const std::vector<Diagnostic>& diagnostics) {
  Json out = Json::array();
  for (const Diagnostic& d : diagnostics) {
    out.push_back({{"file", d.file}, {"code", to_string(d.code)}, {"message", d.message}});
  }
  return out;
}

Json parse_body(const Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw HttpError(400, std::string("request body is not JSON: ") + e.what());
  }
}

int layer_param(const Request& req, std::size_t index) {
  const std::string& text = req.matches[index];
  if (text.size() > 6) throw HttpError(404, "no such layer");
  return std::stoi(text);
}

Json layer_json(const Layer& layer, int index) {
  return Json{{"index", index},
              {"spec", layer.spec},
              {"input_channels", layer.input_channels()},
              {"candidates", layer.bank.size()},
              {"selected", layer.selected}};
}

Json project_json(const std::string& id, const ProjectState& s) {
  Json images = Json::array();
  for (const ImageEntry& image : s.project.images) {
    auto m = s.project.markers.find(image.id);
    images.push_back({{"id", image.id},
                      {"height", image.height},
                      {"width", image.width},
                      {"channels", image.channels},
                      {"markers", m == s.project.markers.end() ? 0 : m->second.markers.size()},
                      {"ground_truth", s.project.ground_truth.count(image.id) > 0}});
  }
  Json layers = Json::array();
  for (int l = 0; l < s.model.depth(); ++l) layers.push_back(layer_json(s.model.layer(l), l + 1));
  Json invalidated = Json::array();
  for (const LayerSpec& spec : s.invalidated) invalidated.push_back(spec);
  return Json{{"id", id},
              {"name", s.project.name},
              {"root", s.project.root.string()},
              {"heuristic", to_string(s.project.heuristic)},
              {"postproc", s.project.postproc},
              {"images", images},
              {"layers", layers},
              {"dirty", s.dirty},
              {"invalidated_layers", invalidated},
              {"revision", s.revision}};
}

// Box-filter downscale so the longer side is at most `side`.
ImageTensor downscale(const ImageTensor& image, int side) {
  const int longest = std::max(image.height(), image.width());
  if (longest <= side) return image;
  const double scale = static_cast<double>(longest) / side;
  const int h = std::max(1, static_cast<int>(image.height() / scale));
  const int w = std::max(1, static_cast<int>(image.width() / scale));
  ImageTensor out(h, w, image.channels());
  for (int r = 0; r < h; ++r) {
    const int r0 = static_cast<int>(r * scale);
    const int r1 = std::max(r0 + 1, std::min(image.height(), static_cast<int>((r + 1) * scale)));
    for (int c = 0; c < w; ++c) {
      const int c0 = static_cast<int>(c * scale);
      const int c1 = std::max(c0 + 1, std::min(image.width(), static_cast<int>((c + 1) * scale)));
      for (int b = 0; b < image.channels(); ++b) {
        double sum = 0.0;
        for (int y = r0; y < r1; ++y)
          for (int x = c0; x < c1; ++x) sum += image.at(y, x, b);
        out.at(r, c, b) = static_cast<float>(sum / ((r1 - r0) * (c1 - c0)));
      }
    }
  }
  return out;
}

}  // namespace

struct Service::Impl {
  explicit Impl(ServiceOptions opts) : options(std::move(opts)) { install_routes(); }

  ServiceOptions options;
  httplib::Server server;
  std::thread listener;

  std::mutex registry_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::map<std::string, std::shared_ptr<const FlimModel>> models;

  std::mutex jobs_mutex;
  std::condition_variable jobs_cv;
  std::map<std::string, Job> jobs;
  std::vector<std::thread> workers;
  int next_job = 1;
  int pending_jobs = 0;

  // Min-max normalized activations of every candidate kernel, keyed by
  // (project, revision, layer, image).
  using CacheKey = std::tuple<std::string, std::uint64_t, int, std::string>;
  std::mutex cache_mutex;
  std::list<std::pair<CacheKey, std::shared_ptr<const ImageTensor>>> cache;

  std::shared_ptr<Session> session(const std::string& id) {
    std::lock_guard lock(registry_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError(404, "unknown project '" + id + "'");
    return it->second;
  }

  std::string open(const fs::path& root, std::string id) {
    Project project = load_project(root);
    if (id.empty()) id = root.lexically_normal().filename().string();
    if (id.empty()) id = root.lexically_normal().parent_path().filename().string();
    if (id.empty()) throw DomainError("cannot derive a project id from " + root.string());
    auto state = std::make_shared<ProjectState>();
    state->project = std::move(project);
    state->model = FlimModel(state->project.heuristic, state->project.postproc);
    std::shared_ptr<const FlimModel> exported;
    if (fs::exists(state->project.model_dir() / "meta.json")) {
      try {
        exported = std::make_shared<const FlimModel>(load_model(state->project.model_dir()));
      } catch (const FormatError&) {
        exported.reset();
      }
    }
    auto s = std::make_shared<Session>();
    s->id = id;
    s->publish(std::move(state));
    std::lock_guard lock(registry_mutex);
    sessions[id] = s;
    if (exported) models[id] = exported;
    return id;
  }

  static const ImageEntry& image_entry(const ProjectState& state, const std::string& img) {
    const ImageEntry* entry = state.project.find_image(img);
    if (entry == nullptr) throw HttpError(404, "unknown image '" + img + "'");
    return *entry;
  }

  static int checked_layer(const ProjectState& state, int layer) {
    if (layer < 1 || layer > state.model.depth()) {
      throw HttpError(404, "layer " + std::to_string(layer) + " is not built");
    }
    return layer;
  }

  std::string image_param(const Request& req, const ProjectState& state) {
    if (req.has_param("img")) return req.get_param_value("img");
    const auto ids = state.project.training_image_ids();
    if (!ids.empty()) return ids.front();
    if (state.project.images.empty()) throw HttpError(404, "project has no images");
    return state.project.images.front().id;
  }

  std::shared_ptr<const ImageTensor> candidate_activations(const std::string& project, const ProjectState& state,
                                                           int layer, const std::string& img) {
    const CacheKey key{project, state.revision, layer, img};
    {
      std::lock_guard lock(cache_mutex);
      for (auto it = cache.begin(); it != cache.end(); ++it) {
        if (it->first == key) {
          cache.splice(cache.begin(), cache, it);
          return it->second;
        }
      }
    }
    const ImageTensor image = load_png(image_entry(state, img).path);
    const ImageTensor input = layer == 1 ? image : run_encoder(image, state.model, layer - 1);
    Layer all = state.model.layer(layer - 1);
    all.selected.resize(all.bank.size());
    for (std::size_t i = 0; i < all.selected.size(); ++i) all.selected[i] = static_cast<int>(i);
    auto acts = std::make_shared<const ImageTensor>(minmax_normalize_channels(run_layer(input, all)));
    std::lock_guard lock(cache_mutex);
    cache.emplace_front(key, acts);
    if (cache.size() > kActivationCacheSize) cache.pop_back();
    return acts;
  }

  // Runs `fn` under the project's writer lock and publishes its result.
  template <typename Fn>
  Json mutate(Session& s, Fn&& fn) {
    std::lock_guard lock(s.writer);
    auto next = std::make_shared<ProjectState>(*s.snapshot());
    Json result = fn(*next);
    s.publish(next);
    return result;
  }

  static void check_can_build(const ProjectState& state, const Json& body) {
    if (state.project.training_image_ids().empty()) throw HttpError(409, "no image carries markers");
    if (body.contains("layer") && body.at("layer").get<int>() != state.model.depth() + 1) {
      throw HttpError(409, "the next layer to build is " + std::to_string(state.model.depth() + 1));
    }
    if (!state.model.empty() && state.model.layers().back().selected.empty()) {
      throw HttpError(409, "the previous layer has no selected kernels");
    }
  }

  Json build_next_layer(ProjectState& state, const LayerSpec& spec, std::uint64_t seed, const Json& body) {
    check_can_build(state, body);
    const TrainingSet data = load_training_set(state.project);
    std::vector<ImageTensor> inputs = data.images;
    for (const Layer& layer : state.model.layers()) inputs = forward_layer(inputs, layer);
    if (state.model.empty()) state.model = FlimModel(state.project.heuristic, state.project.postproc);
    const int index = state.model.depth();
    state.model.append_layer(build_layer(inputs, data.markers, spec, {seed, kDefaultEpsilon, index}));
    state.dirty = false;
    state.invalidated.clear();
    const Layer& built = state.model.layers().back();
    return Json{{"layer", index + 1}, {"candidates", built.bank.size()}, {"spec", built.spec}};
  }

  std::string submit_job(std::shared_ptr<Session> s, LayerSpec spec, std::uint64_t seed, Json body) {
    std::string id;
    {
      std::lock_guard lock(jobs_mutex);
      id = "job-" + std::to_string(next_job++);
      Job& job = jobs[id];
      job.id = id;
      job.project = s->id;
      ++pending_jobs;
    }
    workers.emplace_back([this, s, spec, seed, body, id] {
      set_job(id, [](Job& j) { j.status = "running"; });
      try {
        Json result = mutate(*s, [&](ProjectState& st) { return build_next_layer(st, spec, seed, body); });
        set_job(id, [&](Job& j) {
          j.status = "succeeded";
          j.result = std::move(result);
        });
      } catch (const HttpError& e) {
        set_job(id, [&](Job& j) {
          j.status = "failed";
          j.error = e.what();
          j.error_status = e.status;
        });
      } catch (const std::exception& e) {
        set_job(id, [&](Job& j) {
          j.status = "failed";
          j.error = e.what();
          j.error_status = 422;
        });
      }
      std::lock_guard lock(jobs_mutex);
      --pending_jobs;
      jobs_cv.notify_all();
    });
    return id;
  }

  template <typename Fn>
  void set_job(const std::string& id, Fn&& fn) {
    std::lock_guard lock(jobs_mutex);
    fn(jobs.at(id));
  }

  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn](const Request& req, Response& res) {
      try {
        fn(req, res);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.what());
      } catch (const ValidationError& e) {
        send_error(res, 422, e.what(), diagnostics_json(e.diagnostics()));
      } catch (const DomainError& e) {
        send_error(res, 422, e.what());
      } catch (const FormatError& e) {
        send_error(res, e.code() == FormatCode::kIo ? 404 : 422, e.what());
      } catch (const Json::exception& e) {
        send_error(res, 422, e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  }

  void install_routes();
};

void Service::Impl::install_routes() {
  server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"}});
  server.Options(R"(/api/v1/.*)", [](const Request&, Response& res) { res.status = 204; });

  server.Get("/api/v1/health", [](const Request&, Response& res) {
    send_json(res, 200, {{"status", "ok"}, {"version", kVersion}});
  });

  server.Post("/api/v1/projects", guarded([this](const Request& req, Response& res) {
    const Json body = parse_body(req);
    if (!body.contains("path")) throw HttpError(422, "missing 'path'");
    const std::string id = open(body.at("path").get<std::string>(), body.value("id", std::string()));
    send_json(res, 201, project_json(id, *session(id)->snapshot()));
  }));

  server.Get(R"(/api/v1/projects/([^/]+))", guarded([this](const Request& req, Response& res) {
    auto s = session(req.matches[1]);
    send_json(res, 200, project_json(s->id, *s->snapshot()));
  }));

  server.Get(R"(/api/v1/projects/([^/]+)/images/([^/]+))", guarded([this](const Request& req, Response& res) {
    const Snapshot state = session(req.matches[1])->snapshot();
    const auto bytes = read_file_bytes(image_entry(*state, req.matches[2]).path);
    res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), "image/png");
  }));

  server.Get(R"(/api/v1/projects/([^/]+)/images/([^/]+)/markers)",
             guarded([this](const Request& req, Response& res) {
               const Snapshot state = session(req.matches[1])->snapshot();
               const std::string img = req.matches[2];
               image_entry(*state, img);
               send_json(res, 200, Json(state->project.markers_for(img)));
             }));

  server.Put(R"(/api/v1/projects/([^/]+)/images/([^/]+)/markers)",
             guarded([this](const Request& req, Response& res) {
               auto s = session(req.matches[1]);
               const std::string img = req.matches[2];
               const Json body = parse_body(req);
               MarkerSet markers = body.get<MarkerSet>();
               if (markers.image_id.empty()) markers.image_id = img;
               if (markers.image_id != img) throw HttpError(422, "image_id does not match the URL");
               const Json result = mutate(*s, [&](ProjectState& st) {
                 image_entry(st, img);
                 save_markers(st.project, markers);
                 st.project.markers[img] = canonicalize(markers);
                 for (const Layer& layer : st.model.layers()) st.invalidated.push_back(layer.spec);
                 const int dropped = st.model.depth();
                 st.model.truncate(0);
                 st.dirty = true;
                 Json out = Json(st.project.markers[img]);
                 out["dirty"] = true;
                 out["invalidated_layers"] = dropped;
                 return out;
               });
               send_json(res, 200, result);
             }));

  server.Post(R"(/api/v1/projects/([^/]+)/layers)", guarded([this](const Request& req, Response& res) {
    auto s = session(req.matches[1]);
    const Json body = req.body.empty() ? Json::object() : parse_body(req);
    if (!body.is_object()) throw HttpError(422, "layer spec must be an object");
    const LayerSpec spec = body.get<LayerSpec>();
    spec.validate();
    const std::uint64_t seed = body.value("seed", options.seed);
    check_can_build(*s->snapshot(), body);
    if (req.has_param("wait") && req.get_param_value("wait") != "0") {
      const Json result = mutate(*s, [&](ProjectState& st) { return build_next_layer(st, spec, seed, body); });
      send_json(res, 201, result);
      return;
    }
    const std::string job = submit_job(s, spec, seed, body);
    std::lock_guard lock(jobs_mutex);
    res.set_header("Location", "/api/v1/projects/" + s->id + "/jobs/" + job);
    send_json(res, 202, job_json(jobs.at(job)));
  }));

  server.Get(R"(/api/v1/projects/([^/]+)/jobs/([^/]+))", guarded([this](const Request& req, Response& res) {
    auto s = session(req.matches[1]);
    std::lock_guard lock(jobs_mutex);
    auto it = jobs.find(req.matches[2]);
    if (it == jobs.end() || it->second.project != s->id) throw HttpError(404, "unknown job");
    send_json(res, 200, job_json(it->second));
  }));

  server.Get(R"(/api/v1/projects/([^/]+)/layers/(\d+)/kernels)", guarded([this](const Request& req, Response& res) {
    auto s = session(req.matches[1]);
    const Snapshot state = s->snapshot();
    const int l = checked_layer(*state, layer_param(req, 2));
    const std::string img = image_param(req, *state);
    image_entry(*state, img);
    const auto acts = candidate_activations(s->id, *state, l, img);
    const ChannelStats stats = channel_stats(*acts);
    const WeightVector alpha = adapt_weights(stats, state->model.heuristic());
    const Layer& layer = state->model.layer(l - 1);
    Json kernels = Json::array();
    for (int k = 0; k < static_cast<int>(layer.bank.size()); ++k) {
      const bool selected = std::binary_search(layer.selected.begin(), layer.selected.end(), k);
      kernels.push_back({{"index", k},
                         {"provenance", layer.bank.provenance[k]},
                         {"mean", stats.mean[k]},
                         {"stddev", stats.stddev[k]},
                         {"sign", alpha.alpha[k]},
                         {"selected", selected},
                         {"thumbnail", "/api/v1/projects/" + s->id + "/layers/" + std::to_string(l) + "/kernels/" +
                                           std::to_string(k) + "/thumbnail?img=" + img}});
    }
    send_json(res, 200,
              {{"layer", l},
               {"image", img},
               {"heuristic", to_string(state->model.heuristic())},
               {"mean_of_means", stats.mean_of_means},
               {"std_of_means", stats.std_of_means},
               {"kernels", kernels}});
  }));

  server.Get(R"(/api/v1/projects/([^/]+)/layers/(\d+)/kernels/(\d+)/thumbnail)",
             guarded([this](const Request& req, Response& res) {
               auto s = session(req.matches[1]);
               const Snapshot state = s->snapshot();
               const int l = checked_layer(*state, layer_param(req, 2));
               const std::string img = image_param(req, *state);
               image_entry(*state, img);
               const std::string k_text = req.matches[3];
               const int k = k_text.size() > 6 ? -1 : std::stoi(k_text);
               if (k < 0 || k >= static_cast<int>(state->model.layer(l - 1).bank.size())) {
                 throw HttpError(404, "no such kernel");
               }
               const auto acts = candidate_activations(s->id, *state, l, img);
               const auto png = encode_png(downscale(acts->channel(k), kThumbnailSide));
               res.set_content(reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
             }));

  server.Put(R"(/api/v1/projects/([^/]+)/layers/(\d+)/selection)",
             guarded([this](const Request& req, Response& res) {
               auto s = session(req.matches[1]);
               const int l = layer_param(req, 2);
               const Json body = parse_body(req);
               const Json& list = body.is_object() ? body.at("selected") : body;
               if (!list.is_array()) throw HttpError(422, "selection must be a list of kernel indices");
               const auto indices = list.get<std::vector<int>>();
               const Json result = mutate(*s, [&](ProjectState& st) {
                 checked_layer(st, l);
                 st.model.set_selection(
                     l - 1, normalize_selection(indices, static_cast<int>(st.model.layer(l - 1).bank.size())));
                 return layer_json(st.model.layer(l - 1), l);
               });
               send_json(res, 200, result);
             }));

  server.Delete(R"(/api/v1/projects/([^/]+)/layers/(\d+))", guarded([this](const Request& req, Response& res) {
    auto s = session(req.matches[1]);
    const int l = layer_param(req, 2);
    const Json result = mutate(*s, [&](ProjectState& st) {
      checked_layer(st, l);
      st.model.truncate(l - 1);
      return Json{{"layers", st.model.depth()}};
    });
    send_json(res, 200, result);
  }));

  server.Get(R"(/api/v1/projects/([^/]+)/layers/(\d+)/saliency/([^/]+))",
             guarded([this](const Request& req, Response& res) {
               const Snapshot state = session(req.matches[1])->snapshot();
               const int l = checked_layer(*state, layer_param(req, 2));
               const ImageTensor image = load_png(image_entry(*state, req.matches[3]).path);
               const auto png = encode_png(decode_image(image, state->model, l).tensor());
               res.set_content(reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
             }));

  server.Get(R"(/api/v1/projects/([^/]+)/layers/(\d+)/saliency/([^/]+)/boxes)",
             guarded([this](const Request& req, Response& res) {
               const Snapshot state = session(req.matches[1])->snapshot();
               const int l = checked_layer(*state, layer_param(req, 2));
               const std::string img = req.matches[3];
               const ImageTensor image = load_png(image_entry(*state, img).path);
               const SaliencyMap map = decode_image(image, state->model, l);
               Json out = Json(detect_from_saliency(map, state->project.postproc, img));
               out["layer"] = l;
               auto gt = state->project.ground_truth.find(img);
               if (gt != state->project.ground_truth.end()) out["ground_truth"] = Json(gt->second)["boxes"];
               send_json(res, 200, out);
             }));

  server.Post(R"(/api/v1/projects/([^/]+)/export)", guarded([this](const Request& req, Response& res) {
    auto s = session(req.matches[1]);
    const Json body = req.body.empty() ? Json::object() : parse_body(req);
    const std::string model_id = body.value("model_id", s->id);
    std::lock_guard lock(s->writer);
    const Snapshot state = s->snapshot();
    if (state->model.empty()) throw HttpError(409, "no layers to export");
    auto model = std::make_shared<FlimModel>(state->model);
    model->freeze();
    save_model(*model, state->project.model_dir());
    {
      std::lock_guard reg(registry_mutex);
      models[model_id] = model;
    }
    send_json(res, 201,
              {{"model_id", model_id},
               {"path", state->project.model_dir().string()},
               {"layers", model->depth()},
               {"parameters", count_parameters(*model, true)},
               {"parameters_all", count_parameters(*model, false)}});
  }));

  server.Post(R"(/api/v1/models/([^/]+)/detect)", guarded([this](const Request& req, Response& res) {
    std::shared_ptr<const FlimModel> model;
    {
      std::lock_guard lock(registry_mutex);
      auto it = models.find(req.matches[1]);
      if (it == models.end()) throw HttpError(404, "unknown model '" + std::string(req.matches[1]) + "'");
      model = it->second;
    }
    std::string content = req.body;
    std::string image_id = req.has_param("id") ? req.get_param_value("id") : "image";
    if (req.is_multipart_form_data()) {
      if (req.files.empty()) throw HttpError(415, "multipart request carries no file");
      const auto& file = req.has_file("image") ? req.get_file_value("image") : req.files.begin()->second;
      content = file.content;
      if (!req.has_param("id") && !file.filename.empty()) image_id = fs::path(file.filename).stem().string();
    }
    const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(content.data()), content.size());
    if (!is_png(bytes)) throw HttpError(415, "expected a PNG image");
    send_json(res, 200, Json(detect_objects(decode_png(bytes), *model, image_id)));
  }));
}

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->server.new_task_queue = [n = impl_->options.threads] {
    return new httplib::ThreadPool(static_cast<std::size_t>(std::max(1, n)));
  };
}

Service::~Service() {
  stop();
  for (std::thread& t : impl_->workers) {
    if (t.joinable()) t.join();
  }
}

std::string Service::open_project(const fs::path& root, std::string id) { return impl_->open(root, std::move(id)); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::run() { return impl_->server.listen_after_bind(); }

void Service::start() {
  impl_->listener = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

void Service::wait_for_jobs() {
  std::unique_lock lock(impl_->jobs_mutex);
  impl_->jobs_cv.wait(lock, [this] { return impl_->pending_jobs == 0; });
}

}  // namespace flim
