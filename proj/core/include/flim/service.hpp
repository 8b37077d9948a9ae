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
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace flim {

struct ServiceOptions {
  std::uint64_t seed = 0;  // base seed for kernel estimation
  int threads = 8;         // HTTP worker threads
  std::string cors_origin = "*";
};

/// HTTP builder service under /api/v1. Projects are held as immutable
/// snapshots; mutations of one project run one at a time and publish a new
/// snapshot when complete, so readers never see a partial update.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Opens a project directory under `id` (the directory name when empty).
  /// Throws ValidationError. An exported model found in the project is
  /// registered for detection under the same id.
  std::string open_project(const std::filesystem::path& root, std::string id = {});

  /// Binds to host:port; port 0 picks a free one. Returns the bound port or
  /// -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires a successful bind().
  bool run();
  /// run() on a background thread; returns once accepting connections.
  void start();
  void stop();
  /// Blocks until no build job is queued or running.
  void wait_for_jobs();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace flim
