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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace flim {

struct KMeansOptions {
  int max_iterations = 100;
  double relative_tolerance = 1e-6;
};

/// Row-major n x dims matrix of samples.
struct PointSet {
  std::vector<double> values;
  std::size_t dims = 0;

  std::size_t count() const noexcept { return dims == 0 ? 0 : values.size() / dims; }
  std::span<const double> row(std::size_t i) const noexcept { return {values.data() + i * dims, dims}; }
};

struct KMeansResult {
  PointSet centers;
  std::vector<int> labels;              // per input point
  std::vector<double> objective;        // within-cluster sum of squares, one per assignment step
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's k-means with k-means++ seeding. The effective cluster count is
/// min(k, number of distinct points), so coincident samples never produce
/// duplicate centers. Deterministic for a given seed.
KMeansResult kmeans(const PointSet& points, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Within-cluster sum of squared distances of `labels` against the centroids
/// those labels induce.
double within_cluster_ss(const PointSet& points, std::span<const int> labels, int k);

std::size_t count_distinct_rows(const PointSet& points);

}  // namespace flim
