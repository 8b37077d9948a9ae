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
#include "flim/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "flim/error.hpp"

namespace flim {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Uniform double in [0, 1) from the top 53 bits; stable across standard
// library implementations, unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

PointSet seed_plus_plus(const PointSet& points, int k, std::mt19937_64& rng) {
  const std::size_t n = points.count();
  PointSet centers{{}, points.dims};
  centers.values.reserve(static_cast<std::size_t>(k) * points.dims);

  const std::size_t first = std::min<std::size_t>(n - 1, static_cast<std::size_t>(unit_uniform(rng) * n));
  auto append = [&](std::size_t i) {
    auto r = points.row(i);
    centers.values.insert(centers.values.end(), r.begin(), r.end());
  };
  append(first);

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points.row(i), points.row(first));

  while (static_cast<int>(centers.count()) < k) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    if (total <= 0.0) break;
    const double target = unit_uniform(rng) * total;
    double running = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      running += nearest[i];
      pick = i;
      if (running > target) break;
    }
    append(pick);
    auto c = centers.row(centers.count() - 1);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(points.row(i), c));
  }
  return centers;
}

// Assigns each point to its nearest center (lowest index on ties) and returns
// the objective. `dist` receives each point's squared distance.
double assign(const PointSet& points, const PointSet& centers, std::vector<int>& labels,
              std::vector<double>& dist) {
  const std::size_t n = points.count();
  const std::size_t k = centers.count();
  double objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int label = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double d = squared_distance(points.row(i), centers.row(c));
      if (d < best) {
        best = d;
        label = static_cast<int>(c);
      }
    }
    labels[i] = label;
    dist[i] = best;
    objective += best;
  }
  return objective;
}

// Moves centers to the centroids of their members. Clusters left empty take
// the point farthest from its current center, one distinct point each.
void update(const PointSet& points, PointSet& centers, const std::vector<int>& labels,
            std::vector<double> dist, bool reseed_empty) {
  const std::size_t k = centers.count();
  const std::size_t d = points.dims;
  std::vector<double> sums(k * d, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.count(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    auto r = points.row(i);
    for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += r[j];
    ++counts[c];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      for (std::size_t j = 0; j < d; ++j) {
        centers.values[c * d + j] = sums[c * d + j] / static_cast<double>(counts[c]);
      }
      continue;
    }
    if (!reseed_empty) continue;
    const auto far = std::max_element(dist.begin(), dist.end());
    if (far == dist.end() || *far <= 0.0) continue;
    const auto i = static_cast<std::size_t>(far - dist.begin());
    auto r = points.row(i);
    std::copy(r.begin(), r.end(), centers.values.begin() + static_cast<std::ptrdiff_t>(c * d));
    *far = 0.0;
  }
}

}  // namespace

std::size_t count_distinct_rows(const PointSet& points) {
  const std::size_t n = points.count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    auto ra = points.row(a);
    auto rb = points.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = n == 0 ? 0 : 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

double within_cluster_ss(const PointSet& points, std::span<const int> labels, int k) {
  const std::size_t d = points.dims;
  std::vector<double> sums(static_cast<std::size_t>(k) * d, 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < points.count(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    auto r = points.row(i);
    for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += r[j];
    ++counts[c];
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.count(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    auto r = points.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = r[j] - sums[c * d + j] / static_cast<double>(counts[c]);
      total += diff * diff;
    }
  }
  return total;
}

KMeansResult kmeans(const PointSet& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (points.dims == 0 || points.count() == 0) throw DomainError("k-means needs at least one point");
  if (points.values.size() % points.dims != 0) throw DomainError("point matrix is ragged");
  if (k < 1) throw DomainError("k-means needs k >= 1");

  const std::size_t n = points.count();
  k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), count_distinct_rows(points)));

  std::mt19937_64 rng(seed);
  KMeansResult result;
  result.centers = seed_plus_plus(points, k, rng);
  result.labels.assign(n, 0);
  std::vector<double> dist(n);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double objective = assign(points, result.centers, result.labels, dist);
    result.objective.push_back(objective);
    result.iterations = iter + 1;
    if (iter > 0) {
      const double previous = result.objective[result.objective.size() - 2];
      if (previous - objective <= options.relative_tolerance * previous) {
        result.converged = true;
        break;
      }
    }
    update(points, result.centers, result.labels, dist, /*reseed_empty=*/true);
  }
  // Report centroids of the final partition.
  update(points, result.centers, result.labels, dist, /*reseed_empty=*/false);
  return result;
}

}  // namespace flim
