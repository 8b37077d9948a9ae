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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "flim/detection.hpp"
#include "flim/markers.hpp"

namespace flim {

/// IoU thresholds 0.50, 0.55, ..., 0.95.
inline constexpr int kThresholdCount = 10;
std::array<double, kThresholdCount> iou_thresholds() noexcept;

/// Intersection over union of half-open pixel boxes.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

struct PredictionMatch {
  int gt_index = -1;  // -1: false positive
  double iou = 0.0;   // best IoU against the gt boxes still free at its turn
};

struct MatchResult {
  double threshold = 0.5;
  std::vector<PredictionMatch> predictions;  // parallel to the prediction list
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

/// Greedy one-to-one matching in descending score order. A prediction takes
/// the free ground-truth box with the highest IoU when that IoU is strictly
/// greater than `threshold`.
MatchResult match_detections(const DetectionSet& predictions, const GroundTruth& gt, double threshold);

struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
  double score = 0.0;
  bool true_positive = false;
};

struct PRCurve {
  double threshold = 0.5;
  int ground_truth_count = 0;
  std::vector<PRPoint> points;  // one per prediction, descending score

  double final_precision() const noexcept;
  double final_recall() const noexcept;
};

/// Sweeps all predictions of all images by descending score. Every
/// prediction must belong to an image present in `gts`; throws DomainError
/// when the ground truth holds no boxes at all.
PRCurve pr_curve(std::span<const DetectionSet> predictions, std::span<const GroundTruth> gts,
                 double threshold);

/// All-point interpolated area under the curve: precision at recall r is
/// the maximum precision at any recall >= r.
double average_precision(const PRCurve& curve);

/// Mean of average_precision over the ten IoU thresholds.
double mean_average_precision(std::span<const DetectionSet> predictions,
                              std::span<const GroundTruth> gts);

/// (1 + beta^2) P R / (beta^2 P + R); zero when the denominator is zero.
double f_beta(double precision, double recall, double beta = 2.0) noexcept;

struct EvaluationReport {
  double f2_50 = 0.0;
  double ap_50 = 0.0;
  double f2_75 = 0.0;
  double ap_75 = 0.0;
  double mu_ap = 0.0;
  std::vector<PRCurve> curves;  // one per threshold in iou_thresholds()
};

EvaluationReport evaluate(std::span<const DetectionSet> predictions, std::span<const GroundTruth> gts);

}  // namespace flim
