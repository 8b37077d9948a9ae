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
#include "flim/metrics.hpp"

#include <algorithm>
#include <map>

#include "flim/error.hpp"

namespace flim {

std::array<double, kThresholdCount> iou_thresholds() noexcept {
  std::array<double, kThresholdCount> t{};
  for (int i = 0; i < kThresholdCount; ++i) t[i] = (50.0 + 5.0 * i) / 100.0;
  return t;
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const long long ix = std::max(0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const long long iy = std::max(0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const long long inter = ix * iy;
  const long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

MatchResult match_detections(const DetectionSet& predictions, const GroundTruth& gt, double threshold) {
  const auto& preds = predictions.boxes;
  for (std::size_t i = 1; i < preds.size(); ++i) {
    if (preds[i].score > preds[i - 1].score) {
      throw DomainError("predictions must be sorted by descending score");
    }
  }
  MatchResult result;
  result.threshold = threshold;
  result.predictions.resize(preds.size());
  std::vector<bool> taken(gt.boxes.size(), false);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gt.boxes.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(preds[p], gt.boxes[g]);
      if (best < 0 || v > best_iou) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    result.predictions[p].iou = best_iou;
    if (best >= 0 && best_iou > threshold) {
      taken[static_cast<std::size_t>(best)] = true;
      result.predictions[p].gt_index = best;
      ++result.true_positives;
    } else {
      ++result.false_positives;
    }
  }
  result.false_negatives = static_cast<int>(gt.boxes.size()) - result.true_positives;
  return result;
}

double PRCurve::final_precision() const noexcept {
  return points.empty() ? 0.0 : points.back().precision;
}

double PRCurve::final_recall() const noexcept {
  return points.empty() ? 0.0 : points.back().recall;
}

PRCurve pr_curve(std::span<const DetectionSet> predictions, std::span<const GroundTruth> gts,
                 double threshold) {
  std::map<std::string, std::size_t> gt_index;
  int gt_count = 0;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    gt_index.emplace(gts[i].image_id, i);
    gt_count += static_cast<int>(gts[i].boxes.size());
  }
  if (gt_count == 0) throw DomainError("no ground-truth boxes: recall is undefined");

  struct Ranked {
    double score;
    std::size_t image;
    std::size_t rank;
    bool tp;
  };
  std::vector<Ranked> ranked;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto it = gt_index.find(predictions[i].image_id);
    if (it == gt_index.end()) {
      throw DomainError("predictions for image '" + predictions[i].image_id + "' have no ground truth");
    }
    const MatchResult match = match_detections(predictions[i], gts[it->second], threshold);
    for (std::size_t r = 0; r < predictions[i].boxes.size(); ++r) {
      ranked.push_back({predictions[i].boxes[r].score, i, r, match.predictions[r].gt_index >= 0});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.score > b.score; });

  PRCurve curve;
  curve.threshold = threshold;
  curve.ground_truth_count = gt_count;
  curve.points.reserve(ranked.size());
  int tp = 0;
  int fp = 0;
  for (const Ranked& r : ranked) {
    (r.tp ? tp : fp) += 1;
    curve.points.push_back({static_cast<double>(tp) / gt_count, static_cast<double>(tp) / (tp + fp),
                            r.score, r.tp});
  }
  return curve;
}

double average_precision(const PRCurve& curve) {
  const auto& pts = curve.points;
  if (pts.empty()) return 0.0;
  // Precision envelope from the right.
  std::vector<double> envelope(pts.size());
  double running = 0.0;
  for (std::size_t i = pts.size(); i-- > 0;) {
    running = std::max(running, pts[i].precision);
    envelope[i] = running;
  }
  double area = 0.0;
  double previous_recall = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].recall > previous_recall) {
      area += (pts[i].recall - previous_recall) * envelope[i];
      previous_recall = pts[i].recall;
    }
  }
  return area;
}

double mean_average_precision(std::span<const DetectionSet> predictions,
                              std::span<const GroundTruth> gts) {
  double sum = 0.0;
  for (double t : iou_thresholds()) sum += average_precision(pr_curve(predictions, gts, t));
  return sum / kThresholdCount;
}

double f_beta(double precision, double recall, double beta) noexcept {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  return denom > 0.0 ? (1.0 + b2) * precision * recall / denom : 0.0;
}

EvaluationReport evaluate(std::span<const DetectionSet> predictions, std::span<const GroundTruth> gts) {
  EvaluationReport report;
  double ap_sum = 0.0;
  const auto thresholds = iou_thresholds();
  for (int i = 0; i < kThresholdCount; ++i) {
    PRCurve curve = pr_curve(predictions, gts, thresholds[i]);
    const double ap = average_precision(curve);
    ap_sum += ap;
    const double f2 = f_beta(curve.final_precision(), curve.final_recall());
    if (i == 0) {
      report.ap_50 = ap;
      report.f2_50 = f2;
    } else if (i == 5) {
      report.ap_75 = ap;
      report.f2_75 = f2;
    }
    report.curves.push_back(std::move(curve));
  }
  report.mu_ap = ap_sum / kThresholdCount;
  return report;
}

}  // namespace flim
