#pragma once

#include <cstddef>
#include <vector>

#include "posebench/matching.hpp"

namespace posebench {

enum class ApInterpolation {
  kAllPoint,     // area under the monotone precision envelope
  kElevenPoint,  // mean envelope precision at recall 0, 0.1, ..., 1
};

/// One point per scored detection, in rank order. Ignored detections do not
/// appear. For orientation-similarity curves `precision` holds the running
/// mean similarity instead.
struct PRCurve {
  std::vector<double> recall;
  std::vector<double> precision;
  std::vector<double> thresholds;

  std::size_t size() const { return recall.size(); }
  bool empty() const { return recall.empty(); }
};

/// Localization precision-recall. With a pose rule, a localized detection
/// whose pose is wrong counts as a false positive (its GT stays consumed).
PRCurve precision_recall(const MatchTable& table, std::size_t n_gt,
                         const PoseRule* rule = nullptr);

/// Recall from localization; the second series is the running mean of
/// (1 + cos(delta azimuth)) / 2 over all scored detections, FPs contributing 0.
PRCurve orientation_similarity_curve(const MatchTable& table, std::size_t n_gt);

/// Running maximum from the right: envelope[k] = max_{j >= k} values[j].
std::vector<double> precision_envelope(const std::vector<double>& values);

double integrate(const PRCurve& curve, ApInterpolation interp = ApInterpolation::kAllPoint);

double ap(const MatchTable& table, std::size_t n_gt,
          ApInterpolation interp = ApInterpolation::kAllPoint);
double avp(const MatchTable& table, std::size_t n_gt, const PoseRule& rule,
           ApInterpolation interp = ApInterpolation::kAllPoint);
double aos(const MatchTable& table, std::size_t n_gt,
           ApInterpolation interp = ApInterpolation::kAllPoint);

}  // namespace posebench
