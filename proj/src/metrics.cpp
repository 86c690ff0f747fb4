#include "posebench/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace posebench {

PRCurve precision_recall(const MatchTable& table, std::size_t n_gt, const PoseRule* rule) {
  PRCurve curve;
  std::size_t tp = 0, scored = 0;
  for (const MatchEntry& e : table.entries) {
    if (e.status == MatchStatus::kIgnored) continue;
    ++scored;
    if (e.status == MatchStatus::kTruePositive &&
        (rule == nullptr || pose_correct(*rule, e.det_pose, *e.gt_pose))) {
      ++tp;
    }
    curve.recall.push_back(n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt));
    curve.precision.push_back(static_cast<double>(tp) / static_cast<double>(scored));
    curve.thresholds.push_back(e.score);
  }
  return curve;
}

PRCurve orientation_similarity_curve(const MatchTable& table, std::size_t n_gt) {
  PRCurve curve;
  std::size_t tp = 0, scored = 0;
  double similarity = 0.0;
  for (const MatchEntry& e : table.entries) {
    if (e.status == MatchStatus::kIgnored) continue;
    ++scored;
    if (e.status == MatchStatus::kTruePositive) {
      ++tp;
      const double delta = e.det_pose.azimuth.radians() - e.gt_pose->azimuth.radians();
      similarity += (1.0 + std::cos(delta)) / 2.0;
    }
    curve.recall.push_back(n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt));
    curve.precision.push_back(similarity / static_cast<double>(scored));
    curve.thresholds.push_back(e.score);
  }
  return curve;
}

std::vector<double> precision_envelope(const std::vector<double>& values) {
  std::vector<double> env(values);
  for (std::size_t i = env.size(); i-- > 1;) env[i - 1] = std::max(env[i - 1], env[i]);
  return env;
}

double integrate(const PRCurve& curve, ApInterpolation interp) {
  if (curve.empty()) return 0.0;
  const std::vector<double> env = precision_envelope(curve.precision);
  if (interp == ApInterpolation::kElevenPoint) {
    double sum = 0.0;
    std::size_t k = 0;
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      while (k < curve.size() && curve.recall[k] < t) ++k;
      // env is non-increasing, so the first point reaching recall t holds
      // the maximum precision over all points at or beyond it.
      if (k < curve.size()) sum += env[k];
    }
    return sum / 11.0;
  }
  double area = 0.0, prev_recall = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (curve.recall[k] > prev_recall) {
      area += (curve.recall[k] - prev_recall) * env[k];
      prev_recall = curve.recall[k];
    }
  }
  // Telescoped recall steps can overshoot 1 by an ulp.
  return std::min(area, 1.0);
}

double ap(const MatchTable& table, std::size_t n_gt, ApInterpolation interp) {
  if (n_gt == 0) return 0.0;
  return integrate(precision_recall(table, n_gt), interp);
}

double avp(const MatchTable& table, std::size_t n_gt, const PoseRule& rule,
           ApInterpolation interp) {
  if (n_gt == 0) return 0.0;
  return integrate(precision_recall(table, n_gt, &rule), interp);
}

double aos(const MatchTable& table, std::size_t n_gt, ApInterpolation interp) {
  if (n_gt == 0) return 0.0;
  return integrate(orientation_similarity_curve(table, n_gt), interp);
}

}  // namespace posebench
