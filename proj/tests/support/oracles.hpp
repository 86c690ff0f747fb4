#pragma once

// Independent reference implementations used only by the tests. Nothing
// here calls into the library's matching, metric or rotation code; the only
// shared pieces are the plain data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "posebench/matching.hpp"

namespace oracle {

using posebench::BoundingBox;
using posebench::Detection;
using posebench::GroundTruthObject;
using posebench::Pose;

constexpr double kPi = 3.14159265358979323846;

inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::max(0.0, std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1()));
  const double h = std::max(0.0, std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1()));
  const double inter = w * h;
  const double uni = (a.x2() - a.x1()) * (a.y2() - a.y1()) +
                     (b.x2() - b.x1()) * (b.y2() - b.y1()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

inline bool qualifies(double overlap, double threshold, bool strict) {
  return strict ? overlap > threshold : overlap >= threshold;
}

/// Indices of `cls` detections, best first.
inline std::vector<std::size_t> ranked(const std::vector<Detection>& dets,
                                       const std::string& cls) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].class_name == cls) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return dets[a].det_id < dets[b].det_id;
  });
  return idx;
}

inline std::size_t positives(const std::vector<GroundTruthObject>& gts, const std::string& cls) {
  return static_cast<std::size_t>(std::count_if(gts.begin(), gts.end(), [&](const auto& g) {
    return g.class_name == cls && !g.difficult;
  }));
}

enum class Outcome { kTp, kFp, kIgnored };

struct Assignment {
  std::vector<Outcome> outcome;               // per ranked detection
  std::vector<std::optional<std::size_t>> gt;  // claimed GT index
};

/// Tries every injective assignment of the ranked detections to qualifying
/// non-difficult GT and keeps the one whose per-rank overlap vector is
/// lexicographically largest (an unassigned detection scores -1).
inline Assignment exhaustive_match(const std::vector<Detection>& dets,
                                   const std::vector<GroundTruthObject>& gts,
                                   const std::string& cls, double threshold, bool strict) {
  const std::vector<std::size_t> order = ranked(dets, cls);
  const std::size_t n = order.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> options(n);
  for (std::size_t r = 0; r < n; ++r) {
    const Detection& d = dets[order[r]];
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const GroundTruthObject& t = gts[g];
      if (t.class_name != cls || t.image_id != d.image_id || t.difficult) continue;
      const double o = box_iou(d.box, t.box);
      if (qualifies(o, threshold, strict)) options[r].push_back({g, o});
    }
  }

  std::vector<double> best_key(n, -2.0), key(n);
  std::vector<std::optional<std::size_t>> best_pick(n), pick(n);
  std::vector<bool> used(gts.size(), false);
  std::function<void(std::size_t)> rec = [&](std::size_t r) {
    if (r == n) {
      if (std::lexicographical_compare(best_key.begin(), best_key.end(), key.begin(),
                                       key.end())) {
        best_key = key;
        best_pick = pick;
      }
      return;
    }
    key[r] = -1.0;
    pick[r].reset();
    rec(r + 1);
    for (const auto& [g, o] : options[r]) {
      if (used[g]) continue;
      used[g] = true;
      key[r] = o;
      pick[r] = g;
      rec(r + 1);
      used[g] = false;
    }
  };
  rec(0);

  Assignment out;
  for (std::size_t r = 0; r < n; ++r) {
    out.gt.push_back(best_pick[r]);
    if (best_pick[r]) {
      out.outcome.push_back(Outcome::kTp);
      continue;
    }
    const Detection& d = dets[order[r]];
    bool difficult_hit = false;
    for (const GroundTruthObject& t : gts) {
      if (t.class_name == cls && t.image_id == d.image_id && t.difficult &&
          qualifies(box_iou(d.box, t.box), threshold, strict)) {
        difficult_hit = true;
      }
    }
    out.outcome.push_back(difficult_hit ? Outcome::kIgnored : Outcome::kFp);
  }
  return out;
}

// Pose rules ----------------------------------------------------------------

inline double circular_gap(double a, double b) {
  return std::abs(std::atan2(std::sin(a - b), std::cos(a - b)));
}

inline int centered_bin(double a, int views, double offset) {
  const double w = 2.0 * kPi / views;
  const long k = static_cast<long>(std::floor((a - offset) / w + 0.5));
  return static_cast<int>(((k % views) + views) % views);
}

struct Quat {
  double w, x, y, z;
};

inline Quat qmul(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quat axis_angle_quat(double ax, double ay, double az, double theta) {
  const double n = std::sqrt(ax * ax + ay * ay + az * az);
  const double s = std::sin(theta / 2.0) / n;
  return {std::cos(theta / 2.0), ax * s, ay * s, az * s};
}

inline Quat pose_quat(const Pose& p) {
  return qmul(qmul(axis_angle_quat(0, 0, 1, p.inplane.radians()),
                   axis_angle_quat(1, 0, 0, -p.elevation.radians())),
              axis_angle_quat(0, 0, 1, -p.azimuth.radians()));
}

/// Rotation angle of conj(b) * a, in [0, pi].
inline double relative_angle(const Quat& a, const Quat& b) {
  const Quat rel = qmul({b.w, -b.x, -b.y, -b.z}, a);
  const double v = std::sqrt(rel.x * rel.x + rel.y * rel.y + rel.z * rel.z);
  return 2.0 * std::atan2(v, std::abs(rel.w));
}

/// 3x3 row-major product, written out.
using Mat3 = std::array<double, 9>;

inline Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[3 * i + j] += a[3 * i + k] * b[3 * k + j];
  return c;
}

inline Mat3 rz(double t) {
  return {std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1};
}

inline Mat3 rx(double t) {
  return {1, 0, 0, 0, std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t)};
}

enum class RuleKind { kNone, kDiscrete, kContinuous, kGeodesic };

struct Rule {
  RuleKind kind = RuleKind::kNone;
  int views = 8;
  double offset = 0.0;
  double geodesic_threshold = kPi / 6.0;

  bool correct(const Pose& det, const Pose& gt) const {
    switch (kind) {
      case RuleKind::kNone:
        return true;
      case RuleKind::kDiscrete:
        return centered_bin(det.azimuth.radians(), views, offset) ==
               centered_bin(gt.azimuth.radians(), views, offset);
      case RuleKind::kContinuous:
        return circular_gap(det.azimuth.radians(), gt.azimuth.radians()) < 2.0 * kPi / views;
      case RuleKind::kGeodesic:
        return relative_angle(pose_quat(det), pose_quat(gt)) < geodesic_threshold;
    }
    return false;
  }
};

// Threshold enumeration -------------------------------------------------------

struct PrPoint {
  double recall;
  double precision;
};

enum class Measure { kPrecision, kOrientation };

/// For every rank cut-off k, re-matches the top-k detections from scratch
/// and records one (recall, precision) point.
inline std::vector<PrPoint> enumerate_thresholds(const std::vector<Detection>& dets,
                                                 const std::vector<GroundTruthObject>& gts,
                                                 const std::string& cls, double threshold,
                                                 bool strict, const Rule& rule, Measure measure) {
  const std::vector<std::size_t> order = ranked(dets, cls);
  const double n_gt = static_cast<double>(positives(gts, cls));
  std::vector<PrPoint> points;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    std::vector<bool> claimed(gts.size(), false);
    double scored = 0, hits = 0, localized = 0, similarity = 0;
    for (std::size_t r = 0; r < k; ++r) {
      const Detection& d = dets[order[r]];
      double best = -1.0;
      std::optional<std::size_t> best_g;
      bool difficult_hit = false;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        const GroundTruthObject& t = gts[g];
        if (t.class_name != cls || t.image_id != d.image_id) continue;
        const double o = box_iou(d.box, t.box);
        if (!qualifies(o, threshold, strict)) continue;
        if (t.difficult) {
          difficult_hit = true;
        } else if (!claimed[g] && o > best) {
          best = o;
          best_g = g;
        }
      }
      if (best_g) {
        claimed[*best_g] = true;
        ++scored;
        ++localized;
        const Pose& gp = gts[*best_g].pose;
        if (rule.correct(d.pose, gp)) ++hits;
        similarity += (1.0 + std::cos(d.pose.azimuth.radians() - gp.azimuth.radians())) / 2.0;
      } else if (!difficult_hit) {
        ++scored;
      }
    }
    if (scored == 0 || n_gt == 0) continue;
    if (measure == Measure::kPrecision) {
      points.push_back({hits / n_gt, hits / scored});
    } else {
      points.push_back({localized / n_gt, similarity / scored});
    }
  }
  return points;
}

/// Sum over distinct recall levels of (level step) * (best precision at any
/// recall at or above that level).
inline double all_point_area(const std::vector<PrPoint>& points) {
  std::vector<double> levels;
  for (const PrPoint& p : points) levels.push_back(p.recall);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  double area = 0.0, prev = 0.0;
  for (double r : levels) {
    double best = 0.0;
    for (const PrPoint& p : points) {
      if (p.recall >= r) best = std::max(best, p.precision);
    }
    area += (r - prev) * best;
    prev = r;
  }
  return area;
}

inline double eleven_point_area(const std::vector<PrPoint>& points) {
  double sum = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    double best = 0.0;
    for (const PrPoint& p : points) {
      if (p.recall >= t) best = std::max(best, p.precision);
    }
    sum += best;
  }
  return sum / 11.0;
}

}  // namespace oracle
