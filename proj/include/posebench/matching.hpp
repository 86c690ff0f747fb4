#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "posebench/geometry.hpp"

namespace posebench {

/// Axis-aligned box in pixel coordinates, x1 < x2 and y1 < y2.
class BoundingBox {
 public:
  BoundingBox(double x1, double y1, double x2, double y2);

  double x1() const { return x1_; }
  double y1() const { return y1_; }
  double x2() const { return x2_; }
  double y2() const { return y2_; }
  double area() const { return (x2_ - x1_) * (y2_ - y1_); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double x1_, y1_, x2_, y2_;
};

/// Intersection over union with continuous coordinates (no +1 pixel
/// convention).
double iou(const BoundingBox& a, const BoundingBox& b);

struct GroundTruthObject {
  std::string image_id;
  std::string class_name;
  BoundingBox box;
  Pose pose;
  bool difficult = false;
};

struct Detection {
  std::string image_id;
  std::string class_name;
  BoundingBox box;
  double score = 0.0;
  Pose pose;
  std::int64_t det_id = 0;  // tie-break key among equal scores
};

enum class IouRule {
  kGreaterEqual,  // overlap >= threshold (PASCAL toolkit behaviour)
  kStrict,        // overlap > threshold
};

enum class MatchStatus {
  kTruePositive,   // localized: claimed an unmatched non-difficult GT
  kFalsePositive,  // no qualifying GT, or a duplicate
  kIgnored,        // overlaps only difficult GT; not scored at all
};

struct MatchEntry {
  std::size_t det_index = 0;  // into the detection span passed to match()
  std::int64_t det_id = 0;
  double score = 0.0;
  MatchStatus status = MatchStatus::kFalsePositive;
  std::optional<std::size_t> gt_index;  // into the GT span, for true positives
  double overlap = 0.0;                 // IoU with the claimed GT
  Pose det_pose;
  std::optional<Pose> gt_pose;
};

/// Ranked (score descending, det_id ascending) assignment of one class's
/// detections to ground truth.
struct MatchTable {
  std::string class_name;
  std::vector<MatchEntry> entries;
  std::size_t n_gt = 0;  // non-difficult GT of this class

  std::size_t true_positives() const;
  std::size_t false_positives() const;
  std::size_t ignored() const;
};

struct MatchOptions {
  double iou_threshold = 0.5;
  IouRule iou_rule = IouRule::kGreaterEqual;
};

bool overlap_qualifies(double overlap, const MatchOptions& options);

/// Greedy assignment in rank order. Each detection of `class_name` claims the
/// unmatched non-difficult GT in its image with the highest qualifying IoU.
/// Without one, it is ignored if it qualifies against a difficult GT and a
/// false positive otherwise. Entries of other classes are skipped.
MatchTable match(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                 std::string_view class_name, const MatchOptions& options = {});

// Pose correctness rules ----------------------------------------------------

/// Same azimuth bin.
bool pose_correct_discrete(const Pose& det, const Pose& gt, const ViewBinning& binning);
/// Distances within this many radians below a threshold count as ties and
/// fail the strict comparison. A relative rotation of exactly 30 degrees
/// otherwise evaluates one ulp under pi/6 and would pass.
inline constexpr double kPoseTieTolerance = 1e-12;

/// Azimuth distance strictly below 2pi / views.
bool pose_correct_continuous(const Pose& det, const Pose& gt, int views);
/// Geodesic distance of the full rotations strictly below `threshold`.
bool pose_correct_geodesic(const Pose& det, const Pose& gt, double threshold = kPi / 6.0);

struct DiscreteRule {
  ViewBinning binning;
};
struct ContinuousRule {
  int views = 8;
};
struct GeodesicRule {
  double threshold = kPi / 6.0;
};
using PoseRule = std::variant<DiscreteRule, ContinuousRule, GeodesicRule>;

bool pose_correct(const PoseRule& rule, const Pose& det, const Pose& gt);

}  // namespace posebench
