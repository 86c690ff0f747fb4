#include "posebench/matching.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "posebench/error.hpp"

namespace posebench {

BoundingBox::BoundingBox(double x1, double y1, double x2, double y2)
    : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2)) {
    throw ValidationError("bounding box has non-finite coordinates");
  }
  if (!(x1 < x2) || !(y1 < y2)) {
    throw ValidationError("bounding box must satisfy x1 < x2 and y1 < y2");
  }
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

std::size_t MatchTable::true_positives() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
    return e.status == MatchStatus::kTruePositive;
  }));
}

std::size_t MatchTable::false_positives() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
    return e.status == MatchStatus::kFalsePositive;
  }));
}

std::size_t MatchTable::ignored() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
    return e.status == MatchStatus::kIgnored;
  }));
}

bool overlap_qualifies(double overlap, const MatchOptions& options) {
  return options.iou_rule == IouRule::kStrict ? overlap > options.iou_threshold
                                              : overlap >= options.iou_threshold;
}

MatchTable match(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                 std::string_view class_name, const MatchOptions& options) {
  MatchTable table;
  table.class_name = std::string(class_name);

  std::unordered_map<std::string_view, std::vector<std::size_t>> gt_by_image;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (gts[g].class_name != class_name) continue;
    gt_by_image[gts[g].image_id].push_back(g);
    if (!gts[g].difficult) ++table.n_gt;
  }
  static const std::vector<std::size_t> kNone;

  std::vector<std::size_t> order;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    if (dets[d].class_name == class_name) order.push_back(d);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return dets[a].det_id < dets[b].det_id;
  });

  std::vector<bool> claimed(gts.size(), false);
  table.entries.reserve(order.size());
  for (std::size_t d : order) {
    const Detection& det = dets[d];
    MatchEntry entry;
    entry.det_index = d;
    entry.det_id = det.det_id;
    entry.score = det.score;
    entry.det_pose = det.pose;

    std::optional<std::size_t> best;
    double best_overlap = -1.0;
    bool hits_difficult = false;
    const auto it = gt_by_image.find(det.image_id);
    for (std::size_t g : it == gt_by_image.end() ? kNone : it->second) {
      const GroundTruthObject& gt = gts[g];
      const double o = iou(det.box, gt.box);
      if (!overlap_qualifies(o, options)) continue;
      if (gt.difficult) {
        hits_difficult = true;
      } else if (!claimed[g] && o > best_overlap) {
        best = g;
        best_overlap = o;
      }
    }

    if (best) {
      claimed[*best] = true;
      entry.status = MatchStatus::kTruePositive;
      entry.gt_index = best;
      entry.overlap = best_overlap;
      entry.gt_pose = gts[*best].pose;
    } else if (hits_difficult) {
      entry.status = MatchStatus::kIgnored;
    } else {
      entry.status = MatchStatus::kFalsePositive;
    }
    table.entries.push_back(std::move(entry));
  }
  return table;
}

bool pose_correct_discrete(const Pose& det, const Pose& gt, const ViewBinning& binning) {
  return binning.bin_of(det.azimuth) == binning.bin_of(gt.azimuth);
}

bool pose_correct_continuous(const Pose& det, const Pose& gt, int views) {
  if (views < 1) throw ValidationError("number of views must be >= 1");
  return angular_distance(det.azimuth, gt.azimuth) < kTwoPi / views - kPoseTieTolerance;
}

bool pose_correct_geodesic(const Pose& det, const Pose& gt, double threshold) {
  return geodesic_distance(rotation_from_pose(gt), rotation_from_pose(det)) <
         threshold - kPoseTieTolerance;
}

bool pose_correct(const PoseRule& rule, const Pose& det, const Pose& gt) {
  return std::visit(
      [&](const auto& r) -> bool {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, DiscreteRule>) {
          return pose_correct_discrete(det, gt, r.binning);
        } else if constexpr (std::is_same_v<R, ContinuousRule>) {
          return pose_correct_continuous(det, gt, r.views);
        } else {
          return pose_correct_geodesic(det, gt, r.threshold);
        }
      },
      rule);
}

}  // namespace posebench
