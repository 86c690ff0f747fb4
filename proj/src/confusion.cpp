#include "posebench/confusion.hpp"

#include "posebench/evaluate.hpp"

namespace posebench {

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kCorrect: return "correct";
    case ErrorCategory::kNearby: return "nearby";
    case ErrorCategory::kOpposite: return "opposite";
    case ErrorCategory::kOther: return "other";
  }
  return "?";
}

ErrorCategory classify_error(Angle pred_azimuth, Angle gt_azimuth, const ViewBinning& binning) {
  const int v = binning.views();
  const int gt_bin = binning.bin_of(gt_azimuth);
  const int pred_bin = binning.bin_of(pred_azimuth);
  if (pred_bin == gt_bin) return ErrorCategory::kCorrect;
  if (pred_bin == (gt_bin + 1) % v || pred_bin == (gt_bin + v - 1) % v) {
    return ErrorCategory::kNearby;
  }
  if (v % 2 == 0 && pred_bin == (gt_bin + v / 2) % v) return ErrorCategory::kOpposite;
  return ErrorCategory::kOther;
}

std::size_t CategoryCounts::total() const {
  return counts[0] + counts[1] + counts[2] + counts[3];
}

double CategoryCounts::fraction(ErrorCategory c) const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>((*this)[c]) / static_cast<double>(n);
}

std::vector<std::string> sector_labels(int views) {
  if (views == 8) return {"F", "F-L", "L", "L-RE", "RE", "RE-R", "R", "R-F"};
  std::vector<std::string> labels;
  for (int i = 0; i < views; ++i) labels.push_back("S" + std::to_string(i));
  return labels;
}

ClassConfusion breakdown(const MatchTable& table, const ViewBinning& binning) {
  const auto v = static_cast<std::size_t>(binning.views());
  ClassConfusion out;
  out.class_name = table.class_name;
  out.by_gt_sector.resize(v);
  out.predicted_sector.assign(v, 0);
  for (const MatchEntry& e : table.entries) {
    if (e.status != MatchStatus::kTruePositive) continue;
    const ErrorCategory c = classify_error(e.det_pose.azimuth, e.gt_pose->azimuth, binning);
    out.overall.add(c);
    out.by_gt_sector[static_cast<std::size_t>(binning.bin_of(e.gt_pose->azimuth))].add(c);
    ++out.predicted_sector[static_cast<std::size_t>(binning.bin_of(e.det_pose.azimuth))];
  }
  return out;
}

ConfusionBreakdown breakdown(std::span<const Detection> dets,
                             std::span<const GroundTruthObject> gts, const ViewBinning& binning,
                             const MatchOptions& options) {
  ConfusionBreakdown out;
  out.views = binning.views();
  out.sector_labels = sector_labels(binning.views());
  for (const std::string& name : class_names(dets, gts)) {
    ClassConfusion c = breakdown(match(dets, gts, name, options), binning);
    for (std::size_t k = 0; k < 4; ++k) out.overall.counts[k] += c.overall.counts[k];
    out.classes.push_back(std::move(c));
  }
  return out;
}

}  // namespace posebench
