#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posebench/matching.hpp"

namespace posebench {

enum class ErrorCategory { kCorrect = 0, kNearby = 1, kOpposite = 2, kOther = 3 };

inline constexpr std::array<ErrorCategory, 4> kErrorCategories = {
    ErrorCategory::kCorrect, ErrorCategory::kNearby, ErrorCategory::kOpposite,
    ErrorCategory::kOther};

std::string_view to_string(ErrorCategory c);

/// correct: same bin. nearby: adjacent bin (+-1 mod v). opposite: the bin
/// v/2 away, only defined for even v. Anything else is other. Adjacency is
/// tested before opposition, so for v <= 2 flips read as nearby.
ErrorCategory classify_error(Angle pred_azimuth, Angle gt_azimuth, const ViewBinning& binning);

struct CategoryCounts {
  std::array<std::size_t, 4> counts{};

  void add(ErrorCategory c) { ++counts[static_cast<std::size_t>(c)]; }
  std::size_t operator[](ErrorCategory c) const { return counts[static_cast<std::size_t>(c)]; }
  std::size_t total() const;
  /// 0 for an empty group.
  double fraction(ErrorCategory c) const;
};

struct ClassConfusion {
  std::string class_name;
  CategoryCounts overall;
  std::vector<CategoryCounts> by_gt_sector;  // indexed by GT azimuth bin
  std::vector<std::size_t> predicted_sector;  // histogram of predicted bins
};

struct ConfusionBreakdown {
  int views = 8;
  std::vector<std::string> sector_labels;
  std::vector<ClassConfusion> classes;
  CategoryCounts overall;  // summed over classes
};

/// Sector names for an analysis binning. For 8 views these are the usual
/// frontal-first labels in increasing azimuth; other counts get "S<i>".
std::vector<std::string> sector_labels(int views);

/// Aggregates classify_error over the localization true positives of one
/// table.
ClassConfusion breakdown(const MatchTable& table, const ViewBinning& binning);

/// All classes of the inputs, matched with `options`.
ConfusionBreakdown breakdown(std::span<const Detection> dets,
                             std::span<const GroundTruthObject> gts, const ViewBinning& binning,
                             const MatchOptions& options = {});

}  // namespace posebench
