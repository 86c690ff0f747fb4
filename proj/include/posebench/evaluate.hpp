#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posebench/matching.hpp"
#include "posebench/metrics.hpp"

namespace posebench {

enum class PoseMode { kDiscrete, kContinuous };

struct MetricSet {
  bool ap = true;
  bool avp = true;
  bool aos = true;
  bool avp3d = false;  // geodesic AVP over the full rotation
};

struct EvalConfig {
  std::vector<int> views{4, 8, 16, 24};
  PoseMode pose_mode = PoseMode::kDiscrete;
  MetricSet metrics{};
  MatchOptions matching{};
  ApInterpolation interpolation = ApInterpolation::kAllPoint;
  Angle origin_offset{};  // shared bin-0 center for every view count
  double geodesic_threshold = kPi / 6.0;
};

struct ClassReport {
  std::string class_name;
  std::size_t n_gt = 0;
  std::size_t n_det = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t ignored = 0;
  bool evaluated = false;  // false when the class has no non-difficult GT
  std::optional<double> ap;
  std::map<int, double> avp;  // by number of views
  std::optional<double> aos;
  std::optional<double> avp3d;
};

/// Means run over evaluated classes only.
struct EvalReport {
  std::vector<ClassReport> classes;  // sorted by class name
  std::optional<double> mean_ap;
  std::map<int, double> mean_avp;
  std::optional<double> mean_aos;
  std::optional<double> mean_avp3d;
  std::size_t evaluated_classes = 0;
};

PoseRule make_view_rule(PoseMode mode, int views, Angle origin_offset);

/// Every class seen in either input, sorted.
std::vector<std::string> class_names(std::span<const Detection> dets,
                                     std::span<const GroundTruthObject> gts);

ClassReport evaluate_class(const MatchTable& table, std::size_t n_det, const EvalConfig& config);

/// Per-class matching plus all configured metrics and their means.
EvalReport evaluate(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                    const EvalConfig& config);

/// Recomputes the means from the per-class rows; throws InvariantViolation
/// if they disagree with the stored means.
void check_report_consistency(const EvalReport& report);

}  // namespace posebench
