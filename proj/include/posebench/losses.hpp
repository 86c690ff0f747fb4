#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "posebench/geometry.hpp"

namespace posebench {

/// Number of discrete azimuth classes per object category.
inline constexpr std::size_t kAzimuthBins = 360;

/// Per-sample loss value and its gradient with respect to the prediction.
struct LossResult {
  double value = 0.0;
  std::vector<double> grad;
};

/// Azimuth logits laid out as C consecutive blocks of 360 slots, one block
/// per foreground category.
class PoseLogits {
 public:
  PoseLogits(std::vector<double> values, int foreground_class);

  std::span<const double> values() const { return values_; }
  int num_classes() const { return static_cast<int>(values_.size() / kAzimuthBins); }
  int foreground_class() const { return foreground_class_; }

 private:
  std::vector<double> values_;
  int foreground_class_;
};

/// Raw regressor output for one angle; not necessarily unit norm.
struct ContinuousPrediction {
  CirclePoint point;
  int class_index = 0;
};

class PoseLabel {
 public:
  static PoseLabel continuous(Angle angle, int class_index);
  /// `bin` in [0, 360).
  static PoseLabel discrete(int bin, int class_index);

  bool is_continuous() const { return std::holds_alternative<Angle>(value_); }
  bool is_discrete() const { return std::holds_alternative<int>(value_); }
  /// Throws ValidationError if the label is discrete.
  Angle angle() const;
  /// Throws ValidationError if the label is continuous.
  int bin() const;
  int class_index() const { return class_index_; }

 private:
  PoseLabel(std::variant<Angle, int> v, int cls) : value_(v), class_index_(cls) {}
  std::variant<Angle, int> value_;
  int class_index_;
};

enum class HuberMode {
  kComponentwise,  // smoothed L1 per residual component, summed
  kNorm,           // Huber on the Euclidean norm of the residual
};

struct HuberParams {
  double delta = 1.0;
  HuberMode mode = HuberMode::kComponentwise;
};

struct LossWeights {
  double cls = 1.0;
  double bbox = 1.0;
  double pose = 1.0;
};

// Pose losses --------------------------------------------------------------

/// Softmax cross-entropy over the foreground class's 360-slot block only.
/// The returned gradient has the full 360*C length and is exactly zero
/// outside that block.
LossResult masked_softmax_xent(const PoseLogits& logits, const PoseLabel& label);

/// 0.5 * ||p(label) - pred||^2
LossResult euclidean_loss(const ContinuousPrediction& pred, const PoseLabel& label);

LossResult huber_loss(const ContinuousPrediction& pred, const PoseLabel& label,
                      const HuberParams& params = {});

/// 1 - cos(angle between p(label) and pred). Scale invariant in pred.
LossResult cyclic_cosine_loss(const ContinuousPrediction& pred, const PoseLabel& label);

enum class ContinuousLoss { kEuclidean, kHuber, kCyclicCosine };

/// Sum of the per-angle losses over azimuth, elevation and in-plane
/// predictions. Gradient layout: [az_s, az_c, el_s, el_c, ip_s, ip_c].
LossResult pose_loss_3angle(std::span<const ContinuousPrediction, 3> preds, const Pose& label,
                            int class_index, ContinuousLoss kind, const HuberParams& params = {});

// Detection losses ---------------------------------------------------------

/// 0.5 * ||pred - gt||^2 over the four box coordinates.
LossResult bbox_euclidean_loss(std::span<const double, 4> pred_box,
                               std::span<const double, 4> gt_box);

/// Softmax cross-entropy over C+1 class logits (background included).
LossResult class_xent(std::span<const double> logits, int label);

// Composition --------------------------------------------------------------

struct LossComponents {
  LossResult cls;
  LossResult bbox;
  LossResult pose;
};

struct TotalLoss {
  double value = 0.0;
  std::vector<double> grad_cls;
  std::vector<double> grad_bbox;
  std::vector<double> grad_pose;
};

/// Weighted multi-task sum. A zero weight zeroes its branch's gradient
/// exactly, whatever the component gradient holds.
TotalLoss total_loss(const LossComponents& components, const LossWeights& weights);

/// Batch mean of per-sample losses (the 1/N factor).
LossResult mean_loss(std::span<const LossResult> samples);

/// Rescales `grad` to L2 norm `threshold` if it is longer; otherwise returns
/// it unchanged.
std::vector<double> clip_gradient(std::span<const double> grad, double threshold);

// Verification -------------------------------------------------------------

using LossFn = std::function<LossResult(std::span<const double>)>;

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
};

/// Central finite differences, one coordinate at a time. Relative error is
/// |analytic - numeric| / max(1, |analytic|).
GradientCheck check_gradient(const LossFn& loss, std::span<const double> point,
                             double step = 1e-6);

enum class CheckedLoss { kXent, kEuclidean, kHuber, kCyclicCosine, kClassXent, kBbox };

CheckedLoss parse_checked_loss(std::string_view name);
std::string_view to_string(CheckedLoss loss);

struct LossCheckOptions {
  CheckedLoss loss = CheckedLoss::kEuclidean;
  int trials = 100;
  double step = 1e-6;
  HuberParams huber{};
  std::uint64_t seed = 0x5eed;
  int pose_classes = 3;  // blocks of 360 logits for the masked softmax
};

struct LossCheckSummary {
  int trials = 0;
  double max_relative_error = 0.0;
  int worst_trial = 0;
};

/// Runs check_gradient at `trials` random points. Huber points closer than
/// 10*step to a kink are resampled.
LossCheckSummary run_loss_check(const LossCheckOptions& options);

}  // namespace posebench
