#include "posebench/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "posebench/error.hpp"
#include "posebench/random.hpp"

namespace posebench {
namespace {

// Stable log-sum-exp and softmax over a contiguous block.
double log_softmax_into(std::span<const double> logits, std::span<double> probs) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - mx);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return mx + std::log(sum);
}

void require_continuous(const PoseLabel& label, const char* loss) {
  if (!label.is_continuous()) {
    throw ValidationError(std::string(loss) + " requires a continuous pose label");
  }
}

void require_finite(CirclePoint p) {
  if (!std::isfinite(p.s) || !std::isfinite(p.c)) {
    throw ValidationError("prediction has non-finite components");
  }
}

double huber_scalar(double r, double delta, double* dl_dr) {
  const double a = std::abs(r);
  if (a <= delta) {
    *dl_dr = r;
    return 0.5 * r * r;
  }
  *dl_dr = delta * (r > 0.0 ? 1.0 : -1.0);
  return delta * a - 0.5 * delta * delta;
}

}  // namespace

PoseLogits::PoseLogits(std::vector<double> values, int foreground_class)
    : values_(std::move(values)), foreground_class_(foreground_class) {
  if (values_.empty() || values_.size() % kAzimuthBins != 0) {
    throw ValidationError("pose logits length must be a positive multiple of 360, got " +
                          std::to_string(values_.size()));
  }
  if (foreground_class < 0 || foreground_class >= num_classes()) {
    throw MaskingViolation("foreground class " + std::to_string(foreground_class) +
                           " is not one of the " + std::to_string(num_classes()) +
                           " object classes (background has no pose block)");
  }
}

PoseLabel PoseLabel::continuous(Angle angle, int class_index) {
  return PoseLabel(angle, class_index);
}

PoseLabel PoseLabel::discrete(int bin, int class_index) {
  if (bin < 0 || bin >= static_cast<int>(kAzimuthBins)) {
    throw ValidationError("azimuth bin out of range [0, 360): " + std::to_string(bin));
  }
  return PoseLabel(bin, class_index);
}

Angle PoseLabel::angle() const {
  if (!is_continuous()) throw ValidationError("pose label is discrete");
  return std::get<Angle>(value_);
}

int PoseLabel::bin() const {
  if (!is_discrete()) throw ValidationError("pose label is continuous");
  return std::get<int>(value_);
}

LossResult masked_softmax_xent(const PoseLogits& logits, const PoseLabel& label) {
  if (!label.is_discrete()) {
    throw ValidationError("masked softmax cross-entropy requires a discrete pose label");
  }
  if (label.class_index() != logits.foreground_class()) {
    throw MaskingViolation("label class " + std::to_string(label.class_index()) +
                           " does not match the foreground block " +
                           std::to_string(logits.foreground_class()));
  }
  LossResult out;
  out.grad.assign(logits.values().size(), 0.0);
  const std::size_t offset = static_cast<std::size_t>(logits.foreground_class()) * kAzimuthBins;
  const auto block = logits.values().subspan(offset, kAzimuthBins);
  const std::span<double> grad_block(out.grad.data() + offset, kAzimuthBins);

  const double lse = log_softmax_into(block, grad_block);
  const auto target = static_cast<std::size_t>(label.bin());
  out.value = lse - block[target];
  grad_block[target] -= 1.0;
  return out;
}

LossResult euclidean_loss(const ContinuousPrediction& pred, const PoseLabel& label) {
  require_continuous(label, "euclidean loss");
  require_finite(pred.point);
  const CirclePoint target = encode(label.angle());
  const double ds = pred.point.s - target.s;
  const double dc = pred.point.c - target.c;
  return {0.5 * (ds * ds + dc * dc), {ds, dc}};
}

LossResult huber_loss(const ContinuousPrediction& pred, const PoseLabel& label,
                      const HuberParams& params) {
  require_continuous(label, "huber loss");
  require_finite(pred.point);
  if (!(params.delta > 0.0)) throw ValidationError("huber delta must be positive");
  const CirclePoint target = encode(label.angle());
  const double rs = target.s - pred.point.s;
  const double rc = target.c - pred.point.c;
  const double delta = params.delta;

  if (params.mode == HuberMode::kComponentwise) {
    double gs = 0.0, gc = 0.0;
    const double value = huber_scalar(rs, delta, &gs) + huber_scalar(rc, delta, &gc);
    // d/dpred = -d/dr
    return {value, {-gs, -gc}};
  }

  const double n = std::hypot(rs, rc);
  if (n <= delta) return {0.5 * n * n, {-rs, -rc}};
  return {delta * n - 0.5 * delta * delta, {-delta * rs / n, -delta * rc / n}};
}

LossResult cyclic_cosine_loss(const ContinuousPrediction& pred, const PoseLabel& label) {
  require_continuous(label, "cyclic cosine loss");
  require_finite(pred.point);
  const double pn = pred.point.norm();
  if (pn == 0.0) throw DegenerateDirection("cyclic cosine loss of a zero-norm prediction");
  const CirclePoint l = encode(label.angle());
  const double ln = l.norm();
  const double dot = l.s * pred.point.s + l.c * pred.point.c;
  const double denom = ln * pn;
  const double value = 1.0 - dot / denom;
  // d/dp [dot/(|l||p|)] = l/(|l||p|) - dot * p / (|l| |p|^3)
  const double k = dot / (denom * pn * pn);
  const double gs = -(l.s / denom - k * pred.point.s);
  const double gc = -(l.c / denom - k * pred.point.c);
  return {value, {gs, gc}};
}

LossResult pose_loss_3angle(std::span<const ContinuousPrediction, 3> preds, const Pose& label,
                            int class_index, ContinuousLoss kind, const HuberParams& params) {
  const Angle targets[3] = {label.azimuth, label.elevation, label.inplane};
  LossResult out;
  out.grad.reserve(6);
  for (std::size_t i = 0; i < 3; ++i) {
    const PoseLabel l = PoseLabel::continuous(targets[i], class_index);
    LossResult r;
    switch (kind) {
      case ContinuousLoss::kEuclidean: r = euclidean_loss(preds[i], l); break;
      case ContinuousLoss::kHuber: r = huber_loss(preds[i], l, params); break;
      case ContinuousLoss::kCyclicCosine: r = cyclic_cosine_loss(preds[i], l); break;
    }
    out.value += r.value;
    out.grad.insert(out.grad.end(), r.grad.begin(), r.grad.end());
  }
  return out;
}

LossResult bbox_euclidean_loss(std::span<const double, 4> pred_box,
                               std::span<const double, 4> gt_box) {
  LossResult out;
  out.grad.resize(4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = pred_box[i] - gt_box[i];
    if (!std::isfinite(d)) throw ValidationError("bounding box coordinates must be finite");
    out.value += 0.5 * d * d;
    out.grad[i] = d;
  }
  return out;
}

LossResult class_xent(std::span<const double> logits, int label) {
  if (logits.empty()) throw ValidationError("class logits are empty");
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw ValidationError("class label " + std::to_string(label) + " out of range");
  }
  LossResult out;
  out.grad.resize(logits.size());
  const double lse = log_softmax_into(logits, out.grad);
  out.value = lse - logits[static_cast<std::size_t>(label)];
  out.grad[static_cast<std::size_t>(label)] -= 1.0;
  return out;
}

TotalLoss total_loss(const LossComponents& components, const LossWeights& weights) {
  if (weights.cls < 0.0 || weights.bbox < 0.0 || weights.pose < 0.0) {
    throw ValidationError("loss weights must be non-negative");
  }
  if (weights.cls == 0.0 && weights.bbox == 0.0 && weights.pose == 0.0) {
    throw ValidationError("at least one loss weight must be positive");
  }
  auto scaled = [](const std::vector<double>& g, double w) {
    std::vector<double> out(g.size(), 0.0);
    if (w != 0.0) std::transform(g.begin(), g.end(), out.begin(), [w](double x) { return w * x; });
    return out;
  };
  auto term = [](double value, double w) { return w == 0.0 ? 0.0 : w * value; };
  TotalLoss out;
  out.value = term(components.cls.value, weights.cls) + term(components.bbox.value, weights.bbox) +
              term(components.pose.value, weights.pose);
  out.grad_cls = scaled(components.cls.grad, weights.cls);
  out.grad_bbox = scaled(components.bbox.grad, weights.bbox);
  out.grad_pose = scaled(components.pose.grad, weights.pose);
  return out;
}

LossResult mean_loss(std::span<const LossResult> samples) {
  LossResult out;
  if (samples.empty()) return out;
  out.grad.assign(samples.front().grad.size(), 0.0);
  for (const LossResult& s : samples) {
    if (s.grad.size() != out.grad.size()) {
      throw ValidationError("batch samples have mismatched gradient sizes");
    }
    out.value += s.value;
    for (std::size_t i = 0; i < s.grad.size(); ++i) out.grad[i] += s.grad[i];
  }
  const double n = static_cast<double>(samples.size());
  out.value /= n;
  for (double& g : out.grad) g /= n;
  return out;
}

std::vector<double> clip_gradient(std::span<const double> grad, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("clipping threshold must be positive");
  std::vector<double> out(grad.begin(), grad.end());
  const double norm = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
  if (norm > threshold) {
    const double scale = threshold / norm;
    for (double& g : out) g *= scale;
  }
  return out;
}

GradientCheck check_gradient(const LossFn& loss, std::span<const double> point, double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");
  const LossResult analytic = loss(point);
  if (analytic.grad.size() != point.size()) {
    throw InvariantViolation("analytic gradient size does not match the point dimension");
  }
  std::vector<double> x(point.begin(), point.end());
  GradientCheck result;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double up = loss(x).value;
    x[i] = saved - step;
    const double down = loss(x).value;
    x[i] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double err =
        std::abs(analytic.grad[i] - numeric) / std::max(1.0, std::abs(analytic.grad[i]));
    if (err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = i;
    }
  }
  return result;
}

CheckedLoss parse_checked_loss(std::string_view name) {
  if (name == "xent") return CheckedLoss::kXent;
  if (name == "euclidean") return CheckedLoss::kEuclidean;
  if (name == "huber") return CheckedLoss::kHuber;
  if (name == "cyclic") return CheckedLoss::kCyclicCosine;
  if (name == "class_xent") return CheckedLoss::kClassXent;
  if (name == "bbox") return CheckedLoss::kBbox;
  throw ValidationError("unknown loss: " + std::string(name));
}

std::string_view to_string(CheckedLoss loss) {
  switch (loss) {
    case CheckedLoss::kXent: return "xent";
    case CheckedLoss::kEuclidean: return "euclidean";
    case CheckedLoss::kHuber: return "huber";
    case CheckedLoss::kCyclicCosine: return "cyclic";
    case CheckedLoss::kClassXent: return "class_xent";
    case CheckedLoss::kBbox: return "bbox";
  }
  return "?";
}

namespace {

bool near_huber_kink(const LossCheckOptions& o, CirclePoint target, CirclePoint pred) {
  const double margin = 10.0 * o.step;
  const double rs = target.s - pred.s, rc = target.c - pred.c;
  if (o.huber.mode == HuberMode::kNorm) {
    return std::abs(std::hypot(rs, rc) - o.huber.delta) <= margin;
  }
  return std::abs(std::abs(rs) - o.huber.delta) <= margin ||
         std::abs(std::abs(rc) - o.huber.delta) <= margin;
}

CirclePoint random_prediction(Rng& rng) {
  const double r = rng.uniform(0.2, 2.0);
  const double phi = rng.uniform(-kPi, kPi);
  return {r * std::sin(phi), r * std::cos(phi)};
}

}  // namespace

LossCheckSummary run_loss_check(const LossCheckOptions& o) {
  if (o.trials < 1) throw ValidationError("losscheck needs at least one trial");
  Rng rng(o.seed);
  LossCheckSummary summary;
  summary.trials = o.trials;
  for (int t = 0; t < o.trials; ++t) {
    std::vector<double> point;
    LossFn fn;
    switch (o.loss) {
      case CheckedLoss::kXent: {
        const int classes = std::max(1, o.pose_classes);
        point.resize(kAzimuthBins * static_cast<std::size_t>(classes));
        for (double& v : point) v = rng.normal(0.0, 2.0);
        const int fg = static_cast<int>(rng.index(static_cast<std::uint64_t>(classes)));
        const PoseLabel label = PoseLabel::discrete(static_cast<int>(rng.index(kAzimuthBins)), fg);
        fn = [fg, label](std::span<const double> x) {
          return masked_softmax_xent(PoseLogits({x.begin(), x.end()}, fg), label);
        };
        break;
      }
      case CheckedLoss::kEuclidean:
      case CheckedLoss::kHuber:
      case CheckedLoss::kCyclicCosine: {
        const Angle target(rng.uniform(-kPi, kPi));
        CirclePoint pred = random_prediction(rng);
        while (o.loss == CheckedLoss::kHuber && near_huber_kink(o, encode(target), pred)) {
          pred = random_prediction(rng);
        }
        point = {pred.s, pred.c};
        const PoseLabel label = PoseLabel::continuous(target, 0);
        const CheckedLoss kind = o.loss;
        const HuberParams huber = o.huber;
        fn = [label, kind, huber](std::span<const double> x) {
          const ContinuousPrediction p{{x[0], x[1]}, 0};
          if (kind == CheckedLoss::kEuclidean) return euclidean_loss(p, label);
          if (kind == CheckedLoss::kHuber) return huber_loss(p, label, huber);
          return cyclic_cosine_loss(p, label);
        };
        break;
      }
      case CheckedLoss::kClassXent: {
        point.resize(12);
        for (double& v : point) v = rng.normal(0.0, 2.0);
        const int label = static_cast<int>(rng.index(point.size()));
        fn = [label](std::span<const double> x) { return class_xent(x, label); };
        break;
      }
      case CheckedLoss::kBbox: {
        std::array<double, 4> gt{};
        for (double& v : gt) v = rng.uniform(0.0, 500.0);
        point.resize(4);
        for (std::size_t i = 0; i < 4; ++i) point[i] = gt[i] + rng.normal(0.0, 20.0);
        fn = [gt](std::span<const double> x) {
          return bbox_euclidean_loss(std::span<const double, 4>(x.data(), 4), gt);
        };
        break;
      }
    }
    const GradientCheck check = check_gradient(fn, point, o.step);
    if (check.max_relative_error > summary.max_relative_error) {
      summary.max_relative_error = check.max_relative_error;
      summary.worst_trial = t;
    }
  }
  return summary;
}

}  // namespace posebench
