#include "posebench/plots.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include <fmt/format.h>

#include "posebench/geometry.hpp"

namespace posebench {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr const char* kCategoryColors[] = {"#2ca02c", "#1f77b4", "#d62728", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string curves_csv(const std::vector<CurveSeries>& series) {
  std::string out = "series,rank,threshold,recall,precision,envelope\n";
  auto it = std::back_inserter(out);
  for (const CurveSeries& s : series) {
    const std::vector<double> env = precision_envelope(s.curve.precision);
    for (std::size_t k = 0; k < s.curve.size(); ++k) {
      fmt::format_to(it, "{},{},{},{},{},{}\n", csv_field(s.label), k + 1, s.curve.thresholds[k],
                     s.curve.recall[k], s.curve.precision[k], env[k]);
    }
  }
  return out;
}

std::string curves_svg(const std::vector<CurveSeries>& series, const std::string& title) {
  constexpr double kW = 520, kH = 400, kLeft = 60, kTop = 40, kPlot = 300;
  auto px = [&](double r) { return kLeft + r * kPlot; };
  auto py = [&](double p) { return kTop + (1.0 - p) * kPlot; };

  std::string out;
  auto it = std::back_inserter(out);
  fmt::format_to(it,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
                 "font-family=\"sans-serif\" font-size=\"12\">\n",
                 kW, kH);
  fmt::format_to(it, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kW, kH);
  fmt::format_to(it, "<text x=\"{}\" y=\"22\" font-size=\"14\">{}</text>\n", kLeft, escape(title));
  // Axes and ticks.
  fmt::format_to(it,
                 "<path d=\"M{0} {1} V{2} H{3}\" stroke=\"black\" fill=\"none\"/>\n", kLeft, kTop,
                 kTop + kPlot, kLeft + kPlot);
  for (int i = 0; i <= 10; i += 2) {
    const double t = i / 10.0;
    fmt::format_to(it,
                   "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>"
                   "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:.1f}</text>\n",
                   px(t), kTop + kPlot, kTop + kPlot + 5, kTop + kPlot + 18, t);
    fmt::format_to(it,
                   "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\"/>"
                   "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.1f}</text>\n",
                   kLeft - 5, py(t), kLeft, kLeft - 8, py(t) + 4, t);
  }
  fmt::format_to(it, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">recall</text>\n",
                 kLeft + kPlot / 2, kTop + kPlot + 36);
  fmt::format_to(it,
                 "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" "
                 "transform=\"rotate(-90 18 {0})\">precision</text>\n",
                 kTop + kPlot / 2);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const PRCurve& c = series[s].curve;
    const char* color = kPalette[s % std::size(kPalette)];
    const std::vector<double> env = precision_envelope(c.precision);
    // Step polyline: envelope value env[k] holds on (recall[k-1], recall[k]].
    std::string points;
    double prev_r = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      fmt::format_to(std::back_inserter(points), "{:.2f},{:.2f} {:.2f},{:.2f} ", px(prev_r),
                     py(env[k]), px(c.recall[k]), py(env[k]));
      prev_r = c.recall[k];
    }
    if (!points.empty()) points.pop_back();
    fmt::format_to(it,
                   "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                   points, color);
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    fmt::format_to(it,
                   "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
                   "stroke-width=\"2\"/><text x=\"{4}\" y=\"{5}\">{6}</text>\n",
                   kLeft + kPlot + 15, ly, kLeft + kPlot + 35, color, kLeft + kPlot + 40, ly + 4,
                   escape(series[s].label));
  }
  out += "</svg>\n";
  return out;
}

std::string confusion_csv(const ConfusionBreakdown& b) {
  std::string out = "class,sector,category,count,fraction\n";
  auto it = std::back_inserter(out);
  auto emit = [&](const std::string& cls, const std::string& sector, const CategoryCounts& c) {
    for (ErrorCategory cat : kErrorCategories) {
      fmt::format_to(it, "{},{},{},{},{}\n", csv_field(cls), csv_field(sector), to_string(cat),
                     c[cat], c.fraction(cat));
    }
  };
  for (const ClassConfusion& c : b.classes) {
    emit(c.class_name, "all", c.overall);
    for (std::size_t s = 0; s < c.by_gt_sector.size(); ++s) {
      emit(c.class_name, b.sector_labels[s], c.by_gt_sector[s]);
    }
  }
  emit("ALL", "all", b.overall);
  return out;
}

std::string confusion_svg(const ConfusionBreakdown& b) {
  constexpr double kRow = 220, kPieR = 70, kBarLeft = 220, kBarH = 150, kBarW = 28;
  const double width = kBarLeft + (kBarW + 10) * static_cast<double>(b.views) + 140;
  const double height = 30 + kRow * static_cast<double>(std::max<std::size_t>(1, b.classes.size()));

  std::string out;
  auto it = std::back_inserter(out);
  fmt::format_to(it,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
                 "font-family=\"sans-serif\" font-size=\"12\">\n"
                 "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
                 width, height);
  for (std::size_t k = 0; k < 4; ++k) {
    fmt::format_to(it,
                   "<rect x=\"{0:.0f}\" y=\"{1}\" width=\"12\" height=\"12\" fill=\"{2}\"/>"
                   "<text x=\"{3:.0f}\" y=\"{4}\">{5}</text>\n",
                   width - 120, 20 + 18 * k, kCategoryColors[k], width - 102, 31 + 18 * k,
                   to_string(kErrorCategories[k]));
  }

  for (std::size_t row = 0; row < b.classes.size(); ++row) {
    const ClassConfusion& c = b.classes[row];
    const double top = 30 + kRow * static_cast<double>(row);
    const double cx = 20 + kPieR, cy = top + 20 + kPieR;
    fmt::format_to(it, "<text x=\"20\" y=\"{}\" font-size=\"14\">{}</text>\n", top + 10,
                   escape(c.class_name));

    // Pie.
    const std::size_t total = c.overall.total();
    double start = 0.0;
    for (std::size_t k = 0; k < 4 && total > 0; ++k) {
      const double frac = c.overall.fraction(kErrorCategories[k]);
      if (frac <= 0.0) continue;
      if (frac >= 1.0) {
        fmt::format_to(it, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{}\" fill=\"{}\"/>\n", cx, cy,
                       kPieR, kCategoryColors[k]);
        break;
      }
      const double end = start + frac * kTwoPi;
      const double x0 = cx + kPieR * std::sin(start), y0 = cy - kPieR * std::cos(start);
      const double x1 = cx + kPieR * std::sin(end), y1 = cy - kPieR * std::cos(end);
      fmt::format_to(it,
                     "<path d=\"M{:.2f} {:.2f} L{:.2f} {:.2f} A{} {} 0 {} 1 {:.2f} {:.2f} Z\" "
                     "fill=\"{}\"/>\n",
                     cx, cy, x0, y0, kPieR, kPieR, frac > 0.5 ? 1 : 0, x1, y1, kCategoryColors[k]);
      start = end;
    }
    if (total == 0) {
      fmt::format_to(it,
                     "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{}\" fill=\"none\" "
                     "stroke=\"#999\"/>\n",
                     cx, cy, kPieR);
    }

    // Stacked bars per GT sector, heights as fractions of that sector.
    const double base = top + 20 + kBarH;
    for (std::size_t s = 0; s < c.by_gt_sector.size(); ++s) {
      const double x = kBarLeft + (kBarW + 10) * static_cast<double>(s);
      double y = base;
      for (std::size_t k = 0; k < 4; ++k) {
        const double h = kBarH * c.by_gt_sector[s].fraction(kErrorCategories[k]);
        if (h <= 0.0) continue;
        y -= h;
        fmt::format_to(it,
                       "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{}\" height=\"{:.2f}\" "
                       "fill=\"{}\"/>\n",
                       x, y, kBarW, h, kCategoryColors[k]);
      }
      fmt::format_to(it, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                     x + kBarW / 2, base + 15, escape(b.sector_labels[s]));
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace posebench
