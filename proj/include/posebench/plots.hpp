#pragma once

#include <string>
#include <vector>

#include "posebench/confusion.hpp"
#include "posebench/metrics.hpp"

namespace posebench {

struct CurveSeries {
  std::string label;
  PRCurve curve;
};

/// Columns: series,rank,threshold,recall,precision,envelope.
std::string curves_csv(const std::vector<CurveSeries>& series);

/// Precision envelope of each series as a step polyline over recall, with
/// axes and a legend.
std::string curves_svg(const std::vector<CurveSeries>& series, const std::string& title);

/// Columns: class,sector,category,count,fraction. Sector "all" holds the
/// per-class totals; class "ALL" sums every class.
std::string confusion_csv(const ConfusionBreakdown& breakdown);

/// One row per class: a pie of the four categories and a stacked bar per GT
/// sector.
std::string confusion_svg(const ConfusionBreakdown& breakdown);

}  // namespace posebench
