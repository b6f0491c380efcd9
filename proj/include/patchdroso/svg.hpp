#pragma once

#include <string>
#include <vector>

#include "patchdroso/eval.hpp"

namespace droso {

// Static precision-recall plot: axes, grid, one polyline, legend with the
// AUC. Plain hand-rolled SVG, no plotting stack.
void write_pr_curve_svg(const std::vector<PrPoint>& points, double auc_value,
                        const std::string& title, const std::string& path);

}  // namespace droso
