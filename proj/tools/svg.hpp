#pragma once

#include <string>

#include "torus/configuration.hpp"

namespace torus::cli {

/// Diagnostic plot. 2D: filled markers inside the cell rectangle, the
/// reference (if any) as hollow markers. 1D: points on a circle of
/// circumference one period.
std::string render_svg(const Configuration& config, const Configuration* reference = nullptr,
                       const std::string& title = "");

}  // namespace torus::cli
