#pragma once

#include <string>
#include <utility>
#include <vector>

#include "polyrom/decay_fit.hpp"
#include "polyrom/pod.hpp"

namespace polyrom {

// Projection-error curves on a log10 y-axis versus n, with the fitted decay
// models overlaid and a legend carrying (a, b, R²) per fit. Returns a
// standalone SVG document.
std::string emit_plot(
    const std::vector<KnwPoint>& curve,
    const std::vector<std::pair<std::string, DecayFit>>& fits);

}  // namespace polyrom
