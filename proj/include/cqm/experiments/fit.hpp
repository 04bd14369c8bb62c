#pragma once

#include <span>

namespace cqm::experiments {

struct SlopeFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;  ///< of log y at log x = 0
    int points = 0;
};

/// Least-squares fit of log|y| = intercept + slope log x.
/// Needs >= 5 points (InvalidParams); x <= 0 or y == 0 throws NonPositiveData.
[[nodiscard]] SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace cqm::experiments
