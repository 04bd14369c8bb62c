#include "cqm/experiments/fit.hpp"

#include <cmath>
#include <vector>

#include "cqm/errors.hpp"

namespace cqm::experiments {

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InvalidParams("series", "x and y lengths differ");
    }
    if (x.size() < 5) {
        throw InvalidParams("series", "slope fit needs at least 5 points");
    }
    const auto n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0) || !std::isfinite(x[i]) ||
            !std::isfinite(y[i])) {
            throw NonPositiveData("log-log fit needs positive finite x and nonzero finite y");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(std::abs(y[i]));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        throw InvalidParams("series", "x values are all equal");
    }
    SlopeFit fit;
    fit.points = static_cast<int>(n);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - fit.intercept - fit.slope * lx[i];
        rss += r * r;
    }
    fit.stderr_slope = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return fit;
}

}  // namespace cqm::experiments
