#include "cqm/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cqm/closed_form.hpp"
#include "cqm/errors.hpp"

namespace cqm {

namespace {

EffectiveOscillator require_normal(const ModelParams& params, const char* what) {
    auto osc = effective_oscillator(params);
    if (osc.regime != Regime::Normal) {
        throw RegimeError(std::string(what) + " needs eps_g > 0");
    }
    return osc;
}

DecayRates require_damping(const DecayRates& rates) {
    validate(rates);
    if (rates.gamma_minus() < 0.0) {
        throw InvalidParams("gamma_h", "closed forms need gamma_a >= gamma_h");
    }
    return rates;
}

// (e^{g t} - 1) / g, continuous at g = 0
double growth_integral(double gamma, double t) {
    if (gamma == 0.0) {
        return t;
    }
    return std::expm1(gamma * t) / gamma;
}

struct Augmented {
    MomentVector m;
    MomentVector dm;
};

Augmented augmented_rhs(const Augmented& y, const ModelParams& params, const DecayRates& rates) {
    return {moment_rhs(y.m, params, rates), sensitivity_rhs(y.m, y.dm, params, rates)};
}

Augmented axpy(const Augmented& y, double h, const Augmented& k) {
    return {y.m + h * k.m, y.dm + h * k.dm};
}

void rk4_step(Augmented& y, double h, const ModelParams& params, const DecayRates& rates) {
    const auto k1 = augmented_rhs(y, params, rates);
    const auto k2 = augmented_rhs(axpy(y, h / 2.0, k1), params, rates);
    const auto k3 = augmented_rhs(axpy(y, h / 2.0, k2), params, rates);
    const auto k4 = augmented_rhs(axpy(y, h, k3), params, rates);
    y.m += (h / 6.0) * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
    y.dm += (h / 6.0) * (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm);
}

struct Tracks {
    std::vector<MomentVector> m;
    std::vector<MomentVector> dm;
};

Tracks run_rk4(const MomentVector& m0, const ModelParams& params, const DecayRates& rates,
               std::span<const double> grid, double h, long long& steps) {
    Tracks out;
    out.m.reserve(grid.size());
    out.dm.reserve(grid.size());
    Augmented y{m0, MomentVector{}};
    out.m.push_back(y.m);
    out.dm.push_back(y.dm);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double span = grid[i] - grid[i - 1];
        const auto n = static_cast<long long>(std::ceil(span / h));
        if (n > 0) {
            const double step = span / static_cast<double>(n);
            for (long long k = 0; k < n; ++k) {
                rk4_step(y, step, params, rates);
            }
            steps += n;
        }
        out.m.push_back(y.m);
        out.dm.push_back(y.dm);
    }
    return out;
}

double track_gap(const std::vector<MomentVector>& a, const std::vector<MomentVector>& b) {
    double gap = 0.0;
    auto component = [&](auto get) {
        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            diff = std::max(diff, std::abs(get(a[i]) - get(b[i])));
            scale = std::max(scale, std::abs(get(b[i])));
        }
        if (scale > 0.0) {
            gap = std::max(gap, diff / scale);
        } else if (diff > 0.0) {
            gap = std::numeric_limits<double>::infinity();
        }
    };
    component([](const MomentVector& m) { return m.x; });
    component([](const MomentVector& m) { return m.p; });
    component([](const MomentVector& m) { return m.xx; });
    component([](const MomentVector& m) { return m.pp; });
    component([](const MomentVector& m) { return m.gg; });
    return gap;
}

}  // namespace

DecayRates DecayRates::from_plus_minus(double gamma_plus, double gamma_minus) {
    return validate(DecayRates{(gamma_plus + gamma_minus) / 2.0, (gamma_plus - gamma_minus) / 2.0});
}

DecayRates validate(const DecayRates& rates) {
    if (!(rates.gamma_a >= 0.0)) {
        throw InvalidParams("gamma_a", "must be >= 0");
    }
    if (!(rates.gamma_h >= 0.0)) {
        throw InvalidParams("gamma_h", "must be >= 0");
    }
    return rates;
}

bool MomentVector::is_physical(double tol) const noexcept {
    const double vx = x_variance();
    const double vp = p_variance();
    const double cov = g_tilde() / 2.0;
    return vx >= -1e-10 && vp >= -1e-10 && vx * vp - cov * cov >= 0.25 * (1.0 - tol);
}

MomentVector& MomentVector::operator+=(const MomentVector& o) noexcept {
    x += o.x;
    p += o.p;
    xx += o.xx;
    pp += o.pp;
    gg += o.gg;
    return *this;
}

MomentVector& MomentVector::operator*=(double s) noexcept {
    x *= s;
    p *= s;
    xx *= s;
    pp *= s;
    gg *= s;
    return *this;
}

MomentVector superposition_01_moments() {
    return {0.0, std::numbers::sqrt2 / 2.0, 1.0, 1.0, 0.0};
}

MomentVector moment_rhs(const MomentVector& m, const ModelParams& params,
                        const DecayRates& rates) {
    const auto osc = require_normal(params, "moment_rhs");
    const double wb = osc.omega_bar;
    const double k = osc.epsilon / (4.0 * wb);
    const double gm = rates.gamma_minus();
    const double gp = rates.gamma_plus();
    return {
        wb * m.p - gm / 2.0 * m.x,
        -k * m.x - gm / 2.0 * m.p,
        -gm * m.xx + wb * m.gg + gp / 2.0,
        -gm * m.pp - k * m.gg + gp / 2.0,
        -gm * m.gg + 2.0 * wb * m.pp - 2.0 * k * m.xx,
    };
}

MomentVector sensitivity_rhs(const MomentVector& m, const MomentVector& dm,
                             const ModelParams& params, const DecayRates& rates) {
    const auto osc = require_normal(params, "sensitivity_rhs");
    // d eps / dg = 4 omega_bar^2 d eps_g / dg
    const double dk = osc.omega_bar * d_epsilon_g_dg(params);
    auto out = moment_rhs(dm, params, rates);
    // moment_rhs(dm) carries the constant gamma_+/2 injection, which has no g-derivative
    out.xx -= rates.gamma_plus() / 2.0;
    out.pp -= rates.gamma_plus() / 2.0;
    out.p -= dk * m.x;
    out.pp -= dk * m.gg;
    out.gg -= 2.0 * dk * m.xx;
    return out;
}

MomentTrack integrate_moments(const MomentVector& m0, const ModelParams& params,
                              const DecayRates& rates, std::span<const double> t_grid,
                              const IntegrationOptions& options) {
    validate(rates);
    const auto osc = require_normal(params, "integrate_moments");
    if (t_grid.empty()) {
        throw InvalidParams("t_grid", "empty time grid");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) {
            throw InvalidParams("t_grid", "times must be strictly increasing");
        }
    }
    const double rate = std::max({osc.omega_bar, std::sqrt(osc.epsilon), rates.gamma_plus()});
    double h = options.step_scale / rate;

    long long steps = 0;
    auto coarse = run_rk4(m0, params, rates, t_grid, h, steps);
    while (true) {
        h /= 2.0;
        auto fine = run_rk4(m0, params, rates, t_grid, h, steps);
        const double gap = std::max(track_gap(fine.m, coarse.m), track_gap(fine.dm, coarse.dm));
        if (gap < options.tolerance) {
            MomentTrack track;
            track.t.assign(t_grid.begin(), t_grid.end());
            track.moments = std::move(fine.m);
            track.d_dg = std::move(fine.dm);
            track.step = h;
            track.halving_gap = gap;
            return track;
        }
        if (steps > options.max_steps) {
            throw StepUnstable("RK4 step halving did not settle (gap " + std::to_string(gap) +
                               " at h=" + std::to_string(h) + ")");
        }
        coarse = std::move(fine);
    }
}

double x_mean_dissipative(const ModelParams& params, const DecayRates& rates, double t) {
    require_damping(rates);
    return x_mean(params, t) * std::exp(-rates.gamma_minus() * t / 2.0);
}

double x_deriv_g_dissipative(const ModelParams& params, const DecayRates& rates, double t) {
    require_damping(rates);
    return x_deriv_g(params, t) * std::exp(-rates.gamma_minus() * t / 2.0);
}

double x_variance_dissipative(const ModelParams& params, const DecayRates& rates, double t) {
    require_damping(rates);
    const auto osc = require_normal(params, "x_variance_dissipative");
    const double gm = rates.gamma_minus();
    const double gp = rates.gamma_plus();
    const double eps = osc.epsilon;
    const double root = std::sqrt(eps);
    const double wb2 = osc.omega_bar * osc.omega_bar;
    const double wg = params.omega * params.g;
    const double denom = gm * gm + eps;

    const double a = gm * gp * (eps - 4.0 * wb2) / (eps * denom);
    const double b = gp * (2.0 * gm * gm + eps + 4.0 * wb2) / denom;
    const double c = 4.0 * wg * wg * gp / (root * denom);
    const double inv_eg = 1.0 / osc.epsilon_g;

    const double bracket = 2.0 + inv_eg + a + b * growth_integral(gm, t) +
                           (2.0 - inv_eg - a) * std::cos(root * t) - c * std::sin(root * t);
    return 0.25 * bracket * std::exp(-gm * t);
}

double inverted_variance_dissipative(const ModelParams& params, const DecayRates& rates,
                                     double t) {
    const double d = x_deriv_g_dissipative(params, rates, t);
    return d * d / x_variance_dissipative(params, rates, t);
}

}  // namespace cqm
