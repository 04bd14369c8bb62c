#include "cqm/model.hpp"

#include <cmath>

#include "cqm/errors.hpp"

namespace cqm {

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::Normal:
            return "normal";
        case Regime::Critical:
            return "critical";
        case Regime::Superradiant:
            return "superradiant";
    }
    return "unknown";
}

ModelParams validate(const ModelParams& params) {
    if (!std::isfinite(params.omega) || params.omega <= 0.0) {
        throw InvalidParams("omega", "must be finite and > 0");
    }
    if (!std::isfinite(params.Omega) || params.Omega <= 0.0) {
        throw InvalidParams("Omega", "must be finite and > 0");
    }
    if (!std::isfinite(params.g) || params.g < 0.0) {
        throw InvalidParams("g", "must be finite and >= 0");
    }
    if (!std::isfinite(params.lambda)) {
        throw InvalidParams("lambda", "must be finite");
    }
    if (params.stiffening() <= 0.0) {
        throw InvalidParams("lambda", "1 + 4 lambda / omega must be > 0 (unphysical squeeze)");
    }
    return params;
}

double squeeze_parameter(const ModelParams& params) {
    validate(params);
    return 0.25 * std::log1p(4.0 * params.lambda / params.omega);
}

double critical_coupling(const ModelParams& params) {
    validate(params);
    return std::sqrt(params.stiffening());
}

double lambda_for_target_critical(double g_target, double omega) {
    if (!(g_target > 0.0) || !std::isfinite(g_target)) {
        throw InvalidParams("g_target", "must be finite and > 0");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw InvalidParams("omega", "must be finite and > 0");
    }
    return (g_target * g_target - 1.0) * omega / 4.0;
}

EffectiveOscillator effective_oscillator(const ModelParams& params) {
    validate(params);
    EffectiveOscillator osc;
    const double w = params.omega;
    osc.omega_bar = std::sqrt(w * w + 4.0 * params.lambda * w);
    osc.epsilon_g = 1.0 - w * params.g * params.g / params.shifted_frequency();
    osc.epsilon = 4.0 * osc.omega_bar * osc.omega_bar * osc.epsilon_g;
    if (osc.epsilon_g > kRegimeTolerance) {
        osc.regime = Regime::Normal;
    } else if (osc.epsilon_g < -kRegimeTolerance) {
        osc.regime = Regime::Superradiant;
    } else {
        osc.regime = Regime::Critical;
    }
    return osc;
}

BeyondCriticalFrame beyond_critical_frame(const ModelParams& params) {
    const auto osc = effective_oscillator(params);
    if (osc.regime != Regime::Superradiant) {
        throw NotInSuperradiantRegime("beyond-critical frame needs g > g_c, got regime " +
                                      std::string(to_string(osc.regime)));
    }
    const double w = params.omega;
    const double g = params.g;
    const double shifted = params.shifted_frequency();
    const double wbar_sq = w * w + 4.0 * params.lambda * w;

    BeyondCriticalFrame f;
    const double four_alpha_sq = params.Omega / (g * g) * std::pow(wbar_sq, 1.5) *
                                 (w * w * g * g * g * g - shifted * shifted);
    f.alpha = 0.5 * std::sqrt(four_alpha_sq);
    const double tan_2theta =
        2.0 * g * f.alpha * std::sqrt(w / params.Omega) * std::pow(params.stiffening(), -0.25);
    f.theta = 0.5 * std::atan(tan_2theta);
    f.Omega_alpha = params.Omega * w * g * g / shifted;
    f.g_alpha = std::pow(params.stiffening(), 1.5) / (g * g);
    const double ratio = shifted / (w * g * g);
    f.epsilon_g_alpha = 1.0 - ratio * ratio;
    f.epsilon_alpha = 4.0 * w * shifted * f.epsilon_g_alpha;
    return f;
}

double d_epsilon_g_dg(const ModelParams& params) {
    validate(params);
    return -2.0 * params.omega * params.g / params.shifted_frequency();
}

double d_epsilon_g_alpha_dg(const ModelParams& params) {
    const auto f = beyond_critical_frame(params);
    return 4.0 * (1.0 - f.epsilon_g_alpha) / params.g;
}

}  // namespace cqm
