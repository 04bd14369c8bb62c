#include "cqm/closed_form.hpp"

#include <cmath>
#include <numbers>

#include "cqm/errors.hpp"

namespace cqm {

namespace {

constexpr double kSeriesThreshold = 0.05;

EffectiveOscillator require_normal(const ModelParams& params, const char* what) {
    auto osc = effective_oscillator(params);
    if (osc.regime != Regime::Normal) {
        throw RegimeError(std::string(what) + " needs eps_g > 0 (regime " +
                          std::string(to_string(osc.regime)) + ")");
    }
    return osc;
}

BeyondCriticalFrame require_beyond(const ModelParams& params, const char* what) {
    try {
        return beyond_critical_frame(params);
    } catch (const NotInSuperradiantRegime& e) {
        throw RegimeError(std::string(what) + ": " + e.what());
    }
}

// 16 (dzeta/dg)^2 / 4 style prefactors are handled by callers; this is
// 4 [sin(x) - x]^2 / eps^3 with x = sqrt(eps) t, written as 4 t^6 [(x - sin x)/x^3]^2.
double leading_generator_variance_factor(double eps, double t) {
    const double x = std::sqrt(eps) * t;
    const double s = sine_deficit_over_cube(x);
    const double t3 = t * t * t;
    return 4.0 * s * s * t3 * t3;
}

}  // namespace

BosonInitialState::BosonInitialState(Eigen::VectorXcd amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) {
        throw InvalidParams("amplitudes", "empty state");
    }
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        throw InvalidParams("amplitudes", "state is not normalized (norm " +
                                              std::to_string(norm) + ")");
    }
}

BosonInitialState BosonInitialState::superposition_01(int n_max) {
    if (n_max < 1) {
        throw InvalidParams("n_max", "needs at least |0> and |1>");
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_max + 1);
    v(0) = std::numbers::sqrt2 / 2.0;
    v(1) = std::complex<double>(0.0, std::numbers::sqrt2 / 2.0);
    return BosonInitialState(std::move(v));
}

BosonInitialState BosonInitialState::fock(int n, int n_max) {
    if (n < 0 || n > n_max) {
        throw InvalidParams("n", "Fock index outside 0..n_max");
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_max + 1);
    v(n) = 1.0;
    return BosonInitialState(std::move(v));
}

Eigen::VectorXcd BosonInitialState::padded(int dim) const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    const int common = std::min<int>(dim, static_cast<int>(amps_.size()));
    v.head(common) = amps_.head(common);
    if (dim < amps_.size() && amps_.tail(amps_.size() - dim).squaredNorm() > 0.0) {
        throw CutoffTooSmall("state occupies Fock levels above the target dimension " +
                             std::to_string(dim));
    }
    return v;
}

double quadratic_variance(const BosonInitialState& state, double zeta) {
    const auto& psi = state.amplitudes();
    const int dim = static_cast<int>(psi.size());
    if (dim < 5) {
        throw CutoffTooSmall("quadratic variance needs n_max >= 4");
    }
    if (std::abs(psi(dim - 1)) > 0.0 || std::abs(psi(dim - 2)) > 0.0) {
        throw CutoffTooSmall("state occupies the top two Fock levels; raise n_max");
    }
    // P^2 - zeta X^2 = (1 - zeta)(n + 1/2) - (1 + zeta)(a^2 + a^dag^2)/2
    const double diag_coeff = 1.0 - zeta;
    const double off_coeff = -(1.0 + zeta) / 2.0;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    for (int n = 0; n < dim; ++n) {
        out(n) += diag_coeff * (n + 0.5) * psi(n);
        if (n + 2 < dim) {
            const double el = std::sqrt((n + 1.0) * (n + 2.0));
            out(n) += off_coeff * el * psi(n + 2);
            out(n + 2) += off_coeff * el * psi(n);
        }
    }
    const double mean = psi.dot(out).real();
    return std::max(0.0, out.squaredNorm() - mean * mean);
}

double var_n(const BosonInitialState& state, const ModelParams& params) {
    const auto osc = require_normal(params, "var_n");
    const double wbar3 = std::pow(osc.omega_bar, 3);
    return wbar3 * wbar3 * quadratic_variance(state, osc.epsilon_g);
}

double var_n_beyond(const BosonInitialState& state, const ModelParams& params) {
    const auto f = require_beyond(params, "var_n_beyond");
    const auto osc = effective_oscillator(params);
    const double wbar3 = std::pow(osc.omega_bar, 3);
    return wbar3 * wbar3 * quadratic_variance(state, f.epsilon_g_alpha);
}

double sine_deficit_over_cube(double x) {
    if (std::abs(x) < kSeriesThreshold) {
        const double x2 = x * x;
        return 1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0 - x2 * x2 * x2 / 362880.0;
    }
    return (x - std::sin(x)) / (x * x * x);
}

double sine_cosine_bracket_over_cube(double y) {
    if (std::abs(y) < kSeriesThreshold) {
        const double y2 = y * y;
        return 1.0 / 3.0 - y2 / 30.0 + y2 * y2 / 840.0 - y2 * y2 * y2 / 45360.0;
    }
    return (std::sin(y) - y * std::cos(y)) / (y * y * y);
}

QfiSample qfi_g(const ModelParams& params, double t, double var_N) {
    const auto osc = require_normal(params, "qfi_g");
    if (var_N < 0.0) {
        throw InvalidParams("var_N", "variance must be >= 0");
    }
    const double pref = params.omega * params.g / params.shifted_frequency();
    const double value =
        4.0 * pref * pref * leading_generator_variance_factor(osc.epsilon, t) * var_N;
    return {t, value};
}

QfiSample qfi_g_beyond(const ModelParams& params, double t, double var_N_alpha) {
    const auto f = require_beyond(params, "qfi_g_beyond");
    if (var_N_alpha < 0.0) {
        throw InvalidParams("var_N_alpha", "variance must be >= 0");
    }
    const double pref = (1.0 - f.epsilon_g_alpha) / params.g;
    const double value =
        16.0 * pref * pref * leading_generator_variance_factor(f.epsilon_alpha, t) * var_N_alpha;
    return {t, value};
}

double x_mean(const ModelParams& params, double t) {
    const auto osc = require_normal(params, "x_mean");
    return std::numbers::sqrt2 / 2.0 / std::sqrt(osc.epsilon_g) *
           std::sin(std::sqrt(osc.epsilon) * t / 2.0);
}

double x_mean_beyond(const ModelParams& params, double t) {
    const auto f = require_beyond(params, "x_mean_beyond");
    return std::sqrt(1.0 / (2.0 * f.epsilon_g_alpha)) * std::sin(std::sqrt(f.epsilon_alpha) * t / 2.0);
}

double x_deriv_g(const ModelParams& params, double t) {
    const auto osc = require_normal(params, "x_deriv_g");
    const double y = std::sqrt(osc.epsilon) * t / 2.0;
    const double bracket = sine_cosine_bracket_over_cube(y) * y * y * y;
    return std::numbers::sqrt2 * params.omega * params.g / (2.0 * params.shifted_frequency()) *
           std::pow(osc.epsilon_g, -1.5) * bracket;
}

double x2_mean(const ModelParams& params, double t) {
    const auto osc = require_normal(params, "x2_mean");
    const double s = std::sin(std::sqrt(osc.epsilon) * t / 2.0);
    return 1.0 + 4.0 * params.omega * params.omega * params.g * params.g / osc.epsilon * s * s;
}

double x_variance(const ModelParams& params, double t) {
    const auto osc = require_normal(params, "x_variance");
    const double s = std::sin(std::sqrt(osc.epsilon) * t / 2.0);
    return 1.0 + (1.0 / (2.0 * osc.epsilon_g) - 1.0) * s * s;
}

double inverted_variance(const ModelParams& params, double t) {
    const auto osc = require_normal(params, "inverted_variance");
    const double y = std::sqrt(osc.epsilon) * t / 2.0;
    const double bracket = sine_cosine_bracket_over_cube(y) * y * y * y;
    const double s = std::sin(y);
    const double wg = params.omega * params.g;
    const double shifted = params.shifted_frequency();
    const double eg = osc.epsilon_g;
    return wg * wg * bracket * bracket /
           (shifted * shifted * eg * eg * eg * (2.0 + (1.0 / eg - 2.0) * s * s));
}

QuadratureSample quadrature_sample(const ModelParams& params, double t) {
    return {t, x_mean(params, t), x_deriv_g(params, t), x_variance(params, t),
            inverted_variance(params, t)};
}

double x_deriv_g_beyond(const ModelParams& params, double t) {
    const auto f = require_beyond(params, "x_deriv_g_beyond");
    const double eg = f.epsilon_g_alpha;
    const double y = std::sqrt(f.epsilon_alpha) * t / 2.0;
    const double bracket = sine_cosine_bracket_over_cube(y) * y * y * y;
    // d<X>/d eps_g = -(sqrt 2 / 4) eps_g^-3/2 [sin y - y cos y]
    return -std::numbers::sqrt2 / 4.0 * std::pow(eg, -1.5) * bracket * d_epsilon_g_alpha_dg(params);
}

double x_variance_beyond(const ModelParams& params, double t) {
    const auto f = require_beyond(params, "x_variance_beyond");
    const double s = std::sin(std::sqrt(f.epsilon_alpha) * t / 2.0);
    return 1.0 + (1.0 / (2.0 * f.epsilon_g_alpha) - 1.0) * s * s;
}

double inverted_variance_beyond(const ModelParams& params, double t) {
    const double d = x_deriv_g_beyond(params, t);
    return d * d / x_variance_beyond(params, t);
}

QuadratureSample quadrature_sample_beyond(const ModelParams& params, double t) {
    return {t, x_mean_beyond(params, t), x_deriv_g_beyond(params, t), x_variance_beyond(params, t),
            inverted_variance_beyond(params, t)};
}

std::vector<double> optimal_times(const ModelParams& params, int n_max) {
    const auto osc = require_normal(params, "optimal_times");
    if (n_max < 1) {
        throw InvalidParams("n_max", "must be >= 1");
    }
    std::vector<double> taus;
    taus.reserve(static_cast<std::size_t>(n_max));
    const double root = std::sqrt(osc.epsilon);
    for (int n = 1; n <= n_max; ++n) {
        taus.push_back(2.0 * n * std::numbers::pi / root);
    }
    return taus;
}

double inverted_variance_peak(const ModelParams& params, int n) {
    const auto osc = require_normal(params, "inverted_variance_peak");
    const double shifted = params.shifted_frequency();
    const double num = n * n * std::numbers::pi * std::numbers::pi * params.omega * params.omega *
                       params.g * params.g;
    return num / (2.0 * shifted * shifted) * std::pow(osc.epsilon_g, -3);
}

double ig_fg_ratio(const BosonInitialState& state, const ModelParams& params) {
    const auto osc = require_normal(params, "ig_fg_ratio");
    const double wbar3 = std::pow(osc.omega_bar, 3);
    return 1.0 / (2.0 * var_n(state, params) / (wbar3 * wbar3));
}

}  // namespace cqm
