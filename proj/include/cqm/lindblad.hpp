#pragma once

#include <span>
#include <vector>

#include "cqm/model.hpp"

namespace cqm {

/// Decay (gamma_a) and heating (gamma_h) rates of the boson mode.
struct DecayRates {
    double gamma_a = 0.0;
    double gamma_h = 0.0;

    [[nodiscard]] double gamma_plus() const noexcept { return gamma_a + gamma_h; }
    [[nodiscard]] double gamma_minus() const noexcept { return gamma_a - gamma_h; }

    /// Inverse of (gamma_plus, gamma_minus).
    static DecayRates from_plus_minus(double gamma_plus, double gamma_minus);
};

/// Throws InvalidParams on negative rates.
DecayRates validate(const DecayRates& rates);

/// (<X>, <P>, <X^2>, <P^2>, <G>) with G = XP + PX.
struct MomentVector {
    double x = 0.0;
    double p = 0.0;
    double xx = 0.0;
    double pp = 0.0;
    double gg = 0.0;

    [[nodiscard]] double x_variance() const noexcept { return xx - x * x; }
    [[nodiscard]] double p_variance() const noexcept { return pp - p * p; }
    /// G~ = <G> - 2 <X><P>, twice the symmetrized covariance.
    [[nodiscard]] double g_tilde() const noexcept { return gg - 2.0 * x * p; }
    /// Robertson-Schroedinger bound (dX)^2 (dP)^2 - (G~/2)^2 >= 1/4 within tol.
    [[nodiscard]] bool is_physical(double tol = 1e-8) const noexcept;

    MomentVector& operator+=(const MomentVector& o) noexcept;
    MomentVector& operator*=(double s) noexcept;
    friend MomentVector operator+(MomentVector a, const MomentVector& b) noexcept { return a += b; }
    friend MomentVector operator*(double s, MomentVector a) noexcept { return a *= s; }
};

/// Moments of (|0> + i|1>)/sqrt(2): (0, 1/sqrt 2, 1, 1, 0).
[[nodiscard]] MomentVector superposition_01_moments();

/// Right-hand side of the moment equations for H_np with decay and heating.
/// Normal regime only.
[[nodiscard]] MomentVector moment_rhs(const MomentVector& m, const ModelParams& params,
                                      const DecayRates& rates);

struct IntegrationOptions {
    double step_scale = 0.05;     ///< initial h max(omega_bar, sqrt(eps), gamma_+)
    double tolerance = 1e-8;      ///< allowed relative change when h is halved
    long long max_steps = 200'000'000;
};

struct MomentTrack {
    std::vector<double> t;
    std::vector<MomentVector> moments;
    std::vector<MomentVector> d_dg;  ///< sensitivities d(moments)/dg
    double step = 0.0;         ///< step size of the returned (finer) integration
    double halving_gap = 0.0;  ///< sup-relative change against step * 2
};

/// d/dt of the sensitivity dm/dg: the moment equations applied to dm plus the
/// explicit g-dependence of eps acting on m (rates do not depend on g).
[[nodiscard]] MomentVector sensitivity_rhs(const MomentVector& m, const MomentVector& dm,
                                           const ModelParams& params, const DecayRates& rates);

/// Fixed-step RK4 on an increasing grid starting at t_grid[0] with state m0,
/// integrating the g-sensitivities alongside (they start at zero).
/// Halves h until two consecutive step sizes agree; throws StepUnstable if
/// that needs more than options.max_steps.
[[nodiscard]] MomentTrack integrate_moments(const MomentVector& m0, const ModelParams& params,
                                            const DecayRates& rates, std::span<const double> t_grid,
                                            const IntegrationOptions& options = {});

// Closed forms for the initial state (|0> + i|1>)/sqrt(2). Normal regime and
// gamma_- >= 0 only.
[[nodiscard]] double x_mean_dissipative(const ModelParams& params, const DecayRates& rates,
                                        double t);
[[nodiscard]] double x_deriv_g_dissipative(const ModelParams& params, const DecayRates& rates,
                                           double t);
[[nodiscard]] double x_variance_dissipative(const ModelParams& params, const DecayRates& rates,
                                            double t);
/// (d<X>/dg)^2 / (dX)^2 under decay and heating.
[[nodiscard]] double inverted_variance_dissipative(const ModelParams& params,
                                                   const DecayRates& rates, double t);

}  // namespace cqm
