#pragma once

#include <string_view>

namespace cqm {

/// Rabi model with an auxiliary quadratic term lambda (a + a^dag)^2.
/// Energies are in the same units as omega; g is the normalized coupling.
struct ModelParams {
    double omega = 1.0;   ///< boson frequency
    double Omega = 1.0;   ///< qubit frequency
    double g = 0.0;       ///< normalized coupling
    double lambda = 0.0;  ///< quadratic-term strength

    /// 1 + 4 lambda / omega; must be positive.
    [[nodiscard]] double stiffening() const noexcept { return 1.0 + 4.0 * lambda / omega; }
    /// omega + 4 lambda.
    [[nodiscard]] double shifted_frequency() const noexcept { return omega + 4.0 * lambda; }
    /// Frequency ratio Omega / omega.
    [[nodiscard]] double eta() const noexcept { return Omega / omega; }

    [[nodiscard]] ModelParams with_g(double new_g) const noexcept {
        ModelParams p = *this;
        p.g = new_g;
        return p;
    }
    [[nodiscard]] ModelParams with_Omega(double new_Omega) const noexcept {
        ModelParams p = *this;
        p.Omega = new_Omega;
        return p;
    }
};

enum class Regime { Normal, Critical, Superradiant };

[[nodiscard]] std::string_view to_string(Regime r) noexcept;

/// |epsilon_g| below this is classified as the critical point.
inline constexpr double kRegimeTolerance = 1e-12;

/// Spin-down effective oscillator (P^2 + eps_g X^2) omega_bar / 2.
struct EffectiveOscillator {
    double omega_bar = 0.0;  ///< sqrt(omega^2 + 4 lambda omega)
    double epsilon_g = 0.0;  ///< 1 - omega g^2 / (omega + 4 lambda)
    double epsilon = 0.0;    ///< 4 omega_bar^2 epsilon_g, the squared gap scale
    Regime regime = Regime::Normal;
};

/// Displaced and spin-rotated frame used beyond the critical coupling.
struct BeyondCriticalFrame {
    double alpha = 0.0;
    double theta = 0.0;  ///< principal branch, [0, pi/4)
    double Omega_alpha = 0.0;
    double g_alpha = 0.0;
    double epsilon_g_alpha = 0.0;
    double epsilon_alpha = 0.0;
};

/// Returns params unchanged or throws InvalidParams for the first violated invariant.
ModelParams validate(const ModelParams& params);

/// r = ln(1 + 4 lambda / omega) / 4.
[[nodiscard]] double squeeze_parameter(const ModelParams& params);

/// g_c = sqrt(1 + 4 lambda / omega).
[[nodiscard]] double critical_coupling(const ModelParams& params);

/// Quadratic strength that places the critical point at g_target:
/// lambda_c = (g_target^2 - 1) omega / 4.
[[nodiscard]] double lambda_for_target_critical(double g_target, double omega);

[[nodiscard]] EffectiveOscillator effective_oscillator(const ModelParams& params);

/// Throws NotInSuperradiantRegime unless g > g_c.
[[nodiscard]] BeyondCriticalFrame beyond_critical_frame(const ModelParams& params);

/// d(epsilon_g)/dg = -2 omega g / (omega + 4 lambda).
[[nodiscard]] double d_epsilon_g_dg(const ModelParams& params);

/// d(epsilon_g_alpha)/dg = 4 (1 - epsilon_g_alpha) / g.
[[nodiscard]] double d_epsilon_g_alpha_dg(const ModelParams& params);

}  // namespace cqm
