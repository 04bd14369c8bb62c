#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "cqm/model.hpp"

namespace cqm {

/// Boson state over Fock states |0>..|n_max>; the spin is fixed to down.
class BosonInitialState {
public:
    /// Throws InvalidParams if the amplitudes are not normalized within 1e-12.
    explicit BosonInitialState(Eigen::VectorXcd amplitudes);

    /// (|0> + i|1>) / sqrt(2), padded with zeros up to n_max.
    static BosonInitialState superposition_01(int n_max = 5);
    static BosonInitialState fock(int n, int n_max);

    [[nodiscard]] const Eigen::VectorXcd& amplitudes() const noexcept { return amps_; }
    [[nodiscard]] int n_max() const noexcept { return static_cast<int>(amps_.size()) - 1; }
    /// Copy zero-padded (or checked-truncated) to dimension `dim`.
    [[nodiscard]] Eigen::VectorXcd padded(int dim) const;

private:
    Eigen::VectorXcd amps_;
};

struct QfiSample {
    double t = 0.0;
    double value = 0.0;
};

struct QuadratureSample {
    double t = 0.0;
    double x_mean = 0.0;
    double x_deriv_g = 0.0;
    double x_var = 0.0;
    double inv_var = 0.0;
};

/// Var[P^2 - zeta X^2] over the state, from exact Fock matrix elements.
/// Throws CutoffTooSmall if either of the top two basis states is occupied.
[[nodiscard]] double quadratic_variance(const BosonInitialState& state, double zeta);

/// Var[N] with N = omega_bar^3 (P^2 - eps_g X^2). Normal regime only.
[[nodiscard]] double var_n(const BosonInitialState& state, const ModelParams& params);
/// Var[N_alpha] with eps_g replaced by eps_g^alpha. Needs g > g_c.
[[nodiscard]] double var_n_beyond(const BosonInitialState& state, const ModelParams& params);

/// (x - sin x) / x^3, series below x = 1e-4.
[[nodiscard]] double sine_deficit_over_cube(double x);
/// (sin y - y cos y) / y^3, series below y = 1e-3.
[[nodiscard]] double sine_cosine_bracket_over_cube(double y);

/// Leading-divergence QFI about g,
///   F_g ~= 16 (omega g / (omega + 4 lambda))^2 [sin(sqrt(eps) t) - sqrt(eps) t]^2 / eps^3 Var[N].
/// Asymptotic in eps -> 0 at sqrt(eps) t = O(1); no subleading terms are added.
[[nodiscard]] QfiSample qfi_g(const ModelParams& params, double t, double var_N);

/// Beyond-critical counterpart with eps_alpha and prefactor 64 ((1 - eps_g^alpha) / g)^2.
[[nodiscard]] QfiSample qfi_g_beyond(const ModelParams& params, double t, double var_N_alpha);

// Quadrature dynamics from (|0> + i|1>)/sqrt(2) under the effective oscillator.
// All throw RegimeError unless eps_g > 0.
[[nodiscard]] double x_mean(const ModelParams& params, double t);
[[nodiscard]] double x_mean_beyond(const ModelParams& params, double t);
[[nodiscard]] double x_deriv_g(const ModelParams& params, double t);
/// <X^2>_t = 1 + 4 omega^2 g^2 sin^2(sqrt(eps) t / 2) / eps.
[[nodiscard]] double x2_mean(const ModelParams& params, double t);
/// (Delta X)^2 = 1 + (1/(2 eps_g) - 1) sin^2(sqrt(eps) t / 2).
[[nodiscard]] double x_variance(const ModelParams& params, double t);
/// I_g(t) in explicit form.
[[nodiscard]] double inverted_variance(const ModelParams& params, double t);
[[nodiscard]] QuadratureSample quadrature_sample(const ModelParams& params, double t);

// Beyond g_c the fluctuation quadrature of H_np^alpha follows the same forms
// with eps_g -> eps_g^alpha; the g-derivative goes through d eps_g^alpha / dg.
// All throw RegimeError unless g > g_c.
[[nodiscard]] double x_deriv_g_beyond(const ModelParams& params, double t);
[[nodiscard]] double x_variance_beyond(const ModelParams& params, double t);
[[nodiscard]] double inverted_variance_beyond(const ModelParams& params, double t);
[[nodiscard]] QuadratureSample quadrature_sample_beyond(const ModelParams& params, double t);

/// tau_n = 2 n pi / sqrt(eps), n = 1..n_max.
[[nodiscard]] std::vector<double> optimal_times(const ModelParams& params, int n_max);
/// I_g(tau_n) = n^2 pi^2 omega^2 g^2 / (2 (omega + 4 lambda)^2) eps_g^-3.
[[nodiscard]] double inverted_variance_peak(const ModelParams& params, int n);
/// I_g(tau_n) / F_g(tau_n) ~= 1 / (2 Var[P^2 - eps_g X^2]).
[[nodiscard]] double ig_fg_ratio(const BosonInitialState& state, const ModelParams& params);

}  // namespace cqm
