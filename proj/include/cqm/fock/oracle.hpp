#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cqm/closed_form.hpp"
#include "cqm/fock/operators.hpp"
#include "cqm/fock/spectrum.hpp"
#include "cqm/fock/state.hpp"
#include "cqm/model.hpp"

namespace cqm::fock {

/// Which Hamiltonian drives the dynamics.
enum class Frame {
    effective,  ///< boson-only H_np (or H_np^alpha beyond g_c)
    squeezed,   ///< spin x boson H_r, where the effective-theory X lives
    lab,        ///< spin x boson H with the explicit lambda (a + a^dag)^2 term
};

[[nodiscard]] HermitianOperator build_hamiltonian(Frame frame, const ModelParams& params,
                                                  int n_cut);

/// X and X^2 on the given layout (lifted onto the spin when spins == 2).
[[nodiscard]] HermitianOperator position_operator(const FockLayout& layout);
[[nodiscard]] HermitianOperator position_squared_operator(const FockLayout& layout);

struct EvolveOptions {
    double leak_threshold = 1e-8;  ///< max tail mass in the top 10% of Fock levels
};

/// exp(-i H t) psi0. Throws TruncationLeak when the evolved tail mass exceeds the threshold.
[[nodiscard]] JointState evolve(const HermitianOperator& h, const JointState& psi0, double t,
                                const EvolveOptions& options = {});
[[nodiscard]] JointState evolve(const Spectrum& spectrum, const JointState& psi0, double t,
                                const EvolveOptions& options = {});

struct CutoffPolicy {
    int start = 32;
    int max = 8192;
    double tolerance = 1e-6;  ///< sup-norm relative change allowed on doubling
};

/// Groups of observables; each group is compared by sup-norm relative change.
using Observables = std::vector<std::vector<double>>;

struct ConvergedObservables {
    int n_cut = 0;          ///< cutoff the returned values were computed at
    Observables values;
    double last_change = 0.0;  ///< relative change against n_cut / 2
};

/// Doubles n_cut from policy.start until two consecutive cutoffs agree.
/// TruncationLeak at a cutoff counts as "not converged yet". scale_floors[k]
/// bounds the relative-change denominator of group k from below, for groups
/// whose exact values can all vanish.
[[nodiscard]] ConvergedObservables converge_cutoff(const std::function<Observables(int)>& evaluate,
                                                   const CutoffPolicy& policy = {},
                                                   std::span<const double> scale_floors = {});

/// max_i |a_i - b_i| / max(max_i |b_i|, scale_floor) (0 when both vanish).
[[nodiscard]] double sup_relative_change(std::span<const double> a, std::span<const double> b,
                                         double scale_floor = 0.0);

/// Default finite-difference step in g.
[[nodiscard]] inline double derivative_step(double g) { return 1e-5 * std::max(g, 0.01); }

struct SeriesDerivative {
    std::vector<double> value;  ///< Richardson-extrapolated centered difference
    double halving_gap = 0.0;   ///< sup-relative gap between steps h and h/2
};

/// Centered difference of a vector-valued f at x with steps h and h/2.
/// Throws StepTooLarge when the two steps disagree by more than max_gap.
[[nodiscard]] SeriesDerivative centered_derivative(
    const std::function<std::vector<double>(double)>& f, double x, double h,
    double max_gap = 1e-3);

struct QuadratureSeries {
    std::vector<double> t;
    std::vector<double> x_mean;
    std::vector<double> x2_mean;
    std::vector<double> x_var;
    std::vector<double> x_deriv_g;
    std::vector<double> inv_var;
    int n_cut = 0;
};

/// <X>_t, <X^2>_t, d<X>_t/dg and I_g(t) from exact evolution, with automatic cutoff.
/// frame must be effective (boson state phi) or squeezed (state |down> (x) phi).
[[nodiscard]] QuadratureSeries quadrature_series(Frame frame, const ModelParams& params,
                                                 const BosonInitialState& phi,
                                                 std::span<const double> times,
                                                 const CutoffPolicy& policy = {});

/// F ~= 8 (1 - |<psi_{g-dg/2}(t)|psi_{g+dg/2}(t)>|) / dg^2 at the cutoff of psi0.
/// Frame defaults to effective for boson-only states, squeezed otherwise.
/// Throws StepTooLarge if the overlap deficit exceeds 1e-2.
[[nodiscard]] double qfi_overlap(const ModelParams& params, double t, const JointState& psi0,
                                 double dg);
[[nodiscard]] double qfi_overlap(const ModelParams& params, double t, const JointState& psi0,
                                 double dg, Frame frame);

/// F_g = (d zeta/dg)^2 4 Var[h_zeta] with h_zeta = int_0^t e^{iHs} H_1 e^{-iHs} ds for
/// H = (omega_bar/2)(P^2 + zeta X^2), H_1 = (omega_bar/2) X^2, zeta the effective stiffness.
/// psi0 must be boson-only.
[[nodiscard]] double generator_qfi(const ModelParams& params, double t, const JointState& psi0);
[[nodiscard]] std::vector<double> generator_qfi_series(const ModelParams& params,
                                                       std::span<const double> times,
                                                       const JointState& psi0);

struct ConvergedSeries {
    std::vector<double> values;
    int n_cut = 0;
};
[[nodiscard]] ConvergedSeries generator_qfi_converged(const ModelParams& params,
                                                      std::span<const double> times,
                                                      const BosonInitialState& phi,
                                                      const CutoffPolicy& policy = {});

struct ReciprocalResidual {
    double interior = 0.0;  ///< max |[H, Lambda] - sqrt(eps) Lambda| over the lowest 80% of levels
    double full = 0.0;      ///< same over the whole truncated space (boundary-corrupted)
};

/// Checks [H_zeta, Lambda] = sqrt(eps) Lambda with Lambda = i sqrt(eps) M - N,
/// M = -i[H_0, H_1], N = -[H_zeta, [H_0, H_1]]. Normal regime only.
[[nodiscard]] ReciprocalResidual verify_reciprocal_relation(const ModelParams& params, int n_cut);

struct FiniteFrequencyResult {
    double eta = 0.0;
    int n = 0;
    double tau = 0.0;
    double inv_var_full = 0.0;    ///< I_g^omega(tau_n) from the spin x boson model
    double inv_var_closed = 0.0;  ///< low-frequency-limit peak
    double delta = 0.0;           ///< (I_full - I_closed) / I_closed
    double x_mean = 0.0;
    double x_var = 0.0;
    double x_deriv_g = 0.0;
    int n_cut = 0;
};

/// Evolves |down> (x) (|0> + i|1>)/sqrt(2) under H_r with Omega = eta omega and
/// compares I_g at the closed-form tau_n against the closed-form peak. eta >= 10.
[[nodiscard]] FiniteFrequencyResult finite_frequency_discrepancy(
    const ModelParams& params, double eta, int n, const CutoffPolicy& policy = {});

}  // namespace cqm::fock
