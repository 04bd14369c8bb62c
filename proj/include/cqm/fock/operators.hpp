#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cqm/model.hpp"

namespace cqm::fock {

/// Index layout of a (spin x) Fock space. Amplitude index = spin * n_cut + n,
/// with spin 0 = down, 1 = up. A boson-only space has spins == 1.
struct FockLayout {
    int spins = 1;
    int n_cut = 0;

    [[nodiscard]] int dim() const noexcept { return spins * n_cut; }
    [[nodiscard]] int index(int spin, int n) const noexcept { return spin * n_cut + n; }
    [[nodiscard]] int fock_of(int index) const noexcept { return index % n_cut; }
    bool operator==(const FockLayout&) const = default;
};

using SparseReal = Eigen::SparseMatrix<double>;

/// Hermitian operator stored as a real symmetric sparse matrix. Every
/// Hamiltonian and observable this oracle needs (H, H_r, H_np, X, X^2, P^2)
/// is real in the Fock basis.
class HermitianOperator {
public:
    /// Throws InvalidParams if the matrix is not square with the layout's
    /// dimension, or not symmetric within 1e-12.
    HermitianOperator(FockLayout layout, SparseReal matrix);

    [[nodiscard]] const FockLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] int dim() const noexcept { return layout_.dim(); }
    [[nodiscard]] const SparseReal& matrix() const noexcept { return m_; }
    /// max |H - H^dag| entry.
    [[nodiscard]] double hermiticity_residual() const;
    [[nodiscard]] bool is_hermitian() const { return hermiticity_residual() < 1e-12; }
    [[nodiscard]] Eigen::MatrixXcd dense() const;

    [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;
    [[nodiscard]] double expectation(const Eigen::VectorXcd& psi) const;

    HermitianOperator& operator+=(const HermitianOperator& other);
    HermitianOperator& operator*=(double s);
    friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) {
        return a += b;
    }
    friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }

private:
    FockLayout layout_;
    SparseReal m_;
};

// Boson operators on |0>..|n_cut-1>, with exact matrix elements of the
// untruncated operators (products are never formed in the truncated space).
[[nodiscard]] SparseReal annihilation(int n_cut);
[[nodiscard]] HermitianOperator number_operator(int n_cut);
[[nodiscard]] HermitianOperator x_quadrature(int n_cut);
[[nodiscard]] HermitianOperator x_squared(int n_cut);
[[nodiscard]] HermitianOperator p_squared(int n_cut);

/// Lifts a boson operator to spin x boson as identity on the spin.
[[nodiscard]] HermitianOperator on_joint_space(const HermitianOperator& boson_op);

/// Lab-frame H = omega a^dag a + Omega/2 sz + sqrt(omega Omega)/2 g (a + a^dag) sx
///             + lambda (a + a^dag)^2.
[[nodiscard]] HermitianOperator build_full_hamiltonian(const ModelParams& params, int n_cut);

/// Squeezed-frame H_r = omega_bar a^dag a + Omega/2 sz
///                      + sqrt(omega Omega)/2 g (1 + 4 lambda/omega)^(-1/4) (a + a^dag) sx.
/// Unitarily equivalent to the lab frame up to the constant (omega_bar - omega) / 2;
/// the effective oscillator lives here.
[[nodiscard]] HermitianOperator build_squeezed_frame_hamiltonian(const ModelParams& params,
                                                                 int n_cut);

/// (omega_bar / 2)(P^2 + zeta X^2).
[[nodiscard]] HermitianOperator oscillator_hamiltonian(double omega_bar, double zeta, int n_cut);

/// H_np with eps_g below g_c, or H_np^alpha with eps_g^alpha above.
/// Throws RegimeError at the critical point.
[[nodiscard]] HermitianOperator build_effective_hamiltonian(const ModelParams& params, int n_cut);

/// Stiffness of the effective oscillator for the current regime (eps_g or eps_g^alpha).
[[nodiscard]] double effective_stiffness(const ModelParams& params);
/// d(stiffness)/dg for the current regime.
[[nodiscard]] double effective_stiffness_dg(const ModelParams& params);

}  // namespace cqm::fock
