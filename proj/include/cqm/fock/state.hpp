#pragma once

#include <Eigen/Core>

#include "cqm/closed_form.hpp"
#include "cqm/fock/operators.hpp"

namespace cqm::fock {

/// Amplitudes over a (spin x) truncated Fock space.
class JointState {
public:
    /// Throws InvalidParams on a size mismatch or a norm off by more than 1e-10.
    JointState(FockLayout layout, Eigen::VectorXcd amplitudes);

    /// Boson-only state (layout spins == 1) for the effective model.
    static JointState boson(const BosonInitialState& phi, int n_cut);
    /// |down> (x) phi in the spin x boson space.
    static JointState spin_down(const BosonInitialState& phi, int n_cut);

    [[nodiscard]] const FockLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] int n_cut() const noexcept { return layout_.n_cut; }
    [[nodiscard]] const Eigen::VectorXcd& amplitudes() const noexcept { return amps_; }
    [[nodiscard]] double norm() const { return amps_.norm(); }

    /// Probability in the top `fraction` of Fock indices (every spin sector).
    [[nodiscard]] double tail_mass(double fraction = 0.1) const;

    [[nodiscard]] double expectation(const HermitianOperator& op) const;
    [[nodiscard]] std::complex<double> overlap(const JointState& other) const;

private:
    FockLayout layout_;
    Eigen::VectorXcd amps_;
};

}  // namespace cqm::fock
