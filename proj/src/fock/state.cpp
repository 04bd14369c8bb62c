#include "cqm/fock/state.hpp"

#include <cmath>

#include "cqm/errors.hpp"

namespace cqm::fock {

JointState::JointState(FockLayout layout, Eigen::VectorXcd amplitudes)
    : layout_(layout), amps_(std::move(amplitudes)) {
    if (amps_.size() != layout_.dim()) {
        throw InvalidParams("amplitudes", "length does not match the Fock layout");
    }
    if (std::abs(amps_.norm() - 1.0) > 1e-10) {
        throw InvalidParams("amplitudes", "state is not normalized");
    }
}

JointState JointState::boson(const BosonInitialState& phi, int n_cut) {
    return {FockLayout{1, n_cut}, phi.padded(n_cut)};
}

JointState JointState::spin_down(const BosonInitialState& phi, int n_cut) {
    const FockLayout layout{2, n_cut};
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(layout.dim());
    v.head(n_cut) = phi.padded(n_cut);
    return {layout, std::move(v)};
}

double JointState::tail_mass(double fraction) const {
    const int width = std::max(1, static_cast<int>(std::ceil(fraction * layout_.n_cut)));
    double mass = 0.0;
    for (int spin = 0; spin < layout_.spins; ++spin) {
        mass += amps_.segment(layout_.index(spin, layout_.n_cut - width), width).squaredNorm();
    }
    return mass;
}

double JointState::expectation(const HermitianOperator& op) const {
    if (!(op.layout() == layout_)) {
        throw InvalidParams("operator", "layout does not match the state");
    }
    return op.expectation(amps_);
}

std::complex<double> JointState::overlap(const JointState& other) const {
    if (!(other.layout_ == layout_)) {
        throw InvalidParams("state", "layouts differ");
    }
    return amps_.dot(other.amps_);
}

}  // namespace cqm::fock
