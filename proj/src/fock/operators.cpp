#include "cqm/fock/operators.hpp"

#include <cmath>
#include <vector>

#include "cqm/errors.hpp"

namespace cqm::fock {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseReal from_triplets(int dim, const std::vector<Triplet>& trips) {
    SparseReal m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

void require_cutoff(int n_cut) {
    if (n_cut < 4) {
        throw InvalidParams("n_cut", "must be >= 4");
    }
}

// (a + a^dag)^2 = a^2 + a^dag^2 + 2n + 1
void add_position_squared(std::vector<Triplet>& trips, int offset, int n_cut, double coeff) {
    for (int n = 0; n < n_cut; ++n) {
        trips.emplace_back(offset + n, offset + n, coeff * (2.0 * n + 1.0));
        if (n + 2 < n_cut) {
            const double el = coeff * std::sqrt((n + 1.0) * (n + 2.0));
            trips.emplace_back(offset + n, offset + n + 2, el);
            trips.emplace_back(offset + n + 2, offset + n, el);
        }
    }
}

HermitianOperator spin_boson_hamiltonian(int n_cut, double boson_freq, double Omega,
                                         double coupling, double quadratic) {
    require_cutoff(n_cut);
    const FockLayout layout{2, n_cut};
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(10 * n_cut));
    for (int spin = 0; spin < 2; ++spin) {
        const double sz = spin == 0 ? -1.0 : 1.0;
        const int off = layout.index(spin, 0);
        for (int n = 0; n < n_cut; ++n) {
            trips.emplace_back(off + n, off + n, boson_freq * n + 0.5 * Omega * sz);
        }
        if (quadratic != 0.0) {
            add_position_squared(trips, off, n_cut, quadratic);
        }
    }
    // coupling (a + a^dag) sigma_x: |down, n> <-> |up, n +- 1>
    if (coupling != 0.0) {
        for (int n = 0; n + 1 < n_cut; ++n) {
            const double el = coupling * std::sqrt(n + 1.0);
            for (int spin = 0; spin < 2; ++spin) {
                const int row = layout.index(spin, n);
                const int col = layout.index(1 - spin, n + 1);
                trips.emplace_back(row, col, el);
                trips.emplace_back(col, row, el);
            }
        }
    }
    return {layout, from_triplets(layout.dim(), trips)};
}

}  // namespace

HermitianOperator::HermitianOperator(FockLayout layout, SparseReal matrix)
    : layout_(layout), m_(std::move(matrix)) {
    if (m_.rows() != layout_.dim() || m_.cols() != layout_.dim()) {
        throw InvalidParams("matrix", "dimension does not match the Fock layout");
    }
    m_.makeCompressed();
    if (hermiticity_residual() >= 1e-12) {
        throw InvalidParams("matrix", "operator is not Hermitian");
    }
}

double HermitianOperator::hermiticity_residual() const {
    const SparseReal diff = m_ - SparseReal(m_.transpose());
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(diff, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    return worst;
}

Eigen::MatrixXcd HermitianOperator::dense() const {
    return Eigen::MatrixXd(m_).cast<std::complex<double>>();
}

Eigen::VectorXcd HermitianOperator::apply(const Eigen::VectorXcd& psi) const {
    Eigen::VectorXcd out(psi.size());
    out.real() = m_ * psi.real();
    out.imag() = m_ * psi.imag();
    return out;
}

double HermitianOperator::expectation(const Eigen::VectorXcd& psi) const {
    return psi.dot(apply(psi)).real();
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& other) {
    if (!(layout_ == other.layout_)) {
        throw InvalidParams("operator", "layouts differ");
    }
    m_ += other.m_;
    m_.makeCompressed();
    return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
    m_ *= s;
    return *this;
}

SparseReal annihilation(int n_cut) {
    require_cutoff(n_cut);
    std::vector<Triplet> trips;
    for (int n = 1; n < n_cut; ++n) {
        trips.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    }
    return from_triplets(n_cut, trips);
}

HermitianOperator number_operator(int n_cut) {
    require_cutoff(n_cut);
    std::vector<Triplet> trips;
    for (int n = 0; n < n_cut; ++n) {
        trips.emplace_back(n, n, static_cast<double>(n));
    }
    return {FockLayout{1, n_cut}, from_triplets(n_cut, trips)};
}

HermitianOperator x_quadrature(int n_cut) {
    require_cutoff(n_cut);
    std::vector<Triplet> trips;
    for (int n = 0; n + 1 < n_cut; ++n) {
        const double el = std::sqrt((n + 1.0) / 2.0);
        trips.emplace_back(n, n + 1, el);
        trips.emplace_back(n + 1, n, el);
    }
    return {FockLayout{1, n_cut}, from_triplets(n_cut, trips)};
}

HermitianOperator x_squared(int n_cut) {
    require_cutoff(n_cut);
    std::vector<Triplet> trips;
    add_position_squared(trips, 0, n_cut, 0.5);
    return {FockLayout{1, n_cut}, from_triplets(n_cut, trips)};
}

HermitianOperator p_squared(int n_cut) {
    require_cutoff(n_cut);
    // P^2 = (2n + 1 - a^2 - a^dag^2) / 2
    std::vector<Triplet> trips;
    for (int n = 0; n < n_cut; ++n) {
        trips.emplace_back(n, n, n + 0.5);
        if (n + 2 < n_cut) {
            const double el = -0.5 * std::sqrt((n + 1.0) * (n + 2.0));
            trips.emplace_back(n, n + 2, el);
            trips.emplace_back(n + 2, n, el);
        }
    }
    return {FockLayout{1, n_cut}, from_triplets(n_cut, trips)};
}

HermitianOperator on_joint_space(const HermitianOperator& boson_op) {
    if (boson_op.layout().spins != 1) {
        throw InvalidParams("operator", "expected a boson-only operator");
    }
    const int n_cut = boson_op.layout().n_cut;
    const FockLayout layout{2, n_cut};
    std::vector<Triplet> trips;
    const auto& m = boson_op.matrix();
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseReal::InnerIterator it(m, k); it; ++it) {
            for (int spin = 0; spin < 2; ++spin) {
                trips.emplace_back(layout.index(spin, static_cast<int>(it.row())),
                                   layout.index(spin, static_cast<int>(it.col())), it.value());
            }
        }
    }
    return {layout, from_triplets(layout.dim(), trips)};
}

HermitianOperator build_full_hamiltonian(const ModelParams& params, int n_cut) {
    validate(params);
    const double coupling = 0.5 * std::sqrt(params.omega * params.Omega) * params.g;
    return spin_boson_hamiltonian(n_cut, params.omega, params.Omega, coupling, params.lambda);
}

HermitianOperator build_squeezed_frame_hamiltonian(const ModelParams& params, int n_cut) {
    validate(params);
    const double omega_bar = params.omega * std::sqrt(params.stiffening());
    const double coupling = 0.5 * std::sqrt(params.omega * params.Omega) * params.g *
                            std::pow(params.stiffening(), -0.25);
    return spin_boson_hamiltonian(n_cut, omega_bar, params.Omega, coupling, 0.0);
}

HermitianOperator oscillator_hamiltonian(double omega_bar, double zeta, int n_cut) {
    require_cutoff(n_cut);
    return 0.5 * omega_bar * (p_squared(n_cut) + zeta * x_squared(n_cut));
}

double effective_stiffness(const ModelParams& params) {
    const auto osc = effective_oscillator(params);
    switch (osc.regime) {
        case Regime::Normal:
            return osc.epsilon_g;
        case Regime::Superradiant:
            return beyond_critical_frame(params).epsilon_g_alpha;
        case Regime::Critical:
            break;
    }
    throw RegimeError("effective oscillator is gapless at the critical point");
}

double effective_stiffness_dg(const ModelParams& params) {
    const auto osc = effective_oscillator(params);
    switch (osc.regime) {
        case Regime::Normal:
            return d_epsilon_g_dg(params);
        case Regime::Superradiant:
            return d_epsilon_g_alpha_dg(params);
        case Regime::Critical:
            break;
    }
    throw RegimeError("effective oscillator is gapless at the critical point");
}

HermitianOperator build_effective_hamiltonian(const ModelParams& params, int n_cut) {
    const auto osc = effective_oscillator(params);
    return oscillator_hamiltonian(osc.omega_bar, effective_stiffness(params), n_cut);
}

}  // namespace cqm::fock
