#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "cqm/closed_form.hpp"
#include "cqm/errors.hpp"
#include "cqm/fock/oracle.hpp"

using namespace cqm;
using namespace cqm::fock;

namespace {

ModelParams params(double g, double lambda, double Omega = 1000.0) {
    ModelParams p;
    p.g = g;
    p.lambda = lambda;
    p.Omega = Omega;
    return p;
}

double sup_rel(const std::vector<double>& a, const std::vector<double>& b) {
    return sup_relative_change(a, b);
}

}  // namespace

TEST_CASE("boson operators have exact matrix elements") {
    const int n = 12;
    const Eigen::MatrixXcd x = x_quadrature(n + 2).dense();
    const Eigen::MatrixXcd x2_full = x * x;
    const Eigen::MatrixXcd x2 = x_squared(n).dense();
    CHECK((x2 - x2_full.topLeftCorner(n, n)).cwiseAbs().maxCoeff() < 1e-13);
    // P^2 + X^2 = 2 n + 1
    const Eigen::MatrixXcd sum = p_squared(n).dense() + x2;
    for (int k = 0; k < n; ++k) {
        CHECK(sum(k, k).real() == doctest::Approx(2.0 * k + 1.0));
    }
    CHECK(number_operator(n).is_hermitian());
    CHECK(build_full_hamiltonian(params(0.7, 0.1, 5.0), 16).is_hermitian());
    CHECK(build_squeezed_frame_hamiltonian(params(0.7, 0.1, 5.0), 16).is_hermitian());
}

TEST_CASE("non-symmetric matrices are rejected") {
    SparseReal m(4, 4);
    m.insert(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianOperator(FockLayout{1, 4}, m), InvalidParams);
    CHECK_THROWS_AS(HermitianOperator(FockLayout{1, 5}, SparseReal(4, 4)), InvalidParams);
    CHECK_THROWS_AS((void)x_quadrature(3), InvalidParams);
}

TEST_CASE("block spectrum agrees with a dense eigensolver") {
    for (const auto& h : {build_squeezed_frame_hamiltonian(params(0.8, -0.1, 7.0), 40),
                          build_full_hamiltonian(params(0.8, -0.1, 7.0), 40),
                          oscillator_hamiltonian(0.9, 0.3, 60)}) {
        const Spectrum spectrum(h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(Eigen::MatrixXd(h.matrix()));
        const Eigen::VectorXd ours = spectrum.eigenvalues();
        CHECK((ours - dense.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK(Spectrum(oscillator_hamiltonian(1.0, 0.5, 40)).blocks().size() == 2);
    CHECK(Spectrum(build_squeezed_frame_hamiltonian(params(0.5, 0.0), 40)).blocks().size() == 2);
}

TEST_CASE("lab and squeezed frames share the low-lying spectrum") {
    const auto p = params(0.5, 0.05, 5.0);
    const auto lab = Spectrum(build_full_hamiltonian(p, 200)).eigenvalues();
    const auto squeezed = Spectrum(build_squeezed_frame_hamiltonian(p, 200)).eigenvalues();
    // H_r drops the constant (omega_bar - omega) / 2 produced by the squeeze
    const double shift = (effective_oscillator(p).omega_bar - p.omega) / 2.0;
    for (int k = 0; k < 6; ++k) {
        CHECK(lab(k) - shift == doctest::Approx(squeezed(k)).epsilon(1e-9));
    }
}

TEST_CASE("effective oscillator levels and ground-state spread") {
    const auto p = params(0.9, 0.0);
    const auto h = build_effective_hamiltonian(p, 200);
    const Spectrum spectrum(h);
    const auto e = spectrum.eigenvalues();
    const double gap = std::sqrt(effective_oscillator(p).epsilon) / 2.0;
    for (int k = 0; k < 5; ++k) {
        CHECK(e(k) == doctest::Approx(gap * (k + 0.5)).epsilon(1e-10));
    }
    // ground state lives in the even block; <X^2> = 1 / (2 sqrt(eps_g))
    const Spectrum::Block* even = nullptr;
    for (const auto& b : spectrum.blocks()) {
        if (std::find(b.indices.begin(), b.indices.end(), 0) != b.indices.end()) {
            even = &b;
        }
    }
    REQUIRE(even != nullptr);
    Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(200);
    for (std::size_t i = 0; i < even->indices.size(); ++i) {
        ground(even->indices[i]) = even->vectors(static_cast<Eigen::Index>(i), 0);
    }
    const JointState gs(FockLayout{1, 200}, ground);
    CHECK(gs.expectation(x_squared(200)) == doctest::Approx(0.5 / std::sqrt(0.19)).epsilon(1e-10));
}

TEST_CASE("evolution basics") {
    const auto phi = BosonInitialState::superposition_01();
    const auto psi0 = JointState::boson(phi, 64);
    const auto h = build_effective_hamiltonian(params(0.9, 0.0), 64);
    const auto same = evolve(h, psi0, 0.0);
    CHECK((same.amplitudes() - psi0.amplitudes()).norm() < 1e-13);

    const auto diag = number_operator(16);
    const auto basis = JointState::boson(BosonInitialState::fock(3, 5), 16);
    const auto out = evolve(diag, basis, 2.5);
    CHECK(std::abs(out.amplitudes()(3)) == doctest::Approx(1.0));
    CHECK(std::arg(out.amplitudes()(3)) == doctest::Approx(std::remainder(-3 * 2.5, 2 * std::numbers::pi)));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> td(0.0, 200.0);
    for (int i = 0; i < 20; ++i) {
        CHECK(evolve(h, psi0, td(rng)).norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("truncation leak is reported") {
    const auto phi = BosonInitialState::superposition_01();
    const auto p = params(0.0995, -0.2475);  // eps_g ~ 0.0099: strongly squeezed at late times
    CHECK_THROWS_AS((void)evolve(build_effective_hamiltonian(p, 32), JointState::boson(phi, 32), 1500.0),
                    TruncationLeak);
}

TEST_CASE("cutoff convergence and step halving helpers") {
    int calls = 0;
    const auto conv = converge_cutoff([&](int n) -> Observables {
        ++calls;
        return {{1.0 + 1.0 / (double(n) * n * n)}};
    });
    CHECK(conv.last_change < 1e-6);
    CHECK(conv.n_cut >= 128);

    CutoffPolicy small;
    small.max = 64;
    CHECK_THROWS_AS((void)converge_cutoff([](int n) -> Observables { return {{double(n)}}; }, small),
                    CutoffTooSmall);

    const auto d = centered_derivative([](double x) { return std::vector<double>{std::sin(x), x * x}; }, 0.3, 1e-3);
    CHECK(d.value[0] == doctest::Approx(std::cos(0.3)).epsilon(1e-12));
    CHECK(d.value[1] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK_THROWS_AS((void)centered_derivative([](double x) { return std::vector<double>{std::sin(1e4 * x)}; }, 0.3, 1e-2),
                    StepTooLarge);
}

TEST_CASE("effective-model evolution reproduces the closed forms") {
    const auto p = params(0.9, 0.0);
    const double tau = optimal_times(p, 1).front();
    std::vector<double> ts;
    for (int i = 0; i <= 40; ++i) {
        ts.push_back(2 * tau * i / 40.0);
    }
    const auto s = quadrature_series(Frame::effective, p, BosonInitialState::superposition_01(), ts);
    std::vector<double> xm, var, iv;
    for (double t : ts) {
        xm.push_back(x_mean(p, t));
        var.push_back(x_variance(p, t));
        iv.push_back(inverted_variance(p, t));
    }
    CHECK(sup_rel(s.x_mean, xm) < 1e-8);
    CHECK(sup_rel(s.x_var, var) < 1e-8);
    CHECK(sup_rel(s.inv_var, iv) < 1e-6);
    CHECK_THROWS_AS((void)quadrature_series(Frame::lab, p, BosonInitialState::superposition_01(), ts),
                    InvalidParams);
}

TEST_CASE("beyond-critical effective evolution reproduces its closed forms") {
    const auto p = params(1.3, 0.0);
    std::vector<double> ts = {0.5, 2.0, 5.0, 9.0};
    const auto s = quadrature_series(Frame::effective, p, BosonInitialState::superposition_01(), ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto q = quadrature_sample_beyond(p, ts[i]);
        CHECK(s.x_mean[i] == doctest::Approx(q.x_mean).epsilon(1e-7));
        CHECK(s.x_var[i] == doctest::Approx(q.x_var).epsilon(1e-7));
        CHECK(s.x_deriv_g[i] == doctest::Approx(q.x_deriv_g).epsilon(1e-6));
    }
}

TEST_CASE("generator QFI against independent numpy values") {
    const auto psi0 = JointState::boson(BosonInitialState::superposition_01(), 256);
    const auto p = params(0.9, 0.0);
    // numpy eigh, 400 levels
    CHECK(generator_qfi(p, 5.0, psi0) == doctest::Approx(939.2767161679674).epsilon(1e-8));
    CHECK(generator_qfi(p, 10.0, psi0) == doctest::Approx(1952.8406551406376).epsilon(1e-8));
    CHECK(generator_qfi(p, 20.0, psi0) == doctest::Approx(10352.637517900295).epsilon(1e-8));
    CHECK(generator_qfi(p, 0.0, psi0) == 0.0);
    CHECK_THROWS_AS((void)generator_qfi(p, 1.0, JointState::spin_down(BosonInitialState::superposition_01(), 32)),
                    InvalidParams);
}

TEST_CASE("overlap QFI agrees with the generator QFI") {
    const auto p = params(0.9, 0.0);
    const auto psi0 = JointState::boson(BosonInitialState::superposition_01(), 256);
    CHECK(qfi_overlap(p, 0.0, psi0, 1e-4) == 0.0);
    for (double t : {1.0, 4.0, 9.0, 15.0, 20.0}) {
        const double gen = generator_qfi(p, t, psi0);
        const double a = qfi_overlap(p, t, psi0, 1e-4);
        const double b = qfi_overlap(p, t, psi0, 5e-5);
        CHECK(a == doctest::Approx(gen).epsilon(1e-4));
        CHECK(a == doctest::Approx(b).epsilon(1e-3));
    }
    CHECK_THROWS_AS((void)qfi_overlap(p, 20.0, psi0, 0.05), StepTooLarge);
    CHECK_THROWS_AS((void)qfi_overlap(p, 20.0, psi0, 0.0), InvalidParams);
}

TEST_CASE("overlap QFI of the spin-boson model approaches the effective model") {
    const auto phi = BosonInitialState::superposition_01();
    const auto p = params(0.5, 0.0, 1e4);
    const double eff = qfi_overlap(p, 3.0, JointState::boson(phi, 64), 1e-4);
    const double full = qfi_overlap(p, 3.0, JointState::spin_down(phi, 64), 1e-4);
    CHECK(full == doctest::Approx(eff).epsilon(1e-2));
}

TEST_CASE("reciprocal relation holds on the interior block") {
    for (const auto& p : {params(0.9, 0.0), params(0.0, 0.0), params(0.1, -0.2), params(0.3, 0.4)}) {
        const auto r = verify_reciprocal_relation(p, 60);
        CHECK(r.interior < 1e-9);
        CHECK(r.full >= r.interior);
    }
    CHECK_THROWS_AS((void)verify_reciprocal_relation(params(1.2, 0.0), 60), RegimeError);
}

TEST_CASE("finite-frequency discrepancy against an independent dense evolution") {
    // numpy eigh on the squeezed-frame spin-boson model, 128 levels per spin
    const auto a = finite_frequency_discrepancy(params(0.9, 0.0), 100.0, 1);
    CHECK(a.delta == doctest::Approx(-0.6915349163248342).epsilon(1e-6));
    const auto b = finite_frequency_discrepancy(params(0.9, 0.0), 1000.0, 1);
    CHECK(b.delta == doctest::Approx(-0.12294322371395824).epsilon(1e-6));
    const auto c = finite_frequency_discrepancy(params(0.1, -0.247), 100.0, 1);
    CHECK(c.delta == doctest::Approx(-0.17950009887621243).epsilon(1e-6));
    CHECK(std::abs(b.delta) < std::abs(a.delta));
    CHECK(std::abs(c.delta) < std::abs(a.delta));
    CHECK_THROWS_AS((void)finite_frequency_discrepancy(params(0.9, 0.0), 5.0, 1), InvalidParams);
}

TEST_CASE("joint state checks") {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v(0) = 2.0;
    CHECK_THROWS_AS(JointState(FockLayout{1, 8}, v), InvalidParams);
    v(0) = 0.0;
    v(7) = 1.0;
    const JointState top(FockLayout{1, 8}, v);
    CHECK(top.tail_mass() == doctest::Approx(1.0));
    const auto down = JointState::spin_down(BosonInitialState::superposition_01(), 10);
    CHECK(down.layout().dim() == 20);
    CHECK(down.tail_mass() == 0.0);
}
